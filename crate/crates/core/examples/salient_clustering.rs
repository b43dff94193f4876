//! Salient clustering: merge only the pairs that are confidently the same
//! identity, stopping at `beta - gamma`.
//!
//! Run with `cargo run --example salient_clustering`.

use clusterface::clustering::{run_salient_clustering, verify_termination};
use clusterface::config::PipelineConfig;
use clusterface::embedding::FaceSet;
use clusterface::space::FaceSpace;

fn point(id: &str, deg: f64) -> FaceSet {
    let r = deg.to_radians();
    FaceSet::single(id, None, vec![r.cos(), r.sin()]).expect("unit circle point")
}

fn main() -> clusterface::error::Result<()> {
    // Two tight groups on the unit circle and one loner.
    let space = FaceSpace::new(vec![
        point("a", 0.0),
        point("b", 5.0),
        point("c", 12.0),
        point("d", 90.0),
        point("e", 96.0),
        point("f", 200.0),
    ])?;
    let config = PipelineConfig::new(0.2, 0.1, 3, 0)?;
    let result = run_salient_clustering(&space, &config)?;

    println!("termination distance {:.3}", result.termination_distance());
    for m in &result.merge_log {
        println!(
            "merge {}: {} + {} at {:.5} -> {}",
            m.iteration, m.left, m.right, m.distance, m.result
        );
    }
    for c in &result.clusters {
        println!("cluster {}: {:?}", c.cluster_index, c.member_set_ids);
    }
    println!("distance evaluations: {}", result.count_distance_evaluations());
    assert!(verify_termination(&result));
    Ok(())
}
