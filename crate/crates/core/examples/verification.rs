//! Constrained verification against the direct-distance baseline.
//!
//! Run with `cargo run --example verification`.

use clusterface::classify::{verify_clusterface, verify_direct};
use clusterface::clustering::run_salient_clustering;
use clusterface::config::PipelineConfig;
use clusterface::constraints::{label_clusters, space_labels, ConstraintMatrices};
use clusterface::embedding::FaceSet;
use clusterface::space::FaceSpace;

fn point(id: &str, deg: f64) -> FaceSet {
    let r = deg.to_radians();
    FaceSet::single(id, None, vec![r.cos(), r.sin()]).expect("unit circle point")
}

fn main() -> clusterface::error::Result<()> {
    // A chain of small steps: the ends are far apart, every link is short.
    let angles = [("p0", 0.0), ("p1", 7.0), ("p2", 15.0), ("p3", 22.0), ("p4", 31.0), ("p5", 70.0)];
    let space = FaceSpace::new(angles.iter().map(|&(id, deg)| point(id, deg)).collect())?;
    let config = PipelineConfig::new(0.1, 0.03, 3, 0)?;

    let result = run_salient_clustering(&space, &config)?;
    let matrices = ConstraintMatrices::build(&space, &result, label_clusters(&result, &space_labels(&space)), &config)?;

    for c in &result.clusters {
        println!("cluster {}: {:?}", c.cluster_index, c.member_set_ids);
    }
    for (i, j) in [("p0", "p1"), ("p0", "p4"), ("p3", "p5")] {
        let direct = verify_direct(&space, i, j, config.beta)?;
        let constrained = verify_clusterface(&space, i, j, &matrices, &result, &config)?;
        println!(
            "{i}-{j}: distance {:.3}  direct {}  clusterface {} ({})",
            space.distance(space.index_of(i)?, space.index_of(j)?),
            direct.same_identity,
            constrained.same_identity,
            constrained.rule_fired,
        );
    }
    Ok(())
}
