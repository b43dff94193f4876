//! Re-ranking a probe's nearest neighbours with the constraints.
//!
//! Run with `cargo run --example rank_order_search`.

use clusterface::classify::rank_order_search;
use clusterface::clustering::run_salient_clustering;
use clusterface::config::PipelineConfig;
use clusterface::constraints::{knn, label_clusters, space_labels, ConstraintMatrices};
use clusterface::embedding::FaceSet;
use clusterface::space::FaceSpace;

fn point(id: &str, deg: f64) -> FaceSet {
    let r = deg.to_radians();
    FaceSet::single(id, None, vec![r.cos(), r.sin()]).expect("unit circle point")
}

fn main() -> clusterface::error::Result<()> {
    let space = FaceSpace::new(vec![
        point("probe", 0.0),
        point("same-1", 3.0),
        point("same-2", 9.0),
        point("same-3", 15.0),
        point("other-1", -12.0),
        point("other-2", -17.0),
    ])?;
    // `other-1` is closer to the probe than `same-3`, but only `same-3`
    // shares the probe's salient cluster.
    let config = PipelineConfig::new(0.1, 0.08, 5, 0)?;
    let result = run_salient_clustering(&space, &config)?;
    let matrices = ConstraintMatrices::build(&space, &result, label_clusters(&result, &space_labels(&space)), &config)?;

    let universe: Vec<&str> = space.sets().iter().map(|s| s.set_id()).collect();
    let nn: Vec<String> = knn(&space, "probe", &universe, config.k, config.beta)?
        .into_iter()
        .map(|n| n.set_id)
        .collect();
    println!("by distance:    {nn:?}");
    let ranked = rank_order_search(&space, "probe", &nn, &matrices)?;
    println!("by constraints: {:?}", ranked.ranked);
    Ok(())
}
