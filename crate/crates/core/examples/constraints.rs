//! Must-Associate and Neighbourhood-Associate constraints derived from a
//! salient clustering.
//!
//! Run with `cargo run --example constraints`.

use clusterface::clustering::run_salient_clustering;
use clusterface::config::PipelineConfig;
use clusterface::constraints::{label_clusters, neighborhood_vote, space_labels, ConstraintMatrices};
use clusterface::embedding::FaceSet;
use clusterface::space::FaceSpace;

fn point(id: &str, label: &str, deg: f64) -> FaceSet {
    let r = deg.to_radians();
    FaceSet::single(id, Some(label.into()), vec![r.cos(), r.sin()]).expect("unit circle point")
}

fn main() -> clusterface::error::Result<()> {
    // "q" sits just outside the salient band of the left group but inside
    // its verification threshold, so it gets an NA link rather than MA.
    let space = FaceSpace::new(vec![
        point("a0", "ann", 0.0),
        point("a1", "ann", 4.0),
        point("a2", "ann", 8.0),
        point("q", "ann", 30.0),
        point("b0", "bob", 120.0),
        point("b1", "bob", 124.0),
    ])?;
    let config = PipelineConfig::new(0.3, 0.2, 3, 0)?;
    let result = run_salient_clustering(&space, &config)?;
    let labels = label_clusters(&result, &space_labels(&space));
    for l in &labels {
        println!("cluster {} is labelled {}", l.cluster_index, l.label);
    }

    let vote = neighborhood_vote(&space, "q", &result, config.k, config.beta)?;
    println!("q's neighbours vote for cluster {vote:?}");

    let m = ConstraintMatrices::build(&space, &result, labels, &config)?;
    for (i, j, kind, label) in m.rows() {
        println!("{:<2} {i:>3} -> {j:<3} via {label}", kind.as_str());
    }
    assert!(m.ma(&space, "a0", "a2")?.is_some());
    assert!(m.na(&space, "a0", "q")?.is_some());
    Ok(())
}
