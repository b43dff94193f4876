//! Rank-1 identification of probes against an enrolled gallery.
//!
//! Run with `cargo run --release --example identification`.

use clusterface::classify::{identify_direct, identify_rank1};
use clusterface::clustering::run_salient_clustering;
use clusterface::config::PipelineConfig;
use clusterface::constraints::{label_clusters, space_labels, ConstraintMatrices};
use clusterface::eval::{generate_synthetic, SyntheticSpec};
use clusterface::space::FaceSpace;

fn main() -> clusterface::error::Result<()> {
    let spec = SyntheticSpec {
        identities: 8,
        within_noise: 0.3,
        seed: 3,
        ..SyntheticSpec::default()
    };
    let space = FaceSpace::new(generate_synthetic(&spec)?.sets)?;
    let config = PipelineConfig::default();

    // Enrol the first set of each identity; everything else is a probe.
    let per = spec.sets_per_identity_total();
    let ids: Vec<&str> = space.sets().iter().map(|s| s.set_id()).collect();
    let gallery: Vec<&str> = ids.iter().step_by(per).copied().collect();
    let probes: Vec<&str> = ids.iter().copied().filter(|id| !gallery.contains(id)).collect();

    let result = run_salient_clustering(&space, &config)?;
    let matrices = ConstraintMatrices::build(&space, &result, label_clusters(&result, &space_labels(&space)), &config)?;

    let (mut hit_c, mut hit_d) = (0, 0);
    for p in &probes {
        let truth = space.get(p)?.label();
        let c = identify_rank1(&space, p, &gallery, &matrices, &config)?;
        let d = identify_direct(&space, p, &gallery)?;
        hit_c += usize::from(c.as_deref() == truth);
        hit_d += usize::from(d.as_deref() == truth);
    }
    println!("{} probes, {} gallery sets", probes.len(), gallery.len());
    println!("rank-1 clusterface: {hit_c}/{}", probes.len());
    println!("rank-1 direct:      {hit_d}/{}", probes.len());
    Ok(())
}
