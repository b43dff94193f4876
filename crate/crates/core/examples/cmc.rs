//! Cumulative match characteristic for both identifiers.
//!
//! Run with `cargo run --release --example cmc`.

use clusterface::config::PipelineConfig;
use clusterface::eval::{cmc_curve, generate_synthetic, AbsentMate, Method, SyntheticSpec};
use clusterface::space::FaceSpace;

fn main() -> clusterface::error::Result<()> {
    let spec = SyntheticSpec {
        identities: 15,
        within_noise: 0.4,
        condition_split: 0.3,
        bridge_count: 1,
        seed: 11,
        ..SyntheticSpec::default()
    };
    let space = FaceSpace::new(generate_synthetic(&spec)?.sets)?;
    let per = spec.sets_per_identity_total();
    let ids: Vec<&str> = space.sets().iter().map(|s| s.set_id()).collect();
    let gallery: Vec<&str> = ids.iter().step_by(per).copied().collect();
    let probes: Vec<&str> = ids.iter().copied().filter(|id| !gallery.contains(id)).collect();

    let config = PipelineConfig::new(0.8, 0.2, 10, 0)?;
    for method in [Method::Direct, Method::ClusterFace] {
        let cmc = cmc_curve(&space, &probes, &gallery, method, &config, 10, AbsentMate::Exclude)?;
        let acc: Vec<String> = [1, 5, 10].iter().map(|&r| format!("{:.3}", cmc[r - 1].accuracy)).collect();
        println!("{method:?}: rank-1/5/10 = {}", acc.join(" / "));
    }
    Ok(())
}
