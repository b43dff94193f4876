//! TAR@FAR of both verifiers on the cross-condition chain scenario.
//!
//! Run with `cargo run --release --example chain_scenario [seed]`.

use clusterface::eval::{all_pairs, default_beta_grid, generate_synthetic, tar_far_curve, GammaPolicy, Method, SyntheticSpec};
use clusterface::space::FaceSpace;

fn main() -> clusterface::error::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let space = FaceSpace::new(generate_synthetic(&SyntheticSpec::chain_scenario(seed))?.sets)?;
    let pairs = all_pairs(&space);
    let grid = default_beta_grid();

    println!("seed {seed}: {} sets, {} pairs", space.len(), pairs.len());
    println!("{:<12} {:>10} {:>10} {:>10}", "method", "FAR=0.001", "FAR=0.01", "FAR=0.1");
    for method in [Method::Direct, Method::ClusterFace] {
        let curve = tar_far_curve(&space, &pairs, method, &grid, GammaPolicy::default(), 5)?;
        let row: Vec<String> = curve.tar_at_far.iter().map(|p| format!("{:>10.4}", p.tar)).collect();
        println!("{:<12} {}", format!("{method:?}"), row.join(" "));
    }
    Ok(())
}
