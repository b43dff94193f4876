//! Wall time and distance evaluations of salient clustering as the number
//! of sets grows.
//!
//! Run with `cargo run --release --example scaling`.

use clusterface::config::PipelineConfig;
use clusterface::eval::{scaling_bench, SyntheticSpec};

fn main() -> clusterface::error::Result<()> {
    let report = scaling_bench(&[250, 500, 1000, 2000], &SyntheticSpec::default(), &PipelineConfig::default())?;
    println!("{:>6} {:>14} {:>10}", "s", "evaluations", "seconds");
    for r in &report.rows {
        println!("{:>6} {:>14} {:>10.4}", r.s, r.distance_evaluations, r.wall_time_secs);
    }
    println!("log-log slope of time: {:.2}", report.time_slope);
    Ok(())
}
