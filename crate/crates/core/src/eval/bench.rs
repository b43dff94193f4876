//! Runtime scaling of salient clustering with the number of sets.

use std::time::Instant;

use serde::Serialize;

use crate::clustering::run_salient_clustering;
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::eval::synth::{generate_synthetic, SyntheticSpec};
use crate::space::FaceSpace;

const REPEATS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub s: usize,
    pub distance_evaluations: u64,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln(wall time)` against `ln(s)`.
    pub time_slope: f64,
}

/// Ordinary least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Exactly `s` sets drawn from `template`, identities added as needed.
pub fn scaled_space(template: &SyntheticSpec, s: usize) -> Result<FaceSpace> {
    let per_identity = template.sets_per_identity_total();
    let spec = SyntheticSpec {
        identities: s.div_ceil(per_identity),
        ..template.clone()
    };
    let mut sets = generate_synthetic(&spec)?.sets;
    sets.truncate(s);
    FaceSpace::new(sets)
}

fn time_once(space: &FaceSpace, config: &PipelineConfig) -> Result<(u64, f64)> {
    let start = Instant::now();
    let result = run_salient_clustering(space, config)?;
    Ok((result.count_distance_evaluations(), start.elapsed().as_secs_f64()))
}

/// Clusters a generated space at each size and fits the log-log slope of
/// wall time. Each size is timed `REPEATS` times and the fastest run kept.
pub fn scaling_bench(sizes: &[usize], template: &SyntheticSpec, config: &PipelineConfig) -> Result<ScalingReport> {
    if sizes.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "scaling bench needs at least 3 sizes, got {}",
            sizes.len()
        )));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(Error::InvalidConfig("bench sizes must be positive and strictly ascending".into()));
    }

    // Warm-up so the first timed size does not pay for page faults.
    time_once(&scaled_space(template, sizes[0])?, config)?;

    let mut rows = Vec::with_capacity(sizes.len());
    for &s in sizes {
        let space = scaled_space(template, s)?;
        let mut best = f64::INFINITY;
        let mut evaluations = 0;
        for _ in 0..REPEATS {
            let (e, t) = time_once(&space, config)?;
            evaluations = e;
            best = best.min(t);
        }
        rows.push(ScalingRow {
            s,
            distance_evaluations: evaluations,
            wall_time_secs: best.max(1e-9),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.s as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.wall_time_secs).collect();
    Ok(ScalingReport {
        time_slope: log_log_slope(&xs, &ys),
        rows,
    })
}
