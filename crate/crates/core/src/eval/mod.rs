//! Synthetic data, evaluation protocols and the scaling benchmark.

pub mod bench;
pub mod metrics;
pub mod synth;

pub use bench::{scaling_bench, ScalingReport, ScalingRow};
pub use metrics::{
    all_pairs, cmc_curve, default_beta_grid, tar_far_curve, AbsentMate, CmcPoint, GammaPolicy, LabeledPair, Method,
    MetricsReport, TarFarCurve, FAR_TARGETS,
};
pub use synth::{generate_from_bases, generate_synthetic, SyntheticDataset, SyntheticSpec};
