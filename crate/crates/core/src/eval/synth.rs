//! Seeded synthetic face-set data on the unit hypersphere.
//!
//! Each identity gets a base direction. With `condition_split > 0` a share
//! of its sets moves to a second "condition" mode rotated by `mode_angle`
//! away from the base, and `bridge_count` extra sets are spaced evenly along
//! the great circle between the two modes. Every set holds
//! `faces_per_set` noisy copies of its direction.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::embedding::{norm, Embedding, FaceMember, FaceSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub identities: usize,
    pub sets_per_identity: usize,
    pub dimension: usize,
    /// Per-face perturbation, roughly the angular standard deviation in radians.
    pub within_noise: f64,
    pub condition_split: f64,
    pub bridge_count: usize,
    pub seed: u64,
    /// Angle in radians between an identity's two condition modes.
    pub mode_angle: f64,
    pub faces_per_set: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            identities: 10,
            sets_per_identity: 6,
            dimension: 32,
            within_noise: 0.1,
            condition_split: 0.0,
            bridge_count: 0,
            seed: 0,
            mode_angle: 75f64.to_radians(),
            faces_per_set: 3,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::InvalidConfig(format!(
                "synthetic dimension must be at least 2, got {}",
                self.dimension
            )));
        }
        if self.identities == 0 || self.sets_per_identity == 0 || self.faces_per_set == 0 {
            return Err(Error::InvalidConfig(
                "identities, sets_per_identity and faces_per_set must be positive".into(),
            ));
        }
        if !(self.within_noise >= 0.0 && self.within_noise.is_finite()) {
            return Err(Error::InvalidConfig("within_noise must be finite and >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.condition_split) {
            return Err(Error::InvalidConfig("condition_split must lie in [0, 1]".into()));
        }
        if !self.mode_angle.is_finite() {
            return Err(Error::InvalidConfig("mode_angle must be finite".into()));
        }
        Ok(())
    }

    /// Twenty identities split across two condition modes 75 degrees apart,
    /// joined by two bridge sets each. Direct association cannot span the
    /// modes at low FAR; chains of salient merges can.
    pub fn chain_scenario(seed: u64) -> Self {
        Self {
            identities: 20,
            sets_per_identity: 6,
            dimension: 32,
            within_noise: 0.1,
            condition_split: 0.5,
            bridge_count: 2,
            seed,
            mode_angle: 75f64.to_radians(),
            faces_per_set: 3,
        }
    }

    /// Sets generated per identity, bridges included.
    pub fn sets_per_identity_total(&self) -> usize {
        self.sets_per_identity + self.bridge_count
    }
}

/// Generated face sets in identity-major order, plus ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub sets: Vec<FaceSet>,
    pub labels: BTreeMap<String, String>,
}

pub fn identity_label(identity: usize) -> String {
    format!("id{identity:03}")
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v = gaussian(rng, dim);
        let n = norm(&v);
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// A unit vector orthogonal to the unit vector `u`.
fn random_orthogonal(rng: &mut ChaCha8Rng, u: &[f64]) -> Vec<f64> {
    loop {
        let mut w = gaussian(rng, u.len());
        let proj: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
        w.iter_mut().zip(u).for_each(|(a, b)| *a -= proj * b);
        let n = norm(&w);
        if n > 1e-9 {
            return w.into_iter().map(|x| x / n).collect();
        }
    }
}

fn rotate(u: &[f64], w: &[f64], angle: f64) -> Vec<f64> {
    let (s, c) = angle.sin_cos();
    u.iter().zip(w).map(|(a, b)| c * a + s * b).collect()
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bases: Vec<Vec<f64>> = (0..spec.identities)
        .map(|_| random_unit(&mut rng, spec.dimension))
        .collect();
    generate_inner(spec, &bases, &mut rng)
}

/// Like [`generate_synthetic`] but with caller-chosen base directions, one
/// per identity. `spec.identities` is ignored in favour of `bases.len()`.
pub fn generate_from_bases(spec: &SyntheticSpec, bases: &[Embedding]) -> Result<SyntheticDataset> {
    let spec = SyntheticSpec {
        identities: bases.len(),
        ..spec.clone()
    };
    spec.validate()?;
    if let Some(b) = bases.iter().find(|b| b.dim() != spec.dimension) {
        return Err(Error::DimensionMismatch {
            left: spec.dimension,
            right: b.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bases: Vec<Vec<f64>> = bases.iter().map(|b| b.normalized().into_inner()).collect();
    generate_inner(&spec, &bases, &mut rng)
}

fn generate_inner(spec: &SyntheticSpec, bases: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Result<SyntheticDataset> {
    let dim = spec.dimension;
    let noise_scale = spec.within_noise / (dim as f64).sqrt();
    let displaced = (spec.condition_split * spec.sets_per_identity as f64).round() as usize;

    let make_set = |id: String, label: &str, direction: &[f64], rng: &mut ChaCha8Rng| -> Result<FaceSet> {
        let members = (0..spec.faces_per_set)
            .map(|_| {
                let mut v = direction.to_vec();
                if spec.within_noise > 0.0 {
                    for x in v.iter_mut() {
                        *x += noise_scale * rng.sample::<f64, _>(StandardNormal);
                    }
                }
                let score = rng.gen_range(0.5..=1.0);
                Ok(FaceMember::new(Embedding::new(v)?, Some(score)))
            })
            .collect::<Result<Vec<_>>>()?;
        FaceSet::new(id, Some(label.to_string()), members)
    };

    let mut sets = Vec::with_capacity(spec.identities * spec.sets_per_identity_total());
    let mut labels = BTreeMap::new();
    for (identity, u) in bases.iter().enumerate() {
        let label = identity_label(identity);
        let w = random_orthogonal(rng, u);
        let v = rotate(u, &w, spec.mode_angle);
        for s in 0..spec.sets_per_identity {
            let direction = if s >= spec.sets_per_identity - displaced { &v } else { u };
            let id = format!("{label}_s{s:02}");
            sets.push(make_set(id.clone(), &label, direction, rng)?);
            labels.insert(id, label.clone());
        }
        for b in 0..spec.bridge_count {
            let t = (b + 1) as f64 / (spec.bridge_count + 1) as f64;
            let direction = rotate(u, &w, t * spec.mode_angle);
            let id = format!("{label}_b{b:02}");
            sets.push(make_set(id.clone(), &label, &direction, rng)?);
            labels.insert(id, label.clone());
        }
    }
    Ok(SyntheticDataset { sets, labels })
}
