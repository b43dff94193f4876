//! Verification (TAR@FAR) and identification (CMC) protocols.

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{
    constrained_gallery_ranking, direct_gallery_ranking, verify_clusterface_index, verify_direct_index, RuleFired,
};
use crate::clustering::run_salient_clustering;
use crate::config::PipelineConfig;
use crate::constraints::{label_clusters, space_labels, ConstraintMatrices};
use crate::error::{Error, Result};
use crate::space::FaceSpace;

/// FAR targets reported for every verification curve.
pub const FAR_TARGETS: [f64; 3] = [0.001, 0.01, 0.1];

/// Which decision procedure to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    #[serde(rename = "clusterface")]
    ClusterFace,
}

/// How `gamma` follows `beta` during a threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum GammaPolicy {
    /// `gamma = factor * beta`.
    Proportional(f64),
    Fixed(f64),
}

impl Default for GammaPolicy {
    fn default() -> Self {
        GammaPolicy::Proportional(0.25)
    }
}

impl GammaPolicy {
    pub fn gamma(self, beta: f64) -> f64 {
        match self {
            GammaPolicy::Proportional(f) => f * beta,
            GammaPolicy::Fixed(g) => g,
        }
    }
}

/// The default sweep: beta from 0.01 to 2.00 in steps of 0.01.
pub fn default_beta_grid() -> Vec<f64> {
    (1..=200).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledPair {
    pub left: String,
    pub right: String,
    pub genuine: bool,
}

/// Every unordered pair of labelled sets, in index order.
pub fn all_pairs(space: &FaceSpace) -> Vec<LabeledPair> {
    let sets = space.sets();
    let mut pairs = Vec::new();
    for i in 0..sets.len() {
        let Some(li) = sets[i].label() else { continue };
        for j in i + 1..sets.len() {
            let Some(lj) = sets[j].label() else { continue };
            pairs.push(LabeledPair {
                left: sets[i].set_id().to_string(),
                right: sets[j].set_id().to_string(),
                genuine: li == lj,
            });
        }
    }
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub beta: f64,
    pub gamma: f64,
    pub far: f64,
    pub tar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TarAtFar {
    pub far: f64,
    pub tar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TarFarCurve {
    pub method: Method,
    pub gamma_policy: GammaPolicy,
    pub points: Vec<OperatingPoint>,
    pub tar_at_far: Vec<TarAtFar>,
    pub genuine_pairs: usize,
    pub impostor_pairs: usize,
}

impl TarFarCurve {
    pub fn tar_at(&self, far: f64) -> Option<f64> {
        self.tar_at_far.iter().find(|t| t.far == far).map(|t| t.tar)
    }
}

/// TAR at the best operating point whose FAR does not exceed `target`, or
/// 0 when no grid point qualifies. Never interpolates between points.
pub fn step_tar_at_far(points: &[OperatingPoint], target: f64) -> f64 {
    points
        .iter()
        .filter(|p| p.far <= target)
        .map(|p| p.tar)
        .fold(0.0, f64::max)
}

/// Accept decisions of one method at one operating point.
fn accepts(
    space: &FaceSpace,
    pairs: &[(usize, usize)],
    method: Method,
    config: &PipelineConfig,
) -> Result<Vec<bool>> {
    match method {
        Method::Direct => Ok(pairs
            .iter()
            .map(|&(i, j)| verify_direct_index(space, i, j, config.beta))
            .collect()),
        Method::ClusterFace => {
            let result = run_salient_clustering(space, config)?;
            let labels = label_clusters(&result, &space_labels(space));
            let matrices = ConstraintMatrices::build(space, &result, labels, config)?;
            Ok(pairs
                .iter()
                .map(|&(i, j)| {
                    !matches!(
                        verify_clusterface_index(space, i, j, &matrices, &result, config),
                        RuleFired::None
                    )
                })
                .collect())
        }
    }
}

/// Sweeps `beta` over `beta_grid` and records (FAR, TAR) at each point.
///
/// For the constrained method the clustering and the constraints are rebuilt
/// at every grid point. Grid points whose `gamma` falls outside `[0, beta)`
/// are skipped.
pub fn tar_far_curve(
    space: &FaceSpace,
    pairs: &[LabeledPair],
    method: Method,
    beta_grid: &[f64],
    gamma_policy: GammaPolicy,
    k: usize,
) -> Result<TarFarCurve> {
    let genuine = pairs.iter().filter(|p| p.genuine).count();
    let impostor = pairs.len() - genuine;
    if impostor == 0 {
        return Err(Error::Protocol("no impostor pairs: FAR is undefined".into()));
    }
    if genuine == 0 {
        return Err(Error::Protocol("no genuine pairs: TAR is undefined".into()));
    }
    let indexed: Vec<(usize, usize)> = pairs
        .iter()
        .map(|p| Ok((space.index_of(&p.left)?, space.index_of(&p.right)?)))
        .collect::<Result<_>>()?;

    let configs: Vec<PipelineConfig> = beta_grid
        .iter()
        .filter_map(|&beta| PipelineConfig::new(beta, gamma_policy.gamma(beta), k, 0).ok())
        .collect();

    let points = configs
        .par_iter()
        .map(|config| {
            let accepted = accepts(space, &indexed, method, config)?;
            let (mut ta, mut fa) = (0usize, 0usize);
            for (p, ok) in pairs.iter().zip(accepted) {
                if ok {
                    if p.genuine {
                        ta += 1;
                    } else {
                        fa += 1;
                    }
                }
            }
            Ok(OperatingPoint {
                beta: config.beta,
                gamma: config.gamma,
                far: fa as f64 / impostor as f64,
                tar: ta as f64 / genuine as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let tar_at_far = FAR_TARGETS
        .iter()
        .map(|&far| TarAtFar {
            far,
            tar: step_tar_at_far(&points, far),
        })
        .collect();
    Ok(TarFarCurve {
        method,
        gamma_policy,
        points,
        tar_at_far,
        genuine_pairs: genuine,
        impostor_pairs: impostor,
    })
}

/// What to do with a probe whose identity has no mate in the gallery.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbsentMate {
    #[default]
    Exclude,
    CountAsMiss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmcPoint {
    pub rank: usize,
    pub accuracy: f64,
}

/// Gallery rankings for every probe, in probe order.
pub fn gallery_rankings<S: AsRef<str> + Sync>(
    space: &FaceSpace,
    probes: &[S],
    gallery: &[S],
    method: Method,
    config: &PipelineConfig,
) -> Result<Vec<Vec<usize>>> {
    if gallery.is_empty() {
        return Err(Error::Empty("gallery"));
    }
    let p = space.indices_of(probes)?;
    let g = space.indices_of(gallery)?;
    match method {
        Method::Direct => Ok(p.par_iter().map(|&q| direct_gallery_ranking(space, q, &g)).collect()),
        Method::ClusterFace => {
            let result = run_salient_clustering(space, config)?;
            let labels = label_clusters(&result, &space_labels(space));
            let matrices = ConstraintMatrices::build(space, &result, labels, config)?;
            let mut mask = vec![false; space.len()];
            g.iter().for_each(|&i| mask[i] = true);
            p.par_iter()
                .map(|&q| constrained_gallery_ranking(space, q, &g, &mask, &matrices, config))
                .collect()
        }
    }
}

/// Cumulative match characteristic for ranks `1..=max_rank`.
pub fn cmc_curve<S: AsRef<str> + Sync>(
    space: &FaceSpace,
    probes: &[S],
    gallery: &[S],
    method: Method,
    config: &PipelineConfig,
    max_rank: usize,
    absent: AbsentMate,
) -> Result<Vec<CmcPoint>> {
    let rankings = gallery_rankings(space, probes, gallery, method, config)?;
    let g = space.indices_of(gallery)?;

    let mut hits = vec![0usize; max_rank];
    let mut counted = 0usize;
    for (probe, ranked) in probes.iter().zip(&rankings) {
        let q = space.index_of(probe.as_ref())?;
        let label = space.set(q).label();
        let has_mate = label.is_some() && g.iter().any(|&x| x != q && space.set(x).label() == label);
        if !has_mate {
            if absent == AbsentMate::CountAsMiss {
                counted += 1;
            }
            continue;
        }
        counted += 1;
        if let Some(pos) = ranked.iter().position(|&x| space.set(x).label() == label) {
            for h in hits.iter_mut().skip(pos) {
                *h += 1;
            }
        }
    }
    if counted == 0 {
        return Err(Error::Protocol("no probe has a mate in the gallery".into()));
    }
    Ok(hits
        .into_iter()
        .enumerate()
        .map(|(r, h)| CmcPoint {
            rank: r + 1,
            accuracy: h as f64 / counted as f64,
        })
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Counts {
    pub pairs: usize,
    pub genuine_pairs: usize,
    pub impostor_pairs: usize,
    pub probes: usize,
    pub gallery: usize,
}

/// Everything one evaluation run reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub method: Method,
    pub protocol: String,
    pub config: PipelineConfig,
    pub tar_at_far: Vec<TarAtFar>,
    pub roc: Vec<OperatingPoint>,
    pub cmc: Vec<CmcPoint>,
    pub counts: Counts,
}

impl MetricsReport {
    pub fn new(method: Method, config: PipelineConfig) -> Self {
        Self {
            method,
            protocol: String::new(),
            config,
            tar_at_far: Vec::new(),
            roc: Vec::new(),
            cmc: Vec::new(),
            counts: Counts::default(),
        }
    }

    pub fn with_verification(mut self, curve: &TarFarCurve) -> Self {
        let gamma = match curve.gamma_policy {
            GammaPolicy::Proportional(f) => format!("gamma = {f} * beta"),
            GammaPolicy::Fixed(g) => format!("gamma = {g}"),
        };
        self.protocol = format!("beta sweep over {} points, {gamma}, step TAR@FAR", curve.points.len());
        self.tar_at_far = curve.tar_at_far.clone();
        self.roc = curve.points.clone();
        self.counts.pairs = curve.genuine_pairs + curve.impostor_pairs;
        self.counts.genuine_pairs = curve.genuine_pairs;
        self.counts.impostor_pairs = curve.impostor_pairs;
        self
    }

    pub fn with_identification(mut self, cmc: Vec<CmcPoint>, probes: usize, gallery: usize) -> Self {
        if self.protocol.is_empty() {
            self.protocol = "closed-set identification".into();
        }
        self.cmc = cmc;
        self.counts.probes = probes;
        self.counts.gallery = gallery;
        self
    }
}
