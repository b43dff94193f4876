//! Verification, rank-1 identification and constrained rank-order search,
//! each with a direct-association baseline.

use std::fmt;

use serde::Serialize;

use crate::clustering::ClusteringResult;
use crate::config::PipelineConfig;
use crate::constraints::{knn_indices, ConstraintMatrices};
use crate::embedding::norm;
use crate::error::{Error, Result};
use crate::space::FaceSpace;

/// Which branch produced a verification decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleFired {
    #[serde(rename = "MA")]
    Ma,
    NaCentroid,
    None,
    Direct,
}

impl fmt::Display for RuleFired {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleFired::Ma => "MA",
            RuleFired::NaCentroid => "NA_CENTROID",
            RuleFired::None => "NONE",
            RuleFired::Direct => "DIRECT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationDecision {
    pub pair: (String, String),
    pub same_identity: bool,
    pub rule_fired: RuleFired,
}

pub(crate) fn verify_direct_index(space: &FaceSpace, i: usize, j: usize, beta: f64) -> bool {
    space.distance(i, j) < beta
}

/// Plain thresholding: same identity iff the representatives are closer
/// than `beta`.
pub fn verify_direct(space: &FaceSpace, i: &str, j: &str, beta: f64) -> Result<VerificationDecision> {
    let (a, b) = (space.index_of(i)?, space.index_of(j)?);
    Ok(VerificationDecision {
        pair: (i.to_string(), j.to_string()),
        same_identity: verify_direct_index(space, a, b, beta),
        rule_fired: RuleFired::Direct,
    })
}

pub(crate) fn verify_clusterface_index(
    space: &FaceSpace,
    i: usize,
    j: usize,
    matrices: &ConstraintMatrices,
    result: &ClusteringResult,
    config: &PipelineConfig,
) -> RuleFired {
    if matrices.ma_at(i, j).is_some() {
        return RuleFired::Ma;
    }
    if let Some(cx) = matrices.na_cluster(i, j) {
        let c = &result.clusters[cx].centroid;
        let n = norm(c);
        if n > 0.0 && space.distance_to(j, c, n) < config.termination_distance() {
            return RuleFired::NaCentroid;
        }
    }
    RuleFired::None
}

/// Constrained verification.
///
/// Accepts when MA(i, j) holds, or when NA(i, j) holds and `j` lies within
/// `beta - gamma` of the centroid of the cluster the NA constraint points
/// to. Everything else is rejected.
pub fn verify_clusterface(
    space: &FaceSpace,
    i: &str,
    j: &str,
    matrices: &ConstraintMatrices,
    result: &ClusteringResult,
    config: &PipelineConfig,
) -> Result<VerificationDecision> {
    let (a, b) = (space.index_of(i)?, space.index_of(j)?);
    let rule = verify_clusterface_index(space, a, b, matrices, result, config);
    Ok(VerificationDecision {
        pair: (i.to_string(), j.to_string()),
        same_identity: matches!(rule, RuleFired::Ma | RuleFired::NaCentroid),
        rule_fired: rule,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedList {
    pub probe: String,
    pub ranked: Vec<String>,
}

pub(crate) fn rank_indices(
    space: &FaceSpace,
    probe: usize,
    nn: &[usize],
    matrices: &ConstraintMatrices,
) -> Result<Vec<usize>> {
    if nn.contains(&probe) {
        return Err(Error::ProbeInNeighbors(space.id(probe).to_string()));
    }
    let mut placed = vec![false; space.len()];
    let mut ranked = Vec::with_capacity(nn.len());
    let mut push = |x: usize, ranked: &mut Vec<usize>| {
        if !placed[x] {
            placed[x] = true;
            ranked.push(x);
        }
    };

    for &n in nn {
        if matrices.ma_at(probe, n).is_some() {
            push(n, &mut ranked);
        }
    }
    let mut outside: Vec<(usize, f64)> = matrices
        .ma_partners(probe)
        .filter(|&x| x != probe && !nn.contains(&x))
        .map(|x| (x, space.distance(probe, x)))
        .collect();
    outside.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then_with(|| space.rank(a.0).cmp(&space.rank(b.0)))
    });
    for (x, _) in outside {
        push(x, &mut ranked);
    }
    for &n in nn {
        if matrices.na_at(probe, n).is_some() {
            push(n, &mut ranked);
        }
    }
    for &n in nn {
        push(n, &mut ranked);
    }
    Ok(ranked)
}

/// Re-ranks a probe's nearest neighbours under the constraints.
///
/// Output order: neighbours with MA to the probe (in `nn` order), then the
/// probe's other MA co-members closest first, then neighbours with NA from
/// the probe (in `nn` order), then every remaining neighbour.
pub fn rank_order_search<S: AsRef<str>>(
    space: &FaceSpace,
    probe: &str,
    nn: &[S],
    matrices: &ConstraintMatrices,
) -> Result<RankedList> {
    let p = space.index_of(probe)?;
    let nn = space.indices_of(nn)?;
    let ranked = rank_indices(space, p, &nn, matrices)?;
    Ok(RankedList {
        probe: probe.to_string(),
        ranked: ranked.into_iter().map(|i| space.id(i).to_string()).collect(),
    })
}

/// Constrained ranking of the gallery for one probe, restricted to gallery
/// members. `in_gallery` is indexed by space index.
pub(crate) fn constrained_gallery_ranking(
    space: &FaceSpace,
    probe: usize,
    gallery: &[usize],
    in_gallery: &[bool],
    matrices: &ConstraintMatrices,
    config: &PipelineConfig,
) -> Result<Vec<usize>> {
    let nn: Vec<usize> = knn_indices(space, probe, gallery.iter().copied(), config.k, config.beta)
        .into_iter()
        .map(|(i, _)| i)
        .collect();
    let ranked = rank_indices(space, probe, &nn, matrices)?;
    Ok(ranked.into_iter().filter(|&i| in_gallery[i]).collect())
}

/// Gallery sorted by distance to the probe, ties by set id. The probe itself
/// is skipped if it happens to be enrolled.
pub(crate) fn direct_gallery_ranking(space: &FaceSpace, probe: usize, gallery: &[usize]) -> Vec<usize> {
    let mut scored: Vec<(usize, f64)> = gallery
        .iter()
        .filter(|&&g| g != probe)
        .map(|&g| (g, space.distance(probe, g)))
        .collect();
    scored.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then_with(|| space.rank(a.0).cmp(&space.rank(b.0)))
    });
    scored.into_iter().map(|(g, _)| g).collect()
}

fn gallery_mask(space: &FaceSpace, gallery: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; space.len()];
    for &g in gallery {
        mask[g] = true;
    }
    mask
}

fn label_of(space: &FaceSpace, index: Option<usize>) -> Option<String> {
    index.and_then(|i| space.set(i).label().map(str::to_string))
}

/// Rank-1 identification through the constrained rank-order search: the
/// label of the first gallery element in the ranked neighbour list.
pub fn identify_rank1<S: AsRef<str>>(
    space: &FaceSpace,
    probe: &str,
    gallery: &[S],
    matrices: &ConstraintMatrices,
    config: &PipelineConfig,
) -> Result<Option<String>> {
    if gallery.is_empty() {
        return Err(Error::Empty("gallery"));
    }
    let p = space.index_of(probe)?;
    let g = space.indices_of(gallery)?;
    let mask = gallery_mask(space, &g);
    let ranked = constrained_gallery_ranking(space, p, &g, &mask, matrices, config)?;
    Ok(label_of(space, ranked.first().copied()))
}

/// Nearest-gallery identification with no clustering.
pub fn identify_direct<S: AsRef<str>>(space: &FaceSpace, probe: &str, gallery: &[S]) -> Result<Option<String>> {
    if gallery.is_empty() {
        return Err(Error::Empty("gallery"));
    }
    let p = space.index_of(probe)?;
    let g = space.indices_of(gallery)?;
    Ok(label_of(space, direct_gallery_ranking(space, p, &g).first().copied()))
}
