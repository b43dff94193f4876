//! Must-Associate and Neighbourhood-Associate constraints built on top of a
//! salient clustering.
//!
//! * MA(i, j) holds for every ordered pair of distinct sets that share a
//!   salient cluster and carries that cluster's label.
//! * NA(i, j) holds when `j` sits outside `i`'s cluster but a strict
//!   plurality of `j`'s qualifying nearest neighbours (distance `< beta`)
//!   fall inside it.

use std::collections::{BTreeMap, HashMap};
use std::ops::Bound;

use rayon::prelude::*;
use serde::Serialize;

use crate::clustering::ClusteringResult;
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::space::FaceSpace;

const PARALLEL_MIN_SETS: usize = 256;

/// Identity label attached to a salient cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterLabel {
    pub cluster_index: usize,
    pub label: String,
}

impl ClusterLabel {
    pub fn synthetic(cluster_index: usize) -> Self {
        Self {
            cluster_index,
            label: format!("cluster:{cluster_index}"),
        }
    }
}

/// Sparse constraint map: `(space index, space index) -> cluster index`.
pub type PairMap = BTreeMap<(usize, usize), usize>;

/// Collects `set_id -> identity` for every labelled set in the space.
pub fn space_labels(space: &FaceSpace) -> HashMap<String, String> {
    space
        .sets()
        .iter()
        .filter_map(|s| s.label().map(|l| (s.set_id().to_string(), l.to_string())))
        .collect()
}

/// Labels each cluster with the most frequent identity among its labelled
/// members. Ties go to the lexicographically smallest identity; clusters
/// without any labelled member get `cluster:<index>`.
pub fn label_clusters(result: &ClusteringResult, labels: &HashMap<String, String>) -> Vec<ClusterLabel> {
    result
        .clusters
        .iter()
        .map(|c| {
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for id in &c.member_set_ids {
                if let Some(l) = labels.get(id) {
                    *counts.entry(l.as_str()).or_default() += 1;
                }
            }
            // BTreeMap iterates in key order, so keeping the first maximum
            // picks the smallest identity on ties.
            let mut best: Option<(&str, usize)> = None;
            for (l, n) in counts {
                if best.is_none_or(|(_, b)| n > b) {
                    best = Some((l, n));
                }
            }
            match best {
                Some((l, _)) => ClusterLabel {
                    cluster_index: c.cluster_index,
                    label: l.to_string(),
                },
                None => ClusterLabel::synthetic(c.cluster_index),
            }
        })
        .collect()
}

/// A nearest neighbour of some query set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub set_id: String,
    pub distance: f64,
}

/// Up to `k` candidates closest to `query`, excluding the query itself and
/// anything at distance `>= beta`. Ordered by distance, then set id.
pub(crate) fn knn_indices(
    space: &FaceSpace,
    query: usize,
    candidates: impl IntoIterator<Item = usize>,
    k: usize,
    beta: f64,
) -> Vec<(usize, f64)> {
    let mut hits: Vec<(usize, f64)> = candidates
        .into_iter()
        .filter(|&c| c != query)
        .map(|c| (c, space.distance(query, c)))
        .filter(|&(_, d)| d < beta)
        .collect();
    let by_rank = |a: &(usize, f64), b: &(usize, f64)| {
        a.1.total_cmp(&b.1)
            .then_with(|| space.rank(a.0).cmp(&space.rank(b.0)))
    };
    if hits.len() > k && k > 0 {
        hits.select_nth_unstable_by(k - 1, by_rank);
        hits.truncate(k);
    }
    hits.sort_by(by_rank);
    hits.truncate(k);
    hits
}

/// k-nearest-neighbour search of `query` within `universe`.
pub fn knn<S: AsRef<str>>(
    space: &FaceSpace,
    query: &str,
    universe: &[S],
    k: usize,
    beta: f64,
) -> Result<Vec<Neighbor>> {
    let q = space.index_of(query)?;
    let candidates = space.indices_of(universe)?;
    Ok(knn_indices(space, q, candidates, k, beta)
        .into_iter()
        .map(|(i, d)| Neighbor {
            set_id: space.id(i).to_string(),
            distance: d,
        })
        .collect())
}

pub(crate) fn vote_index(
    space: &FaceSpace,
    j: usize,
    result: &ClusteringResult,
    k: usize,
    beta: f64,
) -> Option<usize> {
    let neighbours = knn_indices(space, j, 0..space.len(), k, beta);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (n, _) in neighbours {
        *counts.entry(result.cluster_of_index(n)).or_default() += 1;
    }
    let mut top: Option<(usize, usize)> = None;
    let mut tied = false;
    for (c, n) in counts {
        match top {
            Some((_, best)) if n == best => tied = true,
            Some((_, best)) if n < best => {}
            _ => {
                top = Some((c, n));
                tied = false;
            }
        }
    }
    match top {
        Some((c, _)) if !tied => Some(c),
        _ => None,
    }
}

/// The cluster holding a strict plurality of `j`'s qualifying k nearest
/// neighbours over the whole space, or `None` when `j` has no qualifying
/// neighbours or the top count is tied.
pub fn neighborhood_vote(
    space: &FaceSpace,
    j: &str,
    result: &ClusteringResult,
    k: usize,
    beta: f64,
) -> Result<Option<usize>> {
    Ok(vote_index(space, space.index_of(j)?, result, k, beta))
}

/// MA(i, j) for every ordered pair of distinct co-members.
pub fn build_ma(space: &FaceSpace, result: &ClusteringResult) -> PairMap {
    let mut ma = PairMap::new();
    for c in &result.clusters {
        let members = result.member_indices(space, c.cluster_index);
        for &i in &members {
            for &j in &members {
                if i != j {
                    ma.insert((i, j), c.cluster_index);
                }
            }
        }
    }
    ma
}

/// NA(i, j) for every `i` in the cluster `j` votes for, with `j` outside it.
pub fn build_na(space: &FaceSpace, result: &ClusteringResult, k: usize, beta: f64) -> PairMap {
    let n = space.len();
    let votes: Vec<Option<usize>> = if n >= PARALLEL_MIN_SETS {
        (0..n)
            .into_par_iter()
            .map(|j| vote_index(space, j, result, k, beta))
            .collect()
    } else {
        (0..n).map(|j| vote_index(space, j, result, k, beta)).collect()
    };
    let mut na = PairMap::new();
    for (j, vote) in votes.into_iter().enumerate() {
        let Some(cx) = vote else { continue };
        if result.cluster_of_index(j) == cx {
            continue;
        }
        for i in result.member_indices(space, cx) {
            na.insert((i, j), cx);
        }
    }
    na
}

/// Which constraint a pair falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstraintKind {
    #[serde(rename = "MA")]
    MustAssociate,
    #[serde(rename = "NA")]
    NeighbourhoodAssociate,
}

impl ConstraintKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintKind::MustAssociate => "MA",
            ConstraintKind::NeighbourhoodAssociate => "NA",
        }
    }
}

/// MA and NA maps over one face space, plus the cluster labels they refer to.
#[derive(Debug, Clone)]
pub struct ConstraintMatrices {
    ids: Vec<String>,
    ma: PairMap,
    na: PairMap,
    labels: Vec<ClusterLabel>,
    pub k: usize,
}

impl ConstraintMatrices {
    /// Builds both maps from a clustering result at the config's `k` and `beta`.
    pub fn build(
        space: &FaceSpace,
        result: &ClusteringResult,
        labels: Vec<ClusterLabel>,
        config: &PipelineConfig,
    ) -> Result<Self> {
        let ma = build_ma(space, result);
        let na = build_na(space, result, config.k, config.beta);
        Self::from_maps(space, ma, na, labels, config.k)
    }

    /// Wraps prebuilt maps. Every cluster index referenced must have a label.
    pub fn from_maps(
        space: &FaceSpace,
        ma: PairMap,
        na: PairMap,
        labels: Vec<ClusterLabel>,
        k: usize,
    ) -> Result<Self> {
        for (&(i, j), &c) in ma.iter().chain(na.iter()) {
            if i >= space.len() || j >= space.len() {
                return Err(Error::Protocol(format!("constraint ({i}, {j}) outside the space")));
            }
            if c >= labels.len() {
                return Err(Error::Protocol(format!("constraint references unlabelled cluster {c}")));
            }
        }
        Ok(Self {
            ids: space.sets().iter().map(|s| s.set_id().to_string()).collect(),
            ma,
            na,
            labels,
            k,
        })
    }

    pub fn empty(space: &FaceSpace, k: usize) -> Self {
        Self::from_maps(space, PairMap::new(), PairMap::new(), Vec::new(), k)
            .expect("empty maps are always valid")
    }

    pub fn ma_map(&self) -> &PairMap {
        &self.ma
    }

    pub fn na_map(&self) -> &PairMap {
        &self.na
    }

    pub fn labels(&self) -> &[ClusterLabel] {
        &self.labels
    }

    pub fn ma_at(&self, i: usize, j: usize) -> Option<&ClusterLabel> {
        self.ma.get(&(i, j)).map(|&c| &self.labels[c])
    }

    pub fn na_at(&self, i: usize, j: usize) -> Option<&ClusterLabel> {
        self.na.get(&(i, j)).map(|&c| &self.labels[c])
    }

    /// Cluster index through which NA(i, j) holds.
    pub fn na_cluster(&self, i: usize, j: usize) -> Option<usize> {
        self.na.get(&(i, j)).copied()
    }

    pub fn ma(&self, space: &FaceSpace, i: &str, j: &str) -> Result<Option<&ClusterLabel>> {
        Ok(self.ma_at(space.index_of(i)?, space.index_of(j)?))
    }

    pub fn na(&self, space: &FaceSpace, i: &str, j: &str) -> Result<Option<&ClusterLabel>> {
        Ok(self.na_at(space.index_of(i)?, space.index_of(j)?))
    }

    /// Every `x` with MA(p, x) defined, in index order.
    pub fn ma_partners(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        self.ma
            .range((Bound::Included((p, 0)), Bound::Included((p, usize::MAX))))
            .map(|(&(_, x), _)| x)
    }

    pub fn is_empty(&self) -> bool {
        self.ma.is_empty() && self.na.is_empty()
    }

    /// All constraints as `(i, j, kind, label)` rows: MA entries first, then
    /// NA, each in index order.
    pub fn rows(&self) -> impl Iterator<Item = (&str, &str, ConstraintKind, &str)> + '_ {
        let ma = self
            .ma
            .iter()
            .map(|(&(i, j), &c)| (i, j, ConstraintKind::MustAssociate, c));
        let na = self
            .na
            .iter()
            .map(|(&(i, j), &c)| (i, j, ConstraintKind::NeighbourhoodAssociate, c));
        ma.chain(na).map(move |(i, j, kind, c)| {
            (
                self.ids[i].as_str(),
                self.ids[j].as_str(),
                kind,
                self.labels[c].label.as_str(),
            )
        })
    }
}
