//! Salient clustering: bottom-up centroid-linkage agglomeration that stops
//! as soon as the closest pair of clusters is no longer closer than
//! `beta - gamma`.
//!
//! The merge loop keeps every sub-threshold cluster pair in a binary heap
//! keyed by `(distance, min set-id rank of each side)` and discards stale
//! entries lazily when one side has already been merged away. After each
//! merge the new cluster is compared once against every surviving cluster,
//! so the total number of centroid-distance evaluations is
//! `s(s-1)/2 + sum(active - 1)` over the merges, and the heap work adds a
//! `log s` factor on top.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::embedding::{centroid_distance, cosine_distance_with_norms, norm, SalientCluster};
use crate::error::{Error, Result};
use crate::space::FaceSpace;

/// Below this many sets the initial distance pass stays on one thread.
const PARALLEL_MIN_SETS: usize = 256;

/// One agglomeration step.
///
/// Cluster ids `0..s` are the input sets in input order; the cluster created
/// by iteration `t` gets id `s + t - 1`. `left` is the side holding the
/// lexicographically smaller set id.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergeEvent {
    pub iteration: usize,
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub result: usize,
}

#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub clusters: Vec<SalientCluster>,
    pub merge_log: Vec<MergeEvent>,
    pub config: PipelineConfig,
    termination_distance: f64,
    assignment: Vec<usize>,
    distance_evaluations: u64,
}

impl ClusteringResult {
    /// Assembles a result from hand-built parts. The clusters must partition
    /// the space; `cluster_index` values must equal their position.
    pub fn from_parts(
        space: &FaceSpace,
        clusters: Vec<SalientCluster>,
        merge_log: Vec<MergeEvent>,
        config: PipelineConfig,
        termination_distance: f64,
    ) -> Result<Self> {
        let mut assignment = vec![usize::MAX; space.len()];
        for (ci, c) in clusters.iter().enumerate() {
            if c.cluster_index != ci {
                return Err(Error::Protocol(format!(
                    "cluster at position {ci} carries index {}",
                    c.cluster_index
                )));
            }
            for id in &c.member_set_ids {
                let i = space.index_of(id)?;
                if assignment[i] != usize::MAX {
                    return Err(Error::DuplicateSetId(id.clone()));
                }
                assignment[i] = ci;
            }
        }
        if let Some(i) = assignment.iter().position(|&a| a == usize::MAX) {
            return Err(Error::Protocol(format!(
                "set `{}` is not assigned to any cluster",
                space.id(i)
            )));
        }
        Ok(Self {
            clusters,
            merge_log,
            config,
            termination_distance,
            assignment,
            distance_evaluations: 0,
        })
    }

    pub fn termination_distance(&self) -> f64 {
        self.termination_distance
    }

    /// Number of centroid-distance evaluations the run performed.
    pub fn count_distance_evaluations(&self) -> u64 {
        self.distance_evaluations
    }

    /// Cluster index of the set at `index` in the space.
    pub fn cluster_of_index(&self, index: usize) -> usize {
        self.assignment[index]
    }

    pub fn cluster_of(&self, space: &FaceSpace, set_id: &str) -> Result<usize> {
        Ok(self.assignment[space.index_of(set_id)?])
    }

    /// Space indices of every member of a cluster, in set-id order.
    pub fn member_indices(&self, space: &FaceSpace, cluster: usize) -> Vec<usize> {
        self.clusters[cluster]
            .member_set_ids
            .iter()
            .map(|id| space.index_of(id).expect("member ids come from the space"))
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    distance: f64,
    lo_rank: u32,
    hi_rank: u32,
    left: u32,
    right: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Reversed so that BinaryHeap pops the smallest distance first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .distance
            .total_cmp(&self.distance)
            .then(other.lo_rank.cmp(&self.lo_rank))
            .then(other.hi_rank.cmp(&self.hi_rank))
    }
}

struct Node {
    sum: Vec<f64>,
    sum_norm: f64,
    min_rank: u32,
    members: Vec<usize>,
}

impl Node {
    fn distance(&self, other: &Node) -> f64 {
        cosine_distance_with_norms(&self.sum, self.sum_norm, &other.sum, other.sum_norm)
    }
}

fn candidate(a_id: usize, a: &Node, b_id: usize, b: &Node, distance: f64) -> Candidate {
    let (left, lo, right, hi) = if a.min_rank < b.min_rank {
        (a_id, a.min_rank, b_id, b.min_rank)
    } else {
        (b_id, b.min_rank, a_id, a.min_rank)
    };
    Candidate {
        distance,
        lo_rank: lo,
        hi_rank: hi,
        left: left as u32,
        right: right as u32,
    }
}

/// Runs salient clustering at the config's `beta - gamma`.
pub fn run_salient_clustering(space: &FaceSpace, config: &PipelineConfig) -> Result<ClusteringResult> {
    config.validate()?;
    cluster_at_threshold(space, config, config.termination_distance())
}

/// Runs salient clustering with an explicit termination distance. A
/// threshold of zero never merges anything.
pub fn cluster_at_threshold(
    space: &FaceSpace,
    config: &PipelineConfig,
    termination: f64,
) -> Result<ClusteringResult> {
    let s = space.len();
    if s == 0 {
        return Err(Error::Empty("no face sets to cluster"));
    }

    // Cosine distance is scale invariant, so a node's member sum stands in
    // for its centroid.
    let mut nodes: Vec<Option<Node>> = (0..s)
        .map(|i| {
            let sum = space.rep(i).to_vec();
            Some(Node {
                sum_norm: norm(&sum),
                sum,
                min_rank: space.rank(i),
                members: vec![i],
            })
        })
        .collect();
    nodes.reserve(s.saturating_sub(1));

    let row = |i: usize, nodes: &[Option<Node>]| -> Vec<Candidate> {
        let a = nodes[i].as_ref().unwrap();
        (i + 1..s)
            .filter_map(|j| {
                let b = nodes[j].as_ref().unwrap();
                let d = a.distance(b);
                (d < termination).then(|| candidate(i, a, j, b, d))
            })
            .collect()
    };
    let initial: Vec<Candidate> = if s >= PARALLEL_MIN_SETS {
        (0..s)
            .into_par_iter()
            .map(|i| row(i, &nodes))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    } else {
        (0..s).flat_map(|i| row(i, &nodes)).collect()
    };
    let mut evaluations = (s as u64) * (s as u64 - 1) / 2;
    let mut heap = BinaryHeap::from(initial);

    let mut active: Vec<usize> = (0..s).collect();
    let mut merge_log = Vec::new();

    while let Some(c) = heap.pop() {
        let (l, r) = (c.left as usize, c.right as usize);
        if nodes[l].is_none() || nodes[r].is_none() {
            continue;
        }
        let a = nodes[l].take().unwrap();
        let b = nodes[r].take().unwrap();
        let mut sum = a.sum;
        for (x, y) in sum.iter_mut().zip(&b.sum) {
            *x += y;
        }
        let sum_norm = norm(&sum);
        let new_id = nodes.len();
        if sum_norm <= 0.0 {
            return Err(Error::DegenerateCluster(new_id));
        }
        let mut members = a.members;
        members.extend(b.members);
        let merged = Node {
            sum,
            sum_norm,
            min_rank: a.min_rank.min(b.min_rank),
            members,
        };

        active.retain(|&id| id != l && id != r);
        for &other in &active {
            let o = nodes[other].as_ref().unwrap();
            let d = merged.distance(o);
            evaluations += 1;
            if d < termination {
                heap.push(candidate(new_id, &merged, other, o, d));
            }
        }
        merge_log.push(MergeEvent {
            iteration: merge_log.len() + 1,
            left: l,
            right: r,
            distance: c.distance,
            result: new_id,
        });
        nodes.push(Some(merged));
        active.push(new_id);
    }

    let mut finals: Vec<Node> = active.into_iter().map(|id| nodes[id].take().unwrap()).collect();
    finals.sort_by_key(|n| n.min_rank);
    let mut assignment = vec![0; s];
    let clusters = finals
        .into_iter()
        .enumerate()
        .map(|(ci, mut node)| {
            node.members.sort_by_key(|&i| space.rank(i));
            for &m in &node.members {
                assignment[m] = ci;
            }
            let count = node.members.len() as f64;
            SalientCluster {
                cluster_index: ci,
                member_set_ids: node.members.iter().map(|&m| space.id(m).to_string()).collect(),
                centroid: node.sum.iter().map(|v| v / count).collect(),
            }
        })
        .collect();

    Ok(ClusteringResult {
        clusters,
        merge_log,
        config: *config,
        termination_distance: termination,
        assignment,
        distance_evaluations: evaluations,
    })
}

/// Checks the loop guard after the fact: every surviving pair of clusters
/// is at least `beta - gamma` apart and every recorded merge was strictly
/// closer than that.
pub fn verify_termination(result: &ClusteringResult) -> bool {
    let t = result.termination_distance;
    if result.merge_log.iter().any(|e| e.distance.partial_cmp(&t) != Some(std::cmp::Ordering::Less)) {
        return false;
    }
    let cs = &result.clusters;
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            match centroid_distance(&cs[i], &cs[j]) {
                Ok(d) if d >= t => {}
                _ => return false,
            }
        }
    }
    true
}
