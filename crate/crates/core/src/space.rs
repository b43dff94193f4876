//! The joint feature space every downstream stage operates on.

use std::collections::HashMap;

use crate::embedding::{cosine_distance_with_norms, FaceSet};
use crate::error::{Error, Result};

/// A validated, indexed collection of face sets sharing one dimension.
///
/// Sets keep their input order; `rank` gives each set's position in
/// lexicographic set-id order and is what all tie-breaking uses.
#[derive(Debug, Clone)]
pub struct FaceSpace {
    sets: Vec<FaceSet>,
    lookup: HashMap<String, usize>,
    rank: Vec<u32>,
    dim: usize,
}

impl FaceSpace {
    pub fn new(sets: Vec<FaceSet>) -> Result<Self> {
        let first = sets.first().ok_or(Error::Empty("no face sets"))?;
        let dim = first.dim();
        let mut lookup = HashMap::with_capacity(sets.len());
        for (i, s) in sets.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::SetDimensionMismatch {
                    left: first.set_id().to_string(),
                    left_dim: dim,
                    right: s.set_id().to_string(),
                    right_dim: s.dim(),
                });
            }
            if lookup.insert(s.set_id().to_string(), i).is_some() {
                return Err(Error::DuplicateSetId(s.set_id().to_string()));
            }
        }
        let mut order: Vec<usize> = (0..sets.len()).collect();
        order.sort_by(|&a, &b| sets[a].set_id().cmp(sets[b].set_id()));
        let mut rank = vec![0u32; sets.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as u32;
        }
        Ok(Self {
            sets,
            lookup,
            rank,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sets(&self) -> &[FaceSet] {
        &self.sets
    }

    pub fn set(&self, index: usize) -> &FaceSet {
        &self.sets[index]
    }

    pub fn index_of(&self, set_id: &str) -> Result<usize> {
        self.lookup
            .get(set_id)
            .copied()
            .ok_or_else(|| Error::UnknownSetId(set_id.to_string()))
    }

    pub fn get(&self, set_id: &str) -> Result<&FaceSet> {
        Ok(&self.sets[self.index_of(set_id)?])
    }

    pub fn id(&self, index: usize) -> &str {
        self.sets[index].set_id()
    }

    pub(crate) fn rank(&self, index: usize) -> u32 {
        self.rank[index]
    }

    pub(crate) fn rep(&self, index: usize) -> &[f64] {
        self.sets[index].representative().as_slice()
    }

    /// Cosine distance between two set representatives by index.
    /// Representatives are unit length, so only the dot product is needed.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        cosine_distance_with_norms(self.rep(a), 1.0, self.rep(b), 1.0)
    }

    /// Cosine distance between a set representative and an arbitrary vector.
    pub(crate) fn distance_to(&self, a: usize, v: &[f64], v_norm: f64) -> f64 {
        cosine_distance_with_norms(self.rep(a), 1.0, v, v_norm)
    }

    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter().map(|s| self.index_of(s.as_ref())).collect()
    }
}
