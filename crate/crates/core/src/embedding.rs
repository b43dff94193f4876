//! Embedding geometry: cosine similarity and distance, weighted set
//! aggregation, and cluster centroids.
//!
//! Every threshold in the crate lives in cosine-distance space,
//! `d(a, b) = 1 - cos(a, b)`, so "closer" always means "smaller".

use crate::error::{Error, Result};

/// A validated feature vector: finite components and a strictly positive norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(Vec<f64>);

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("embedding has no components"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if norm(&values) <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self(values))
    }

    /// Builds an embedding and scales it to unit length.
    pub fn unit(values: Vec<f64>) -> Result<Self> {
        Ok(Self::new(values)?.normalized())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self(self.0.iter().map(|v| v / n).collect())
    }
}

impl AsRef<[f64]> for Embedding {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine distance between two raw vectors whose norms are already known.
/// The result is clamped to `[0, 2]` to absorb rounding.
#[inline]
pub(crate) fn cosine_distance_with_norms(a: &[f64], na: f64, b: &[f64], nb: f64) -> f64 {
    (1.0 - dot(a, b) / (na * nb)).clamp(0.0, 2.0)
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// `(a . b) / (|a| |b|)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(a: &Embedding, b: &Embedding) -> Result<f64> {
    check_dims(&a.0, &b.0)?;
    Ok((dot(&a.0, &b.0) / (a.norm() * b.norm())).clamp(-1.0, 1.0))
}

/// `1 - cosine_similarity(a, b)`, in `[0, 2]`.
pub fn cosine_distance(a: &Embedding, b: &Embedding) -> Result<f64> {
    Ok(1.0 - cosine_similarity(a, b)?)
}

/// One face inside a face set: its embedding plus an optional detector score.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceMember {
    pub embedding: Embedding,
    pub score: Option<f64>,
}

impl FaceMember {
    pub fn new(embedding: Embedding, score: Option<f64>) -> Self {
        Self { embedding, score }
    }
}

/// Collapses a set of faces into one representative embedding.
///
/// Members are weighted by their detection scores normalized to sum to one.
/// If any score is missing or non-positive the whole set falls back to
/// uniform weights. The weighted sum is scaled to unit length.
pub fn aggregate_set(members: &[FaceMember]) -> Result<Embedding> {
    let first = members
        .first()
        .ok_or(Error::Empty("face set has no members"))?;
    let dim = first.embedding.dim();
    for m in members {
        check_dims(first.embedding.as_slice(), m.embedding.as_slice())?;
        if let Some(s) = m.score {
            if s.is_nan() || s > 1.0 {
                return Err(Error::InvalidScore(s));
            }
        }
    }

    let scored = members.iter().all(|m| matches!(m.score, Some(s) if s > 0.0));
    let weights: Vec<f64> = if scored {
        let total: f64 = members.iter().filter_map(|m| m.score).sum();
        members.iter().map(|m| m.score.unwrap_or(0.0) / total).collect()
    } else {
        vec![1.0 / members.len() as f64; members.len()]
    };

    let mut acc = vec![0.0; dim];
    for (m, w) in members.iter().zip(&weights) {
        for (a, v) in acc.iter_mut().zip(m.embedding.as_slice()) {
            *a += w * v;
        }
    }
    // Opposing members can cancel out completely.
    Embedding::unit(acc)
}

/// An identified collection of faces with a cached representative.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSet {
    set_id: String,
    label: Option<String>,
    members: Vec<FaceMember>,
    representative: Embedding,
}

impl FaceSet {
    /// Builds a face set. Member embeddings are normalized to unit length and
    /// the representative is computed with [`aggregate_set`].
    pub fn new(
        set_id: impl Into<String>,
        label: Option<String>,
        members: Vec<FaceMember>,
    ) -> Result<Self> {
        let members: Vec<FaceMember> = members
            .into_iter()
            .map(|m| FaceMember::new(m.embedding.normalized(), m.score))
            .collect();
        let representative = aggregate_set(&members)?;
        Ok(Self {
            set_id: set_id.into(),
            label,
            members,
            representative,
        })
    }

    /// A set of cardinality one, which is how single images are handled.
    pub fn single(set_id: impl Into<String>, label: Option<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(set_id, label, vec![FaceMember::new(Embedding::new(values)?, None)])
    }

    pub fn set_id(&self) -> &str {
        &self.set_id
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn members(&self) -> &[FaceMember] {
        &self.members
    }

    pub fn representative(&self) -> &Embedding {
        &self.representative
    }

    pub fn dim(&self) -> usize {
        self.representative.dim()
    }

    /// Recomputes the representative from the members and checks it against
    /// the cached one.
    pub fn representative_is_consistent(&self, tol: f64) -> bool {
        match aggregate_set(&self.members) {
            Ok(rep) => rep
                .as_slice()
                .iter()
                .zip(self.representative.as_slice())
                .all(|(a, b)| (a - b).abs() <= tol),
            Err(_) => false,
        }
    }
}

/// Unweighted arithmetic mean of member representatives. Not re-normalized.
pub fn centroid(representatives: &[&Embedding]) -> Result<Vec<f64>> {
    let first = representatives
        .first()
        .ok_or(Error::Empty("centroid of an empty cluster"))?;
    let mut acc = vec![0.0; first.dim()];
    for r in representatives {
        check_dims(first.as_slice(), r.as_slice())?;
        for (a, v) in acc.iter_mut().zip(r.as_slice()) {
            *a += v;
        }
    }
    let n = representatives.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(acc)
}

/// A salient cluster: member set ids plus their cached centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct SalientCluster {
    pub cluster_index: usize,
    pub member_set_ids: Vec<String>,
    pub centroid: Vec<f64>,
}

impl SalientCluster {
    pub fn size(&self) -> usize {
        self.member_set_ids.len()
    }
}

/// Cosine distance between two cluster centroids.
pub fn centroid_distance(x: &SalientCluster, y: &SalientCluster) -> Result<f64> {
    check_dims(&x.centroid, &y.centroid)?;
    let nx = norm(&x.centroid);
    if nx <= 0.0 {
        return Err(Error::DegenerateCluster(x.cluster_index));
    }
    let ny = norm(&y.centroid);
    if ny <= 0.0 {
        return Err(Error::DegenerateCluster(y.cluster_index));
    }
    Ok(cosine_distance_with_norms(&x.centroid, nx, &y.centroid, ny))
}
