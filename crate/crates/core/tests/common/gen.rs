//! Random inputs for property tests.

use clusterface::embedding::FaceSet;
use clusterface::space::FaceSpace;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim).prop_filter("norm bounded away from zero", |v| {
        v.iter().map(|x| x * x).sum::<f64>() > 1e-4
    })
}

/// A set id that does not follow input order, so tie-breaks by id and by
/// position differ.
pub fn scrambled_id(i: usize) -> String {
    format!("s{:02}", (i * 7 + 3) % 97)
}

/// Single-image sets from raw vectors, with optional labels.
pub fn space_of(vectors: &[Vec<f64>], labels: &[Option<String>]) -> FaceSpace {
    let sets = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| FaceSet::single(scrambled_id(i), labels.get(i).cloned().flatten(), v.clone()).unwrap())
        .collect();
    FaceSpace::new(sets).unwrap()
}

/// Spaces of `min..=max` sets in a dimension drawn from `dims`, each set
/// labelled with one of three identities.
pub fn labelled_space(min: usize, max: usize, dims: &'static [usize]) -> impl Strategy<Value = FaceSpace> {
    (min..=max, prop::sample::select(dims)).prop_flat_map(|(s, d)| {
        (
            prop::collection::vec(vector(d), s),
            prop::collection::vec(prop::sample::select(&["ann", "bob", "cy"][..]), s),
        )
            .prop_map(|(vs, ls)| {
                let labels: Vec<Option<String>> = ls.into_iter().map(|l| Some(l.to_string())).collect();
                space_of(&vs, &labels)
            })
    })
}

/// `(beta, gamma)` with `0 <= gamma < beta <= 2`.
pub fn beta_gamma() -> impl Strategy<Value = (f64, f64)> {
    (0.02f64..1.6, 0.0f64..0.9).prop_map(|(b, f)| (b, b * f))
}

/// The same sets in a different input order.
pub fn permuted(space: &FaceSpace, seed: u64) -> FaceSpace {
    let mut sets = space.sets().to_vec();
    sets.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    FaceSpace::new(sets).unwrap()
}

pub fn random_unit(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
