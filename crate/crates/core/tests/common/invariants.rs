//! Every documented invariant as a seeded property check.
//!
//! Each check takes a case count so the module suites and the acceptance
//! run share one definition.

use std::collections::BTreeSet;

use clusterface::classify::{
    identify_direct, identify_rank1, rank_order_search, verify_clusterface, verify_direct,
};
use clusterface::clustering::{cluster_at_threshold, run_salient_clustering, ClusteringResult};
use clusterface::config::PipelineConfig;
use clusterface::constraints::{
    knn, label_clusters, neighborhood_vote, space_labels, ClusterLabel, ConstraintMatrices, PairMap,
};
use clusterface::embedding::{
    aggregate_set, centroid_distance, cosine_distance, cosine_similarity, Embedding, FaceMember, SalientCluster,
};
use clusterface::eval::{
    all_pairs, cmc_curve, default_beta_grid, generate_from_bases, generate_synthetic, tar_far_curve, AbsentMate,
    GammaPolicy, Method, SyntheticSpec,
};
use clusterface::io::{load_manifest, render_report, Decisions, Format};
use clusterface::space::FaceSpace;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gen::{beta_gamma, labelled_space, permuted, space_of, vector};
use super::oracle::{reference_rank, naive_hac};

pub const CASES: u32 = 128;

pub struct Invariant {
    pub module: &'static str,
    pub name: &'static str,
    pub check: fn(u32) -> Result<(), String>,
}

pub fn registry() -> Vec<Invariant> {
    macro_rules! inv {
        ($module:literal, $name:ident) => {
            Invariant {
                module: $module,
                name: stringify!($name),
                check: $name,
            }
        };
    }
    vec![
        inv!("embedding-core", scale_invariance),
        inv!("embedding-core", similarity_symmetry),
        inv!("embedding-core", distance_range),
        inv!("embedding-core", uniform_aggregation_is_normalized_mean),
        inv!("embedding-core", singleton_centroid_distance),
        inv!("salient-clustering", hac_matches_oracle),
        inv!("salient-clustering", clusters_partition_input),
        inv!("salient-clustering", input_order_invariance),
        inv!("salient-clustering", threshold_nesting),
        inv!("constraint-engine", ma_transitive),
        inv!("constraint-engine", ma_na_disjoint),
        inv!("constraint-engine", na_label_is_cluster_of_i),
        inv!("constraint-engine", vote_order_invariance),
        inv!("constraint-engine", vote_k1_is_nearest_cluster),
        inv!("constrained-classification", ma_dominates_verification),
        inv!("constrained-classification", rank_matches_oracle),
        inv!("constrained-classification", rank_is_permutation),
        inv!("constrained-classification", ma_ranked_first),
        inv!("constrained-classification", empty_constraints_reduce),
        inv!("constrained-classification", singleton_identify_is_direct),
        inv!("eval-harness", cmc_monotone),
        inv!("eval-harness", direct_tar_far_monotone),
        inv!("eval-harness", baseline_sandwich),
        inv!("eval-harness", generator_determinism),
        inv!("cli-io", synth_manifest_closure),
        inv!("cli-io", cli_precedence),
        inv!("cli-io", serialization_stable),
    ]
}

/// Runs `test` on `cases` inputs from a fixed-seed generator.
pub fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        max_global_rejects: cases * 20,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    TestRunner::new_with_rng(config, rng)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn emb(v: Vec<f64>) -> Embedding {
    Embedding::new(v).unwrap()
}

fn cfg(beta: f64, gamma: f64, k: usize) -> PipelineConfig {
    PipelineConfig::new(beta, gamma, k, 0).unwrap()
}

fn constrained(space: &FaceSpace, config: &PipelineConfig) -> (ClusteringResult, ConstraintMatrices) {
    let result = run_salient_clustering(space, config).unwrap();
    let labels = label_clusters(&result, &space_labels(space));
    let m = ConstraintMatrices::build(space, &result, labels, config).unwrap();
    (result, m)
}

fn ids(space: &FaceSpace) -> Vec<String> {
    space.sets().iter().map(|s| s.set_id().to_string()).collect()
}

fn partition(result: &ClusteringResult) -> BTreeSet<BTreeSet<String>> {
    result
        .clusters
        .iter()
        .map(|c| c.member_set_ids.iter().cloned().collect())
        .collect()
}

/// A space together with a valid config and a seed for auxiliary choices.
fn space_config_seed(
    min: usize,
    max: usize,
    dims: &'static [usize],
) -> impl Strategy<Value = (FaceSpace, PipelineConfig, u64)> {
    (labelled_space(min, max, dims), beta_gamma(), 1usize..6, any::<u64>())
        .prop_map(|(s, (b, g), k, seed)| (s, cfg(b, g, k), seed))
}

// ---- embedding-core ----

pub fn scale_invariance(cases: u32) -> Result<(), String> {
    let strat = (2usize..16).prop_flat_map(|d| (vector(d), vector(d), 1e-3f64..1e3));
    run(cases, strat, |(a, b, l)| {
        let scaled: Vec<f64> = a.iter().map(|x| x * l).collect();
        let s1 = cosine_similarity(&emb(scaled), &emb(b.clone())).unwrap();
        let s0 = cosine_similarity(&emb(a), &emb(b)).unwrap();
        prop_assert!((s1 - s0).abs() <= 1e-12, "{s1} vs {s0}");
        Ok(())
    })
}

pub fn similarity_symmetry(cases: u32) -> Result<(), String> {
    let strat = (2usize..16).prop_flat_map(|d| (vector(d), vector(d)));
    run(cases, strat, |(a, b)| {
        let (a, b) = (emb(a), emb(b));
        prop_assert_eq!(cosine_similarity(&a, &b).unwrap(), cosine_similarity(&b, &a).unwrap());
        Ok(())
    })
}

pub fn distance_range(cases: u32) -> Result<(), String> {
    let strat = (2usize..16).prop_flat_map(|d| (vector(d), vector(d), any::<bool>()));
    run(cases, strat, |(a, b, negate)| {
        // Half the cases compare against an exact antipode.
        let b = if negate { a.iter().map(|x| -x).collect() } else { b };
        let d = cosine_distance(&emb(a), &emb(b)).unwrap();
        prop_assert!((0.0..=2.0).contains(&d), "{d}");
        Ok(())
    })
}

pub fn uniform_aggregation_is_normalized_mean(cases: u32) -> Result<(), String> {
    let strat = (2usize..10, 1usize..6).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(vector(d), n),
            prop::collection::vec(prop::option::of(0.01f64..1.0), n),
            0..n,
        )
    });
    run(cases, strat, |(vs, scores, hole)| {
        // Blank out one score so the whole set must fall back to uniform.
        let members: Vec<FaceMember> = vs
            .iter()
            .zip(&scores)
            .enumerate()
            .map(|(i, (v, s))| FaceMember::new(emb(v.clone()), if i == hole { None } else { *s }))
            .collect();
        let mut mean = vec![0.0; vs[0].len()];
        for v in &vs {
            for (m, x) in mean.iter_mut().zip(v) {
                *m += x / vs.len() as f64;
            }
        }
        let n = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let got = aggregate_set(&members).unwrap();
        for (g, m) in got.as_slice().iter().zip(&mean) {
            prop_assert!((g - m / n).abs() < 1e-12);
        }
        Ok(())
    })
}

pub fn singleton_centroid_distance(cases: u32) -> Result<(), String> {
    let strat = (2usize..16).prop_flat_map(|d| (vector(d), vector(d)));
    run(cases, strat, |(a, b)| {
        let c = |i, v: &Vec<f64>| SalientCluster {
            cluster_index: i,
            member_set_ids: vec![format!("x{i}")],
            centroid: v.clone(),
        };
        let dc = centroid_distance(&c(0, &a), &c(1, &b)).unwrap();
        let dm = cosine_distance(&emb(a), &emb(b)).unwrap();
        prop_assert!((dc - dm).abs() < 1e-12);
        Ok(())
    })
}

// ---- salient-clustering ----

/// Oracle equivalence over spaces of at most 12 sets in the given
/// dimensions. Instances within 1e-9 of a tie are rejected.
pub fn hac_oracle_in(cases: u32, dims: &'static [usize]) -> Result<(), String> {
    let strat = (2usize..=12, prop::sample::select(dims))
        .prop_flat_map(|(s, d)| (prop::collection::vec(vector(d), s), 0.005f64..1.2));
    run(cases, strat, |(vs, threshold)| {
        let space = space_of(&vs, &[]);
        let oracle = naive_hac(&space, threshold);
        prop_assume!(oracle.margin > 1e-9);
        let got = cluster_at_threshold(&space, &PipelineConfig::default(), threshold).unwrap();
        prop_assert_eq!(got.merge_log.len(), oracle.merges.len());
        for (t, (g, o)) in got.merge_log.iter().zip(&oracle.merges).enumerate() {
            prop_assert_eq!(g.iteration, t + 1);
            prop_assert_eq!((g.left, g.right, g.result), (o.left, o.right, o.result));
            prop_assert!((g.distance - o.distance).abs() <= 1e-9);
        }
        let mut parts: Vec<Vec<String>> = got
            .clusters
            .iter()
            .map(|c| {
                let mut m = c.member_set_ids.clone();
                m.sort();
                m
            })
            .collect();
        parts.sort();
        prop_assert_eq!(parts, oracle.partition);
        Ok(())
    })
}

pub fn hac_matches_oracle(cases: u32) -> Result<(), String> {
    hac_oracle_in(cases, &[2, 8, 64])
}

pub fn clusters_partition_input(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(1, 40, &[2, 5, 16]), |(space, config, _)| {
        let r = run_salient_clustering(&space, &config).unwrap();
        let mut seen = BTreeSet::new();
        for (i, c) in r.clusters.iter().enumerate() {
            prop_assert_eq!(c.cluster_index, i);
            prop_assert!(!c.member_set_ids.is_empty());
            for id in &c.member_set_ids {
                prop_assert!(seen.insert(id.clone()), "{} in two clusters", id);
            }
        }
        prop_assert_eq!(seen, ids(&space).into_iter().collect::<BTreeSet<_>>());
        Ok(())
    })
}

/// Member sets merged at each step, independent of node numbering.
fn merge_members(space: &FaceSpace, r: &ClusteringResult) -> Vec<(BTreeSet<String>, BTreeSet<String>)> {
    let mut nodes: Vec<BTreeSet<String>> = ids(space).into_iter().map(|i| BTreeSet::from([i])).collect();
    let mut out = Vec::new();
    for m in &r.merge_log {
        let (l, rr) = (nodes[m.left].clone(), nodes[m.right].clone());
        nodes.push(l.union(&rr).cloned().collect());
        out.push((l, rr));
    }
    out
}

pub fn input_order_invariance(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(2, 30, &[2, 5, 16]), |(space, config, seed)| {
        let other = permuted(&space, seed);
        let a = run_salient_clustering(&space, &config).unwrap();
        let b = run_salient_clustering(&other, &config).unwrap();
        prop_assert_eq!(partition(&a), partition(&b));
        prop_assert_eq!(merge_members(&space, &a), merge_members(&other, &b));
        Ok(())
    })
}

pub fn threshold_nesting(cases: u32) -> Result<(), String> {
    let strat = (labelled_space(2, 30, &[2, 5, 16]), 0.0f64..1.5, 0.0f64..1.0);
    run(cases, strat, |(space, t1, f)| {
        let t2 = t1 + f;
        let fine = cluster_at_threshold(&space, &PipelineConfig::default(), t1).unwrap();
        let coarse = cluster_at_threshold(&space, &PipelineConfig::default(), t2).unwrap();
        for c in &fine.clusters {
            let homes: BTreeSet<usize> = c
                .member_set_ids
                .iter()
                .map(|id| coarse.cluster_of(&space, id).unwrap())
                .collect();
            prop_assert_eq!(homes.len(), 1);
        }
        Ok(())
    })
}

// ---- constraint-engine ----

pub fn ma_transitive(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(2, 25, &[2, 4, 8]), |(space, config, _)| {
        let (_, m) = constrained(&space, &config);
        let ma = m.ma_map();
        for (&(i, j), &c) in ma {
            for (&(_, l), &c2) in ma.range((j, 0)..=(j, usize::MAX)) {
                if l != i {
                    prop_assert_eq!(ma.get(&(i, l)), Some(&c));
                    prop_assert_eq!(c, c2);
                }
            }
        }
        Ok(())
    })
}

pub fn ma_na_disjoint(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(2, 25, &[2, 4, 8]), |(space, config, _)| {
        let (_, m) = constrained(&space, &config);
        for key in m.na_map().keys() {
            prop_assert!(!m.ma_map().contains_key(key));
        }
        Ok(())
    })
}

pub fn na_label_is_cluster_of_i(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(2, 25, &[2, 4, 8]), |(space, config, _)| {
        let (r, m) = constrained(&space, &config);
        for &(i, j) in m.na_map().keys() {
            let ci = r.cluster_of_index(i);
            prop_assert_eq!(m.na_cluster(i, j), Some(ci));
            prop_assert_eq!(&m.na_at(i, j).unwrap().label, &m.labels()[ci].label);
        }
        Ok(())
    })
}

pub fn vote_order_invariance(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(2, 25, &[2, 4, 8]), |(space, config, seed)| {
        let other = permuted(&space, seed);
        let ra = run_salient_clustering(&space, &config).unwrap();
        let rb = run_salient_clustering(&other, &config).unwrap();
        let mut universe = ids(&space);
        for id in ids(&space) {
            let va = neighborhood_vote(&space, &id, &ra, config.k, config.beta).unwrap();
            let vb = neighborhood_vote(&other, &id, &rb, config.k, config.beta).unwrap();
            let members = |r: &ClusteringResult, v: Option<usize>| v.map(|c| r.clusters[c].member_set_ids.clone());
            prop_assert_eq!(members(&ra, va), members(&rb, vb));

            let before = knn(&space, &id, &universe, config.k, config.beta).unwrap();
            universe.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(before, knn(&space, &id, &universe, config.k, config.beta).unwrap());
        }
        Ok(())
    })
}

pub fn vote_k1_is_nearest_cluster(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(2, 25, &[2, 4, 8]), |(space, config, _)| {
        let r = run_salient_clustering(&space, &config).unwrap();
        for j in 0..space.len() {
            let nearest = (0..space.len())
                .filter(|&x| x != j)
                .map(|x| (space.distance(j, x), space.id(x), x))
                .filter(|&(d, _, _)| d < config.beta)
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
            let want = nearest.map(|(_, _, x)| r.cluster_of_index(x));
            prop_assert_eq!(neighborhood_vote(&space, space.id(j), &r, 1, config.beta).unwrap(), want);
        }
        Ok(())
    })
}

// ---- constrained-classification ----

pub fn ma_dominates_verification(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(2, 25, &[2, 4, 8]), |(space, config, _)| {
        let (r, m) = constrained(&space, &config);
        for &(i, j) in m.ma_map().keys() {
            let d = verify_clusterface(&space, space.id(i), space.id(j), &m, &r, &config).unwrap();
            prop_assert!(d.same_identity);
        }
        Ok(())
    })
}

/// A random constraint configuration: MA from a random partition, NA on a
/// random subset of the cross-cluster pairs, a random probe and a random
/// neighbour list in arbitrary order.
pub struct RandomConstraints {
    pub space: FaceSpace,
    pub matrices: ConstraintMatrices,
    pub probe: String,
    pub nn: Vec<String>,
}

pub fn random_constraints(space: FaceSpace, seed: u64) -> RandomConstraints {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = space.len();
    let nc = rng.gen_range(1..=s.min(4));
    let assign: Vec<usize> = (0..s).map(|_| rng.gen_range(0..nc)).collect();
    let na_rate = rng.gen_range(0.0..0.6);
    let (mut ma, mut na) = (PairMap::new(), PairMap::new());
    for i in 0..s {
        for j in 0..s {
            if i == j {
                continue;
            }
            if assign[i] == assign[j] {
                ma.insert((i, j), assign[i]);
            } else if rng.gen_bool(na_rate) {
                na.insert((i, j), assign[i]);
            }
        }
    }
    let labels = (0..nc).map(ClusterLabel::synthetic).collect();
    let matrices = ConstraintMatrices::from_maps(&space, ma, na, labels, 5).unwrap();
    let p = rng.gen_range(0..s);
    let mut nn: Vec<String> = (0..s).filter(|&x| x != p).map(|x| space.id(x).to_string()).collect();
    nn.shuffle(&mut rng);
    nn.truncate(rng.gen_range(0..=nn.len()));
    RandomConstraints {
        probe: space.id(p).to_string(),
        space,
        matrices,
        nn,
    }
}

pub fn rank_oracle_cases(cases: u32) -> Result<(), String> {
    run(cases, (labelled_space(2, 12, &[2, 3, 4]), any::<u64>()), |(space, seed)| {
        let c = random_constraints(space, seed);
        let got = rank_order_search(&c.space, &c.probe, &c.nn, &c.matrices).unwrap();
        prop_assert_eq!(got.ranked, reference_rank(&c.space, &c.probe, &c.nn, &c.matrices));
        Ok(())
    })
}

pub fn rank_matches_oracle(cases: u32) -> Result<(), String> {
    rank_oracle_cases(cases)
}

pub fn rank_is_permutation(cases: u32) -> Result<(), String> {
    run(cases, (labelled_space(2, 12, &[2, 3, 4]), any::<u64>()), |(space, seed)| {
        let c = random_constraints(space, seed);
        let got = rank_order_search(&c.space, &c.probe, &c.nn, &c.matrices).unwrap().ranked;
        let mut want: BTreeSet<String> = c.nn.iter().cloned().collect();
        for id in ids(&c.space) {
            if id != c.probe && c.matrices.ma(&c.space, &c.probe, &id).unwrap().is_some() {
                want.insert(id);
            }
        }
        prop_assert_eq!(got.len(), want.len());
        prop_assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), want);
        Ok(())
    })
}

pub fn ma_ranked_first(cases: u32) -> Result<(), String> {
    run(cases, (labelled_space(2, 12, &[2, 3, 4]), any::<u64>()), |(space, seed)| {
        let c = random_constraints(space, seed);
        let got = rank_order_search(&c.space, &c.probe, &c.nn, &c.matrices).unwrap().ranked;
        let ma = |x: &str| c.matrices.ma(&c.space, &c.probe, x).unwrap().is_some();
        let na = |x: &str| c.matrices.na(&c.space, &c.probe, x).unwrap().is_some();
        let last_ma = got.iter().rposition(|x| ma(x));
        let first_free = got.iter().position(|x| !ma(x) && !na(x));
        if let (Some(a), Some(b)) = (last_ma, first_free) {
            prop_assert!(a < b);
        }
        Ok(())
    })
}

pub fn empty_constraints_reduce(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(2, 15, &[2, 4, 8]), |(space, config, seed)| {
        let r = cluster_at_threshold(&space, &config, 0.0).unwrap();
        let m = ConstraintMatrices::empty(&space, config.k);
        for i in 0..space.len() {
            for j in 0..space.len() {
                let d = verify_clusterface(&space, space.id(i), space.id(j), &m, &r, &config).unwrap();
                prop_assert!(!d.same_identity);
            }
        }
        let c = random_constraints(space, seed);
        let got = rank_order_search(&c.space, &c.probe, &c.nn, &ConstraintMatrices::empty(&c.space, 5)).unwrap();
        prop_assert_eq!(got.ranked, c.nn);
        Ok(())
    })
}

pub fn singleton_identify_is_direct(cases: u32) -> Result<(), String> {
    run(cases, (labelled_space(2, 15, &[2, 4, 8]), any::<u64>()), |(space, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut all = ids(&space);
        all.shuffle(&mut rng);
        let split = rng.gen_range(1..all.len());
        let (probes, gallery) = all.split_at(split);
        let config = cfg(2.0, 1.0, gallery.len().max(1));
        let r = cluster_at_threshold(&space, &config, 0.0).unwrap();
        prop_assert_eq!(r.clusters.len(), space.len());
        let m = ConstraintMatrices::build(&space, &r, label_clusters(&r, &space_labels(&space)), &config).unwrap();
        for p in probes {
            let c = identify_rank1(&space, p, gallery, &m, &config).unwrap();
            prop_assert_eq!(c, identify_direct(&space, p, gallery).unwrap());
        }
        Ok(())
    })
}

// ---- eval-harness ----

fn small_spec() -> impl Strategy<Value = SyntheticSpec> {
    (2usize..5, 2usize..5, 3usize..9, 0.0f64..0.8, 0.0f64..=1.0, 0usize..3, any::<u64>(), 20.0f64..120.0).prop_map(
        |(identities, sets_per_identity, dimension, within_noise, condition_split, bridge_count, seed, angle)| {
            SyntheticSpec {
                identities,
                sets_per_identity,
                dimension,
                within_noise,
                condition_split,
                bridge_count,
                seed,
                mode_angle: angle.to_radians(),
                faces_per_set: 2,
            }
        },
    )
}

fn enrol_first(spec: &SyntheticSpec, space: &FaceSpace) -> (Vec<String>, Vec<String>) {
    let per = spec.sets_per_identity_total();
    let (g, p): (Vec<_>, Vec<_>) = ids(space).into_iter().enumerate().partition(|(i, _)| i % per == 0);
    (
        p.into_iter().map(|(_, x)| x).collect(),
        g.into_iter().map(|(_, x)| x).collect(),
    )
}

pub fn cmc_monotone(cases: u32) -> Result<(), String> {
    run(cases, (small_spec(), beta_gamma(), 1usize..8, any::<bool>()), |(spec, (b, g), k, cf)| {
        let space = FaceSpace::new(generate_synthetic(&spec).unwrap().sets).unwrap();
        let (probes, gallery) = enrol_first(&spec, &space);
        let method = if cf { Method::ClusterFace } else { Method::Direct };
        let cmc = cmc_curve(&space, &probes, &gallery, method, &cfg(b, g, k), 8, AbsentMate::Exclude).unwrap();
        for w in cmc.windows(2) {
            prop_assert!(w[0].accuracy <= w[1].accuracy);
        }
        prop_assert!(cmc.iter().all(|p| (0.0..=1.0).contains(&p.accuracy)));
        Ok(())
    })
}

pub fn direct_tar_far_monotone(cases: u32) -> Result<(), String> {
    run(cases, labelled_space(3, 14, &[2, 4, 8]), |space| {
        let pairs = all_pairs(&space);
        prop_assume!(pairs.iter().any(|p| p.genuine) && pairs.iter().any(|p| !p.genuine));
        let curve = tar_far_curve(&space, &pairs, Method::Direct, &default_beta_grid(), GammaPolicy::default(), 5)
            .unwrap();
        for w in curve.points.windows(2) {
            prop_assert!(w[0].beta < w[1].beta);
            prop_assert!(w[0].tar <= w[1].tar && w[0].far <= w[1].far);
        }
        Ok(())
    })
}

/// Noise-free identities on orthogonal axes: every within-identity
/// distance is 0 and every cross-identity distance is 1.
pub fn separated_space(identities: usize, sets: usize, seed: u64) -> FaceSpace {
    let dim = identities.max(2);
    let bases: Vec<Embedding> = (0..identities)
        .map(|i| {
            let mut v = vec![0.0; dim];
            v[i] = 1.0;
            emb(v)
        })
        .collect();
    let spec = SyntheticSpec {
        sets_per_identity: sets,
        dimension: dim,
        within_noise: 0.0,
        seed,
        ..SyntheticSpec::default()
    };
    FaceSpace::new(generate_from_bases(&spec, &bases).unwrap().sets).unwrap()
}

/// Pairs of distinct sets on which the two verifiers disagree.
pub fn sandwich_disagreements(space: &FaceSpace, config: &PipelineConfig) -> usize {
    let (r, m) = constrained(space, config);
    let mut bad = 0;
    for i in 0..space.len() {
        for j in (0..space.len()).filter(|&j| j != i) {
            let (a, b) = (space.id(i), space.id(j));
            let d = verify_direct(space, a, b, config.beta).unwrap();
            let c = verify_clusterface(space, a, b, &m, &r, config).unwrap();
            bad += usize::from(d.same_identity != c.same_identity);
        }
    }
    bad
}

pub fn baseline_sandwich(cases: u32) -> Result<(), String> {
    let strat = (2usize..6, 1usize..5, any::<u64>(), 0.01f64..=1.0, 0.0f64..0.9, 1usize..8);
    run(cases, strat, |(n, sets, seed, beta, f, k)| {
        let space = separated_space(n, sets, seed);
        prop_assert_eq!(sandwich_disagreements(&space, &cfg(beta, beta * f, k)), 0);
        Ok(())
    })
}

pub fn generator_determinism(cases: u32) -> Result<(), String> {
    run(cases, small_spec(), |spec| {
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        prop_assert_eq!(&a, &b);
        let metrics = |sets| {
            let space = FaceSpace::new(sets).unwrap();
            let (probes, gallery) = enrol_first(&spec, &space);
            let config = PipelineConfig::default();
            cmc_curve(&space, &probes, &gallery, Method::ClusterFace, &config, 5, AbsentMate::CountAsMiss).unwrap()
        };
        prop_assert_eq!(metrics(a.sets), metrics(b.sets));
        Ok(())
    })
}

// ---- cli-io ----

fn cli(args: &[&str]) -> i32 {
    clusterface::cli::run_command(std::iter::once("clusterface").chain(args.iter().copied()))
}

pub fn synth_manifest_closure(cases: u32) -> Result<(), String> {
    run(cases, small_spec(), |spec| {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let p = path.to_str().unwrap();
        let (ids_, sets_, dim_, noise_, split_, bridges_, seed_, angle_) = (
            spec.identities.to_string(),
            spec.sets_per_identity.to_string(),
            spec.dimension.to_string(),
            spec.within_noise.to_string(),
            spec.condition_split.to_string(),
            spec.bridge_count.to_string(),
            spec.seed.to_string(),
            spec.mode_angle.to_degrees().to_string(),
        );
        let code = cli(&[
            "synth", "--identities", &ids_, "--sets-per-identity", &sets_, "--dimension", &dim_, "--noise",
            &noise_, "--condition-split", &split_, "--bridges", &bridges_, "--seed", &seed_, "--mode-angle", &angle_,
            "--faces-per-set", "2", "--output", p,
        ]);
        prop_assert_eq!(code, 0);
        let loaded = load_manifest(&path).unwrap();
        let want = generate_synthetic(&SyntheticSpec {
            mode_angle: angle_.parse::<f64>().unwrap().to_radians(),
            ..spec.clone()
        })
        .unwrap();
        prop_assert_eq!(loaded.len(), want.sets.len());
        for (l, w) in loaded.iter().zip(&want.sets) {
            prop_assert_eq!(l.set_id(), w.set_id());
            prop_assert_eq!(l.label(), w.label());
            for (a, b) in l.representative().as_slice().iter().zip(w.representative().as_slice()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
        Ok(())
    })
}

pub fn cli_precedence(cases: u32) -> Result<(), String> {
    let layer = || {
        (
            prop::option::of(0.5f64..1.0),
            prop::option::of(0.0f64..0.3),
            prop::option::of(1usize..9),
            prop::option::of(0u64..100),
        )
    };
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("in.jsonl");
    std::fs::write(
        &manifest,
        concat!(
            r#"{"set_id":"a","label":"x","faces":[{"vec":[1,0,0]}]}"#,
            "\n",
            r#"{"set_id":"b","label":"y","faces":[{"vec":[0,1,0]}]}"#,
            "\n"
        ),
    )
    .unwrap();
    let dir_path = dir.path().to_path_buf();
    run(cases, (layer(), layer(), any::<bool>()), move |(file, flags, use_file)| {
        let conf = dir_path.join("run.json");
        let out = dir_path.join("out.json");
        let mut obj = serde_json::Map::new();
        if let Some(b) = file.0 {
            obj.insert("beta".into(), b.into());
        }
        if let Some(g) = file.1 {
            obj.insert("gamma".into(), g.into());
        }
        if let Some(k) = file.2 {
            obj.insert("k".into(), k.into());
        }
        if let Some(s) = file.3 {
            obj.insert("seed".into(), s.into());
        }
        // The manifest path arrives through the file half the time.
        let mut args: Vec<String> = vec!["cluster".into(), "--output".into(), out.to_str().unwrap().into()];
        if use_file {
            obj.insert("input".into(), manifest.to_str().unwrap().into());
        } else {
            args.extend(["--input".into(), manifest.to_str().unwrap().into()]);
        }
        std::fs::write(&conf, serde_json::to_string(&obj).unwrap()).unwrap();
        args.extend(["--config".into(), conf.to_str().unwrap().into()]);
        if let Some(b) = flags.0 {
            args.extend(["--beta".into(), b.to_string()]);
        }
        if let Some(g) = flags.1 {
            args.extend(["--gamma".into(), g.to_string()]);
        }
        if let Some(k) = flags.2 {
            args.extend(["--k".into(), k.to_string()]);
        }
        if let Some(s) = flags.3 {
            args.extend(["--seed".into(), s.to_string()]);
        }
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        prop_assert_eq!(cli(&argv), 0);

        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let c = &v["config"];
        let beta = flags.0.or(file.0).unwrap_or(0.4);
        let gamma = flags.1.or(file.1).unwrap_or(0.1);
        prop_assert!((c["beta"].as_f64().unwrap() - beta).abs() <= beta * 1e-5);
        prop_assert!((c["gamma"].as_f64().unwrap() - gamma).abs() <= 1e-6);
        prop_assert_eq!(c["k"].as_u64().unwrap() as usize, flags.2.or(file.2).unwrap_or(5));
        prop_assert_eq!(c["seed"].as_u64().unwrap(), flags.3.or(file.3).unwrap_or(0));
        Ok(())
    })
}

pub fn serialization_stable(cases: u32) -> Result<(), String> {
    run(cases, space_config_seed(2, 20, &[2, 4, 8]), |(space, config, seed)| {
        let render = |space: &FaceSpace| {
            let (r, m) = constrained(space, &config);
            let mut pairs: Vec<(String, String)> = Vec::new();
            let ids = ids(space);
            for a in &ids {
                for b in &ids {
                    pairs.push((a.clone(), b.clone()));
                }
            }
            pairs.sort();
            let decisions: Vec<_> = pairs
                .iter()
                .map(|(a, b)| verify_clusterface(space, a, b, &m, &r, &config).unwrap())
                .collect();
            let mut out = String::new();
            for f in [Format::Json, Format::Csv] {
                out += &render_report(&r, f);
                out += &render_report(&m, f);
                out += &render_report(&Decisions::new(&decisions).with_rule(), f);
            }
            out
        };
        let a = render(&space);
        prop_assert_eq!(&a, &render(&space));
        // Decisions and constraint rows do not depend on input order.
        let b = render(&permuted(&space, seed));
        let tail = |s: &str| {
            s.lines()
                .filter(|l| l.contains(",MA") || l.contains(",NA"))
                .map(str::to_string)
                .collect::<BTreeSet<_>>()
        };
        prop_assert_eq!(tail(&a), tail(&b));
        Ok(())
    })
}
