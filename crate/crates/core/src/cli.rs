//! The `clusterface` command line.
//!
//! Pipeline parameters resolve in three layers: built-in defaults, then a
//! JSON file passed with `--config`, then explicit flags.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use crate::classify::{rank_order_search, verify_clusterface, verify_direct, RankedList, VerificationDecision};
use crate::clustering::{cluster_at_threshold, run_salient_clustering, ClusteringResult};
use crate::config::{PipelineConfig, DEFAULT_BETA, DEFAULT_GAMMA, DEFAULT_K};
use crate::constraints::{knn, label_clusters, space_labels, ConstraintMatrices};
use crate::embedding::FaceSet;
use crate::error::{Error, Result};
use crate::eval::metrics::gallery_rankings;
use crate::eval::{
    all_pairs, cmc_curve, default_beta_grid, generate_synthetic, scaling_bench, tar_far_curve, AbsentMate,
    GammaPolicy, LabeledPair, Method, MetricsReport, SyntheticSpec,
};
use crate::io::{
    load_manifest, load_pairs, write_manifest, write_pairs, write_report, Decisions, Format, Identification,
    Identifications, RankedLists,
};
use crate::space::FaceSpace;

#[derive(Debug, Parser)]
#[command(name = "clusterface", version, about = "Salient clustering and constrained face-set matching")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Face-set manifest (JSON Lines).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Pair list CSV with a `left,right` header.
    #[arg(long, global = true)]
    pairs: Option<PathBuf>,
    /// Probe manifest.
    #[arg(long, global = true)]
    probes: Option<PathBuf>,
    /// Gallery manifest.
    #[arg(long, global = true)]
    gallery: Option<PathBuf>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// json or csv; inferred from the output extension when omitted.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Use direct associations instead of clustering and constraints.
    #[arg(long, global = true)]
    baseline: bool,
    /// JSON run configuration; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Salient clustering of a manifest; writes the clustering result.
    Cluster {
        /// Also write the MA/NA constraint list here.
        #[arg(long)]
        constraints: Option<PathBuf>,
    },
    /// Same-identity decisions for every pair in --pairs.
    Verify {
        /// Add the rule that produced each decision.
        #[arg(long)]
        explain: bool,
        /// Also write a TAR@FAR sweep over all labelled pairs.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Rank-1 identity of every probe against the gallery.
    Identify {
        /// Also write a CMC report.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        max_rank: usize,
    },
    /// Constrained rank-order search for every probe.
    Rank,
    /// Generate a synthetic manifest.
    Synth {
        #[arg(long, default_value_t = 10)]
        identities: usize,
        #[arg(long, default_value_t = 6)]
        sets_per_identity: usize,
        #[arg(long, default_value_t = 32)]
        dimension: usize,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long, default_value_t = 0.0)]
        condition_split: f64,
        #[arg(long, default_value_t = 0)]
        bridges: usize,
        /// Angle between condition modes, in degrees.
        #[arg(long, default_value_t = 75.0)]
        mode_angle: f64,
        #[arg(long, default_value_t = 3)]
        faces_per_set: usize,
    },
    /// Time salient clustering across sizes.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [500usize, 1000, 2000, 4000])]
        sizes: Vec<usize>,
    },
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfigFile {
    beta: Option<f64>,
    gamma: Option<f64>,
    k: Option<usize>,
    seed: Option<u64>,
    input: Option<PathBuf>,
    pairs: Option<PathBuf>,
    probes: Option<PathBuf>,
    gallery: Option<PathBuf>,
    output: Option<PathBuf>,
    format: Option<String>,
}

struct Settings {
    config: PipelineConfig,
    seed: u64,
    input: Option<PathBuf>,
    pairs: Option<PathBuf>,
    probes: Option<PathBuf>,
    gallery: Option<PathBuf>,
    output: Option<PathBuf>,
    format: Option<Format>,
    method: Method,
}

impl Settings {
    fn resolve(c: Common) -> Result<Self> {
        let file = match &c.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str::<RunConfigFile>(&text).map_err(|e| Error::Parse {
                    path: path.clone(),
                    line: e.line(),
                    message: e.to_string(),
                })?
            }
            None => RunConfigFile::default(),
        };
        let seed = c.seed.or(file.seed).unwrap_or(0);
        let config = PipelineConfig {
            beta: c.beta.or(file.beta).unwrap_or(DEFAULT_BETA),
            gamma: c.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA),
            k: c.k.or(file.k).unwrap_or(DEFAULT_K),
            seed,
            ..PipelineConfig::default()
        };
        config.validate()?;
        let format = c.format.or(file.format).map(|f| f.parse()).transpose()?;
        Ok(Self {
            config,
            seed,
            input: c.input.or(file.input),
            pairs: c.pairs.or(file.pairs),
            probes: c.probes.or(file.probes),
            gallery: c.gallery.or(file.gallery),
            output: c.output.or(file.output),
            format,
            method: if c.baseline { Method::Direct } else { Method::ClusterFace },
        })
    }

    fn require<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig(format!("missing required flag --{flag}")))
    }

    fn output(&self) -> Result<&Path> {
        Self::require(&self.output, "output")
    }

    fn format_for(&self, path: &Path) -> Format {
        self.format.unwrap_or_else(|| {
            match path.extension().and_then(|e| e.to_str()) {
                Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
                _ => Format::Json,
            }
        })
    }
}

/// Runs the command line and returns the process exit status: 0 on
/// success, 1 for usage or validation errors, 2 for I/O errors.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let settings = Settings::resolve(cli.common)?;
    match cli.command {
        Command::Cluster { constraints } => cmd_cluster(&settings, constraints.as_deref()),
        Command::Verify { explain, report } => cmd_verify(&settings, explain, report.as_deref()),
        Command::Identify { report, max_rank } => cmd_identify(&settings, report.as_deref(), max_rank),
        Command::Rank => cmd_rank(&settings),
        Command::Synth {
            identities,
            sets_per_identity,
            dimension,
            noise,
            condition_split,
            bridges,
            mode_angle,
            faces_per_set,
        } => {
            let spec = SyntheticSpec {
                identities,
                sets_per_identity,
                dimension,
                within_noise: noise,
                condition_split,
                bridge_count: bridges,
                seed: settings.seed,
                mode_angle: mode_angle.to_radians(),
                faces_per_set,
            };
            cmd_synth(&settings, &spec)
        }
        Command::Bench { sizes } => {
            let template = SyntheticSpec {
                seed: settings.seed,
                ..SyntheticSpec::default()
            };
            let report = scaling_bench(&sizes, &template, &settings.config)?;
            let out = settings.output()?;
            write_report(&report, out, settings.format_for(out))
        }
    }
}

/// Adds `incoming` to `sets`, skipping exact duplicates of sets already
/// present and rejecting conflicting ones.
fn merge_sets(sets: &mut Vec<FaceSet>, incoming: Vec<FaceSet>) -> Result<Vec<String>> {
    let mut ids = Vec::with_capacity(incoming.len());
    for s in incoming {
        ids.push(s.set_id().to_string());
        match sets.iter().find(|x| x.set_id() == s.set_id()) {
            Some(existing) if existing == &s => {}
            Some(_) => return Err(Error::DuplicateSetId(s.set_id().to_string())),
            None => sets.push(s),
        }
    }
    Ok(ids)
}

/// The working space plus the ids read from the probe and gallery
/// manifests, when given.
struct Loaded {
    space: FaceSpace,
    probes: Option<Vec<String>>,
    gallery: Option<Vec<String>>,
}

/// Merges `--input` with any probe and gallery manifests.
fn load_space(settings: &Settings) -> Result<Loaded> {
    let mut sets = match &settings.input {
        Some(p) => load_manifest(p)?,
        None => Vec::new(),
    };
    let probes = match &settings.probes {
        Some(p) => Some(merge_sets(&mut sets, load_manifest(p)?)?),
        None => None,
    };
    let gallery = match &settings.gallery {
        Some(p) => Some(merge_sets(&mut sets, load_manifest(p)?)?),
        None => None,
    };
    if sets.is_empty() {
        return Err(Error::InvalidConfig("no face sets: pass --input or --probes/--gallery".into()));
    }
    Ok(Loaded {
        space: FaceSpace::new(sets)?,
        probes,
        gallery,
    })
}

fn constrain(space: &FaceSpace, config: &PipelineConfig) -> Result<(ClusteringResult, ConstraintMatrices)> {
    let result = run_salient_clustering(space, config)?;
    let labels = label_clusters(&result, &space_labels(space));
    let matrices = ConstraintMatrices::build(space, &result, labels, config)?;
    Ok((result, matrices))
}

fn cmd_cluster(settings: &Settings, constraints: Option<&Path>) -> Result<()> {
    let space = load_space(settings)?.space;
    let config = &settings.config;
    let result = match settings.method {
        Method::Direct => cluster_at_threshold(&space, config, 0.0)?,
        Method::ClusterFace => run_salient_clustering(&space, config)?,
    };
    let out = settings.output()?;
    write_report(&result, out, settings.format_for(out))?;
    if let Some(path) = constraints {
        let labels = label_clusters(&result, &space_labels(&space));
        let matrices = match settings.method {
            Method::Direct => ConstraintMatrices::empty(&space, config.k),
            Method::ClusterFace => ConstraintMatrices::build(&space, &result, labels, config)?,
        };
        write_report(&matrices, path, settings.format_for(path))?;
    }
    Ok(())
}

fn cmd_verify(settings: &Settings, explain: bool, report: Option<&Path>) -> Result<()> {
    let space = load_space(settings)?.space;
    let pairs = load_pairs(Settings::require(&settings.pairs, "pairs")?)?;
    let config = &settings.config;
    let decisions: Vec<VerificationDecision> = match settings.method {
        Method::Direct => pairs
            .par_iter()
            .map(|(l, r)| verify_direct(&space, l, r, config.beta))
            .collect::<Result<_>>()?,
        Method::ClusterFace => {
            let (result, matrices) = constrain(&space, config)?;
            pairs
                .par_iter()
                .map(|(l, r)| verify_clusterface(&space, l, r, &matrices, &result, config))
                .collect::<Result<_>>()?
        }
    };
    let out = settings.output()?;
    let mut view = Decisions::new(&decisions);
    if explain {
        view = view.with_rule();
    }
    write_report(&view, out, settings.format_for(out))?;

    if let Some(path) = report {
        let labelled: Vec<LabeledPair> = if pairs.is_empty() {
            all_pairs(&space)
        } else {
            pairs
                .iter()
                .map(|(l, r)| {
                    let label = |id: &str| -> Result<String> {
                        space
                            .get(id)?
                            .label()
                            .map(str::to_string)
                            .ok_or_else(|| Error::Protocol(format!("set `{id}` has no label")))
                    };
                    Ok(LabeledPair {
                        genuine: label(l)? == label(r)?,
                        left: l.clone(),
                        right: r.clone(),
                    })
                })
                .collect::<Result<_>>()?
        };
        let curve = tar_far_curve(
            &space,
            &labelled,
            settings.method,
            &default_beta_grid(),
            GammaPolicy::default(),
            config.k,
        )?;
        let metrics = MetricsReport::new(settings.method, *config).with_verification(&curve);
        write_report(&metrics, path, settings.format_for(path))?;
    }
    Ok(())
}

/// Probe and gallery ids; without a gallery manifest every non-probe set
/// is enrolled.
fn probes_and_gallery(
    space: &FaceSpace,
    probes: Option<Vec<String>>,
    gallery: Option<Vec<String>>,
) -> Result<(Vec<String>, Vec<String>)> {
    let probes = probes.ok_or_else(|| Error::InvalidConfig("missing required flag --probes".into()))?;
    let gallery = match gallery {
        Some(g) => g,
        None => {
            let p: std::collections::HashSet<&str> = probes.iter().map(String::as_str).collect();
            space
                .sets()
                .iter()
                .map(|s| s.set_id())
                .filter(|id| !p.contains(id))
                .map(str::to_string)
                .collect()
        }
    };
    if gallery.is_empty() {
        return Err(Error::Empty("gallery"));
    }
    Ok((probes, gallery))
}

fn cmd_identify(settings: &Settings, report: Option<&Path>, max_rank: usize) -> Result<()> {
    let Loaded { space, probes, gallery } = load_space(settings)?;
    let (probes, gallery) = probes_and_gallery(&space, probes, gallery)?;
    let config = &settings.config;
    let rankings = gallery_rankings(&space, &probes, &gallery, settings.method, config)?;
    let ids: Vec<Identification> = probes
        .iter()
        .zip(&rankings)
        .map(|(p, ranked)| {
            let top = ranked.first().map(|&i| space.set(i));
            Identification {
                probe: p.clone(),
                set_id: top.map(|s| s.set_id().to_string()),
                identity: top.and_then(|s| s.label().map(str::to_string)),
            }
        })
        .collect();
    let out = settings.output()?;
    write_report(&Identifications(&ids), out, settings.format_for(out))?;

    if let Some(path) = report {
        let cmc = cmc_curve(&space, &probes, &gallery, settings.method, config, max_rank, AbsentMate::Exclude)?;
        let metrics = MetricsReport::new(settings.method, *config).with_identification(cmc, probes.len(), gallery.len());
        write_report(&metrics, path, settings.format_for(path))?;
    }
    Ok(())
}

fn cmd_rank(settings: &Settings) -> Result<()> {
    let Loaded { space, probes, gallery } = load_space(settings)?;
    let (probes, gallery) = probes_and_gallery(&space, probes, gallery)?;
    let config = &settings.config;
    let matrices = match settings.method {
        Method::Direct => None,
        Method::ClusterFace => Some(constrain(&space, config)?.1),
    };
    let lists: Vec<RankedList> = probes
        .par_iter()
        .map(|p| {
            let nn: Vec<String> = knn(&space, p, &gallery, config.k, config.beta)?
                .into_iter()
                .map(|n| n.set_id)
                .collect();
            match &matrices {
                Some(m) => rank_order_search(&space, p, &nn, m),
                None => Ok(RankedList {
                    probe: p.clone(),
                    ranked: nn,
                }),
            }
        })
        .collect::<Result<_>>()?;
    let out = settings.output()?;
    write_report(&RankedLists(&lists), out, settings.format_for(out))
}

/// Writes the manifest, and optionally every labelled pair plus a
/// probe/gallery split that enrols each identity's first set.
fn cmd_synth(settings: &Settings, spec: &SyntheticSpec) -> Result<()> {
    let data = generate_synthetic(spec)?;
    write_manifest(&data.sets, settings.output()?)?;
    if let Some(path) = &settings.pairs {
        let space = FaceSpace::new(data.sets.clone())?;
        let pairs: Vec<(String, String)> = all_pairs(&space).into_iter().map(|p| (p.left, p.right)).collect();
        write_pairs(&pairs, path)?;
    }
    if settings.probes.is_some() || settings.gallery.is_some() {
        let per = spec.sets_per_identity_total();
        let (gallery, probes): (Vec<_>, Vec<_>) = data
            .sets
            .iter()
            .enumerate()
            .partition(|(i, _)| i % per == 0);
        let strip = |v: Vec<(usize, &FaceSet)>| v.into_iter().map(|(_, s)| s.clone()).collect::<Vec<_>>();
        if let Some(path) = &settings.probes {
            write_manifest(&strip(probes), path)?;
        }
        if let Some(path) = &settings.gallery {
            write_manifest(&strip(gallery), path)?;
        }
    }
    Ok(())
}
