//! Deterministic JSON and CSV rendering of pipeline outputs.
//!
//! Floats are rounded to 6 significant digits everywhere. JSON objects have
//! sorted keys; CSV always carries a header row, even with no data.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::classify::{RankedList, VerificationDecision};
use crate::clustering::ClusteringResult;
use crate::constraints::ConstraintMatrices;
use crate::error::{Error, Result};
use crate::eval::{CmcPoint, MetricsReport, ScalingReport};
use crate::io::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}` (expected json or csv)"))),
        }
    }
}

/// Rounds to 6 significant digits. Non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("scientific notation parses back")
}

fn fmt_float(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types always serialize")
}

/// Anything that `write_report` can serialize.
pub trait Report {
    fn to_json(&self) -> Value;
    fn csv_header(&self) -> &'static [&'static str];
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

pub fn render_report(report: &(impl Report + ?Sized), format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&round_json(report.to_json())).expect("value serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(report.csv_header()).expect("in-memory write");
            for row in report.csv_rows() {
                w.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
    }
}

pub fn write_report(report: &(impl Report + ?Sized), path: impl AsRef<Path>, format: Format) -> Result<()> {
    write_atomic(path.as_ref(), render_report(report, format).as_bytes())
}

impl Report for MetricsReport {
    fn to_json(&self) -> Value {
        let mut v = to_value(self);
        let tar: Map<String, Value> = self
            .tar_at_far
            .iter()
            .map(|p| (fmt_float(p.far), json!(p.tar)))
            .collect();
        v["tar_at_far"] = Value::Object(tar);
        v
    }

    /// The ROC sweep, or the CMC curve for identification-only reports.
    fn csv_header(&self) -> &'static [&'static str] {
        if self.roc.is_empty() && !self.cmc.is_empty() {
            self.cmc.csv_header()
        } else {
            &["threshold", "far", "tar"]
        }
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        if self.roc.is_empty() && !self.cmc.is_empty() {
            return self.cmc.csv_rows();
        }
        self.roc
            .iter()
            .map(|p| vec![fmt_float(p.beta), fmt_float(p.far), fmt_float(p.tar)])
            .collect()
    }
}

impl Report for ClusteringResult {
    fn to_json(&self) -> Value {
        let clusters: Vec<Value> = self
            .clusters
            .iter()
            .map(|c| {
                json!({
                    "cluster_index": c.cluster_index,
                    "members": c.member_set_ids,
                    "centroid": c.centroid,
                })
            })
            .collect();
        json!({
            "config": to_value(&self.config),
            "termination_distance": self.termination_distance(),
            "distance_evaluations": self.count_distance_evaluations(),
            "clusters": clusters,
            "merge_log": to_value(&self.merge_log),
        })
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["iteration", "left", "right", "distance", "result"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.merge_log
            .iter()
            .map(|m| {
                vec![
                    m.iteration.to_string(),
                    m.left.to_string(),
                    m.right.to_string(),
                    fmt_float(m.distance),
                    m.result.to_string(),
                ]
            })
            .collect()
    }
}

impl Report for ConstraintMatrices {
    fn to_json(&self) -> Value {
        Value::Array(
            self.rows()
                .map(|(i, j, kind, label)| json!({"i": i, "j": j, "kind": kind.as_str(), "label": label}))
                .collect(),
        )
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["i", "j", "kind", "label"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows()
            .map(|(i, j, kind, label)| vec![i.into(), j.into(), kind.as_str().into(), label.into()])
            .collect()
    }
}

impl Report for ScalingReport {
    fn to_json(&self) -> Value {
        to_value(self)
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["s", "distance_evaluations", "wall_time_secs"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.s.to_string(), r.distance_evaluations.to_string(), fmt_float(r.wall_time_secs)])
            .collect()
    }
}

impl Report for [CmcPoint] {
    fn to_json(&self) -> Value {
        to_value(&self)
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["rank", "accuracy"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|p| vec![p.rank.to_string(), fmt_float(p.accuracy)])
            .collect()
    }
}

/// Verification decisions, one per input pair. The firing rule is only
/// written when requested, so direct and constrained runs stay comparable.
pub struct Decisions<'a> {
    pub decisions: &'a [VerificationDecision],
    pub with_rule: bool,
}

impl<'a> Decisions<'a> {
    pub fn new(decisions: &'a [VerificationDecision]) -> Self {
        Self {
            decisions,
            with_rule: false,
        }
    }

    pub fn with_rule(self) -> Self {
        Self {
            with_rule: true,
            ..self
        }
    }
}

impl Report for Decisions<'_> {
    fn to_json(&self) -> Value {
        Value::Array(
            self.decisions
                .iter()
                .map(|d| {
                    let mut v = json!({
                        "left": d.pair.0,
                        "right": d.pair.1,
                        "same_identity": d.same_identity,
                    });
                    if self.with_rule {
                        v["rule"] = json!(d.rule_fired.to_string());
                    }
                    v
                })
                .collect(),
        )
    }

    fn csv_header(&self) -> &'static [&'static str] {
        if self.with_rule {
            &["left", "right", "same_identity", "rule"]
        } else {
            &["left", "right", "same_identity"]
        }
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.decisions
            .iter()
            .map(|d| {
                let mut row = vec![d.pair.0.clone(), d.pair.1.clone(), d.same_identity.to_string()];
                if self.with_rule {
                    row.push(d.rule_fired.to_string());
                }
                row
            })
            .collect()
    }
}

/// Rank-1 identification of one probe. Both fields are `None` when no
/// gallery member qualified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Identification {
    pub probe: String,
    pub set_id: Option<String>,
    pub identity: Option<String>,
}

pub struct Identifications<'a>(pub &'a [Identification]);

impl Report for Identifications<'_> {
    fn to_json(&self) -> Value {
        to_value(&self.0)
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["probe", "set_id", "identity"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.0
            .iter()
            .map(|i| {
                vec![
                    i.probe.clone(),
                    i.set_id.clone().unwrap_or_default(),
                    i.identity.clone().unwrap_or_default(),
                ]
            })
            .collect()
    }
}

pub struct RankedLists<'a>(pub &'a [RankedList]);

impl Report for RankedLists<'_> {
    fn to_json(&self) -> Value {
        to_value(&self.0)
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["probe", "rank", "set_id"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.0
            .iter()
            .flat_map(|l| {
                l.ranked
                    .iter()
                    .enumerate()
                    .map(move |(r, id)| vec![l.probe.clone(), (r + 1).to_string(), id.clone()])
            })
            .collect()
    }
}
