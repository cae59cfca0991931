//! Seeded experiment harness.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]; trials
//! draw from streams keyed by `(seed, trial)` and are collected in trial
//! order, so reports do not depend on thread count or scheduling.

mod absconv;
mod duality;
mod main_theorem;
mod projection_lemma;
mod qzn;
mod santalo_rs;
mod sharpness;
mod small_ball;
mod tails;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::SymVPolytope;
use crate::io::format_f64;
use crate::random::gaussian_matrix;
use crate::rng;

pub const EXPERIMENTS: [&str; 9] = [
    "gaussian-tails",
    "projection-volume-lemma",
    "absconv-bound",
    "qzn-volume",
    "main-theorem",
    "lemma41-probability",
    "sharpness",
    "duality",
    "santalo-rs",
];

/// Tunable parameters. Absent entries take the experiment's defaults; the
/// report echoes the resolved values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<usize>>,
    /// Net constant `C₀`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    /// Schedule constant `C`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Target value of a probability bound (lemma41-probability).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_bound: Option<f64>,
    /// Envelope for fitted constants (qzn-volume).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<f64>,
}

impl Params {
    fn merge(&self, defaults: Params) -> Params {
        Params {
            n: self.n.or(defaults.n),
            k: self.k.or(defaults.k),
            big_n: self.big_n.or(defaults.big_n),
            trials: self.trials.or(defaults.trials),
            samples: self.samples.or(defaults.samples),
            restarts: self.restarts.or(defaults.restarts),
            pairs: self.pairs.or(defaults.pairs),
            dims: self.dims.clone().or(defaults.dims),
            ks: self.ks.clone().or(defaults.ks),
            c0: self.c0.or(defaults.c0),
            c: self.c.or(defaults.c),
            tolerance: self.tolerance.or(defaults.tolerance),
            target_bound: self.target_bound.or(defaults.target_bound),
            envelope: self.envelope.or(defaults.envelope),
        }
    }

    fn validate(&self) -> Result<()> {
        let ints = [
            ("n", self.n),
            ("k", self.k),
            ("N", self.big_n),
            ("trials", self.trials),
            ("samples", self.samples),
            ("restarts", self.restarts),
            ("pairs", self.pairs),
        ];
        for (name, v) in ints {
            if v == Some(0) {
                return Err(Error::param(name, "must be at least 1"));
            }
        }
        for (name, v) in [("dims", &self.dims), ("ks", &self.ks)] {
            if let Some(list) = v {
                if list.is_empty() || list.contains(&0) {
                    return Err(Error::param(name, "must be a non-empty list of positive integers"));
                }
            }
        }
        for (name, v) in [
            ("c0", self.c0),
            ("c", self.c),
            ("tolerance", self.tolerance),
            ("target_bound", self.target_bound),
            ("envelope", self.envelope),
        ] {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(Error::param(name, "must be positive and finite"));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn get<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| Error::param(name, "missing"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_path: Option<String>,
}

impl ExperimentConfig {
    pub fn new(name: &str, seed: u64) -> Self {
        ExperimentConfig { name: name.to_string(), params: Params::default(), seed, out_path: None }
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

impl ColumnSummary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(ColumnSummary {
            min: v[0],
            max: v[v.len() - 1],
            mean: v.iter().sum::<f64>() / v.len() as f64,
            q05: q(0.05),
            q25: q(0.25),
            q50: q(0.5),
            q75: q(0.75),
            q95: q(0.95),
        })
    }
}

/// One pass/fail check: `observed <relation> threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub statement: String,
    pub observed: f64,
    pub relation: String,
    pub threshold: f64,
    pub pass: bool,
}

impl Criterion {
    pub fn at_most(name: &str, statement: &str, observed: f64, threshold: f64) -> Self {
        Criterion::build(name, statement, observed, "<=", threshold, observed <= threshold)
    }

    pub fn at_least(name: &str, statement: &str, observed: f64, threshold: f64) -> Self {
        Criterion::build(name, statement, observed, ">=", threshold, observed >= threshold)
    }

    pub fn greater(name: &str, statement: &str, observed: f64, threshold: f64) -> Self {
        Criterion::build(name, statement, observed, ">", threshold, observed > threshold)
    }

    fn build(name: &str, statement: &str, observed: f64, relation: &str, threshold: f64, pass: bool) -> Self {
        Criterion {
            name: name.to_string(),
            statement: statement.to_string(),
            observed,
            relation: relation.to_string(),
            threshold,
            pass: pass && observed.is_finite(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: BTreeMap<String, ColumnSummary>,
    pub criteria: Vec<Criterion>,
    pub pass: bool,
    pub reference_curves: BTreeMap<String, f64>,
    pub notes: BTreeMap<String, String>,
    /// Seconds spent; kept out of the serialized report so that reruns are
    /// byte-identical.
    #[serde(skip)]
    pub wall_time: f64,
}

/// Equality of the serialized content; `wall_time` is ignored.
impl PartialEq for ExperimentReport {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.columns == other.columns
            && self.rows == other.rows
            && self.summary == other.summary
            && self.criteria == other.criteria
            && self.pass == other.pass
            && self.reference_curves == other.reference_curves
            && self.notes == other.notes
    }
}

impl ExperimentReport {
    pub(crate) fn new(config: ExperimentConfig, columns: &[&str]) -> Self {
        ExperimentReport {
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            criteria: Vec::new(),
            pass: false,
            reference_curves: BTreeMap::new(),
            notes: BTreeMap::new(),
            wall_time: 0.0,
        }
    }

    pub(crate) fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub(crate) fn reference(&mut self, name: &str, value: f64) {
        self.reference_curves.insert(name.to_string(), value);
    }

    pub(crate) fn note(&mut self, name: &str, value: impl Into<String>) {
        self.notes.insert(name.to_string(), value.into());
    }

    pub(crate) fn check(&mut self, c: Criterion) {
        self.criteria.push(c);
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    fn finish(mut self) -> Self {
        for (j, name) in self.columns.iter().enumerate() {
            let col: Vec<f64> = self.rows.iter().map(|r| r[j]).filter(|x| x.is_finite()).collect();
            if let Some(s) = ColumnSummary::of(&col) {
                self.summary.insert(name.clone(), s);
            }
        }
        self.pass = !self.criteria.is_empty() && self.criteria.iter().all(|c| c.pass);
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_canonical_json(&self) -> Result<String> {
        Ok(canonical_json(&serde_json::to_value(self)?))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|&x| format_f64(x)))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

/// Pretty JSON with sorted keys (serde_json maps are ordered) and every
/// non-integer number written with 17 significant digits.
fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            if a.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(indent));
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(k.clone()));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(indent));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn write_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Json => report.to_canonical_json()?,
        ReportFormat::Csv => report.to_csv()?,
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentReport::from_json(&text)
}

fn defaults(name: &str) -> Result<Params> {
    Ok(match name {
        "gaussian-tails" => tails::defaults(),
        "projection-volume-lemma" => projection_lemma::defaults(),
        "absconv-bound" => absconv::defaults(),
        "qzn-volume" => qzn::defaults(),
        "main-theorem" => main_theorem::defaults(),
        "lemma41-probability" => small_ball::defaults(),
        "sharpness" => sharpness::defaults(),
        "duality" => duality::defaults(),
        "santalo-rs" => santalo_rs::defaults(),
        other => return Err(Error::UnknownExperiment(other.to_string())),
    })
}

/// Runs the named experiment with its parameters resolved against the defaults.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let params = config.params.merge(defaults(&config.name)?);
    params.validate()?;
    let resolved = ExperimentConfig { name: config.name.clone(), params, seed: config.seed, out_path: None };
    let start = Instant::now();
    let report = match resolved.name.as_str() {
        "gaussian-tails" => tails::run(resolved)?,
        "projection-volume-lemma" => projection_lemma::run(resolved)?,
        "absconv-bound" => absconv::run(resolved)?,
        "qzn-volume" => qzn::run(resolved)?,
        "main-theorem" => main_theorem::run(resolved)?,
        "lemma41-probability" => small_ball::run(resolved)?,
        "sharpness" => sharpness::run(resolved)?,
        "duality" => duality::run(resolved)?,
        "santalo-rs" => santalo_rs::run(resolved)?,
        other => return Err(Error::UnknownExperiment(other.to_string())),
    };
    let mut report = report.finish();
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Symmetric body with `count` standard Gaussian generators, redrawn until
/// the generators span.
pub(crate) fn gaussian_body(dim: usize, count: usize, rng: &mut rng::Rng) -> SymVPolytope {
    loop {
        let g: DMatrix<f64> = gaussian_matrix(dim, count, rng);
        if let Ok(b) = SymVPolytope::from_columns(g) {
            return b;
        }
    }
}
