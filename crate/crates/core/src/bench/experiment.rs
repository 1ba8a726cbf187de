//! Benchmark experiments: every dataset × constraint level × mode, over a
//! fixed list of run seeds, with CSV and text reports.
//!
//! Spec file (TOML):
//!
//! ```toml
//! runs = 10                 # seeds base_seed, base_seed + 1, ...
//! base_seed = 1
//! levels = [0.05, 0.1]      # fraction of all point pairs constrained
//! modes = ["kskm", "kskm_e", "copkm", "dsaturkm"]
//! baseline = "copkm"        # summary ratios are relative to this mode
//! explorations = 200
//! time_limit_secs = 3600.0
//! standardize = false
//!
//! [[datasets]]
//! name = "iris"
//! path = "iris.csv"         # relative to the spec file
//! label_column = true
//! k = 3                     # default: number of distinct labels
//!
//! [[datasets]]
//! name = "blobs"
//! blobs = { n = 300, k = 5, dim = 2, spread = 1.0, center_box = 10.0, seed = 7 }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::bench::generate::{gaussian_blobs, generate_constraints, BlobParams};
use crate::bench::io::{format_assignment, load_dataset, standardize, LoadOptions};
use crate::bench::metrics::adjusted_rand_index;
use crate::constraints::ConstraintSet;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kmeans::kmeans_plus_plus;
use crate::model::Problem;
use crate::solver::{solve, Mode, SolverConfig};

fn default_runs() -> usize {
    10
}
fn default_seed() -> u64 {
    1
}
fn default_explorations() -> usize {
    200
}
fn default_time_limit() -> f64 {
    3600.0
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlobSpec {
    pub n: usize,
    pub k: usize,
    #[serde(default = "BlobSpec::default_dim")]
    pub dim: usize,
    #[serde(default = "BlobSpec::default_spread")]
    pub spread: f64,
    #[serde(default = "BlobSpec::default_box")]
    pub center_box: f64,
    #[serde(default)]
    pub seed: u64,
}

impl BlobSpec {
    fn default_dim() -> usize {
        2
    }
    fn default_spread() -> f64 {
        1.0
    }
    fn default_box() -> f64 {
        10.0
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub name: String,
    pub path: Option<PathBuf>,
    pub header: Option<bool>,
    #[serde(default = "default_true")]
    pub label_column: bool,
    pub k: Option<usize>,
    pub blobs: Option<BlobSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    pub levels: Vec<f64>,
    pub modes: Vec<Mode>,
    pub baseline: Option<Mode>,
    #[serde(default = "default_explorations")]
    pub explorations: usize,
    #[serde(default = "default_time_limit")]
    pub time_limit_secs: f64,
    #[serde(default)]
    pub standardize: bool,
    #[serde(default)]
    pub multi_kempe: bool,
    pub datasets: Vec<DatasetSpec>,
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].lines().count().max(1));
            Error::Parse { line, msg: e.message().to_string() }
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.modes.is_empty() || self.datasets.is_empty() || self.levels.is_empty() {
            return bad("modes, datasets and levels must be non-empty".into());
        }
        if let Some(&l) = self.levels.iter().find(|&&l| !(l > 0.0 && l <= 1.0)) {
            return bad(format!("constraint level {l} outside (0, 1]"));
        }
        if let Some(b) = self.baseline {
            if !self.modes.contains(&b) {
                return bad(format!("baseline {b} is not among the modes"));
            }
        }
        if !(self.time_limit_secs > 0.0) {
            return bad("time limit must be positive".into());
        }
        for d in &self.datasets {
            if d.path.is_some() == d.blobs.is_some() {
                return bad(format!("dataset `{}` needs exactly one of `path` or `blobs`", d.name));
            }
        }
        Ok(())
    }
}

/// One solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub dataset: String,
    pub level: f64,
    pub mode: Mode,
    pub run: usize,
    pub seed: u64,
    pub success: bool,
    pub inertia: Option<f64>,
    pub ari: Option<f64>,
    pub iterations: usize,
    pub mutations: usize,
    pub wall_time: Duration,
    pub error: Option<String>,
    /// Per-point cluster ids of a successful run.
    pub labels: Option<Vec<usize>>,
}

/// Aggregates of one (dataset, level, mode) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub dataset: String,
    pub level: f64,
    pub mode: Mode,
    pub runs: usize,
    pub successes: usize,
    pub mean_inertia: Option<f64>,
    pub min_inertia: Option<f64>,
    pub max_ari: Option<f64>,
    pub mean_time: f64,
    /// `mean_inertia` over the baseline's in the same dataset and level.
    pub inertia_ratio: Option<f64>,
}

impl CellSummary {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.runs as f64
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub runs: Vec<RunRecord>,
    pub summary: Vec<CellSummary>,
    pub baseline: Option<Mode>,
}

fn load(spec: &DatasetSpec, root: &Path, standardize_features: bool) -> Result<Dataset> {
    let data = match (&spec.path, &spec.blobs) {
        (Some(path), _) => {
            let path = if path.is_absolute() { path.clone() } else { root.join(path) };
            let d = load_dataset(&path, LoadOptions { header: spec.header, label_column: spec.label_column })?;
            Dataset::from_flat(&spec.name, d.len(), d.dim(), d.as_flat().to_vec(), d.labels().map(<[usize]>::to_vec))?
        }
        (None, Some(b)) => {
            let params = BlobParams { n: b.n, k: b.k, dim: b.dim, spread: b.spread, center_box: b.center_box };
            gaussian_blobs(&spec.name, params, &mut ChaCha8Rng::seed_from_u64(b.seed))?
        }
        (None, None) => return Err(Error::InvalidConfig(format!("dataset `{}` has no source", spec.name))),
    };
    Ok(if standardize_features { standardize(&data) } else { data })
}

fn cluster_count(spec: &DatasetSpec, data: &Dataset) -> Result<usize> {
    if let Some(k) = spec.k.or(spec.blobs.as_ref().map(|b| b.k)) {
        return Ok(k);
    }
    data.labels()
        .map(|l| l.iter().max().map_or(1, |&m| m + 1))
        .ok_or_else(|| Error::InvalidConfig(format!("dataset `{}` needs `k` or a label column", spec.name)))
}

/// Seed of the constraint draw for one (dataset, level) cell.
fn constraint_seed(base: u64, dataset: usize, level: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(((dataset as u64) << 32) | level as u64);
    rng
}

struct Cell {
    dataset: usize,
    level: f64,
    problem: Problem,
    k: usize,
}

/// Runs every cell. Spec paths resolve against `root`. Failed runs are
/// recorded, not propagated; only loading and spec errors abort.
pub fn run_experiment(spec: &ExperimentSpec, root: &Path) -> Result<ExperimentReport> {
    spec.validate()?;
    let mut cells = Vec::new();
    for (d, ds) in spec.datasets.iter().enumerate() {
        let data = load(ds, root, spec.standardize)?;
        let k = cluster_count(ds, &data)?;
        let labels = data.labels().map(<[usize]>::to_vec).ok_or_else(|| {
            Error::InvalidConfig(format!("dataset `{}` has no labels to derive constraints from", ds.name))
        })?;
        for (l, &level) in spec.levels.iter().enumerate() {
            let constraints = generate_constraints(&labels, level, &mut constraint_seed(spec.base_seed, d, l))?;
            let problem = Problem::new(data.clone(), constraints)?;
            cells.push(Cell { dataset: d, level, problem, k });
        }
    }

    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..spec.runs).map(move |r| (c, r))).collect();
    let per_job: Vec<Vec<RunRecord>> = jobs
        .par_iter()
        .map(|&(c, r)| {
            let cell = &cells[c];
            let seed = spec.base_seed.wrapping_add(r as u64);
            // identical starting centroids for every mode of this run
            let init = kmeans_plus_plus(cell.problem.data(), cell.k, &mut ChaCha8Rng::seed_from_u64(seed));
            spec.modes
                .iter()
                .map(|&mode| {
                    let mut cfg = SolverConfig::new(cell.k, mode).with_seed(seed).with_explorations(spec.explorations).with_initial_centroids(init.clone());
                    cfg.time_limit = Some(Duration::from_secs_f64(spec.time_limit_secs));
                    cfg.multi_kempe = spec.multi_kempe;
                    run_one(&spec.datasets[cell.dataset].name, cell.level, r, seed, &cell.problem, &cfg)
                })
                .collect()
        })
        .collect();
    let mut runs: Vec<RunRecord> = per_job.into_iter().flatten().collect();
    let position = |x: &RunRecord| {
        let d = spec.datasets.iter().position(|s| s.name == x.dataset).unwrap_or(usize::MAX);
        let l = spec.levels.iter().position(|&l| l == x.level).unwrap_or(usize::MAX);
        let m = spec.modes.iter().position(|&m| m == x.mode).unwrap_or(usize::MAX);
        (d, l, m, x.run)
    };
    runs.sort_by_key(position);
    let summary = summarize(&runs, spec.baseline);
    Ok(ExperimentReport { runs, summary, baseline: spec.baseline })
}

fn run_one(dataset: &str, level: f64, run: usize, seed: u64, problem: &Problem, cfg: &SolverConfig) -> RunRecord {
    let mut rec = RunRecord {
        dataset: dataset.to_string(),
        level,
        mode: cfg.mode,
        run,
        seed,
        success: false,
        inertia: None,
        ari: None,
        iterations: 0,
        mutations: 0,
        wall_time: Duration::ZERO,
        error: None,
        labels: None,
    };
    match solve(problem, cfg) {
        Ok(sol) if sol.feasible => {
            let labels = sol.point_labels(problem);
            rec.ari = problem.data().labels().map(|t| adjusted_rand_index(&labels, t).expect("equal lengths"));
            rec.success = true;
            rec.inertia = Some(sol.inertia);
            rec.iterations = sol.iterations;
            rec.mutations = sol.mutations;
            rec.wall_time = sol.wall_time;
            rec.labels = Some(labels);
        }
        Ok(sol) => {
            rec.wall_time = sol.wall_time;
            rec.error = Some("infeasible result".into());
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Groups runs by (dataset, level, mode) in first-seen order.
pub fn summarize(runs: &[RunRecord], baseline: Option<Mode>) -> Vec<CellSummary> {
    let mut order: Vec<(String, u64, Mode)> = Vec::new();
    let mut groups: BTreeMap<(String, u64, Mode), Vec<&RunRecord>> = BTreeMap::new();
    for r in runs {
        let key = (r.dataset.clone(), r.level.to_bits(), r.mode);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    let mut out: Vec<CellSummary> = order
        .iter()
        .map(|key| {
            let rs = &groups[key];
            let inertias: Vec<f64> = rs.iter().filter_map(|r| r.inertia).collect();
            let aris: Vec<f64> = rs.iter().filter_map(|r| r.ari).collect();
            let times: Vec<f64> = rs.iter().map(|r| r.wall_time.as_secs_f64()).collect();
            CellSummary {
                dataset: key.0.clone(),
                level: f64::from_bits(key.1),
                mode: key.2,
                runs: rs.len(),
                successes: rs.iter().filter(|r| r.success).count(),
                mean_inertia: mean(&inertias),
                min_inertia: inertias.iter().copied().reduce(f64::min),
                max_ari: aris.iter().copied().reduce(f64::max),
                mean_time: mean(&times).unwrap_or(0.0),
                inertia_ratio: None,
            }
        })
        .collect();
    if let Some(base) = baseline {
        let reference: Vec<(String, u64, Option<f64>)> =
            out.iter().filter(|s| s.mode == base).map(|s| (s.dataset.clone(), s.level.to_bits(), s.mean_inertia)).collect();
        for s in &mut out {
            let b = reference.iter().find(|(d, l, _)| *d == s.dataset && *l == s.level.to_bits()).and_then(|r| r.2);
            s.inertia_ratio = match (s.mean_inertia, b) {
                (Some(m), Some(b)) if b > 0.0 => Some(m / b),
                _ => None,
            };
        }
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn csv_text<F>(header: &[&str], rows: usize, mut row: F) -> Result<String>
where
    F: FnMut(usize) -> Vec<String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for i in 0..rows {
        w.write_record(row(i)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

impl ExperimentReport {
    /// Per-run rows without timings, so reruns produce identical bytes.
    pub fn runs_csv(&self) -> Result<String> {
        csv_text(
            &["dataset", "level", "mode", "run", "seed", "success", "inertia", "ari", "iterations", "mutations", "error"],
            self.runs.len(),
            |i| {
                let r = &self.runs[i];
                vec![
                    r.dataset.clone(),
                    r.level.to_string(),
                    r.mode.to_string(),
                    r.run.to_string(),
                    r.seed.to_string(),
                    r.success.to_string(),
                    opt(r.inertia),
                    opt(r.ari),
                    r.iterations.to_string(),
                    r.mutations.to_string(),
                    r.error.clone().unwrap_or_default(),
                ]
            },
        )
    }

    pub fn summary_csv(&self) -> Result<String> {
        csv_text(
            &["dataset", "level", "mode", "runs", "successes", "success_rate", "mean_inertia", "min_inertia", "max_ari", "inertia_vs_baseline"],
            self.summary.len(),
            |i| {
                let s = &self.summary[i];
                vec![
                    s.dataset.clone(),
                    s.level.to_string(),
                    s.mode.to_string(),
                    s.runs.to_string(),
                    s.successes.to_string(),
                    s.success_rate().to_string(),
                    opt(s.mean_inertia),
                    opt(s.min_inertia),
                    opt(s.max_ari),
                    opt(s.inertia_ratio),
                ]
            },
        )
    }

    /// Wall-clock columns, kept apart from the reproducible reports.
    pub fn timing_csv(&self) -> Result<String> {
        csv_text(&["dataset", "level", "mode", "run", "wall_time_s"], self.runs.len(), |i| {
            let r = &self.runs[i];
            vec![r.dataset.clone(), r.level.to_string(), r.mode.to_string(), r.run.to_string(), r.wall_time.as_secs_f64().to_string()]
        })
    }

    /// Fixed-width table of the summary, inertia normalized to the baseline.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let base = self.baseline.map_or_else(|| "none".to_string(), |m| m.to_string());
        let _ = writeln!(out, "baseline: {base}");
        let _ = writeln!(
            out,
            "{:<16} {:>7} {:<9} {:>8} {:>14} {:>14} {:>9} {:>10}",
            "dataset", "level", "mode", "success", "mean_inertia", "min_inertia", "max_ari", "vs_base"
        );
        let fmt = |x: Option<f64>, prec: usize| x.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"));
        for s in &self.summary {
            let _ = writeln!(
                out,
                "{:<16} {:>7} {:<9} {:>8.2} {:>14} {:>14} {:>9} {:>10}",
                s.dataset,
                s.level,
                s.mode,
                s.success_rate(),
                fmt(s.mean_inertia, 4),
                fmt(s.min_inertia, 4),
                fmt(s.max_ari, 4),
                fmt(s.inertia_ratio, 4),
            );
        }
        out
    }

    /// Writes `runs.csv`, `summary.csv`, `summary.txt`, `timing.csv` and one
    /// assignment file per successful run under `dir/assignments`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let assignments = dir.join("assignments");
        fs::create_dir_all(&assignments)?;
        fs::write(dir.join("runs.csv"), self.runs_csv()?)?;
        fs::write(dir.join("summary.csv"), self.summary_csv()?)?;
        fs::write(dir.join("summary.txt"), self.summary_table())?;
        fs::write(dir.join("timing.csv"), self.timing_csv()?)?;
        for r in &self.runs {
            if let Some(labels) = &r.labels {
                fs::write(assignments.join(assignment_file_name(r)), format_assignment(labels))?;
            }
        }
        Ok(())
    }
}

pub fn assignment_file_name(r: &RunRecord) -> String {
    format!("{}_{}_{}_{}.txt", r.dataset, r.level, r.mode, r.run)
}

/// Constraints an experiment would generate for one dataset and level.
pub fn experiment_constraints(spec: &ExperimentSpec, dataset: usize, level: usize, labels: &[usize]) -> Result<ConstraintSet> {
    generate_constraints(labels, spec.levels[level], &mut constraint_seed(spec.base_seed, dataset, level))
}
