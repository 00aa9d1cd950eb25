//! Batch exploration with a resumable JSONL trial log.
//!
//! A `notFound` outcome only says the search at the configured grid and
//! tolerance found nothing; it is not evidence against existence.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use rearrange_core::explore::{conjecture_search, random_curve, theta_holds, CurveClass, CurveSpec, CyclicPermutation, Outcome};
use rearrange_core::Point;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::format::{float, FormatError, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    #[serde(default)]
    pub start: u64,
    pub count: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub vertices: usize,
    pub class: String,
}

/// Batch parameters; `n` follows the CLI convention of `n + 1` increments.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    pub seeds: SeedRange,
    pub specs: Vec<SpecConfig>,
    pub n: Vec<usize>,
    pub shifts: Vec<usize>,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub timing: bool,
}

fn default_grid() -> usize {
    1000
}

fn default_tol() -> f64 {
    1e-9
}

impl BatchConfig {
    pub fn from_value(v: &Value) -> Result<Self> {
        let cfg: BatchConfig = serde_json::from_value(v.clone()).map_err(|e| FormatError::Parse(format!("batch config: {e}")))?;
        for s in &cfg.specs {
            if CurveClass::from_name(&s.class).is_none() {
                return Err(FormatError::Parse(format!("unknown curve class {:?}", s.class)));
            }
        }
        if cfg.n.contains(&0) {
            return Err(FormatError::Parse("n must be at least 1".into()));
        }
        if cfg.tol.is_nan() || cfg.tol < 0.0 {
            return Err(FormatError::Parse("tol must be non-negative".into()));
        }
        Ok(cfg)
    }

    /// Trials in log order; shifts not below `n + 1` are skipped.
    pub fn trials(&self) -> Vec<Trial> {
        let mut out = Vec::new();
        for seed in self.seeds.start..self.seeds.start + self.seeds.count {
            for s in &self.specs {
                let spec = CurveSpec { vertices: s.vertices, class: CurveClass::from_name(&s.class).expect("validated") };
                for &n in &self.n {
                    for &shift in &self.shifts {
                        if let Ok(theta) = CyclicPermutation::new(n + 1, shift) {
                            out.push(Trial { seed, spec, theta });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Trial {
    pub seed: u64,
    pub spec: CurveSpec,
    pub theta: CyclicPermutation,
}

type Key = (u64, usize, &'static str, usize, usize);

impl Trial {
    fn key(&self) -> Key {
        (self.seed, self.spec.vertices, self.spec.class.name(), self.theta.size() - 1, self.theta.shift())
    }

    pub fn run(&self, grid: usize, tol: f64, timing: bool) -> Value {
        let started = Instant::now();
        let found = random_curve(self.seed, self.spec).map(|c| conjecture_search(&c, self.theta, grid, tol));
        let elapsed = started.elapsed().as_secs_f64() * 1e3;
        let mut rec = json!({
            "seed": self.seed,
            "vertices": self.spec.vertices,
            "class": self.spec.class.name(),
            "n": self.theta.size() - 1,
            "S": self.theta.size(),
            "shift": self.theta.shift(),
        });
        let obj = rec.as_object_mut().expect("object");
        match found {
            Ok(out) => {
                obj.insert("outcome".into(), json!(out.outcome.name()));
                obj.insert("residual".into(), float(out.residual));
                if let Outcome::Error(msg) = &out.outcome {
                    obj.insert("error".into(), json!(msg));
                }
                if let Some(points) = &out.points {
                    let pts: Vec<Value> = points.iter().map(|p| json!([float(p.x), float(p.y)])).collect();
                    obj.insert("points".into(), Value::Array(pts));
                }
            }
            Err(e) => {
                obj.insert("outcome".into(), json!("error"));
                obj.insert("residual".into(), Value::Null);
                obj.insert("error".into(), json!(e.to_string()));
            }
        }
        if timing {
            obj.insert("wallTimeMs".into(), float(elapsed));
        }
        rec
    }
}

fn record_key(v: &Value) -> Option<Key> {
    let class = CurveClass::from_name(v.get("class")?.as_str()?)?.name();
    Some((
        v.get("seed")?.as_u64()?,
        v.get("vertices")?.as_u64()? as usize,
        class,
        v.get("n")?.as_u64()? as usize,
        v.get("shift")?.as_u64()? as usize,
    ))
}

fn io_err(path: &Path, source: std::io::Error) -> FormatError {
    FormatError::Io { path: path.display().to_string(), source }
}

fn read_log(path: &Path) -> Result<Vec<Value>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path, e)),
    };
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| FormatError::Parse(format!("{} line {}: {e}", path.display(), i + 1))))
        .collect()
}

pub fn summary_path(log: &Path) -> PathBuf {
    let mut name = log.as_os_str().to_owned();
    name.push(".summary.json");
    PathBuf::from(name)
}

/// Counts by outcome, overall and per shift.
pub fn summarize(records: &[Value]) -> Value {
    let mut total: BTreeMap<String, u64> = BTreeMap::new();
    let mut by_shift: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for r in records {
        let outcome = r.get("outcome").and_then(Value::as_str).unwrap_or("error").to_string();
        let shift = r.get("shift").map(Value::to_string).unwrap_or_default();
        *total.entry(outcome.clone()).or_default() += 1;
        *by_shift.entry(shift).or_default().entry(outcome).or_default() += 1;
    }
    let count = |m: &BTreeMap<String, u64>, k: &str| m.get(k).copied().unwrap_or(0);
    let shifts: BTreeMap<String, Value> = by_shift
        .iter()
        .map(|(k, m)| (k.clone(), json!({ "found": count(m, "found"), "notFound": count(m, "notFound"), "error": count(m, "error") })))
        .collect();
    json!({
        "total": records.len(),
        "found": count(&total, "found"),
        "notFound": count(&total, "notFound"),
        "error": count(&total, "error"),
        "byShift": shifts,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchReport {
    pub appended: usize,
    pub skipped: usize,
    pub summary: Value,
}

const CHUNK: usize = 64;

/// Runs every trial not yet in `log`, appending records in trial order, and
/// rewrites the summary file next to the log.
pub fn run_batch(cfg: &BatchConfig, log: &Path) -> Result<BatchReport> {
    let mut records = read_log(log)?;
    let done: BTreeSet<Key> = records.iter().filter_map(record_key).collect();
    let trials = cfg.trials();
    let pending: Vec<Trial> = trials.iter().copied().filter(|t| !done.contains(&t.key())).collect();
    let skipped = trials.len() - pending.len();
    let mut file = OpenOptions::new().create(true).append(true).open(log).map_err(|e| io_err(log, e))?;
    for chunk in pending.chunks(CHUNK) {
        let out: Vec<Value> = chunk.par_iter().map(|t| t.run(cfg.grid, cfg.tol, cfg.timing)).collect();
        let mut text = String::new();
        for r in &out {
            text.push_str(&serde_json::to_string(r).expect("records serialize"));
            text.push('\n');
        }
        file.write_all(text.as_bytes()).map_err(|e| io_err(log, e))?;
        records.extend(out);
    }
    file.flush().map_err(|e| io_err(log, e))?;
    let summary = summarize(&records);
    crate::format::write_json(&summary_path(log), &summary)?;
    Ok(BatchReport { appended: pending.len(), skipped, summary })
}

/// Re-checks a `found` record from its own fields: the curve is regenerated
/// from seed and spec, and the points are tested against the shift relation.
pub fn reverify(record: &Value, tol: f64) -> Result<bool> {
    let bad = |what: &str| FormatError::Parse(format!("trial record lacks {what}"));
    let seed = record.get("seed").and_then(Value::as_u64).ok_or_else(|| bad("seed"))?;
    let vertices = record.get("vertices").and_then(Value::as_u64).ok_or_else(|| bad("vertices"))? as usize;
    let class = record.get("class").and_then(Value::as_str).and_then(CurveClass::from_name).ok_or_else(|| bad("class"))?;
    let s = record.get("S").and_then(Value::as_u64).ok_or_else(|| bad("S"))? as usize;
    let shift = record.get("shift").and_then(Value::as_u64).ok_or_else(|| bad("shift"))? as usize;
    let points: Vec<Point<f64>> = record
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("points"))?
        .iter()
        .map(|p| {
            let c = |i: usize| p.get(i).and_then(Value::as_f64).ok_or_else(|| bad("numeric points"));
            Ok(Point::new(c(0)?, c(1)?))
        })
        .collect::<Result<_>>()?;
    let curve = random_curve(seed, CurveSpec { vertices, class })?;
    let theta = CyclicPermutation::new(s, shift)?;
    Ok(theta_holds(&curve.to_f64().vertices, &points, theta, tol))
}
