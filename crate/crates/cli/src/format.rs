//! JSON file formats.
//!
//! Numbers are either JSON numbers or strings; `"p/q"` and plain integers are
//! exact, decimals such as `0.25` are accepted only when the reader allows
//! them. Exact-mode output writes every coordinate as a `"p/q"` string and
//! float-mode output writes decimals.

use std::fs;
use std::path::Path;

use rearrange_core::climb::{BumpSign, ClimbSolution};
use rearrange_core::graph_case::GraphSolution;
use rearrange_core::pipeline::{Branch, Density, PartitionResult, PipelineTrace, Rearrangement};
use rearrange_core::verify::VerifyReport;
use rearrange_core::{PLCurve, PLFunction, Point, Scalar};
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] rearrange_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn parse_err(msg: impl Into<String>) -> FormatError {
    FormatError::Parse(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }

    pub fn from_name(name: &str) -> Option<Mode> {
        match name {
            "exact" => Some(Mode::Exact),
            "float" => Some(Mode::Float),
            _ => None,
        }
    }
}

/// Converts JSON values to scalars.
#[derive(Clone, Copy, Debug)]
pub struct Reader {
    pub allow_decimal: bool,
}

impl Reader {
    pub fn exact() -> Self {
        Reader { allow_decimal: false }
    }

    pub fn lenient() -> Self {
        Reader { allow_decimal: true }
    }

    pub fn scalar(&self, v: &Value) -> Result<Scalar> {
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => return Err(parse_err(format!("expected a number, found {other}"))),
        };
        if Scalar::is_decimal_literal(&text) && !self.allow_decimal {
            return Err(parse_err(format!(
                "decimal {text} in exact mode; write it as \"p/q\" or pass --allow-inexact"
            )));
        }
        Ok(Scalar::parse(&text)?)
    }

    pub fn scalars(&self, v: &Value) -> Result<Vec<Scalar>> {
        array(v)?.iter().map(|x| self.scalar(x)).collect()
    }

    pub fn pair(&self, v: &Value) -> Result<(Scalar, Scalar)> {
        match array(v)?.as_slice() {
            [a, b] => Ok((self.scalar(a)?, self.scalar(b)?)),
            _ => Err(parse_err(format!("expected a pair, found {v}"))),
        }
    }

    pub fn points(&self, v: &Value) -> Result<Vec<Point>> {
        array(v)?.iter().map(|p| self.pair(p).map(|(x, y)| Point::new(x, y))).collect()
    }

    /// `{"points": [[x, y], …], "knots": [...]}`; knots default to uniform.
    pub fn curve(&self, v: &Value) -> Result<PLCurve> {
        let vertices = self.points(field(v, "points")?)?;
        Ok(match v.get("knots") {
            Some(k) => PLCurve::new(self.scalars(k)?, vertices)?,
            None => PLCurve::from_vertices(vertices)?,
        })
    }

    /// `{"breakpoints": [[t, v], …]}`.
    pub fn function(&self, v: &Value) -> Result<PLFunction> {
        let bps = array(field(v, "breakpoints")?)?.iter().map(|p| self.pair(p)).collect::<Result<Vec<_>>>()?;
        Ok(PLFunction::new(bps)?)
    }

    /// `"uniform"`, `{"step": {"breaks": [...], "values": [...]}}` or
    /// `{"linear": {"breakpoints": [...]}}`.
    pub fn density(&self, v: &Value) -> Result<Density> {
        if v.as_str() == Some("uniform") {
            return Ok(Density::uniform());
        }
        if let Some(step) = v.get("step") {
            return Ok(Density::Step {
                breaks: self.scalars(field(step, "breaks")?)?,
                values: self.scalars(field(step, "values")?)?,
            });
        }
        if let Some(lin) = v.get("linear") {
            return Ok(Density::PiecewiseLinear(self.function(lin)?));
        }
        Err(parse_err("density must be \"uniform\", {\"step\": …} or {\"linear\": …}"))
    }

    pub fn float_points(&self, v: &Value) -> Result<Vec<Point<f64>>> {
        Ok(self.points(v)?.iter().map(Point::to_f64).collect())
    }
}

pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing key {key:?}")))
}

fn array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("expected an array, found {v}")))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| parse_err(format!("{}: {e}", path.display())))
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("values serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

/// Renders scalars in one output mode.
#[derive(Clone, Copy, Debug)]
pub struct Writer {
    pub mode: Mode,
}

impl Writer {
    pub fn new(mode: Mode) -> Self {
        Writer { mode }
    }

    pub fn scalar(&self, s: &Scalar) -> Value {
        match self.mode {
            Mode::Exact => Value::String(s.to_string()),
            Mode::Float => float(s.to_f64()),
        }
    }

    pub fn scalars(&self, xs: &[Scalar]) -> Value {
        Value::Array(xs.iter().map(|x| self.scalar(x)).collect())
    }

    pub fn point(&self, p: &Point) -> Value {
        json!([self.scalar(&p.x), self.scalar(&p.y)])
    }

    pub fn points(&self, ps: &[Point]) -> Value {
        Value::Array(ps.iter().map(|p| self.point(p)).collect())
    }

    pub fn curve(&self, c: &PLCurve) -> Value {
        json!({ "knots": self.scalars(c.knots()), "points": self.points(c.vertices()) })
    }

    pub fn function(&self, f: &PLFunction) -> Value {
        let bps: Vec<Value> = f.breakpoints().iter().map(|(t, v)| json!([self.scalar(t), self.scalar(v)])).collect();
        json!({ "breakpoints": bps })
    }

    fn trace(&self, t: &PipelineTrace) -> Value {
        let branch = match t.branch {
            Branch::Diagonal => "diagonal",
            Branch::Below => "below",
            Branch::Above => "above",
        };
        json!({
            "tSplit": self.scalar(&t.t_split),
            "branch": branch,
            "boundaryJoins": self.scalars(&t.boundary_joins),
            "perturbations": self.scalars(&t.perturbations),
            "iterations": t.iterations,
            "residualHistory": self.scalars(&t.residual_history),
            "shootingFallback": t.shooting_fallback,
        })
    }

    /// Partition result with the source curve embedded so it re-verifies alone.
    pub fn partition(&self, curve: &PLCurve, r: &PartitionResult, report: &VerifyReport<Scalar>) -> Value {
        json!({
            "kind": "partition",
            "mode": self.mode.name(),
            "S": r.s,
            "curve": self.curve(curve),
            "points": self.points(&r.points),
            "dx": self.scalars(&r.dx),
            "dy": self.scalars(&r.dy),
            "rearrangement": rearrangement(&r.rearrangement),
            "exact": r.exact,
            "residual": self.scalar(&r.residual),
            "trace": self.trace(&r.trace),
            "report": self.report(report),
        })
    }

    pub fn graph(&self, f: &PLFunction, sol: &GraphSolution) -> rearrange_core::Result<Value> {
        let curve = PLCurve::from_components(&PLFunction::identity(), f)?;
        Ok(json!({
            "kind": "graph",
            "mode": self.mode.name(),
            "n": sol.n,
            "S": sol.increments(),
            "curve": self.curve(&curve),
            "roots": self.scalars(&sol.roots),
            "x": self.scalars(&sol.x),
            "fx": self.scalars(&sol.fx),
            "points": self.points(&sol.points()),
            "dx": self.scalars(&sol.dx()),
            "dy": self.scalars(&sol.dy()),
            "rearrangement": { "shift": 1 },
        }))
    }

    pub fn climb(&self, f1: &PLFunction, f2: &PLFunction, sol: &ClimbSolution) -> Value {
        let plans: Vec<Value> = sol
            .plans
            .iter()
            .map(|p| {
                json!({
                    "interval": [self.scalar(&p.interval.0), self.scalar(&p.interval.1)],
                    "level": self.scalar(&p.level),
                    "preimage": self.scalars(&p.preimage),
                    "halfWidth": self.scalar(&p.half_width),
                    "sign": match p.sign { BumpSign::Plus => "+", BumpSign::Minus => "-" },
                    "collapse": p.collapse.iter().map(|(a, b)| json!([self.scalar(a), self.scalar(b)])).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "kind": "climb",
            "mode": self.mode.name(),
            "f1": self.function(f1),
            "f2": self.function(f2),
            "g1": self.function(&sol.g1),
            "g2": self.function(&sol.g2),
            "exact": sol.exact,
            "residual": self.scalar(&sol.residual),
            "plans": plans,
        })
    }

    pub fn report(&self, r: &VerifyReport<Scalar>) -> Value {
        report_value(r, |s| self.scalar(s))
    }
}

pub fn float_report(r: &VerifyReport<f64>) -> Value {
    report_value(r, |x| float(*x))
}

fn report_value<T>(r: &VerifyReport<T>, num: impl Fn(&T) -> Value) -> Value {
    json!({
        "pass": r.pass,
        "endpointsOk": r.endpoints_ok,
        "onCurveMaxDist": num(&r.on_curve_max_dist),
        "positive": r.positive,
        "multisetMatch": r.multiset_match,
        "maxMismatch": num(&r.max_mismatch),
        "detectedShift": r.detected_shift,
        "detectedPermutation": r.detected_permutation,
        "tol": num(&r.tol),
        "dx": r.dx.iter().map(&num).collect::<Vec<_>>(),
        "dy": r.dy.iter().map(&num).collect::<Vec<_>>(),
    })
}

fn rearrangement(r: &Rearrangement) -> Value {
    match r {
        Rearrangement::Shift(k) => json!({ "shift": k }),
        Rearrangement::Permutation(p) => json!({ "perm": p }),
    }
}

/// A decimal JSON number; non-finite values become `null`.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Mode recorded in a result file, if any.
pub fn recorded_mode(v: &Value) -> Option<Mode> {
    v.get("mode").and_then(Value::as_str).and_then(Mode::from_name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_reader_rejects_decimals() {
        let r = Reader::exact();
        assert_eq!(r.scalar(&json!("1/3")).unwrap(), Scalar::ratio(1, 3));
        assert_eq!(r.scalar(&json!(2)).unwrap(), Scalar::from_integer(2));
        assert!(r.scalar(&json!(0.25)).is_err());
        assert_eq!(Reader::lenient().scalar(&json!(0.25)).unwrap(), Scalar::ratio(1, 4));
    }

    #[test]
    fn decimal_text_is_kept_exactly() {
        let v: Value = serde_json::from_str("0.1").unwrap();
        assert_eq!(Reader::lenient().scalar(&v).unwrap(), Scalar::ratio(1, 10));
    }

    #[test]
    fn curve_round_trip() {
        let c = PLCurve::from_vertices(vec![Point::origin(), Point::ratio(2, 3, 1, 3), Point::unit()]).unwrap();
        let w = Writer::new(Mode::Exact).curve(&c);
        assert_eq!(w["points"][1], json!(["2/3", "1/3"]));
        assert_eq!(Reader::exact().curve(&w).unwrap(), c);
    }

    #[test]
    fn float_writer_emits_numbers() {
        let v = Writer::new(Mode::Float).scalar(&Scalar::ratio(1, 4));
        assert_eq!(v.to_string(), "0.25");
    }
}
