//! Numerical search for cyclic-shift partitions beyond the proven cases.
//!
//! A `NotFound` outcome only means the search did not find a solution at the
//! given grid and tolerance; it is evidence, never disproof.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{FloatCurve, PLCurve, Point, Scalar};
use crate::verify::{brute_force, verify};

/// `θ(i) = i + shift mod size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicPermutation {
    size: usize,
    shift: usize,
}

impl CyclicPermutation {
    pub fn new(size: usize, shift: usize) -> Result<Self> {
        if size == 0 || shift >= size {
            return Err(Error::InvalidInput("cyclic shift must satisfy 0 ≤ k < S".into()));
        }
        Ok(CyclicPermutation { size, shift })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn apply(&self, i: usize) -> usize {
        (i + self.shift) % self.size
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurveClass {
    /// Interior vertices in `{0 < y < x < 1}`.
    DeltaInterior,
    /// Interior vertices in `(0, 1)²`.
    Interior,
    /// Interior vertices in `(−1/2, 3/2)²`.
    Planar,
}

impl CurveClass {
    pub fn name(&self) -> &'static str {
        match self {
            CurveClass::DeltaInterior => "delta",
            CurveClass::Interior => "interior",
            CurveClass::Planar => "planar",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "delta" | "deltaInterior" | "delta-interior" => Some(CurveClass::DeltaInterior),
            "interior" => Some(CurveClass::Interior),
            "planar" => Some(CurveClass::Planar),
            _ => None,
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Shape of a random curve: `vertices` points follow the origin, the last
/// being `(1, 1)`, so `vertices = 2` is a single bend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveSpec {
    pub vertices: usize,
    pub class: CurveClass,
}

const GRID: i64 = 1000;

/// A random polyline with uniform knots and coordinates on the `1/1000` grid.
pub fn random_curve(seed: u64, spec: CurveSpec) -> Result<PLCurve> {
    if spec.vertices < 2 {
        return Err(Error::InvalidInput("a random curve needs at least two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = alloc::vec![Point::origin()];
    for _ in 1..spec.vertices {
        let (x, y) = match spec.class {
            CurveClass::DeltaInterior => {
                let x = rng.gen_range(2..GRID);
                (x, rng.gen_range(1..x))
            }
            CurveClass::Interior => (rng.gen_range(1..GRID), rng.gen_range(1..GRID)),
            CurveClass::Planar => (rng.gen_range(-GRID / 2 + 1..3 * GRID / 2), rng.gen_range(-GRID / 2 + 1..3 * GRID / 2)),
        };
        vertices.push(Point::new(Scalar::ratio(x, GRID), Scalar::ratio(y, GRID)));
    }
    vertices.push(Point::unit());
    PLCurve::from_vertices(vertices)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Found,
    NotFound,
    Error(String),
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Found => "found",
            Outcome::NotFound => "notFound",
            Outcome::Error(_) => "error",
        }
    }
}

/// Result of one [`conjecture_search`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub outcome: Outcome,
    /// Largest violation of the relations at the best candidate.
    pub residual: f64,
    pub points: Option<Vec<Point<f64>>>,
}

/// One logged trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub spec: CurveSpec,
    pub theta: CyclicPermutation,
    pub outcome: Outcome,
    pub residual: f64,
    pub points: Option<Vec<Point<f64>>>,
    /// Milliseconds; only recorded when timing is requested.
    pub wall_time_ms: Option<f64>,
}

/// True when every increment exceeds `tol`, the points lie on the curve and
/// `dx_i = dy_{θ(i)}` within `tol`.
pub fn theta_holds(curve: &[Point<f64>], points: &[Point<f64>], theta: CyclicPermutation, tol: f64) -> bool {
    let s = theta.size();
    if points.len() != s + 1 {
        return false;
    }
    let report = verify(curve, points, &tol);
    report.endpoints_ok
        && report.dx.iter().chain(&report.dy).all(|d| *d > tol)
        && report.on_curve_max_dist <= tol
        && (0..s).all(|i| (report.dx[i] - report.dy[theta.apply(i)]).abs() <= tol)
}

/// Builds the chain from free parameters `t_1 … t_k` and returns the
/// residuals `dy_j − dx_{(j−k) mod S}` for `j < k`, or `None` if the chain
/// leaves the curve.
fn chain(curve: &FloatCurve, s: usize, k: usize, free: &[f64]) -> Option<(Vec<f64>, Vec<Point<f64>>)> {
    let mut params = alloc::vec![0.0];
    let mut points = alloc::vec![Point::new(0.0, 0.0)];
    for &t in free {
        if !(0.0..=1.0).contains(&t) {
            return None;
        }
        params.push(t);
        points.push(curve.eval(t));
    }
    for j in k..s - 1 {
        let target = points[j].y + (points[j - k + 1].x - points[j - k].x);
        let t = curve.next_level(params[j], target)?;
        params.push(t);
        points.push(curve.eval(t));
    }
    points.push(Point::new(1.0, 1.0));
    let residuals = (0..k)
        .map(|j| {
            let dy = points[j + 1].y - points[j].y;
            let i = (j + s - k) % s;
            dy - (points[i + 1].x - points[i].x)
        })
        .collect();
    Some((residuals, points))
}

fn objective(curve: &FloatCurve, s: usize, k: usize, free: &[f64]) -> f64 {
    match chain(curve, s, k, free) {
        Some((r, _)) => r.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        None => f64::INFINITY,
    }
}

/// Bounds pattern search, which can otherwise creep along a valley in steps of `h`.
const MAX_SWEEPS: usize = 4000;

fn pattern_search(curve: &FloatCurve, s: usize, k: usize, start: Vec<f64>, step: f64, tol: f64) -> (Vec<f64>, f64) {
    let mut x = start;
    let mut fx = objective(curve, s, k, &x);
    let mut h = step;
    let mut sweeps = 0;
    while h > 1e-16 && fx > tol * 1e-3 && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut improved = false;
        for d in 0..k {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] += dir * h;
                let fy = objective(curve, s, k, &y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, fx)
}

/// Points on the diagonal part of the curve for the identity permutation.
fn diagonal_search(curve: &PLCurve, s: usize, tol: f64) -> SearchOutcome {
    let fc = curve.to_f64();
    let Ok(gap) = curve.x_function().sub(&curve.y_function()) else {
        return SearchOutcome { outcome: Outcome::NotFound, residual: f64::INFINITY, points: None };
    };
    let mut xs: Vec<f64> = Vec::new();
    for comp in gap.level_set(&Scalar::zero()) {
        let (a, b) = (curve.eval(comp.start()), curve.eval(comp.end()));
        let (Ok(a), Ok(b)) = (a, b) else { continue };
        if a == b {
            xs.push(a.x.to_f64());
        } else {
            let (lo, hi) = (a.x.to_f64().min(b.x.to_f64()), a.x.to_f64().max(b.x.to_f64()));
            xs.extend((0..=s).map(|i| lo + (hi - lo) * i as f64 / s as f64));
        }
    }
    xs.retain(|x| *x > 0.0 && *x < 1.0);
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    xs.dedup_by(|a, b| (*a - *b).abs() <= tol);
    if xs.len() + 1 < s {
        return SearchOutcome { outcome: Outcome::NotFound, residual: f64::INFINITY, points: None };
    }
    // spread the chosen points evenly through the candidates
    let m = xs.len();
    let mut points = alloc::vec![Point::new(0.0, 0.0)];
    for i in 1..s {
        let x = xs[(i - 1) * m / (s - 1)];
        points.push(Point::new(x, x));
    }
    points.push(Point::new(1.0, 1.0));
    let theta = CyclicPermutation { size: s, shift: 0 };
    if theta_holds(&fc.vertices, &points, theta, tol) {
        SearchOutcome { outcome: Outcome::Found, residual: 0.0, points: Some(points) }
    } else {
        SearchOutcome { outcome: Outcome::NotFound, residual: f64::INFINITY, points: None }
    }
}

const MAX_SEEDS: usize = 16;

/// Largest `m` with `m^k ≤ n`.
fn int_root(n: usize, k: usize) -> usize {
    let fits = |m: usize| (0..k).try_fold(1usize, |acc, _| acc.checked_mul(m).filter(|v| *v <= n)).is_some();
    let mut m = 1;
    while fits(m + 1) {
        m += 1;
    }
    m
}

/// Searches for points with `dx_i = dy_{θ(i)}` on `curve`.
///
/// Shift 1 runs the shooting oracle; shift 0 looks for diagonal points;
/// larger shifts run a coarse grid over the `k` free points followed by
/// pattern search from the best grid cells.
pub fn conjecture_search(curve: &PLCurve, theta: CyclicPermutation, grid: usize, tol: f64) -> SearchOutcome {
    let s = theta.size();
    let k = theta.shift();
    if *curve.start() != Point::origin() || *curve.end() != Point::unit() {
        return SearchOutcome {
            outcome: Outcome::Error("curve must run from (0, 0) to (1, 1)".into()),
            residual: f64::INFINITY,
            points: None,
        };
    }
    if s == 1 {
        let points = alloc::vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)];
        return SearchOutcome { outcome: Outcome::Found, residual: 0.0, points: Some(points) };
    }
    if k == 0 {
        return diagonal_search(curve, s, tol);
    }
    if k == 1 {
        return match brute_force(curve, s, grid, tol).into_iter().next() {
            Some(sol) => SearchOutcome { outcome: Outcome::Found, residual: sol.residual.abs(), points: Some(sol.points) },
            None => SearchOutcome { outcome: Outcome::NotFound, residual: f64::INFINITY, points: None },
        };
    }
    let fc = curve.to_f64();
    let per_axis = int_root(grid, k).clamp(4, grid.max(4));
    let mut seeds: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut idx = alloc::vec![1usize; k];
    loop {
        let free: Vec<f64> = idx.iter().map(|&i| i as f64 / per_axis as f64).collect();
        let f = objective(&fc, s, k, &free);
        if f.is_finite() {
            seeds.push((f, free));
            if seeds.len() > 4 * MAX_SEEDS {
                seeds.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
                seeds.truncate(MAX_SEEDS);
            }
        }
        let mut d = 0;
        while d < k {
            idx[d] += 1;
            if idx[d] < per_axis {
                break;
            }
            idx[d] = 1;
            d += 1;
        }
        if d == k {
            break;
        }
    }
    seeds.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    seeds.truncate(MAX_SEEDS);
    let mut best = f64::INFINITY;
    for (_, start) in seeds {
        let (x, fx) = pattern_search(&fc, s, k, start, 0.5 / per_axis as f64, tol);
        best = best.min(fx);
        if fx <= tol {
            if let Some((_, points)) = chain(&fc, s, k, &x) {
                if theta_holds(&fc.vertices, &points, theta, tol) {
                    return SearchOutcome { outcome: Outcome::Found, residual: fx, points: Some(points) };
                }
            }
        }
    }
    SearchOutcome { outcome: Outcome::NotFound, residual: best, points: None }
}
