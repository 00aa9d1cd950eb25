//! Independent checks of candidate point sequences and a shooting oracle.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::geom::{linf_distance_to_polyline, Coord, FloatCurve, LevelComponent, PLCurve, PLFunction, Point, Scalar};

/// Outcome of [`verify`]. `pass` holds exactly when the endpoints are right,
/// every point is within `tol` of the curve, all increments are positive and
/// the sorted increments agree within `tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport<T> {
    pub pass: bool,
    pub endpoints_ok: bool,
    pub on_curve_max_dist: T,
    pub positive: bool,
    pub multiset_match: bool,
    /// Largest difference between matched increments.
    pub max_mismatch: T,
    /// Smallest `k` with `dy_i = dx_{(i−k) mod S}` for all `i`, within `tol`.
    pub detected_shift: Option<usize>,
    /// `dy_i` matches `dx_{perm[i]}`; present when the multisets match.
    pub detected_permutation: Option<Vec<usize>>,
    pub tol: T,
    pub dx: Vec<T>,
    pub dy: Vec<T>,
}

fn abs_diff<T: Coord>(a: &T, b: &T) -> T {
    a.sub(b).abs()
}

fn max_of<T: Coord>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

fn cmp<T: Coord>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Checks `points` against the polyline through `curve`.
pub fn verify<T: Coord>(curve: &[Point<T>], points: &[Point<T>], tol: &T) -> VerifyReport<T> {
    let dx: Vec<T> = points.windows(2).map(|w| w[1].x.sub(&w[0].x)).collect();
    let dy: Vec<T> = points.windows(2).map(|w| w[1].y.sub(&w[0].y)).collect();
    let near = |p: &Point<T>, q: &Point<T>| abs_diff(&p.x, &q.x) <= *tol && abs_diff(&p.y, &q.y) <= *tol;
    let endpoints_ok = points.len() >= 2
        && near(&points[0], &Point::origin())
        && near(&points[points.len() - 1], &Point::unit());
    let on_curve_max_dist = if curve.is_empty() {
        T::zero()
    } else {
        points.iter().map(|p| linf_distance_to_polyline(curve, p)).fold(T::zero(), max_of)
    };
    let zero = T::zero();
    let positive = !dx.is_empty() && dx.iter().chain(&dy).all(|d| *d > zero);

    let s = dx.len();
    let mut ix: Vec<usize> = (0..s).collect();
    let mut iy: Vec<usize> = (0..s).collect();
    ix.sort_by(|&a, &b| cmp(&dx[a], &dx[b]).then(a.cmp(&b)));
    iy.sort_by(|&a, &b| cmp(&dy[a], &dy[b]).then(a.cmp(&b)));
    let max_mismatch = ix.iter().zip(&iy).map(|(&a, &b)| abs_diff(&dx[a], &dy[b])).fold(T::zero(), max_of);
    let multiset_match = s > 0 && max_mismatch <= *tol;
    let detected_permutation = multiset_match.then(|| {
        let mut perm = alloc::vec![0; s];
        for (&a, &b) in ix.iter().zip(&iy) {
            perm[b] = a;
        }
        perm
    });
    let detected_shift = (0..s).find(|&k| (0..s).all(|i| abs_diff(&dy[i], &dx[(i + s - k) % s]) <= *tol));
    let pass = endpoints_ok && on_curve_max_dist <= *tol && positive && multiset_match;
    VerifyReport {
        pass,
        endpoints_ok,
        on_curve_max_dist,
        positive,
        multiset_match,
        max_mismatch,
        detected_shift,
        detected_permutation,
        tol: tol.clone(),
        dx,
        dy,
    }
}

/// Result of shooting from one starting parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Closure {
    /// `x_{S−1} + y_1 − 1` for the chain built from `t1`.
    Residual { value: f64, params: Vec<f64>, points: Vec<Point<f64>> },
    /// The chain left the curve at step `step`.
    Infeasible { step: usize },
}

impl Closure {
    /// Sign used for bracketing; an infeasible chain counts as overshooting.
    pub fn sign(&self) -> f64 {
        match self {
            Closure::Residual { value, .. } if *value == 0.0 => 0.0,
            Closure::Residual { value, .. } => value.signum(),
            Closure::Infeasible { .. } => 1.0,
        }
    }
}

/// Builds `A_1 = γ(t1)` and then each `A_{i+1}` at the smallest later
/// parameter where the ordinate rises by `x_i − x_{i−1}`, for `S` increments.
pub fn closure_residual(curve: &FloatCurve, s: usize, t1: f64) -> Closure {
    assert!(s >= 2, "closure needs at least two increments");
    let mut params = alloc::vec![0.0, t1];
    let mut points = alloc::vec![Point::new(0.0, 0.0), curve.eval(t1)];
    for i in 1..s - 1 {
        let (prev, cur) = (&points[i - 1], &points[i]);
        let target = cur.y + (cur.x - prev.x);
        match curve.next_level(params[i], target) {
            Some(t) => {
                params.push(t);
                points.push(curve.eval(t));
            }
            None => return Closure::Infeasible { step: i + 1 },
        }
    }
    let value = points[s - 1].x + points[1].y - 1.0;
    params.push(1.0);
    points.push(Point::new(1.0, 1.0));
    Closure::Residual { value, params, points }
}

/// Exact version of [`closure_residual`]: the residual, parameters and
/// points `A_0 … A_S` of the chain started at `t1`, or `None` if it leaves
/// the curve.
pub fn closure_exact(curve: &PLCurve, s: usize, t1: &Scalar) -> Option<(Scalar, Vec<Scalar>, Vec<Point>)> {
    assert!(s >= 2, "closure needs at least two increments");
    if t1.is_negative() || *t1 > Scalar::one() {
        return None;
    }
    let yf = curve.y_function();
    let mut params = alloc::vec![Scalar::zero(), t1.clone()];
    let mut points = alloc::vec![Point::origin(), curve.eval(t1).ok()?];
    for i in 1..s - 1 {
        let target = &points[i].y + (&points[i].x - &points[i - 1].x);
        let t = next_level_exact(&yf, &params[i], &target)?;
        points.push(curve.eval(&t).ok()?);
        params.push(t);
    }
    let residual = &points[s - 1].x + &points[1].y - Scalar::one();
    params.push(Scalar::one());
    points.push(Point::unit());
    Some((residual, params, points))
}

fn next_level_exact(f: &PLFunction, after: &Scalar, target: &Scalar) -> Option<Scalar> {
    f.level_set(target).into_iter().find_map(|c| match c {
        LevelComponent::Root(r) if r > *after => Some(r),
        LevelComponent::Flat(a, _) if a > *after => Some(a),
        _ => None,
    })
}

fn segment_signature(curve: &PLCurve, params: &[Scalar]) -> Vec<usize> {
    params.iter().map(|t| curve.knots().partition_point(|k| k <= t).saturating_sub(1)).collect()
}

/// Turns an approximate shooting root into an exact one. Within a fixed
/// assignment of chain points to curve segments the residual is affine in
/// `t1`, so one secant step from two nearby rationals lands on the root.
pub fn polish_exact(curve: &PLCurve, s: usize, t1: f64) -> Option<Vec<Point>> {
    let ta = Scalar::from_f64(t1)?;
    let (ra, pa, _) = closure_exact(curve, s, &ta)?;
    if ra.is_zero() {
        return closure_exact(curve, s, &ta).map(|(_, _, pts)| pts);
    }
    let sig = segment_signature(curve, &pa);
    let h = Scalar::one().halved(40);
    for tb in [&ta + &h, &ta - &h] {
        let Some((rb, pb, _)) = closure_exact(curve, s, &tb) else { continue };
        if segment_signature(curve, &pb) != sig || rb == ra {
            continue;
        }
        let root = &ta - &ra * (&tb - &ta) / (&rb - &ra);
        if let Some((r, _, pts)) = closure_exact(curve, s, &root) {
            if r.is_zero() {
                return Some(pts);
            }
        }
    }
    None
}

/// A verified solution found by [`brute_force`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub t1: f64,
    pub residual: f64,
    pub params: Vec<f64>,
    pub points: Vec<Point<f64>>,
    pub report: VerifyReport<f64>,
}

const BISECTION_STEPS: usize = 200;

/// A shooting chain that takes crossing `key[j]` (counted from the first
/// crossing after the previous point) at step `j + 2`; all zeros is the
/// chain of [`closure_residual`].
#[derive(Clone, Debug, PartialEq)]
struct Chain {
    key: Vec<usize>,
    value: f64,
    params: Vec<f64>,
    points: Vec<Point<f64>>,
}

/// Every crossing of the ordinate `target` after `after`, in order.
fn levels_after(curve: &FloatCurve, after: f64, target: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut from = after;
    while let Some(t) = curve.next_level(from, target) {
        out.push(t);
        from = t;
    }
    out
}

fn extend_chains(curve: &FloatCurve, s: usize, chain: &mut Chain, out: &mut Vec<Chain>) {
    let i = chain.points.len() - 1;
    if i == s - 1 {
        let mut done = chain.clone();
        done.value = chain.points[s - 1].x + chain.points[1].y - 1.0;
        done.params.push(1.0);
        done.points.push(Point::new(1.0, 1.0));
        out.push(done);
        return;
    }
    let (prev, cur) = (&chain.points[i - 1], &chain.points[i]);
    let target = cur.y + (cur.x - prev.x);
    for (k, t) in levels_after(curve, chain.params[i], target).into_iter().enumerate() {
        chain.key.push(k);
        chain.params.push(t);
        chain.points.push(curve.eval(t));
        extend_chains(curve, s, chain, out);
        chain.key.pop();
        chain.params.pop();
        chain.points.pop();
    }
}

/// All complete shooting chains from `t1`, one per branch key.
fn closure_chains(curve: &FloatCurve, s: usize, t1: f64) -> Vec<Chain> {
    let mut chain =
        Chain { key: Vec::new(), value: 0.0, params: alloc::vec![0.0, t1], points: alloc::vec![Point::new(0.0, 0.0), curve.eval(t1)] };
    let mut out = Vec::new();
    extend_chains(curve, s, &mut chain, &mut out);
    out
}

fn chain_on(curve: &FloatCurve, s: usize, t1: f64, key: &[usize]) -> Option<Chain> {
    closure_chains(curve, s, t1).into_iter().find(|c| c.key == key)
}

fn sign(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum()
    }
}

/// Sweeps `t1` over `grid` interior grid points. Every crossing branch of
/// the shooting chain is followed separately; sign changes within one
/// branch are bisected, and the solutions that pass [`verify`] are kept.
pub fn brute_force(curve: &PLCurve, s: usize, grid: usize, tol: f64) -> Vec<OracleSolution> {
    let fc = curve.to_f64();
    let mut out: Vec<OracleSolution> = Vec::new();
    if s < 2 || grid < 2 {
        return out;
    }
    let accept = |c: Chain, out: &mut Vec<OracleSolution>| {
        if c.value.abs() > tol {
            return;
        }
        let report = verify(&fc.vertices, &c.points, &tol);
        let same = |o: &OracleSolution| o.points.iter().zip(&c.points).all(|(a, b)| (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol);
        if report.pass && !out.iter().any(same) {
            out.push(OracleSolution { t1: c.params[1], residual: c.value, params: c.params, points: c.points, report });
        }
    };
    let step = 1.0 / grid as f64;
    let mut prev: Vec<(Vec<usize>, f64)> = Vec::new();
    for k in 1..grid {
        let t = k as f64 * step;
        let chains = closure_chains(&fc, s, t);
        let signs: Vec<(Vec<usize>, f64)> = chains.iter().map(|c| (c.key.clone(), sign(c.value))).collect();
        for c in chains {
            let sg = sign(c.value);
            if sg == 0.0 {
                accept(c, &mut out);
                continue;
            }
            let Some(ps) = prev.iter().find(|(key, _)| *key == c.key).map(|p| p.1) else { continue };
            if ps == 0.0 || ps == sg {
                continue;
            }
            let (mut lo, mut hi) = (t - step, t);
            let mut lo_chain = chain_on(&fc, s, lo, &c.key);
            let mut hi_chain = Some(c);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                // a branch that vanishes inside the bracket ends the refinement
                let Some(m) = chain_on(&fc, s, mid, &hi_chain.as_ref().expect("bracket end").key) else { break };
                let ms = sign(m.value);
                if ms == 0.0 {
                    lo_chain = Some(m.clone());
                    hi_chain = Some(m);
                    break;
                }
                if ms == ps {
                    lo = mid;
                    lo_chain = Some(m);
                } else {
                    hi = mid;
                    hi_chain = Some(m);
                }
            }
            let pick = match (lo_chain, hi_chain) {
                (Some(a), Some(b)) => {
                    if a.value.abs() <= b.value.abs() {
                        a
                    } else {
                        b
                    }
                }
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => continue,
            };
            accept(pick, &mut out);
        }
        prev = signs;
    }
    out.sort_by(|a, b| {
        let key = |o: &OracleSolution| o.points.iter().flat_map(|p| [p.x, p.y]).collect::<Vec<_>>();
        key(a).partial_cmp(&key(b)).unwrap_or(Ordering::Equal)
    });
    out
}
