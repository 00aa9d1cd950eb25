//! From a curve to equal-increment points: partitioning functions, point
//! extraction, the refinement loops and the general driver.
//!
//! Every public entry point takes `s`, the number of increments. The result
//! has points `A_0 = (0, 0), …, A_s = (1, 1)`.

use alloc::format;
use alloc::vec::Vec;

use crate::climb;
use crate::error::{Error, Result};
use crate::geom::{
    curve_intersections, monotone_decompose, normalize_tail, perturb_distinct_extrema, LevelComponent, PLCurve,
    PLFunction, Point, Scalar,
};
use crate::verify::{brute_force, polish_exact, verify, VerifyReport};

/// Tuning knobs for the inexact paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    /// Acceptance tolerance for refined (inexact) results.
    pub tol: Scalar,
    /// Iteration cap for each refinement loop.
    pub max_iter: usize,
    /// Initial perturbation budget; derived from the curve when `None`.
    pub delta0: Option<Scalar>,
    /// Grid size of the shooting fallback.
    pub fallback_grid: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { tol: Scalar::ratio(1, 1_000_000_000), max_iter: 40, delta0: None, fallback_grid: 4096 }
    }
}

/// Functions `y, x_1 … x_n` with `(x_i(t), x_{i−1}(t) + y(t))` on the source
/// curve, `x_0 ≡ 0`, all vanishing at 0, and `(x_n(1), x_{n−1}(1) + y(1)) = (1, 1)`.
///
/// `n = 0` is the degenerate family `y = id` used for two increments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitioningFunctions {
    pub n: usize,
    pub y: PLFunction,
    pub x: Vec<PLFunction>,
    pub source: PLCurve,
}

impl PartitioningFunctions {
    fn x_at(&self, i: usize, t: &Scalar) -> Scalar {
        if i == 0 {
            Scalar::zero()
        } else {
            self.x[i - 1].eval_in_domain(t)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rearrangement {
    /// `dy_i = dx_{(i−k) mod S}`.
    Shift(usize),
    /// `dy_i = dx_{perm[i]}`.
    Permutation(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Points spread on a diagonal segment ending at `(1, 1)`.
    Diagonal,
    Below,
    /// Solved with coordinates swapped.
    Above,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineTrace {
    /// Last diagonal touch in `(0, 1)`, or 0.
    pub t_split: Scalar,
    pub branch: Branch,
    /// Join parameters tried when the tail touches the axis.
    pub boundary_joins: Vec<Scalar>,
    /// Perturbation budgets tried.
    pub perturbations: Vec<Scalar>,
    pub iterations: usize,
    /// Best residual so far after each attempt.
    pub residual_history: Vec<Scalar>,
    /// Set when the shooting oracle produced the result.
    pub shooting_fallback: bool,
}

impl PipelineTrace {
    fn new(branch: Branch) -> Self {
        PipelineTrace {
            t_split: Scalar::zero(),
            branch,
            boundary_joins: Vec::new(),
            perturbations: Vec::new(),
            iterations: 0,
            residual_history: Vec::new(),
            shooting_fallback: false,
        }
    }

    fn record(&mut self, residual: Scalar) {
        let best = match self.residual_history.last() {
            Some(prev) if *prev < residual => prev.clone(),
            _ => residual,
        };
        self.residual_history.push(best);
    }

    fn absorb(&mut self, inner: PipelineTrace) {
        self.boundary_joins.extend(inner.boundary_joins);
        self.perturbations.extend(inner.perturbations);
        self.iterations += inner.iterations;
        for r in inner.residual_history {
            self.record(r);
        }
        self.shooting_fallback |= inner.shooting_fallback;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionResult {
    pub s: usize,
    pub points: Vec<Point>,
    pub dx: Vec<Scalar>,
    pub dy: Vec<Scalar>,
    pub rearrangement: Rearrangement,
    pub exact: bool,
    pub residual: Scalar,
    pub trace: PipelineTrace,
}

fn residual_of(report: &VerifyReport<Scalar>) -> Scalar {
    Scalar::max_of(&report.on_curve_max_dist, &report.max_mismatch).clone()
}

fn finish(curve: &PLCurve, points: Vec<Point>, tol: &Scalar, exact: bool, trace: PipelineTrace) -> Result<PartitionResult> {
    let tol = if exact { Scalar::zero() } else { tol.clone() };
    let report = verify(curve.vertices(), &points, &tol);
    if !report.pass {
        return Err(Error::Internal {
            reason: format!(
                "result fails verification (endpoints {}, positive {}, distance {}, mismatch {})",
                report.endpoints_ok, report.positive, report.on_curve_max_dist, report.max_mismatch
            ),
            at: None,
        });
    }
    let rearrangement = match (report.detected_shift, report.detected_permutation.clone()) {
        (Some(k), _) => Rearrangement::Shift(k),
        (None, Some(p)) => Rearrangement::Permutation(p),
        (None, None) => unreachable!("a passing report has a permutation"),
    };
    Ok(PartitionResult {
        s: points.len() - 1,
        residual: residual_of(&report),
        dx: report.dx,
        dy: report.dy,
        points,
        rearrangement,
        exact,
        trace,
    })
}

fn check_endpoints(curve: &PLCurve) -> Result<()> {
    if *curve.start() != Point::origin() || *curve.end() != Point::unit() {
        return Err(Error::precondition("curve must run from (0, 0) to (1, 1)"));
    }
    Ok(())
}

fn check_interior(curve: &PLCurve) -> Result<()> {
    check_endpoints(curve)?;
    match curve.first_non_interior() {
        Some(t) => Err(Error::NonInteriorCurve { t }),
        None => Ok(()),
    }
}

fn check_family(pf: &PartitioningFunctions) -> Result<()> {
    let mut knots: Vec<Scalar> = pf.y.knots().cloned().collect();
    for x in &pf.x {
        knots.extend(x.knots().cloned());
    }
    knots.sort();
    knots.dedup();
    for t in &knots {
        let y = pf.y.eval_in_domain(t);
        for i in 1..=pf.n {
            let p = Point::new(pf.x_at(i, t), pf.x_at(i - 1, t) + &y);
            if !pf.source.contains(&p) {
                return Err(Error::Internal { reason: format!("partitioning point {i} leaves the curve at t = {t}"), at: Some(p.into()) });
            }
        }
    }
    let (zero, one) = (Scalar::zero(), Scalar::one());
    if !pf.y.eval_in_domain(&zero).is_zero() || pf.x.iter().any(|x| !x.eval_in_domain(&zero).is_zero()) {
        return Err(Error::internal("partitioning functions do not vanish at 0"));
    }
    if pf.n > 0 && Point::new(pf.x_at(pf.n, &one), pf.x_at(pf.n - 1, &one) + pf.y.eval_in_domain(&one)) != Point::unit() {
        return Err(Error::internal("partitioning functions do not end at (1, 1)"));
    }
    Ok(())
}

fn build_unchecked(curve: &PLCurve, n: usize) -> Result<PartitioningFunctions> {
    let px = curve.x_function();
    let py = curve.y_function();
    if n == 0 {
        return Ok(PartitioningFunctions { n, y: PLFunction::identity(), x: Vec::new(), source: curve.clone() });
    }
    let mut v = py.clone();
    let mut u = alloc::vec![px.clone()];
    for _ in 1..n {
        let w = u.last().expect("u_n present").add(&v)?;
        let t0 = w
            .level_set(&Scalar::one())
            .first()
            .map(|c| c.start().clone())
            .ok_or_else(|| Error::internal("u_n + v never reaches 1"))?;
        let f2 = w.rescale_unit_domain(&t0)?;
        let sol = climb::solve(&py, &f2)?;
        let phi = sol.g2.affine_values(&t0, &Scalar::zero());
        let mut next: Vec<PLFunction> = u.iter().map(|ui| PLFunction::compose(ui, &phi)).collect::<Result<_>>()?;
        next.push(PLFunction::compose(&px, &sol.g1)?);
        v = PLFunction::compose(&v, &phi)?;
        u = next;
    }
    let pf = PartitioningFunctions { n, y: v, x: u, source: curve.clone() };
    check_family(&pf)?;
    Ok(pf)
}

/// Partitioning functions `y, x_1 … x_n` for `curve` (`n ≥ 1`).
///
/// Requires an interior curve whose ordinate function is in class 𝒰.
pub fn build_partitioning_functions(curve: &PLCurve, n: usize) -> Result<PartitioningFunctions> {
    if n == 0 {
        return Err(Error::precondition("n must be positive"));
    }
    check_interior(curve)?;
    let dec = monotone_decompose(&curve.y_function());
    if !dec.in_class_u {
        return Err(Error::NotInClassU { violations: dec.violations });
    }
    build_unchecked(curve, n)
}

/// Points `A_0 … A_{n+2}` from the first crossing of `η = (1 − y, x_n + y)`
/// with the curve; increments satisfy `dy_i = dx_{(i−1) mod (n+2)}`.
pub fn extract_points(curve: &PLCurve, pf: &PartitioningFunctions) -> Result<PartitionResult> {
    let s = pf.n + 2;
    let xn_plus_y = match pf.n {
        0 => pf.y.clone(),
        n => pf.x[n - 1].add(&pf.y)?,
    };
    let eta = PLCurve::from_components(&pf.y.affine_values(&-Scalar::one(), &Scalar::one()), &xn_plus_y)?;
    let hits = curve_intersections(&eta, curve);
    let (t0, _, meet) = hits.first().map(|h| h.first_hit()).ok_or_else(|| Error::internal("η misses the curve"))?;
    let y = pf.y.eval_in_domain(&t0);
    let mut points = Vec::with_capacity(s + 1);
    points.push(Point::origin());
    for i in 1..=pf.n {
        points.push(Point::new(pf.x_at(i, &t0), pf.x_at(i - 1, &t0) + &y));
    }
    points.push(meet);
    points.push(Point::unit());
    let dx: Vec<Scalar> = points.windows(2).map(|w| &w[1].x - &w[0].x).collect();
    let dy: Vec<Scalar> = points.windows(2).map(|w| &w[1].y - &w[0].y).collect();
    if let Some(i) = (0..s).find(|&i| dy[i] != dx[(i + s - 1) % s]) {
        return Err(Error::Internal { reason: format!("shift relation fails at i = {i}"), at: Some(points[i].clone().into()) });
    }
    if curve.is_delta_interior() && points.windows(2).any(|w| w[0].x >= w[1].x) {
        return Err(Error::internal("extracted points are not distinct"));
    }
    finish(curve, points, &Scalar::zero(), true, PipelineTrace::new(Branch::Below))
}

fn solve_exact(curve: &PLCurve, s: usize) -> Result<PartitionResult> {
    if s == 1 {
        return finish(curve, alloc::vec![Point::origin(), Point::unit()], &Scalar::zero(), true, PipelineTrace::new(Branch::Below));
    }
    let pf = build_unchecked(curve, s - 2)?;
    extract_points(curve, &pf)
}

/// Smallest interior-vertex slack `min(y, x − y)` of a curve in `Δ`.
fn delta_margin(curve: &PLCurve) -> Scalar {
    let vs = curve.vertices();
    vs[1..vs.len() - 1]
        .iter()
        .map(|p| Scalar::min_of(&p.y, &(&p.x - &p.y)).clone())
        .min()
        .expect("a curve in Δ has an interior vertex")
}

/// Solves a curve lying in `Δ = {(a, b) ∈ (0,1)² : a > b}` with `s` increments.
///
/// Exact when the ordinate function can be climbed directly; otherwise the
/// ordinate is perturbed with budgets `δ_0 / 2^k` and the solution projected
/// back onto the curve until it verifies within `opts.tol`.
pub fn partition_delta(curve: &PLCurve, s: usize, opts: &Options) -> Result<PartitionResult> {
    if s == 0 {
        return Err(Error::precondition("at least one increment is required"));
    }
    check_endpoints(curve)?;
    if !curve.is_delta_interior() {
        return Err(Error::precondition("curve must lie strictly below the diagonal inside the unit square"));
    }
    let py = curve.y_function();
    let in_u = monotone_decompose(&py).in_class_u;
    match solve_exact(curve, s) {
        Ok(r) => return Ok(r),
        Err(e) if in_u => return Err(e),
        Err(_) => {}
    }
    perturbation_loop(curve, s, opts)
}

/// Solves perturbed copies of the curve and keeps the first projection that
/// verifies within `opts.tol`.
fn perturbation_loop(curve: &PLCurve, s: usize, opts: &Options) -> Result<PartitionResult> {
    let py = curve.y_function();
    let px = curve.x_function();
    let delta0 = opts.delta0.clone().unwrap_or_else(|| {
        Scalar::min_of(&Scalar::ratio(1, 1024), &delta_margin(curve).halved(1)).clone()
    });
    let mut trace = PipelineTrace::new(Branch::Below);
    let mut best = f64::INFINITY;
    for k in 1..=opts.max_iter {
        let delta = delta0.halved(k as u32);
        trace.perturbations.push(delta.clone());
        trace.iterations += 1;
        let Ok(f) = perturb_distinct_extrema(&py, &delta) else { continue };
        let perturbed = PLCurve::from_components(&px, &f)?;
        let Ok(candidate) = solve_exact(&perturbed, s) else { continue };
        let mut points = Vec::with_capacity(candidate.points.len());
        for p in &candidate.points {
            let t = perturbed.locate(p).ok_or_else(|| Error::internal("solution point is off the perturbed curve"))?;
            points.push(curve.eval(&t)?);
        }
        let report = verify(curve.vertices(), &points, &opts.tol);
        let residual = residual_of(&report);
        best = best.min(residual.to_f64());
        trace.record(residual);
        if report.pass {
            let t1 = curve.locate(&points[1]).map(|t| t.to_f64());
            if let Some(exact) = t1.filter(|_| s >= 2).and_then(|t1| polish_exact(curve, s, t1)) {
                if verify(curve.vertices(), &exact, &Scalar::zero()).pass {
                    trace.record(Scalar::zero());
                    return finish(curve, exact, &opts.tol, true, trace);
                }
            }
            return finish(curve, points, &opts.tol, false, trace);
        }
    }
    Err(Error::Convergence { iterations: opts.max_iter, best_residual: best })
}

/// The curve made of the chord from `(0, 0)` to `η(t_k)` followed by `η` on `[t_k, 1]`.
fn joined_curve(eta: &PLCurve, t_k: &Scalar) -> Result<PLCurve> {
    let mut knots = alloc::vec![Scalar::zero(), t_k.clone()];
    let mut vertices = alloc::vec![Point::origin(), eta.eval(t_k)?];
    for (t, v) in eta.knots().iter().zip(eta.vertices()) {
        if t > t_k {
            knots.push(t.clone());
            vertices.push(v.clone());
        }
    }
    PLCurve::new(knots, vertices)
}

fn last_interior_zero(f: &PLFunction) -> Option<Scalar> {
    let (zero, one) = (Scalar::zero(), Scalar::one());
    f.level_set(&zero)
        .into_iter()
        .map(|c| c.end().clone())
        .rfind(|t| *t > zero && *t < one)
}

/// Solves a curve with `x > y` in the interior that stays in `[0, 1]²`,
/// joining past the last axis touch when the ordinate returns to 0.
fn partition_below(eta: &PLCurve, s: usize, opts: &Options) -> Result<PartitionResult> {
    if s <= 2 {
        return solve_exact(eta, s);
    }
    let Some(t_last) = last_interior_zero(&eta.y_function()) else {
        return partition_delta(eta, s, opts);
    };
    let mut trace = PipelineTrace::new(Branch::Below);
    let mut best = f64::INFINITY;
    for k in 1..=opts.max_iter {
        let t_k = &t_last + (Scalar::one() - &t_last).halved(k as u32);
        trace.boundary_joins.push(t_k.clone());
        trace.iterations += 1;
        let joined = joined_curve(eta, &t_k)?;
        let candidate = match partition_delta(&joined, s, opts) {
            Ok(c) => c,
            Err(Error::Convergence { .. }) => continue,
            Err(e) => return Err(e),
        };
        let report = verify(eta.vertices(), &candidate.points, &opts.tol);
        let residual = residual_of(&report);
        best = best.min(residual.to_f64());
        trace.record(residual);
        let exact = candidate.exact && report.on_curve_max_dist.is_zero();
        let inner = candidate.trace;
        trace.absorb(PipelineTrace { iterations: 0, ..inner });
        if report.pass {
            return finish(eta, candidate.points, &opts.tol, exact, trace);
        }
    }
    Err(Error::Convergence { iterations: opts.max_iter, best_residual: best })
}

/// Float shooting on the normalized tail, with exact points re-evaluated
/// on the curve at the found parameters.
fn partition_by_shooting(eta: &PLCurve, s: usize, opts: &Options) -> Result<PartitionResult> {
    if s <= 2 {
        return solve_exact(eta, s);
    }
    let tol = opts.tol.to_f64();
    let solutions = brute_force(eta, s, opts.fallback_grid, tol);
    let mut trace = PipelineTrace::new(Branch::Below);
    trace.shooting_fallback = true;
    trace.iterations = 1;
    for sol in &solutions {
        if let Some(points) = polish_exact(eta, s, sol.t1) {
            if verify(eta.vertices(), &points, &Scalar::zero()).pass {
                trace.record(Scalar::zero());
                return finish(eta, points, &opts.tol, true, trace);
            }
        }
    }
    let mut best = f64::INFINITY;
    for sol in solutions {
        let mut points = Vec::with_capacity(sol.params.len());
        for t in &sol.params {
            let t = Scalar::from_f64(*t).ok_or_else(|| Error::internal("non-finite shooting parameter"))?;
            points.push(eta.eval(&t)?);
        }
        *points.last_mut().expect("nonempty") = Point::unit();
        let report = verify(eta.vertices(), &points, &opts.tol);
        best = best.min(residual_of(&report).to_f64());
        if report.pass {
            trace.record(residual_of(&report));
            return finish(eta, points, &opts.tol, false, trace);
        }
    }
    Err(Error::Convergence { iterations: 1, best_residual: best })
}

fn in_closed_square(curve: &PLCurve) -> bool {
    let (zero, one) = (Scalar::zero(), Scalar::one());
    curve.vertices().iter().all(|p| p.x >= zero && p.y >= zero && p.x <= one && p.y <= one)
}

/// Solves any curve from `(0, 0)` to `(1, 1)` that stays in the open unit
/// square for interior parameters, with `s` positive increments in each
/// coordinate that agree after a rearrangement.
pub fn partition_theorem1(curve: &PLCurve, s: usize, opts: &Options) -> Result<PartitionResult> {
    if s == 0 {
        return Err(Error::precondition("at least one increment is required"));
    }
    check_interior(curve)?;
    if s == 1 {
        return solve_exact(curve, 1);
    }
    let gap = curve.x_function().sub(&curve.y_function())?;
    let (zero, one) = (Scalar::zero(), Scalar::one());
    let touches: Vec<LevelComponent> =
        gap.level_set(&zero).into_iter().filter(|c| *c.end() > zero && *c.start() < one).collect();

    if let Some(LevelComponent::Flat(start, _)) = touches.last().filter(|c| *c.end() == one) {
        // diagonal segment ending at (1, 1)
        let c = curve.eval(start)?.x;
        let span = &one - &c;
        let mut points = alloc::vec![Point::origin()];
        for i in 1..=s {
            let v = &c + &span * Scalar::ratio(i as i64, s as i64);
            points.push(Point::new(v.clone(), v));
        }
        let mut trace = PipelineTrace::new(Branch::Diagonal);
        trace.t_split = one;
        return finish(curve, points, &opts.tol, true, trace);
    }

    let t_split = touches.last().map(|c| c.end().clone()).unwrap_or_else(Scalar::zero);
    let (tail, frame) = normalize_tail(curve, &t_split)?;
    let probe = tail.eval(&tail.knots()[1].halved(1))?;
    let above = probe.y > probe.x;
    let solver_curve = if above { tail.swap_xy() } else { tail.clone() };
    let tail_s = if t_split.is_zero() { s } else { s - 1 };

    let inner = if in_closed_square(&solver_curve) {
        partition_below(&solver_curve, tail_s, opts)?
    } else {
        partition_by_shooting(&solver_curve, tail_s, opts)?
    };

    let mut points: Vec<Point> = Vec::with_capacity(s + 1);
    if !t_split.is_zero() {
        points.push(Point::origin());
    }
    points.extend(inner.points.iter().map(|p| frame.from_frame(&if above { p.swapped() } else { p.clone() })));
    let mut trace = PipelineTrace::new(if above { Branch::Above } else { Branch::Below });
    trace.t_split = t_split;
    trace.absorb(inner.trace);
    finish(curve, points, &opts.tol, inner.exact, trace)
}

/// A probability density on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Density {
    /// Value `values[i]` on `[breaks[i], breaks[i+1]]`; `breaks` runs from 0 to 1.
    Step { breaks: Vec<Scalar>, values: Vec<Scalar> },
    /// Continuous piecewise-linear density.
    PiecewiseLinear(PLFunction),
}

/// Samples per linear density piece when building the cumulative polyline.
pub const PL_DENSITY_SAMPLES: usize = 64;

impl Density {
    pub fn uniform() -> Self {
        Density::Step { breaks: alloc::vec![Scalar::zero(), Scalar::one()], values: alloc::vec![Scalar::one()] }
    }

    /// Exact cumulative values `∫₀ᵃ` at ascending nodes `a` including 0 and 1.
    fn cumulative_nodes(&self) -> Result<Vec<(Scalar, Scalar)>> {
        let mut out = alloc::vec![(Scalar::zero(), Scalar::zero())];
        let mut acc = Scalar::zero();
        match self {
            Density::Step { breaks, values } => {
                if breaks.len() != values.len() + 1 || values.is_empty() {
                    return Err(Error::InvalidInput("step density needs one more break than values".into()));
                }
                if !breaks[0].is_zero() || breaks[breaks.len() - 1] != Scalar::one() {
                    return Err(Error::InvalidInput("step density breaks must run from 0 to 1".into()));
                }
                for (w, v) in breaks.windows(2).zip(values) {
                    if w[0] >= w[1] {
                        return Err(Error::InvalidInput("step density breaks must increase".into()));
                    }
                    if v.is_negative() {
                        return Err(Error::Precondition { reason: "density is negative".into(), witness: Some(w[0].clone()) });
                    }
                    acc = acc + v * (&w[1] - &w[0]);
                    out.push((w[1].clone(), acc.clone()));
                }
            }
            Density::PiecewiseLinear(f) => {
                if !f.has_unit_domain() {
                    return Err(Error::InvalidInput("density must be defined on [0, 1]".into()));
                }
                if let Some((t, _)) = f.breakpoints().iter().find(|(_, v)| v.is_negative()) {
                    return Err(Error::Precondition { reason: "density is negative".into(), witness: Some(t.clone()) });
                }
                let m = PL_DENSITY_SAMPLES as i64;
                for w in f.breakpoints().windows(2) {
                    let (t0, t1) = (&w[0].0, &w[1].0);
                    let mut prev = (t0.clone(), w[0].1.clone());
                    for j in 1..=m {
                        let t = t0 + (t1 - t0) * Scalar::ratio(j, m);
                        let v = f.eval_in_domain(&t);
                        // trapezoid rule is exact on a linear piece
                        acc = acc + (&t - &prev.0) * (&prev.1 + &v).halved(1);
                        out.push((t.clone(), acc.clone()));
                        prev = (t, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Cumulative distribution as a piecewise-linear function; exact for step
    /// densities, interpolated between exact samples otherwise.
    pub fn cumulative(&self) -> Result<PLFunction> {
        let nodes = self.cumulative_nodes()?;
        let total = &nodes[nodes.len() - 1].1;
        if *total != Scalar::one() {
            return Err(Error::Precondition { reason: format!("density integrates to {total}, not 1"), witness: Some(total.clone()) });
        }
        PLFunction::new(nodes)
    }
}

/// Parameters `0 = t_0 < … < t_s = 1` whose interval masses under `f` and
/// under `g` agree after the rearrangement in `result`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityPartition {
    pub t: Vec<Scalar>,
    pub result: PartitionResult,
}

pub fn densities_partition(f: &Density, g: &Density, s: usize, opts: &Options) -> Result<DensityPartition> {
    let cf = f.cumulative()?;
    let cg = g.cumulative()?;
    let curve = PLCurve::from_components(&cf, &cg)?;
    if let Some(t) = curve.first_non_interior() {
        return Err(Error::Precondition {
            reason: "cumulative masses must stay strictly between 0 and 1 inside (0, 1)".into(),
            witness: Some(t),
        });
    }
    let result = partition_theorem1(&curve, s, opts)?;
    let mut t = Vec::with_capacity(result.points.len());
    for p in &result.points {
        let tp = match curve.locate(p) {
            Some(tp) => tp,
            // inexact points sit within tol of the curve
            None if !result.exact => curve.nearest_param(p),
            None => return Err(Error::internal("partition point is off the cumulative curve")),
        };
        t.push(tp);
    }
    Ok(DensityPartition { t, result })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bent() -> PLCurve {
        PLCurve::from_vertices(alloc::vec![Point::from_ints(0, 0), Point::ratio(4, 5, 1, 5), Point::from_ints(1, 1)])
            .unwrap()
    }

    fn diag() -> PLCurve {
        PLCurve::from_vertices(alloc::vec![Point::from_ints(0, 0), Point::from_ints(1, 1)]).unwrap()
    }

    fn pts(v: &[(i64, i64, i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(a, b, c, d)| Point::ratio(a, b, c, d)).collect()
    }

    #[test]
    fn base_family_is_the_curve() {
        let pf = build_partitioning_functions(&bent(), 1).unwrap();
        assert_eq!(pf.x, [bent().x_function()]);
        assert_eq!(pf.y, bent().y_function());
    }

    #[test]
    fn bent_three_increments() {
        let pf = build_partitioning_functions(&bent(), 1).unwrap();
        let r = extract_points(&bent(), &pf).unwrap();
        assert_eq!(r.points, pts(&[(0, 1, 0, 1), (4, 9, 1, 9), (8, 9, 5, 9), (1, 1, 1, 1)]));
        assert_eq!(r.rearrangement, Rearrangement::Shift(1));
        assert!(r.exact);
    }

    #[test]
    fn general_solver_matches_delta_on_bent() {
        let a = partition_theorem1(&bent(), 3, &Options::default()).unwrap();
        let b = partition_delta(&bent(), 3, &Options::default()).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.trace.branch, Branch::Below);
    }

    #[test]
    fn diagonal_branch() {
        let r = partition_theorem1(&diag(), 3, &Options::default()).unwrap();
        assert_eq!(r.points, pts(&[(0, 1, 0, 1), (1, 3, 1, 3), (2, 3, 2, 3), (1, 1, 1, 1)]));
        assert_eq!(r.dx, r.dy);
        assert_eq!(r.trace.branch, Branch::Diagonal);
    }

    #[test]
    fn above_branch_swaps() {
        let c = bent().swap_xy();
        for s in 2..=5 {
            let r = partition_theorem1(&c, s, &Options::default()).unwrap();
            assert!(r.exact);
            assert_eq!(r.trace.branch, Branch::Above);
            assert_eq!(r.rearrangement, Rearrangement::Shift(s - 1));
        }
    }

    #[test]
    fn boundary_curve_is_rejected() {
        let l = PLCurve::from_vertices(alloc::vec![Point::from_ints(0, 0), Point::from_ints(1, 0), Point::from_ints(1, 1)])
            .unwrap();
        for s in 2..=5 {
            assert!(matches!(partition_theorem1(&l, s, &Options::default()), Err(Error::NonInteriorCurve { .. })));
        }
    }

    #[test]
    fn diagonal_touch_splits_the_curve() {
        let c = PLCurve::from_vertices(alloc::vec![
            Point::from_ints(0, 0),
            Point::ratio(1, 2, 1, 4),
            Point::ratio(1, 2, 1, 2),
            Point::ratio(7, 8, 5, 8),
            Point::from_ints(1, 1),
        ])
        .unwrap();
        for s in 2..=4 {
            let r = partition_theorem1(&c, s, &Options::default()).unwrap();
            assert_eq!(r.trace.t_split, Scalar::ratio(1, 2));
            assert_eq!(r.points[1], Point::ratio(1, 2, 1, 2));
            assert!(r.exact);
        }
    }

    #[test]
    fn two_increments_hit_the_antidiagonal() {
        let r = partition_theorem1(&bent(), 2, &Options::default()).unwrap();
        let a = &r.points[1];
        assert_eq!(&a.x + &a.y, Scalar::one());
    }

    #[test]
    fn perturbation_loop_verifies_within_tol() {
        // π₂ has the fold value 3/10 as both a local max and a local min
        let c = PLCurve::from_vertices(pts(&[(0, 1, 0, 1), (2, 5, 3, 10), (1, 2, 1, 10), (7, 10, 1, 2), (4, 5, 3, 10), (1, 1, 1, 1)]))
            .unwrap();
        let opts = Options::default();
        for s in 2..=4 {
            let r = perturbation_loop(&c, s, &opts).unwrap();
            assert!(!r.trace.perturbations.is_empty());
            assert!(verify(c.vertices(), &r.points, &opts.tol).pass);
            assert_eq!(r.rearrangement, Rearrangement::Shift(1));
        }
    }

    #[test]
    fn uniform_densities() {
        let r = densities_partition(&Density::uniform(), &Density::uniform(), 4, &Options::default()).unwrap();
        assert_eq!(r.t, (0..=4).map(|i| Scalar::ratio(i, 4)).collect::<Vec<_>>());
    }

    #[test]
    fn step_densities() {
        let f = Density::uniform();
        let g = Density::Step {
            breaks: alloc::vec![Scalar::zero(), Scalar::ratio(1, 2), Scalar::one()],
            values: alloc::vec![Scalar::ratio(3, 2), Scalar::ratio(1, 2)],
        };
        let r = densities_partition(&f, &g, 3, &Options::default()).unwrap();
        assert_eq!(r.t.len(), 4);
        assert!(r.result.exact);
    }

    #[test]
    fn bad_density_total() {
        let g = Density::Step { breaks: alloc::vec![Scalar::zero(), Scalar::one()], values: alloc::vec![Scalar::ratio(1, 2)] };
        assert!(matches!(densities_partition(&Density::uniform(), &g, 2, &Options::default()), Err(Error::Precondition { .. })));
    }
}
