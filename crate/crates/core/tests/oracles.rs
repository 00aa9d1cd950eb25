//! Worked examples checked against independent oracles, with the confirmed
//! values frozen.

use std::collections::{BTreeSet, VecDeque};

use rearrange_core::climb::{apply_bumps, plan_bumps, solve, BumpSign, ClimbSolution};
use rearrange_core::explore::{conjecture_search, random_curve, CurveClass, CurveSpec, CyclicPermutation, Outcome};
use rearrange_core::geom::{curve_intersections, monotone_decompose, normalize_tail, perturb_distinct_extrema};
use rearrange_core::graph_case::{largest_root_chain, solve_graph};
use rearrange_core::pipeline::{
    build_partitioning_functions, densities_partition, extract_points, partition_delta, partition_theorem1, Density, Options,
    Rearrangement,
};
use rearrange_core::verify::{brute_force, closure_exact, verify};
use rearrange_core::{PLCurve, PLFunction, Point, Scalar};

fn r(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn func(v: &[(i64, i64, i64, i64)]) -> PLFunction {
    PLFunction::from_ratios(v).unwrap()
}

fn curve(v: &[(i64, i64, i64, i64)]) -> PLCurve {
    PLCurve::from_vertices(v.iter().map(|&(a, b, c, d)| Point::ratio(a, b, c, d)).collect()).unwrap()
}

fn bent() -> PLCurve {
    curve(&[(0, 1, 0, 1), (4, 5, 1, 5), (1, 1, 1, 1)])
}

/// Values of a piecewise-linear function by direct interpolation.
fn interp(bps: &[(f64, f64)], t: f64) -> f64 {
    let i = bps.windows(2).position(|w| t <= w[1].0).unwrap_or(bps.len() - 2);
    let ((t0, v0), (t1, v1)) = (bps[i], bps[i + 1]);
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

fn float_bps(f: &PLFunction) -> Vec<(f64, f64)> {
    f.breakpoints().iter().map(|(t, v)| (t.to_f64(), v.to_f64())).collect()
}

fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// ---- piecewise-linear functions ----

#[test]
fn compose_matches_pointwise_on_rational_grid() {
    let outer = func(&[(0, 1, 0, 1), (1, 2, 1, 1), (1, 1, 1, 1)]);
    let inner = func(&[(0, 1, 0, 1), (1, 1, 1, 2)]);
    let h = PLFunction::compose(&outer, &inner).unwrap();
    assert_eq!(h, PLFunction::identity());

    let zigzag = func(&[(0, 1, 0, 1), (1, 4, 3, 4), (1, 2, 1, 4), (3, 4, 7, 8), (1, 1, 1, 1)]);
    let f = func(&[(0, 1, 0, 1), (1, 3, 1, 2), (2, 3, 1, 3), (1, 1, 1, 1)]);
    let h = PLFunction::compose(&f, &zigzag).unwrap();
    for k in 0..=97 {
        let t = r(k, 97);
        assert_eq!(h.eval(&t).unwrap(), f.eval(&zigzag.eval(&t).unwrap()).unwrap());
    }
    // each inner piece contributes its endpoints plus one breakpoint per crossing of an outer breakpoint level
    let crossings: usize = zigzag
        .breakpoints()
        .windows(2)
        .map(|w| f.breakpoints().iter().filter(|(t, _)| (&w[0].1 < t && t < &w[1].1) || (&w[1].1 < t && t < &w[0].1)).count())
        .sum();
    assert!(h.breakpoints().len() <= zigzag.breakpoints().len() + crossings);
}

#[test]
fn zigzag_level_set_per_piece() {
    let f = func(&[(0, 1, 0, 1), (1, 3, 2, 3), (2, 3, 1, 3), (1, 1, 1, 1)]);
    let c = r(1, 2);
    // solve v0 + (v1 − v0)(t − t0)/(t1 − t0) = c on each piece
    let mut oracle = BTreeSet::new();
    for w in f.breakpoints().windows(2) {
        let ((t0, v0), (t1, v1)) = (&w[0], &w[1]);
        if (v0 <= &c && &c <= v1) || (v1 <= &c && &c <= v0) {
            oracle.insert(t0 + (t1 - t0) * ((&c - v0) / (v1 - v0)));
        }
    }
    let roots: BTreeSet<Scalar> = f.level_set(&c).iter().map(|comp| comp.start().clone()).collect();
    assert_eq!(roots, oracle);
    assert_eq!(roots, [r(1, 4), r(1, 2), r(3, 4)].into_iter().collect());
}

/// Interior local extremum values by scanning slope sign changes.
fn extremum_scan(f: &PLFunction) -> Vec<(Scalar, bool)> {
    let bps = f.breakpoints();
    let mut out = Vec::new();
    for i in 1..bps.len() - 1 {
        let before = &bps[i].1 - &bps[i - 1].1;
        let after = &bps[i + 1].1 - &bps[i].1;
        if before.is_positive() && !after.is_positive() || before.is_negative() && !after.is_negative() {
            out.push((bps[i].1.clone(), before.is_positive()));
        } else if before.is_zero() && !after.is_zero() {
            out.push((bps[i].1.clone(), after.is_negative()));
        }
    }
    out
}

#[test]
fn class_u_violation_witness_level() {
    // local max 1/2 at 1/4, local min 1/4 at 1/2, then a down piece to a local min at 1/2
    let f = func(&[(0, 1, 0, 1), (1, 4, 1, 2), (1, 2, 1, 4), (5, 8, 3, 4), (3, 4, 1, 2), (1, 1, 1, 1)]);
    let scan = extremum_scan(&f);
    let max_levels: BTreeSet<Scalar> = scan.iter().filter(|e| e.1).map(|e| e.0.clone()).collect();
    let min_levels: BTreeSet<Scalar> = scan.iter().filter(|e| !e.1).map(|e| e.0.clone()).collect();
    let shared: BTreeSet<Scalar> = max_levels.intersection(&min_levels).cloned().collect();
    assert_eq!(shared, [r(1, 2)].into_iter().collect());
    let dec = monotone_decompose(&f);
    assert!(!dec.in_class_u);
    let levels: BTreeSet<Scalar> = dec.violations.iter().map(|v| v.level.clone()).collect();
    assert_eq!(levels, shared);
}

#[test]
fn perturb_two_equal_maxima() {
    let f = func(&[(0, 1, 0, 1), (1, 5, 1, 2), (2, 5, 1, 5), (3, 5, 1, 2), (4, 5, 3, 10), (1, 1, 1, 1)]);
    let delta = r(1, 100);
    let g = perturb_distinct_extrema(&f, &delta).unwrap();
    assert!(monotone_decompose(&g).in_class_u);
    let values: Vec<Scalar> = extremum_scan(&g).into_iter().map(|e| e.0).collect();
    assert_eq!(values.iter().collect::<BTreeSet<_>>().len(), values.len());
    assert!(g.sup_distance(&f).unwrap() <= delta);
    assert_eq!(g.eval(&r(1, 5)).unwrap(), r(1, 2));
    assert_eq!(g.eval(&r(3, 5)).unwrap(), r(1, 2) - r(1, 200));
}

// ---- curves ----

/// Exact all-pairs segment intersection points.
fn segment_points(a: &PLCurve, b: &PLCurve) -> BTreeSet<Point> {
    let mut out = BTreeSet::new();
    let cross = |u: (&Scalar, &Scalar), v: (&Scalar, &Scalar)| u.0 * v.1 - u.1 * v.0;
    for sa in a.vertices().windows(2) {
        for sb in b.vertices().windows(2) {
            let (p, q) = (&sa[0], &sa[1]);
            let (u, v) = (&sb[0], &sb[1]);
            let d1 = (&q.x - &p.x, &q.y - &p.y);
            let d2 = (&v.x - &u.x, &v.y - &u.y);
            let w = (&u.x - &p.x, &u.y - &p.y);
            let den = cross((&d1.0, &d1.1), (&d2.0, &d2.1));
            if den.is_zero() {
                for (c, s) in [(u, sa), (v, sa), (p, sb), (q, sb)] {
                    let e = (&s[1].x - &s[0].x, &s[1].y - &s[0].y);
                    let f = (&c.x - &s[0].x, &c.y - &s[0].y);
                    let inside = |x: &Scalar, lo: &Scalar, hi: &Scalar| Scalar::min_of(lo, hi) <= x && x <= Scalar::max_of(lo, hi);
                    if cross((&e.0, &e.1), (&f.0, &f.1)).is_zero()
                        && inside(&c.x, &s[0].x, &s[1].x)
                        && inside(&c.y, &s[0].y, &s[1].y)
                    {
                        out.insert(c.clone());
                    }
                }
                continue;
            }
            let s = cross((&w.0, &w.1), (&d2.0, &d2.1)) / &den;
            let t = cross((&w.0, &w.1), (&d1.0, &d1.1)) / &den;
            let unit = |x: &Scalar| !x.is_negative() && x <= &Scalar::one();
            if unit(&s) && unit(&t) {
                out.insert(Point::new(&p.x + &d1.0 * &s, &p.y + &d1.1 * &s));
            }
        }
    }
    out
}

#[test]
fn diagonal_against_bent_curve_intersections() {
    let a = curve(&[(0, 1, 0, 1), (1, 1, 1, 1)]);
    let b = curve(&[(0, 1, 0, 1), (1, 2, 3, 4), (1, 1, 1, 1)]);
    let found: BTreeSet<Point> = curve_intersections(&a, &b).iter().map(|i| i.first_hit().2).collect();
    let oracle = segment_points(&a, &b);
    assert_eq!(found, oracle);
    assert_eq!(found, [Point::origin(), Point::unit()].into_iter().collect());
}

#[test]
fn random_curve_intersections_match_all_pairs() {
    for seed in 0..20 {
        let a = random_curve(seed, CurveSpec { vertices: 4, class: CurveClass::Interior }).unwrap();
        let b = random_curve(seed + 1000, CurveSpec { vertices: 4, class: CurveClass::Interior }).unwrap();
        let found: BTreeSet<Point> = curve_intersections(&a, &b).iter().map(|i| i.first_hit().2).collect();
        assert_eq!(found, segment_points(&a, &b), "seed {seed}");
    }
}

#[test]
fn normalize_tail_affine_arithmetic() {
    let g = PLCurve::new(
        vec![r(0, 1), r(1, 2), r(3, 4), r(1, 1)],
        vec![Point::origin(), Point::ratio(1, 2, 1, 2), Point::ratio(3, 4, 5, 8), Point::unit()],
    )
    .unwrap();
    let t0 = r(1, 2);
    let (eta, _) = normalize_tail(&g, &t0).unwrap();
    // (p − (a, a)) / (1 − a) with a = 1/2
    let a = r(1, 2);
    let oracle: Vec<Point> = g.vertices()[1..]
        .iter()
        .map(|p| Point::new((&p.x - &a) / (Scalar::one() - &a), (&p.y - &a) / (Scalar::one() - &a)))
        .collect();
    assert_eq!(eta.vertices(), oracle.as_slice());
    assert_eq!(eta.vertices(), [Point::origin(), Point::ratio(1, 2, 1, 4), Point::unit()]);
}

// ---- climbing ----

/// Cells of an `n × n` grid over the parameter square reachable from the
/// corner cell through cells where `f1(s) − f2(t)` changes sign or vanishes.
fn marching(f1: &PLFunction, f2: &PLFunction, n: usize) -> Vec<Vec<bool>> {
    let (b1, b2) = (float_bps(f1), float_bps(f2));
    let h = |i: usize, j: usize| interp(&b1, i as f64 / n as f64) - interp(&b2, j as f64 / n as f64);
    let active = |i: usize, j: usize| {
        let c = [h(i, j), h(i + 1, j), h(i, j + 1), h(i + 1, j + 1)];
        c.iter().any(|v| *v >= 0.0) && c.iter().any(|v| *v <= 0.0)
    };
    let mut seen = vec![vec![false; n]; n];
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    seen[0][0] = true;
    while let Some((i, j)) = queue.pop_front() {
        for (di, dj) in [(-1i64, -1i64), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
            let (a, b) = (i as i64 + di, j as i64 + dj);
            if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                continue;
            }
            let (a, b) = (a as usize, b as usize);
            if !seen[a][b] && active(a, b) {
                seen[a][b] = true;
                queue.push_back((a, b));
            }
        }
    }
    seen
}

fn check_climb(f1: &PLFunction, f2: &PLFunction, sol: &ClimbSolution) {
    assert_eq!(PLFunction::compose(f1, &sol.g1).unwrap(), PLFunction::compose(f2, &sol.g2).unwrap());
    for g in [&sol.g1, &sol.g2] {
        assert!(g.start_value().is_zero() && *g.end_value() == Scalar::one());
    }
    let n = 400;
    let seen = marching(f1, f2, n);
    assert!(seen[n - 1][n - 1], "marching oracle: (1, 1) unreachable");
    let taus: BTreeSet<Scalar> = sol.g1.breakpoints().iter().chain(sol.g2.breakpoints()).map(|(t, _)| t.clone()).collect();
    for tau in taus {
        let (s, t) = (sol.g1.eval(&tau).unwrap().to_f64(), sol.g2.eval(&tau).unwrap().to_f64());
        let cell = |x: f64| ((x * n as f64) as usize).min(n - 1);
        let (i, j) = (cell(s), cell(t));
        let near = (i.saturating_sub(1)..=(i + 1).min(n - 1)).any(|a| (j.saturating_sub(1)..=(j + 1).min(n - 1)).any(|b| seen[a][b]));
        assert!(near, "path node ({s}, {t}) outside the marched component");
    }
}

#[test]
fn climb_two_folds() {
    let f1 = func(&[(0, 1, 0, 1), (2, 5, 4, 5), (3, 5, 2, 5), (1, 1, 1, 1)]);
    let f2 = func(&[(0, 1, 0, 1), (1, 2, 3, 5), (7, 10, 1, 5), (1, 1, 1, 1)]);
    let sol = solve(&f1, &f2).unwrap();
    check_climb(&f1, &f2, &sol);
    assert!(sol.exact);
    let g1: Vec<(Scalar, Scalar)> = sol.g1.breakpoints().to_vec();
    let g2: Vec<(Scalar, Scalar)> = sol.g2.breakpoints().to_vec();
    let frozen = |v: &[(i64, i64, i64, i64)]| func(v).breakpoints().to_vec();
    assert_eq!(
        g1,
        frozen(&[(0, 1, 0, 1), (1, 5, 3, 10), (2, 5, 1, 10), (3, 5, 2, 5), (4, 5, 3, 5), (1, 1, 1, 1)]),
        "g1 = {:?}",
        sol.g1
    );
    assert_eq!(
        g2,
        frozen(&[(0, 1, 0, 1), (1, 5, 1, 2), (2, 5, 7, 10), (3, 5, 37, 40), (4, 5, 31, 40), (1, 1, 1, 1)]),
        "g2 = {:?}",
        sol.g2
    );
}

#[test]
fn plan_for_flat_against_identity() {
    let f2 = func(&[(0, 1, 0, 1), (1, 4, 1, 2), (3, 4, 1, 2), (1, 1, 1, 1)]);
    let plans = plan_bumps(&PLFunction::identity(), &f2).unwrap();
    assert_eq!(plans.len(), 1);
    let p = &plans[0];
    // flats from the level set of f2, preimage from the level set of f1
    let comp = &f2.level_set(&r(1, 2))[0];
    assert_eq!(p.interval, (comp.start().clone(), comp.end().clone()));
    assert_eq!(p.level, r(1, 2));
    assert_eq!(p.preimage, [r(1, 2)]);
    // nearest other extremum values of the identity are its end values 0 and 1
    assert_eq!(p.half_width, r(1, 4));
    assert_eq!(p.sign, BumpSign::Plus);
}

#[test]
fn flat_at_local_min_level_bumps_down() {
    let f1 = func(&[(0, 1, 0, 1), (1, 3, 2, 3), (2, 3, 1, 3), (1, 1, 1, 1)]);
    let f2 = func(&[(0, 1, 0, 1), (1, 4, 1, 3), (1, 2, 1, 3), (1, 1, 1, 1)]);
    let plans = plan_bumps(&f1, &f2).unwrap();
    assert_eq!(plans[0].sign, BumpSign::Minus);
    let sol = solve(&f1, &f2).unwrap();
    check_climb(&f1, &f2, &sol);
}

#[test]
fn two_flats_sup_deviation() {
    let f1 = func(&[(0, 1, 0, 1), (1, 3, 2, 3), (2, 3, 1, 3), (1, 1, 1, 1)]);
    // flat at the local-min level 1/3 and at the regular level 4/5
    let f2 = func(&[(0, 1, 0, 1), (1, 5, 1, 3), (2, 5, 1, 3), (3, 5, 4, 5), (4, 5, 4, 5), (1, 1, 1, 1)]);
    let plans = plan_bumps(&f1, &f2).unwrap();
    assert_eq!(plans.iter().map(|p| p.sign).collect::<Vec<_>>(), [BumpSign::Minus, BumpSign::Plus]);
    let f3 = apply_bumps(&f2, &plans);
    let (b2, b3) = (float_bps(&f2), float_bps(&f3));
    let m = 10_000;
    let scan = (0..=m).map(|k| (interp(&b3, k as f64 / m as f64) - interp(&b2, k as f64 / m as f64)).abs()).fold(0.0, f64::max);
    let max_d = plans.iter().map(|p| p.half_width.clone()).max().unwrap();
    assert!((scan - max_d.to_f64()).abs() < 1e-12);
    assert_eq!(f3.sup_distance(&f2).unwrap(), max_d);
    check_climb(&f1, &f2, &solve(&f1, &f2).unwrap());
}

#[test]
fn zigzag_against_flat_through_fold_level() {
    let f1 = func(&[(0, 1, 0, 1), (1, 3, 3, 5), (2, 3, 2, 5), (1, 1, 1, 1)]);
    let f2 = func(&[(0, 1, 0, 1), (1, 3, 1, 2), (2, 3, 1, 2), (1, 1, 1, 1)]);
    let sol = solve(&f1, &f2).unwrap();
    assert_eq!(sol.plans.len(), 1);
    check_climb(&f1, &f2, &sol);
}

// ---- graph case ----

#[test]
fn identity_recursion_closed_form() {
    // g_i(x) = (i + 1)x − i has root i/(i + 1)
    let roots = largest_root_chain(&PLFunction::identity(), 6).unwrap();
    for (i, a) in roots.iter().enumerate() {
        let i = i as i64 + 1;
        assert_eq!(*a, r(i, i + 1));
    }
    for n in 1..=6 {
        let sol = solve_graph(&PLFunction::identity(), n).unwrap();
        let m = n as i64 + 1;
        assert_eq!(sol.x, (0..=m).map(|i| r(i, m)).collect::<Vec<_>>());
    }
}

#[test]
fn bent_graph_per_piece_root() {
    let f = func(&[(0, 1, 0, 1), (1, 2, 1, 4), (1, 1, 1, 1)]);
    // x − 1 + f(x) on each piece; keep the largest root
    let mut best = None;
    for w in f.breakpoints().windows(2) {
        let ((t0, v0), (t1, v1)) = (&w[0], &w[1]);
        let slope = (v1 - v0) / (t1 - t0);
        let x = (Scalar::one() - v0 + &slope * t0) / (Scalar::one() + &slope);
        if t0 <= &x && &x <= t1 {
            best = Some(x);
        }
    }
    let roots = largest_root_chain(&f, 1).unwrap();
    assert_eq!(Some(roots[0].clone()), best);
    assert_eq!(roots[0], r(3, 5));
}

#[test]
fn squared_polyline_golden_section() {
    let m = 4096i64;
    let f = PLFunction::new((0..=m).map(|i| (r(i, m), r(i * i, m * m))).collect()).unwrap();
    let sol = solve_graph(&f, 1).unwrap();
    let bps = float_bps(&f);
    let x = bisect(0.5, 1.0, |x| x - 1.0 + interp(&bps, x));
    assert!((sol.x[1].to_f64() - x).abs() < 1e-12);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    assert!((sol.x[1].to_f64() - golden).abs() < 1e-4);
}

// ---- pipeline ----

/// Point of a y-monotone polyline at height `y`.
fn point_at_y(v: &[Point<f64>], y: f64) -> Option<Point<f64>> {
    v.windows(2).find(|w| w[0].y <= y && y <= w[1].y && w[1].y > w[0].y).map(|w| {
        let s = (y - w[0].y) / (w[1].y - w[0].y);
        Point::new(w[0].x + s * (w[1].x - w[0].x), y)
    })
}

/// Shift-by-one shooting from the height of the first point.
fn shoot(v: &[Point<f64>], s: usize, y1: f64) -> Option<(f64, Vec<Point<f64>>)> {
    let mut pts = vec![Point::new(0.0, 0.0), point_at_y(v, y1)?];
    for i in 1..s - 1 {
        let y = pts[i].y + (pts[i].x - pts[i - 1].x);
        pts.push(point_at_y(v, y)?);
    }
    let res = pts[1].y - (1.0 - pts[s - 1].x);
    pts.push(Point::new(1.0, 1.0));
    Some((res, pts))
}

#[test]
fn bent_curve_three_increments() {
    let c = bent();
    let fc: Vec<Point<f64>> = c.vertices().iter().map(Point::to_f64).collect();
    let y1 = bisect(1e-9, 0.2, |y| shoot(&fc, 3, y).map_or(1.0, |(res, _)| res));
    let (_, oracle) = shoot(&fc, 3, y1).unwrap();
    let pf = build_partitioning_functions(&c, 1).unwrap();
    let res = extract_points(&c, &pf).unwrap();
    for (p, q) in res.points.iter().zip(&oracle) {
        assert!((p.x.to_f64() - q.x).abs() < 1e-12 && (p.y.to_f64() - q.y).abs() < 1e-12);
    }
    assert_eq!(res.points, [Point::origin(), Point::ratio(4, 9, 1, 9), Point::ratio(8, 9, 5, 9), Point::unit()]);
    assert_eq!(res.dx, [r(4, 9), r(4, 9), r(1, 9)]);
    assert_eq!(res.dy, [r(1, 9), r(4, 9), r(4, 9)]);
    assert_eq!(res.rearrangement, Rearrangement::Shift(1));
    let thm = partition_theorem1(&c, 3, &Options::default()).unwrap();
    assert_eq!(thm.points, res.points);
}

#[test]
fn partitioning_functions_on_curve_at_knots() {
    let c = curve(&[(0, 1, 0, 1), (1, 2, 1, 5), (4, 5, 1, 2), (1, 1, 1, 1)]);
    let pf = build_partitioning_functions(&c, 2).unwrap();
    let mut knots: BTreeSet<Scalar> = pf.y.breakpoints().iter().map(|(t, _)| t.clone()).collect();
    for x in &pf.x {
        knots.extend(x.breakpoints().iter().map(|(t, _)| t.clone()));
    }
    for t in knots {
        let y = pf.y.eval(&t).unwrap();
        let mut prev = Scalar::zero();
        for x in &pf.x {
            let xi = x.eval(&t).unwrap();
            assert!(c.contains(&Point::new(xi.clone(), &prev + &y)), "t = {t}");
            prev = xi;
        }
    }
}

#[test]
fn shared_fold_level_verifies() {
    let c = curve(&[(0, 1, 0, 1), (2, 5, 3, 10), (1, 2, 1, 10), (7, 10, 1, 2), (4, 5, 3, 10), (1, 1, 1, 1)]);
    assert!(!monotone_decompose(&c.y_function()).in_class_u);
    let tol = 1e-9;
    for s in 2..=6 {
        let res = partition_delta(&c, s, &Options::default()).unwrap();
        let fv: Vec<Point<f64>> = c.vertices().iter().map(Point::to_f64).collect();
        let pts: Vec<Point<f64>> = res.points.iter().map(Point::to_f64).collect();
        assert!(verify(&fv, &pts, &tol).pass, "S = {s}");
    }
}

#[test]
fn flat_height_inside_delta_is_exact() {
    let c = curve(&[(0, 1, 0, 1), (1, 2, 1, 4), (3, 4, 1, 4), (1, 1, 1, 1)]);
    for s in 2..=4 {
        let res = partition_delta(&c, s, &Options::default()).unwrap();
        assert!(res.exact);
        assert_eq!(res.rearrangement, Rearrangement::Shift(1));
        assert!(verify(c.vertices(), &res.points, &Scalar::zero()).pass);
    }
}

/// Exact interval mass of a step density.
fn step_mass(breaks: &[Scalar], values: &[Scalar], a: &Scalar, b: &Scalar) -> Scalar {
    let mut m = Scalar::zero();
    for (w, v) in breaks.windows(2).zip(values) {
        let lo = Scalar::max_of(&w[0], a);
        let hi = Scalar::min_of(&w[1], b);
        if lo < hi {
            m = m + v * (hi - lo);
        }
    }
    m
}

#[test]
fn step_density_quadrature() {
    let one = (vec![r(0, 1), r(1, 1)], vec![r(1, 1)]);
    let g = (vec![r(0, 1), r(1, 2), r(1, 1)], vec![r(3, 2), r(1, 2)]);
    let fd = Density::Step { breaks: one.0.clone(), values: one.1.clone() };
    let gd = Density::Step { breaks: g.0.clone(), values: g.1.clone() };
    for s in 2..=4 {
        let part = densities_partition(&fd, &gd, s, &Options::default()).unwrap();
        let fm: Vec<Scalar> = part.t.windows(2).map(|w| step_mass(&one.0, &one.1, &w[0], &w[1])).collect();
        let gm: Vec<Scalar> = part.t.windows(2).map(|w| step_mass(&g.0, &g.1, &w[0], &w[1])).collect();
        assert_eq!(fm, part.result.dx);
        assert_eq!(gm, part.result.dy);
        let mut a = fm.clone();
        let mut b = gm.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
    let part = densities_partition(&fd, &gd, 3, &Options::default()).unwrap();
    assert_eq!(part.t, [r(0, 1), r(2, 9), r(5, 9), r(1, 1)]);
}

// ---- verification ----

#[test]
fn verify_bent_solution() {
    let pts = [Point::origin(), Point::ratio(4, 9, 1, 9), Point::ratio(8, 9, 5, 9), Point::unit()];
    let rep = verify(bent().vertices(), &pts, &Scalar::zero());
    assert!(rep.pass);
    assert_eq!(rep.detected_shift, Some(1));
}

#[test]
fn closure_sign_by_sweep() {
    let c = bent();
    // parameter of (4/9, 1/9) on the first segment, which spans t ∈ [0, 1/2]
    let t1 = r(5, 18);
    assert_eq!(closure_exact(&c, 3, &t1).unwrap().0, Scalar::zero());
    let near_zero = closure_exact(&c, 3, &r(1, 1000)).unwrap().0;
    let fc: Vec<Point<f64>> = c.vertices().iter().map(Point::to_f64).collect();
    let swept = shoot(&fc, 3, c.eval(&r(1, 1000)).unwrap().y.to_f64()).unwrap().0;
    assert!(near_zero.is_negative() && swept < 0.0);
}

#[test]
fn brute_force_finds_bent_solution() {
    let sols = brute_force(&bent(), 3, 1000, 1e-9);
    let target = [(4.0 / 9.0, 1.0 / 9.0), (8.0 / 9.0, 5.0 / 9.0)];
    assert!(sols.iter().any(|s| s.points[1..3].iter().zip(target).all(|(p, q)| (p.x - q.0).abs() < 1e-6 && (p.y - q.1).abs() < 1e-6)));
}

// ---- exploration ----

#[test]
fn seeded_single_bend_in_delta() {
    let c = random_curve(1, CurveSpec { vertices: 2, class: CurveClass::DeltaInterior }).unwrap();
    assert_eq!(c.vertices().len(), 3);
    let m = 1000;
    for k in 1..m {
        let p = c.eval(&r(k, m)).unwrap();
        assert!(p.y.is_positive() && p.y < p.x && p.x < Scalar::one(), "{p:?}");
    }
}

#[test]
fn shift_one_search_agrees_with_brute_force() {
    for seed in 0..10 {
        let c = random_curve(seed, CurveSpec { vertices: 3, class: CurveClass::DeltaInterior }).unwrap();
        for s in 2..=3 {
            let out = conjecture_search(&c, CyclicPermutation::new(s, 1).unwrap(), 1000, 1e-9);
            let bf = brute_force(&c, s, 1000, 1e-9);
            assert_eq!(out.outcome == Outcome::Found, !bf.is_empty(), "seed {seed} S {s}");
            assert_eq!(out.outcome, Outcome::Found);
        }
    }
}
