//! Coordinated climbs: continuous `g1, g2` with `f1 ∘ g1 = f2 ∘ g2`.
//!
//! The zero set of `F(s, t) = f1(s) − f2(t)` is walked cell by cell over the
//! grid spanned by the breakpoints of both functions. On each cell `F` is
//! affine, so its zero set is empty, a corner, a segment, or the whole cell.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::{monotone_decompose, ExtremumKind, LevelComponent, PLFunction, Point, Scalar};

/// A solution of the climbing problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClimbSolution {
    pub g1: PLFunction,
    pub g2: PLFunction,
    pub exact: bool,
    pub residual: Scalar,
    /// Flat-interval plans used to reach the solution; empty when `f2` has no flats.
    pub plans: Vec<FlatBumpPlan>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BumpSign {
    Plus,
    Minus,
}

/// How one maximal flat of `f2` is replaced by a tent and later collapsed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatBumpPlan {
    pub interval: (Scalar, Scalar),
    pub level: Scalar,
    /// `f1⁻¹(level)`, finite because `f1` has no flats.
    pub preimage: Vec<Scalar>,
    pub half_width: Scalar,
    pub sign: BumpSign,
    /// Components of `k⁻¹(interval)` collapsed in the final `g1`; filled by [`solve`].
    pub collapse: Vec<(Scalar, Scalar)>,
}

impl FlatBumpPlan {
    pub fn peak(&self) -> Scalar {
        match self.sign {
            BumpSign::Plus => &self.level + &self.half_width,
            BumpSign::Minus => &self.level - &self.half_width,
        }
    }
}

fn check_boundary(name: &str, f: &PLFunction) -> Result<()> {
    if !f.has_unit_domain() {
        return Err(Error::precondition(format!("{name} must be defined on [0, 1]")));
    }
    if !f.start_value().is_zero() || *f.end_value() != Scalar::one() {
        return Err(Error::precondition(format!("{name} must satisfy {name}(0) = 0 and {name}(1) = 1")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
enum CellZeros {
    Empty,
    Point,
    Segment(Point, Point),
    Full,
}

struct Grid<'a> {
    f1: &'a PLFunction,
    f2: &'a PLFunction,
}

/// Indices of the breakpoint intervals of `f` that contain `x`.
fn intervals_containing(f: &PLFunction, x: &Scalar) -> Vec<usize> {
    let bps = f.breakpoints();
    let k = bps.partition_point(|(t, _)| t < x);
    if k < bps.len() && bps[k].0 == *x {
        let mut out = Vec::with_capacity(2);
        if k > 0 {
            out.push(k - 1);
        }
        if k + 1 < bps.len() {
            out.push(k);
        }
        out
    } else {
        alloc::vec![k - 1]
    }
}

impl Grid<'_> {
    fn cell(&self, i: usize, j: usize) -> CellZeros {
        let (s0, a0) = &self.f1.breakpoints()[i];
        let (s1, a1) = &self.f1.breakpoints()[i + 1];
        let (t0, b0) = &self.f2.breakpoints()[j];
        let (t1, b1) = &self.f2.breakpoints()[j + 1];
        let corners = [
            (Point::new(s0.clone(), t0.clone()), a0 - b0),
            (Point::new(s1.clone(), t0.clone()), a1 - b0),
            (Point::new(s1.clone(), t1.clone()), a1 - b1),
            (Point::new(s0.clone(), t1.clone()), a0 - b1),
        ];
        if corners.iter().all(|(_, v)| v.is_zero()) {
            return CellZeros::Full;
        }
        let mut hits: Vec<Point> = Vec::with_capacity(2);
        let mut add = |p: Point| {
            if !hits.contains(&p) {
                hits.push(p);
            }
        };
        for e in 0..4 {
            let (pa, fa) = &corners[e];
            let (pb, fb) = &corners[(e + 1) % 4];
            if fa.is_zero() {
                add(pa.clone());
            }
            if fa.signum() * fb.signum() < 0 {
                let lambda = fa / &(fa - fb);
                add(Point::new(&pa.x + (&pb.x - &pa.x) * &lambda, &pa.y + (&pb.y - &pa.y) * &lambda));
            }
        }
        match hits.len() {
            0 => CellZeros::Empty,
            1 => CellZeros::Point,
            2 => {
                let b = hits.pop().expect("two hits");
                let a = hits.pop().expect("two hits");
                CellZeros::Segment(a, b)
            }
            _ => unreachable!("an affine zero set meets a rectangle boundary in at most two points"),
        }
    }

    fn neighbours(&self, p: &Point) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for i in intervals_containing(self.f1, &p.x) {
            for j in intervals_containing(self.f2, &p.y) {
                let candidates = match self.cell(i, j) {
                    CellZeros::Empty | CellZeros::Point => Vec::new(),
                    CellZeros::Segment(a, b) => alloc::vec![a, b],
                    CellZeros::Full => {
                        let (s0, s1) = (&self.f1.breakpoints()[i].0, &self.f1.breakpoints()[i + 1].0);
                        let (t0, t1) = (&self.f2.breakpoints()[j].0, &self.f2.breakpoints()[j + 1].0);
                        alloc::vec![
                            Point::new(s0.clone(), t0.clone()),
                            Point::new(s1.clone(), t0.clone()),
                            Point::new(s1.clone(), t1.clone()),
                            Point::new(s0.clone(), t1.clone()),
                        ]
                    }
                };
                for q in candidates {
                    if q != *p && !out.contains(&q) {
                        out.push(q);
                    }
                }
            }
        }
        // increasing s first, then t; within each, + before 0 before −
        let rank = |d: i8| match d {
            1 => 0,
            0 => 1,
            _ => 2,
        };
        out.sort_by_key(|q| (rank((&q.x - &p.x).signum()), rank((&q.y - &p.y).signum())));
        out
    }
}

/// Walks the zero set of `f1(s) − f2(t)` from `(0, 0)` to `(1, 1)`.
///
/// Returns the visited nodes; consecutive nodes share a cell.
pub fn traverse(f1: &PLFunction, f2: &PLFunction) -> Result<Vec<Point>> {
    check_boundary("f1", f1)?;
    check_boundary("f2", f2)?;
    let grid = Grid { f1, f2 };
    let start = Point::origin();
    let goal = Point::unit();
    let mut visited: BTreeSet<Point> = BTreeSet::new();
    visited.insert(start.clone());
    let mut path: Vec<Point> = alloc::vec![start.clone()];
    let mut pending: Vec<Vec<Point>> = alloc::vec![grid.neighbours(&start)];
    let mut deepest = start;
    while let Some(frontier) = pending.last_mut() {
        if frontier.is_empty() {
            pending.pop();
            path.pop();
            continue;
        }
        let next = frontier.remove(0);
        if !visited.insert(next.clone()) {
            continue;
        }
        if next == goal {
            path.push(next);
            return Ok(path);
        }
        if (&next.x + &next.y) > (&deepest.x + &deepest.y) {
            deepest = next.clone();
        }
        pending.push(grid.neighbours(&next));
        path.push(next);
    }
    Err(Error::Internal { reason: "level-set traversal did not reach (1, 1)".into(), at: Some(deepest.into()) })
}

fn path_functions(path: &[Point]) -> (PLFunction, PLFunction) {
    let m = (path.len() - 1) as i64;
    let knot = |k: usize| Scalar::ratio(k as i64, m);
    let g1 = path.iter().enumerate().map(|(k, p)| (knot(k), p.x.clone())).collect();
    let g2 = path.iter().enumerate().map(|(k, p)| (knot(k), p.y.clone())).collect();
    (PLFunction::from_sorted_unchecked(g1), PLFunction::from_sorted_unchecked(g2))
}

fn check_solution(f1: &PLFunction, f2: &PLFunction, g1: &PLFunction, g2: &PLFunction) -> Result<()> {
    let lhs = PLFunction::compose(f1, g1)?;
    let rhs = PLFunction::compose(f2, g2)?;
    if lhs != rhs {
        return Err(Error::internal("climb solution fails f1 ∘ g1 = f2 ∘ g2"));
    }
    Ok(())
}

/// Solves the climb by walking the level set directly. Flats in either
/// function and shared extremum levels are walked through as well.
pub fn solve_level_traversal(f1: &PLFunction, f2: &PLFunction) -> Result<ClimbSolution> {
    let path = traverse(f1, f2)?;
    let (g1, g2) = path_functions(&path);
    check_solution(f1, f2, &g1, &g2)?;
    Ok(ClimbSolution { g1, g2, exact: true, residual: Scalar::zero(), plans: Vec::new() })
}

/// One plan per maximal flat of `f2`.
pub fn plan_bumps(f1: &PLFunction, f2: &PLFunction) -> Result<Vec<FlatBumpPlan>> {
    let flats = f2.flat_intervals();
    if flats.is_empty() {
        return Ok(Vec::new());
    }
    let dec = monotone_decompose(f1);
    if !dec.in_class_u {
        return Err(Error::NotInClassU { violations: dec.violations });
    }
    let extremum_values: BTreeSet<Scalar> =
        dec.local_extrema.iter().map(|e| e.value.clone()).chain([Scalar::zero(), Scalar::one()]).collect();
    let mut plans = Vec::with_capacity(flats.len());
    for (a, b, c) in flats {
        let preimage: Vec<Scalar> = f1
            .level_set(&c)
            .into_iter()
            .map(|comp| match comp {
                LevelComponent::Root(r) => r,
                LevelComponent::Flat(..) => unreachable!("class 𝒰 excludes flats"),
            })
            .collect();
        let half_width = extremum_values
            .iter()
            .filter(|e| **e != c)
            .map(|e| (e - &c).abs())
            .min()
            .map(|d| d.halved(1))
            .unwrap_or_else(|| Scalar::ratio(1, 4));
        let sign = if c.is_zero() {
            BumpSign::Plus
        } else if c == Scalar::one() {
            BumpSign::Minus
        } else {
            let has_min = dec
                .local_extrema
                .iter()
                .any(|e| e.kind == ExtremumKind::Min && !e.at_endpoint && e.value == c);
            if has_min {
                BumpSign::Minus
            } else {
                BumpSign::Plus
            }
        };
        plans.push(FlatBumpPlan { interval: (a, b), level: c, preimage, half_width, sign, collapse: Vec::new() });
    }
    Ok(plans)
}

/// Replaces each planned flat of `f2` by a tent peaking at its midpoint.
pub fn apply_bumps(f2: &PLFunction, plans: &[FlatBumpPlan]) -> PLFunction {
    let mut bps: Vec<(Scalar, Scalar)> = Vec::with_capacity(f2.breakpoints().len() + plans.len());
    for (t, v) in f2.breakpoints() {
        if let Some(plan) = plans.iter().find(|p| p.interval.1 == *t) {
            bps.push((Scalar::midpoint(&plan.interval.0, &plan.interval.1), plan.peak()));
        }
        bps.push((t.clone(), v.clone()));
    }
    PLFunction::from_sorted_unchecked(bps)
}

/// Maximal open intervals on which `a < k(τ) < b`.
fn preimage_components(k: &PLFunction, a: &Scalar, b: &Scalar) -> Vec<(Scalar, Scalar)> {
    let mut cuts: Vec<Scalar> = k.knots().cloned().collect();
    for c in [a, b] {
        cuts.extend(k.level_set(c).into_iter().flat_map(|comp| [comp.start().clone(), comp.end().clone()]));
    }
    cuts.sort();
    cuts.dedup();
    let mut out: Vec<(Scalar, Scalar)> = Vec::new();
    for w in cuts.windows(2) {
        let mid = k.eval_in_domain(&Scalar::midpoint(&w[0], &w[1]));
        if a < &mid && &mid < b {
            match out.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1].clone(),
                _ => out.push((w[0].clone(), w[1].clone())),
            }
        }
    }
    out
}

/// `h` with its values on `[u, v]` replaced by the constant `h(u)`.
fn flatten_on(h: &PLFunction, u: &Scalar, v: &Scalar) -> PLFunction {
    let level = h.eval_in_domain(u);
    let mut bps: Vec<(Scalar, Scalar)> = h.breakpoints().iter().filter(|(t, _)| t < u).cloned().collect();
    bps.push((u.clone(), level.clone()));
    bps.push((v.clone(), level));
    bps.extend(h.breakpoints().iter().filter(|(t, _)| t > v).cloned());
    PLFunction::from_sorted_unchecked(bps)
}

/// Solves `f1 ∘ g1 = f2 ∘ g2`, handling flats of `f2` by bump and collapse.
/// `f1` must be in class 𝒰 whenever `f2` has a flat.
pub fn solve(f1: &PLFunction, f2: &PLFunction) -> Result<ClimbSolution> {
    check_boundary("f1", f1)?;
    check_boundary("f2", f2)?;
    let mut plans = plan_bumps(f1, f2)?;
    if plans.is_empty() {
        return solve_level_traversal(f1, f2);
    }
    let f3 = apply_bumps(f2, &plans);
    let path = traverse(f1, &f3)?;
    let (mut h, k) = path_functions(&path);
    for plan in &mut plans {
        let (a, b) = &plan.interval;
        plan.collapse = preimage_components(&k, a, b);
        for (u, v) in &plan.collapse {
            let (hu, hv) = (h.eval_in_domain(u), h.eval_in_domain(v));
            if hu != hv {
                return Err(Error::Internal {
                    reason: format!("collapse endpoints differ: h({u}) = {hu}, h({v}) = {hv}"),
                    at: Some(Point::new(u.clone(), v.clone()).into()),
                });
            }
            h = flatten_on(&h, u, v);
        }
    }
    check_solution(f1, f2, &h, &k)?;
    Ok(ClimbSolution { g1: h, g2: k, exact: true, residual: Scalar::zero(), plans })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(pts: &[(i64, i64, i64, i64)]) -> PLFunction {
        PLFunction::from_ratios(pts).unwrap()
    }

    fn zigzag() -> PLFunction {
        f(&[(0, 1, 0, 1), (1, 3, 2, 3), (2, 3, 1, 3), (1, 1, 1, 1)])
    }

    #[test]
    fn identity_pair() {
        let id = PLFunction::identity();
        let sol = solve_level_traversal(&id, &id).unwrap();
        assert_eq!(sol.g1, id);
        assert_eq!(sol.g2, id);
    }

    #[test]
    fn identity_on_one_side_forces_the_other() {
        let sol = solve_level_traversal(&zigzag(), &PLFunction::identity()).unwrap();
        assert_eq!(sol.g1, PLFunction::identity());
        assert_eq!(sol.g2, zigzag());
    }

    #[test]
    fn two_folds() {
        let f1 = f(&[(0, 1, 0, 1), (2, 5, 4, 5), (3, 5, 2, 5), (1, 1, 1, 1)]);
        let f2 = f(&[(0, 1, 0, 1), (1, 2, 3, 5), (7, 10, 1, 5), (1, 1, 1, 1)]);
        let sol = solve_level_traversal(&f1, &f2).unwrap();
        assert_eq!(PLFunction::compose(&f1, &sol.g1).unwrap(), PLFunction::compose(&f2, &sol.g2).unwrap());
    }

    #[test]
    fn bump_plan_example() {
        let f2 = f(&[(0, 1, 0, 1), (1, 4, 1, 2), (3, 4, 1, 2), (1, 1, 1, 1)]);
        let plans = plan_bumps(&PLFunction::identity(), &f2).unwrap();
        assert_eq!(plans.len(), 1);
        let p = &plans[0];
        assert_eq!(p.interval, (Scalar::ratio(1, 4), Scalar::ratio(3, 4)));
        assert_eq!(p.level, Scalar::ratio(1, 2));
        assert_eq!(p.preimage, [Scalar::ratio(1, 2)]);
        assert_eq!(p.half_width, Scalar::ratio(1, 4));
        assert_eq!(p.sign, BumpSign::Plus);
        let f3 = apply_bumps(&f2, &plans);
        assert_eq!(f3, f(&[(0, 1, 0, 1), (1, 4, 1, 2), (1, 2, 3, 4), (3, 4, 1, 2), (1, 1, 1, 1)]));
    }

    #[test]
    fn flat_at_local_min_bumps_down() {
        let f2 = f(&[(0, 1, 0, 1), (1, 4, 1, 3), (1, 2, 1, 3), (1, 1, 1, 1)]);
        let plans = plan_bumps(&zigzag(), &f2).unwrap();
        assert_eq!(plans[0].sign, BumpSign::Minus);
        // nearest other extremum value is 0, so d = 1/6
        assert_eq!(plans[0].half_width, Scalar::ratio(1, 6));
    }

    #[test]
    fn solve_with_flat_against_identity() {
        let f2 = f(&[(0, 1, 0, 1), (1, 4, 1, 2), (3, 4, 1, 2), (1, 1, 1, 1)]);
        let sol = solve(&PLFunction::identity(), &f2).unwrap();
        assert_eq!(sol.g2, PLFunction::identity());
        assert_eq!(sol.g1, f2);
        assert_eq!(sol.plans[0].collapse, [(Scalar::ratio(1, 4), Scalar::ratio(3, 4))]);
    }

    #[test]
    fn solve_with_flat_at_fold_level() {
        let f2 = f(&[(0, 1, 0, 1), (1, 5, 1, 2), (2, 5, 1, 2), (3, 5, 1, 5), (4, 5, 1, 5), (1, 1, 1, 1)]);
        let sol = solve(&zigzag(), &f2).unwrap();
        assert_eq!(sol.plans.len(), 2);
        assert_eq!(PLFunction::compose(&zigzag(), &sol.g1).unwrap(), PLFunction::compose(&f2, &sol.g2).unwrap());
    }

    #[test]
    fn rejects_bad_endpoints() {
        let bad = f(&[(0, 1, 1, 2), (1, 1, 1, 1)]);
        assert!(matches!(solve(&bad, &PLFunction::identity()), Err(Error::Precondition { .. })));
    }

    #[test]
    fn non_u_f1_with_flat_f2_is_rejected() {
        let f1 = f(&[(0, 1, 0, 1), (1, 4, 1, 2), (1, 2, 1, 4), (3, 4, 1, 2), (7, 8, 3, 8), (1, 1, 1, 1)]);
        let f1 = {
            // add a local min at level 1/2 so that level carries both kinds
            let mut b = f1.into_breakpoints();
            b[4] = (Scalar::ratio(7, 8), Scalar::ratio(1, 2));
            b.insert(4, (Scalar::ratio(13, 16), Scalar::ratio(5, 8)));
            PLFunction::new(b).unwrap()
        };
        let f2 = f(&[(0, 1, 0, 1), (1, 4, 1, 3), (1, 2, 1, 3), (1, 1, 1, 1)]);
        assert!(matches!(solve(&f1, &f2), Err(Error::NotInClassU { .. })));
    }
}
