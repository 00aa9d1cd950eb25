//! Monotone decomposition, class-𝒰 membership and extremum separation.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::{PLFunction, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
    Flat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonePiece {
    pub start: Scalar,
    pub end: Scalar,
    pub direction: Direction,
}

/// A local extremum. Endpoints of the domain count (one-sided); points inside
/// a flat piece are both maxima and minima and are reported at its midpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremum {
    pub t: Scalar,
    pub value: Scalar,
    pub kind: ExtremumKind,
    pub at_endpoint: bool,
}

/// A level containing both a local maximum and a local minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub level: Scalar,
    pub witness_max: Scalar,
    pub witness_min: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneDecomposition {
    pub pieces: Vec<MonotonePiece>,
    pub local_extrema: Vec<Extremum>,
    pub in_class_u: bool,
    pub violations: Vec<Violation>,
}

impl MonotoneDecomposition {
    pub fn interior_extrema(&self) -> impl Iterator<Item = &Extremum> + '_ {
        self.local_extrema.iter().filter(|e| !e.at_endpoint)
    }

    /// Distinct values of all local extrema, endpoints included.
    pub fn extremum_values(&self) -> BTreeSet<Scalar> {
        self.local_extrema.iter().map(|e| e.value.clone()).collect()
    }
}

fn direction_of(v0: &Scalar, v1: &Scalar) -> Direction {
    match v0.cmp(v1) {
        core::cmp::Ordering::Less => Direction::Up,
        core::cmp::Ordering::Greater => Direction::Down,
        core::cmp::Ordering::Equal => Direction::Flat,
    }
}

fn endpoint_kind(dir: Direction, at_start: bool) -> ExtremumKind {
    match (dir, at_start) {
        (Direction::Up, true) | (Direction::Down, false) => ExtremumKind::Min,
        _ => ExtremumKind::Max,
    }
}

/// Splits `f` into maximal monotone pieces and decides membership in 𝒰:
/// no level set contains both a local maximum and a local minimum.
pub fn monotone_decompose(f: &PLFunction) -> MonotoneDecomposition {
    let bps = f.breakpoints();
    let mut pieces: Vec<MonotonePiece> = Vec::new();
    for w in bps.windows(2) {
        let dir = direction_of(&w[0].1, &w[1].1);
        match pieces.last_mut() {
            Some(last) if last.direction == dir => last.end = w[1].0.clone(),
            _ => pieces.push(MonotonePiece { start: w[0].0.clone(), end: w[1].0.clone(), direction: dir }),
        }
    }

    let value_at = |t: &Scalar| f.eval_in_domain(t);
    let mut extrema = Vec::new();
    let first = &pieces[0];
    if first.direction != Direction::Flat {
        extrema.push(Extremum {
            t: first.start.clone(),
            value: value_at(&first.start),
            kind: endpoint_kind(first.direction, true),
            at_endpoint: true,
        });
    }
    for (i, p) in pieces.iter().enumerate() {
        if p.direction == Direction::Flat {
            let mid = Scalar::midpoint(&p.start, &p.end);
            let value = value_at(&mid);
            for kind in [ExtremumKind::Max, ExtremumKind::Min] {
                extrema.push(Extremum { t: mid.clone(), value: value.clone(), kind, at_endpoint: false });
            }
            continue;
        }
        if let Some(next) = pieces.get(i + 1) {
            let kind = match (p.direction, next.direction) {
                (Direction::Up, Direction::Down) => Some(ExtremumKind::Max),
                (Direction::Down, Direction::Up) => Some(ExtremumKind::Min),
                _ => None,
            };
            if let Some(kind) = kind {
                extrema.push(Extremum { t: p.end.clone(), value: value_at(&p.end), kind, at_endpoint: false });
            }
        }
    }
    let last = &pieces[pieces.len() - 1];
    if last.direction != Direction::Flat {
        extrema.push(Extremum {
            t: last.end.clone(),
            value: value_at(&last.end),
            kind: endpoint_kind(last.direction, false),
            at_endpoint: true,
        });
    }

    let mut violations = Vec::new();
    let mut by_level: alloc::collections::BTreeMap<&Scalar, (Option<&Scalar>, Option<&Scalar>)> =
        alloc::collections::BTreeMap::new();
    for e in &extrema {
        let slot = by_level.entry(&e.value).or_default();
        match e.kind {
            ExtremumKind::Max => {
                slot.0.get_or_insert(&e.t);
            }
            ExtremumKind::Min => {
                slot.1.get_or_insert(&e.t);
            }
        }
    }
    for (level, slot) in by_level {
        if let (Some(mx), Some(mn)) = slot {
            violations.push(Violation { level: level.clone(), witness_max: mx.clone(), witness_min: mn.clone() });
        }
    }

    MonotoneDecomposition { pieces, local_extrema: extrema, in_class_u: violations.is_empty(), violations }
}

/// Returns a function within `delta` of `f` (sup norm) with the same endpoint
/// values, no flat pieces, and pairwise distinct local extremum values, so
/// the result is in 𝒰.
///
/// Flat pieces are tilted (or turned into a tent between opposite slopes) by
/// `delta/2`. Repeated extremum values are then nudged downward, the `j`-th
/// repeat of a value by `delta/2^j`, in order of increasing `t`.
pub fn perturb_distinct_extrema(f: &PLFunction, delta: &Scalar) -> Result<PLFunction> {
    let dec = monotone_decompose(f);
    let has_flats = f.breakpoints().windows(2).any(|w| w[0].1 == w[1].1);
    let has_repeats = {
        let mut seen = BTreeSet::new();
        dec.local_extrema.iter().any(|e| !seen.insert(e.value.clone()))
    };
    if !has_flats && !has_repeats {
        return Ok(f.clone());
    }
    if !delta.is_positive() {
        return Err(Error::Infeasible(format!("perturbation budget {delta:?} must be positive")));
    }
    let g = if has_flats { tilt_flats(f, &delta.halved(1))? } else { f.clone() };
    let h = separate_extrema(&g, delta)?;
    if let Some(v) = monotone_decompose(&h).violations.first() {
        // only endpoint extrema are left sharing a level, and endpoints are fixed
        return Err(Error::Infeasible(format!("endpoint extrema share the level {:?}", v.level)));
    }
    Ok(h)
}

fn tilt_flats(f: &PLFunction, eps: &Scalar) -> Result<PLFunction> {
    let bps = f.breakpoints();
    let n = bps.len();
    if n == 2 && bps[0].1 == bps[1].1 {
        let mid = Scalar::midpoint(&bps[0].0, &bps[1].0);
        let apex = &bps[0].1 + eps;
        return PLFunction::new(alloc::vec![bps[0].clone(), (mid, apex), bps[1].clone()]);
    }
    let mut out: Vec<(Scalar, Scalar)> = bps.to_vec();
    let mut inserts: Vec<(usize, (Scalar, Scalar))> = Vec::new();
    for i in 0..n - 1 {
        if bps[i].1 != bps[i + 1].1 {
            continue;
        }
        let c = &bps[i].1;
        let prev = (i > 0).then(|| direction_of(&bps[i - 1].1, &bps[i].1));
        let next = (i + 2 < n).then(|| direction_of(&bps[i + 1].1, &bps[i + 2].1));
        match (prev, next) {
            (Some(Direction::Up), Some(Direction::Down)) | (Some(Direction::Down), Some(Direction::Up)) => {
                let mid = Scalar::midpoint(&bps[i].0, &bps[i + 1].0);
                let v = if prev == Some(Direction::Up) { c + eps } else { c - eps };
                inserts.push((i + 1, (mid, v)));
            }
            (Some(dir), _) => {
                // lower (rising) or raise (falling) the left end of the flat
                let v = if dir == Direction::Up { c - eps } else { c + eps };
                if direction_of(&bps[i - 1].1, &v) != dir {
                    return Err(Error::Infeasible(format!("budget too large to tilt the flat at t = {:?}", bps[i].0)));
                }
                out[i].1 = v;
            }
            (None, Some(dir)) => {
                let v = if dir == Direction::Up { c + eps } else { c - eps };
                if direction_of(&v, &bps[i + 2].1) != dir {
                    return Err(Error::Infeasible(format!(
                        "budget too large to tilt the flat at t = {:?}",
                        bps[i + 1].0
                    )));
                }
                out[i + 1].1 = v;
            }
            (None, None) => unreachable!("two-breakpoint flat handled above"),
        }
    }
    for (offset, (at, bp)) in inserts.into_iter().enumerate() {
        out.insert(at + offset, bp);
    }
    PLFunction::new(out)
}

fn separate_extrema(f: &PLFunction, delta: &Scalar) -> Result<PLFunction> {
    let dec = monotone_decompose(f);
    let mut out: Vec<(Scalar, Scalar)> = f.breakpoints().to_vec();
    let mut used: BTreeSet<Scalar> = dec.local_extrema.iter().filter(|e| e.at_endpoint).map(|e| e.value.clone()).collect();
    for e in dec.interior_extrema() {
        if used.insert(e.value.clone()) {
            continue;
        }
        let idx = out.iter().position(|(t, _)| *t == e.t).expect("extremum at a breakpoint");
        // maxima move down and minima up, so values stay inside the original range
        let is_max = e.kind == ExtremumKind::Max;
        let mut j = 1u32;
        let nudged = loop {
            let cand = if is_max { &e.value - delta.halved(j) } else { &e.value + delta.halved(j) };
            if !used.contains(&cand) {
                break cand;
            }
            j += 1;
        };
        let kept = if is_max {
            nudged > out[idx - 1].1 && nudged > out[idx + 1].1
        } else {
            nudged < out[idx - 1].1 && nudged < out[idx + 1].1
        };
        if !kept {
            let what = if is_max { "lower the maximum" } else { "raise the minimum" };
            return Err(Error::Infeasible(format!("budget too large to {what} at t = {:?}", e.t)));
        }
        used.insert(nudged.clone());
        out[idx].1 = nudged;
    }
    PLFunction::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn identity_is_one_up_piece() {
        let d = monotone_decompose(&PLFunction::identity());
        assert_eq!(d.pieces.len(), 1);
        assert_eq!(d.pieces[0].direction, Direction::Up);
        assert!(d.in_class_u);
        assert_eq!(d.interior_extrema().count(), 0);
    }

    #[test]
    fn zigzag_extrema() {
        let f = PLFunction::from_ratios(&[(0, 1, 0, 1), (1, 3, 2, 3), (2, 3, 1, 3), (1, 1, 1, 1)]).unwrap();
        let d = monotone_decompose(&f);
        let dirs: Vec<_> = d.pieces.iter().map(|p| p.direction).collect();
        assert_eq!(dirs, [Direction::Up, Direction::Down, Direction::Up]);
        let ex: Vec<_> = d.interior_extrema().map(|e| (e.value.clone(), e.kind)).collect();
        assert_eq!(ex, [(r(2, 3), ExtremumKind::Max), (r(1, 3), ExtremumKind::Min)]);
        assert!(d.in_class_u);
    }

    #[test]
    fn shared_level_breaks_class_u() {
        // max at 1/2 (t=1/4), min at 1/4 (t=1/2), max at 3/4 (t=3/4), min at 1/2 (t=7/8)
        let f = PLFunction::from_ratios(&[
            (0, 1, 0, 1),
            (1, 4, 1, 2),
            (1, 2, 1, 4),
            (3, 4, 3, 4),
            (7, 8, 1, 2),
            (1, 1, 1, 1),
        ])
        .unwrap();
        let d = monotone_decompose(&f);
        assert!(!d.in_class_u);
        assert_eq!(d.violations, [Violation { level: r(1, 2), witness_max: r(1, 4), witness_min: r(7, 8) }]);
    }

    #[test]
    fn flats_are_violations() {
        let f = PLFunction::from_ratios(&[(0, 1, 0, 1), (1, 4, 1, 2), (3, 4, 1, 2), (1, 1, 1, 1)]).unwrap();
        let d = monotone_decompose(&f);
        assert!(!d.in_class_u);
        assert_eq!(d.violations[0].level, r(1, 2));
        assert_eq!(d.violations[0].witness_max, r(1, 2));
    }

    #[test]
    fn perturb_leaves_class_u_alone() {
        let f = PLFunction::from_ratios(&[(0, 1, 0, 1), (1, 3, 2, 3), (2, 3, 1, 3), (1, 1, 1, 1)]).unwrap();
        assert_eq!(perturb_distinct_extrema(&f, &r(1, 100)).unwrap(), f);
        assert_eq!(perturb_distinct_extrema(&f, &Scalar::zero()).unwrap(), f);
    }

    #[test]
    fn perturb_rejects_clashing_endpoints() {
        let f = PLFunction::from_ratios(&[(0, 1, 1, 16), (5, 64, 0, 1), (61, 64, 5, 64), (1, 1, 1, 16)]).unwrap();
        assert!(matches!(perturb_distinct_extrema(&f, &r(1, 256)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn perturb_raises_minimum_at_endpoint_level() {
        let f = PLFunction::from_ratios(&[(0, 1, 0, 1), (3, 16, 1, 64), (9, 32, 0, 1), (1, 1, 1, 1)]).unwrap();
        let g = perturb_distinct_extrema(&f, &r(1, 1024)).unwrap();
        assert_eq!(g.eval(&r(9, 32)).unwrap(), r(1, 2048));
        assert!(!g.min_value().is_negative());
    }

    #[test]
    fn perturb_nudges_second_max() {
        let f = PLFunction::from_ratios(&[(0, 1, 0, 1), (1, 4, 1, 2), (1, 2, 1, 4), (3, 4, 1, 2), (7, 8, 3, 8), (1, 1, 1, 1)])
            .unwrap();
        let g = perturb_distinct_extrema(&f, &r(1, 100)).unwrap();
        assert_eq!(g.eval(&r(3, 4)).unwrap(), r(1, 2) - r(1, 200));
        assert_eq!(g.eval(&r(1, 4)).unwrap(), r(1, 2));
        assert!(monotone_decompose(&g).in_class_u);
        assert!(g.sup_distance(&f).unwrap() <= r(1, 100));
    }

    #[test]
    fn perturb_zero_budget_is_infeasible() {
        let f = PLFunction::from_ratios(&[(0, 1, 0, 1), (1, 4, 1, 2), (1, 2, 1, 4), (3, 4, 1, 2), (7, 8, 3, 8), (1, 1, 1, 1)])
            .unwrap();
        assert!(matches!(perturb_distinct_extrema(&f, &Scalar::zero()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn perturb_budget_too_large() {
        // lowering the second max by 1/2 would flip its left piece
        let f = PLFunction::from_ratios(&[(0, 1, 0, 1), (1, 4, 1, 2), (1, 2, 1, 4), (3, 4, 1, 2), (7, 8, 3, 8), (1, 1, 1, 1)])
            .unwrap();
        assert!(matches!(perturb_distinct_extrema(&f, &Scalar::one()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn perturb_tilts_flats() {
        let f = PLFunction::from_ratios(&[(0, 1, 0, 1), (1, 4, 1, 2), (3, 4, 1, 2), (1, 1, 1, 1)]).unwrap();
        let g = perturb_distinct_extrema(&f, &r(1, 10)).unwrap();
        assert!(g.is_locally_nonconstant());
        assert!(monotone_decompose(&g).in_class_u);
        assert!(g.sup_distance(&f).unwrap() <= r(1, 10));
        assert_eq!(g.start_value(), f.start_value());
        assert_eq!(g.end_value(), f.end_value());
    }
}
