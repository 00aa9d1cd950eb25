//! Continuous piecewise-linear functions with exact breakpoints.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::geom::Scalar;

/// A continuous piecewise-linear function given by breakpoints `(t, v)`.
///
/// The domain is `[first t, last t]`; most of the crate works on `[0, 1]`.
/// Values between breakpoints are linear interpolations. Construction
/// always reduces to canonical form: no breakpoint is collinear with its
/// two neighbours.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLFunction {
    bps: Vec<(Scalar, Scalar)>,
}

/// One component of a level set `f⁻¹(c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelComponent {
    Root(Scalar),
    Flat(Scalar, Scalar),
}

impl LevelComponent {
    pub fn start(&self) -> &Scalar {
        match self {
            LevelComponent::Root(t) => t,
            LevelComponent::Flat(a, _) => a,
        }
    }

    pub fn end(&self) -> &Scalar {
        match self {
            LevelComponent::Root(t) => t,
            LevelComponent::Flat(_, b) => b,
        }
    }

    pub fn contains(&self, t: &Scalar) -> bool {
        self.start() <= t && t <= self.end()
    }
}

fn collinear(a: &(Scalar, Scalar), b: &(Scalar, Scalar), c: &(Scalar, Scalar)) -> bool {
    (&b.1 - &a.1) * (&c.0 - &b.0) == (&c.1 - &b.1) * (&b.0 - &a.0)
}

fn canonicalize(bps: Vec<(Scalar, Scalar)>) -> Vec<(Scalar, Scalar)> {
    let mut out: Vec<(Scalar, Scalar)> = Vec::with_capacity(bps.len());
    for bp in bps {
        while out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &bp) {
            out.pop();
        }
        out.push(bp);
    }
    out
}

impl PLFunction {
    /// Builds a function from breakpoints with strictly increasing `t`.
    pub fn new(bps: Vec<(Scalar, Scalar)>) -> Result<Self> {
        if bps.len() < 2 {
            return Err(Error::InvalidInput("a function needs at least two breakpoints".into()));
        }
        if bps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidInput("breakpoint parameters must be strictly increasing".into()));
        }
        Ok(PLFunction { bps: canonicalize(bps) })
    }

    /// Like [`PLFunction::new`] but also requires the domain to be `[0, 1]`.
    pub fn on_unit(bps: Vec<(Scalar, Scalar)>) -> Result<Self> {
        let f = PLFunction::new(bps)?;
        if !f.has_unit_domain() {
            return Err(Error::InvalidInput("function domain must be [0, 1]".into()));
        }
        Ok(f)
    }

    /// Convenience constructor from small integer ratios `(tn, td, vn, vd)`.
    pub fn from_ratios(pts: &[(i64, i64, i64, i64)]) -> Result<Self> {
        PLFunction::new(
            pts.iter()
                .map(|&(tn, td, vn, vd)| (Scalar::ratio(tn, td), Scalar::ratio(vn, vd)))
                .collect(),
        )
    }

    pub(crate) fn from_sorted_unchecked(bps: Vec<(Scalar, Scalar)>) -> Self {
        debug_assert!(bps.len() >= 2 && bps.windows(2).all(|w| w[0].0 < w[1].0));
        PLFunction { bps: canonicalize(bps) }
    }

    pub fn identity() -> Self {
        PLFunction::identity_on(Scalar::zero(), Scalar::one())
    }

    pub fn identity_on(lo: Scalar, hi: Scalar) -> Self {
        PLFunction::linear(lo.clone(), hi.clone(), lo, hi)
    }

    pub fn constant_on(lo: Scalar, hi: Scalar, c: Scalar) -> Self {
        PLFunction::linear(lo, hi, c.clone(), c)
    }

    /// The segment from `(lo, v_lo)` to `(hi, v_hi)`; requires `lo < hi`.
    pub fn linear(lo: Scalar, hi: Scalar, v_lo: Scalar, v_hi: Scalar) -> Self {
        assert!(lo < hi, "empty domain");
        PLFunction { bps: alloc::vec![(lo, v_lo), (hi, v_hi)] }
    }

    pub fn breakpoints(&self) -> &[(Scalar, Scalar)] {
        &self.bps
    }

    pub fn into_breakpoints(self) -> Vec<(Scalar, Scalar)> {
        self.bps
    }

    pub fn knots(&self) -> impl Iterator<Item = &Scalar> + '_ {
        self.bps.iter().map(|(t, _)| t)
    }

    pub fn piece_count(&self) -> usize {
        self.bps.len() - 1
    }

    pub fn lo(&self) -> &Scalar {
        &self.bps[0].0
    }

    pub fn hi(&self) -> &Scalar {
        &self.bps[self.bps.len() - 1].0
    }

    pub fn start_value(&self) -> &Scalar {
        &self.bps[0].1
    }

    pub fn end_value(&self) -> &Scalar {
        &self.bps[self.bps.len() - 1].1
    }

    pub fn has_unit_domain(&self) -> bool {
        self.lo().is_zero() && *self.hi() == Scalar::one()
    }

    pub fn min_value(&self) -> &Scalar {
        self.bps.iter().map(|(_, v)| v).min().expect("nonempty")
    }

    pub fn max_value(&self) -> &Scalar {
        self.bps.iter().map(|(_, v)| v).max().expect("nonempty")
    }

    pub fn in_domain(&self, t: &Scalar) -> bool {
        self.lo() <= t && t <= self.hi()
    }

    /// Exact value at `t`.
    pub fn eval(&self, t: &Scalar) -> Result<Scalar> {
        if !self.in_domain(t) {
            return Err(Error::Domain { value: t.clone().into(), lo: self.lo().clone().into(), hi: self.hi().clone().into() });
        }
        Ok(self.eval_in_domain(t))
    }

    pub(crate) fn eval_in_domain(&self, t: &Scalar) -> Scalar {
        // index of the first breakpoint with parameter > t
        let k = self.bps.partition_point(|(bt, _)| bt <= t);
        if k == 0 {
            return self.bps[0].1.clone();
        }
        if k == self.bps.len() {
            return self.bps[k - 1].1.clone();
        }
        let (t0, v0) = &self.bps[k - 1];
        if t0 == t {
            return v0.clone();
        }
        let (t1, v1) = &self.bps[k];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Values at ascending parameters `ts` in one linear pass.
    pub fn eval_sorted(&self, ts: &[Scalar]) -> Vec<Scalar> {
        let mut k = 0;
        let mut out = Vec::with_capacity(ts.len());
        for t in ts {
            while k + 2 < self.bps.len() && self.bps[k + 1].0 <= *t {
                k += 1;
            }
            let (t0, v0) = &self.bps[k];
            let (t1, v1) = &self.bps[k + 1];
            out.push(if t == t0 {
                v0.clone()
            } else if t == t1 {
                v1.clone()
            } else {
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            });
        }
        out
    }

    /// Slope of the piece starting at breakpoint `i`.
    pub fn slope(&self, i: usize) -> Scalar {
        let (t0, v0) = &self.bps[i];
        let (t1, v1) = &self.bps[i + 1];
        (v1 - v0) / (t1 - t0)
    }

    pub fn is_locally_nonconstant(&self) -> bool {
        self.bps.windows(2).all(|w| w[0].1 != w[1].1)
    }

    /// Maximal intervals on which the function is constant, with their level.
    pub fn flat_intervals(&self) -> Vec<(Scalar, Scalar, Scalar)> {
        self.bps
            .windows(2)
            .filter(|w| w[0].1 == w[1].1)
            .map(|w| (w[0].0.clone(), w[1].0.clone(), w[0].1.clone()))
            .collect()
    }

    /// `outer ∘ inner`, exact and canonical, on `inner`'s domain.
    pub fn compose(outer: &PLFunction, inner: &PLFunction) -> Result<PLFunction> {
        let (lo, hi) = (inner.min_value(), inner.max_value());
        if lo < outer.lo() {
            return Err(Error::Domain { value: lo.clone().into(), lo: outer.lo().clone().into(), hi: outer.hi().clone().into() });
        }
        if hi > outer.hi() {
            return Err(Error::Domain { value: hi.clone().into(), lo: outer.lo().clone().into(), hi: outer.hi().clone().into() });
        }
        let obps = &outer.bps;
        let mut out: Vec<(Scalar, Scalar)> = Vec::with_capacity(inner.bps.len());
        out.push((inner.bps[0].0.clone(), outer.eval_in_domain(&inner.bps[0].1)));
        for w in inner.bps.windows(2) {
            let (t0, v0) = &w[0];
            let (t1, v1) = &w[1];
            if v0 != v1 {
                let (a, b) = if v0 < v1 { (v0, v1) } else { (v1, v0) };
                let first = obps.partition_point(|(bt, _)| bt <= a);
                let last = obps.partition_point(|(bt, _)| bt < b);
                let dt = t1 - t0;
                let dv = v1 - v0;
                let hit = |(ob, ov): &(Scalar, Scalar)| (t0 + (ob - v0) * &dt / &dv, ov.clone());
                if v0 < v1 {
                    out.extend(obps[first..last].iter().map(hit));
                } else {
                    out.extend(obps[first..last].iter().rev().map(hit));
                }
            }
            out.push((t1.clone(), outer.eval_in_domain(v1)));
        }
        Ok(PLFunction::from_sorted_unchecked(out))
    }

    /// `self(t0 · t)` on `[0, 1]` for a unit-domain `self` and `0 < t0 ≤ 1`.
    pub fn rescale_unit_domain(&self, t0: &Scalar) -> Result<PLFunction> {
        let inner = PLFunction::linear(Scalar::zero(), Scalar::one(), Scalar::zero(), t0.clone());
        PLFunction::compose(self, &inner)
    }

    /// The restriction to `[lo, hi]`, which must lie inside the domain.
    pub fn restrict(&self, lo: &Scalar, hi: &Scalar) -> Result<PLFunction> {
        if !(self.in_domain(lo) && self.in_domain(hi) && lo < hi) {
            return Err(Error::Domain { value: lo.clone().into(), lo: self.lo().clone().into(), hi: self.hi().clone().into() });
        }
        let mut out = alloc::vec![(lo.clone(), self.eval_in_domain(lo))];
        out.extend(self.bps.iter().filter(|(t, _)| lo < t && t < hi).cloned());
        out.push((hi.clone(), self.eval_in_domain(hi)));
        Ok(PLFunction::from_sorted_unchecked(out))
    }

    fn merged_knots(&self, other: &PLFunction) -> Vec<Scalar> {
        let mut ts: Vec<Scalar> = Vec::with_capacity(self.bps.len() + other.bps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.bps.len() || j < other.bps.len() {
            let next = match (self.bps.get(i), other.bps.get(j)) {
                (Some(a), Some(b)) if a.0 < b.0 => {
                    i += 1;
                    a.0.clone()
                }
                (Some(a), Some(b)) if a.0 > b.0 => {
                    j += 1;
                    b.0.clone()
                }
                (Some(a), Some(_)) => {
                    i += 1;
                    j += 1;
                    a.0.clone()
                }
                (Some(a), None) => {
                    i += 1;
                    a.0.clone()
                }
                (None, Some(b)) => {
                    j += 1;
                    b.0.clone()
                }
                (None, None) => unreachable!(),
            };
            ts.push(next);
        }
        ts
    }

    fn zip_with(&self, other: &PLFunction, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<PLFunction> {
        if self.lo() != other.lo() || self.hi() != other.hi() {
            return Err(Error::InvalidInput("functions have different domains".into()));
        }
        let ts = self.merged_knots(other);
        let a = self.eval_sorted(&ts);
        let b = other.eval_sorted(&ts);
        let bps = ts.into_iter().zip(a.iter().zip(&b).map(|(x, y)| op(x, y))).collect();
        Ok(PLFunction::from_sorted_unchecked(bps))
    }

    /// Pointwise sum; both functions must share a domain.
    pub fn add(&self, other: &PLFunction) -> Result<PLFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise difference; both functions must share a domain.
    pub fn sub(&self, other: &PLFunction) -> Result<PLFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `scale · self + offset`.
    pub fn affine_values(&self, scale: &Scalar, offset: &Scalar) -> PLFunction {
        let bps = self.bps.iter().map(|(t, v)| (t.clone(), scale * v + offset)).collect();
        PLFunction::from_sorted_unchecked(bps)
    }

    /// Largest `|self − other|` over the shared domain (attained at a breakpoint).
    pub fn sup_distance(&self, other: &PLFunction) -> Result<Scalar> {
        let d = self.sub(other)?;
        let hi = d.max_value().abs();
        let lo = d.min_value().abs();
        Ok(if hi > lo { hi } else { lo })
    }

    /// Exact, ordered, complete solution set of `f(t) = c`.
    pub fn level_set(&self, c: &Scalar) -> Vec<LevelComponent> {
        let mut out: Vec<LevelComponent> = Vec::new();
        let push_root = |out: &mut Vec<LevelComponent>, r: Scalar| {
            if out.last().is_some_and(|last| *last.end() == r) {
                return;
            }
            out.push(LevelComponent::Root(r));
        };
        for w in self.bps.windows(2) {
            let (t0, v0) = &w[0];
            let (t1, v1) = &w[1];
            let s0 = (v0 - c).signum();
            let s1 = (v1 - c).signum();
            if s0 == 0 && s1 == 0 {
                match out.last() {
                    Some(last) if last.end() == t0 => {
                        let start = last.start().clone();
                        out.pop();
                        out.push(LevelComponent::Flat(start, t1.clone()));
                    }
                    _ => out.push(LevelComponent::Flat(t0.clone(), t1.clone())),
                }
            } else if s0 == 0 {
                push_root(&mut out, t0.clone());
            } else if s1 == 0 {
                push_root(&mut out, t1.clone());
            } else if s0 != s1 {
                push_root(&mut out, t0 + (c - v0) * (t1 - t0) / (v1 - v0));
            }
        }
        out
    }
}

impl fmt::Debug for PLFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PLFunction")?;
        f.debug_list().entries(self.bps.iter()).finish()
    }
}
