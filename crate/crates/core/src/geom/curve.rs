//! Polyline curves over a parameter interval and their exact predicates.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::geom::{Coord, PLFunction, Point, Scalar};

/// A polyline with strictly increasing parameter knots from 0 to 1.
///
/// Canonical form drops a vertex when both coordinate functions are
/// collinear through it in the parameter graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLCurve {
    knots: Vec<Scalar>,
    vertices: Vec<Point>,
}

/// One intersection of two polylines.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Intersection {
    Crossing { ta: Scalar, tb: Scalar, point: Point },
    /// Collinear overlap; the parameter spans run from `start` to `end`.
    Overlap { ta: (Scalar, Scalar), tb: (Scalar, Scalar), start: Point, end: Point },
}

impl Intersection {
    /// Smallest parameter on the first curve.
    pub fn ta_start(&self) -> &Scalar {
        match self {
            Intersection::Crossing { ta, .. } => ta,
            Intersection::Overlap { ta, .. } => Scalar::min_of(&ta.0, &ta.1),
        }
    }

    /// The point at [`Intersection::ta_start`] with its parameter on the second curve.
    pub fn first_hit(&self) -> (Scalar, Scalar, Point) {
        match self {
            Intersection::Crossing { ta, tb, point } => (ta.clone(), tb.clone(), point.clone()),
            Intersection::Overlap { ta, tb, start, end } => {
                if ta.0 <= ta.1 {
                    (ta.0.clone(), tb.0.clone(), start.clone())
                } else {
                    (ta.1.clone(), tb.1.clone(), end.clone())
                }
            }
        }
    }

    pub fn swapped(&self) -> Intersection {
        match self {
            Intersection::Crossing { ta, tb, point } => {
                Intersection::Crossing { ta: tb.clone(), tb: ta.clone(), point: point.clone() }
            }
            Intersection::Overlap { ta, tb, start, end } => {
                Intersection::Overlap { ta: tb.clone(), tb: ta.clone(), start: start.clone(), end: end.clone() }
            }
        }
    }
}

fn cross(ax: &Scalar, ay: &Scalar, bx: &Scalar, by: &Scalar) -> Scalar {
    ax * by - ay * bx
}

fn lerp(a: &Scalar, b: &Scalar, lambda: &Scalar) -> Scalar {
    a + (b - a) * lambda
}

fn lerp_point(a: &Point, b: &Point, lambda: &Scalar) -> Point {
    Point::new(lerp(&a.x, &b.x, lambda), lerp(&a.y, &b.y, lambda))
}

fn param_collinear(t: [&Scalar; 3], v: [&Scalar; 3]) -> bool {
    (v[1] - v[0]) * (t[2] - t[1]) == (v[2] - v[1]) * (t[1] - t[0])
}

impl PLCurve {
    /// Builds a curve; knots must strictly increase from 0 to 1.
    pub fn new(knots: Vec<Scalar>, vertices: Vec<Point>) -> Result<Self> {
        if knots.len() != vertices.len() {
            return Err(Error::InvalidInput("knots and vertices differ in length".into()));
        }
        if knots.len() < 2 {
            return Err(Error::InvalidInput("a curve needs at least two vertices".into()));
        }
        if !knots[0].is_zero() || knots[knots.len() - 1] != Scalar::one() {
            return Err(Error::InvalidInput("curve knots must run from 0 to 1".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("curve knots must be strictly increasing".into()));
        }
        Ok(PLCurve::canonical(knots, vertices))
    }

    /// Curve through `vertices` with uniformly spaced knots.
    pub fn from_vertices(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput("a curve needs at least two vertices".into()));
        }
        let m = (vertices.len() - 1) as i64;
        let knots = (0..=m).map(|k| Scalar::ratio(k, m)).collect();
        PLCurve::new(knots, vertices)
    }

    /// Curve `t ↦ (x(t), y(t))` from two unit-domain functions.
    pub fn from_components(x: &PLFunction, y: &PLFunction) -> Result<Self> {
        if !x.has_unit_domain() || !y.has_unit_domain() {
            return Err(Error::InvalidInput("component functions must live on [0, 1]".into()));
        }
        let mut knots: Vec<Scalar> = x.knots().chain(y.knots()).cloned().collect();
        knots.sort();
        knots.dedup();
        let xs = x.eval_sorted(&knots);
        let ys = y.eval_sorted(&knots);
        let vertices = xs.into_iter().zip(ys).map(|(a, b)| Point::new(a, b)).collect();
        Ok(PLCurve::canonical(knots, vertices))
    }

    fn canonical(knots: Vec<Scalar>, vertices: Vec<Point>) -> Self {
        let mut ks: Vec<Scalar> = Vec::with_capacity(knots.len());
        let mut vs: Vec<Point> = Vec::with_capacity(vertices.len());
        for (t, v) in knots.into_iter().zip(vertices) {
            while ks.len() >= 2 {
                let n = ks.len();
                let ts = [&ks[n - 2], &ks[n - 1], &t];
                if param_collinear(ts, [&vs[n - 2].x, &vs[n - 1].x, &v.x])
                    && param_collinear(ts, [&vs[n - 2].y, &vs[n - 1].y, &v.y])
                {
                    ks.pop();
                    vs.pop();
                } else {
                    break;
                }
            }
            ks.push(t);
            vs.push(v);
        }
        PLCurve { knots: ks, vertices: vs }
    }

    pub fn knots(&self) -> &[Scalar] {
        &self.knots
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn segment_count(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn start(&self) -> &Point {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Point {
        &self.vertices[self.vertices.len() - 1]
    }

    pub fn x_function(&self) -> PLFunction {
        PLFunction::from_sorted_unchecked(
            self.knots.iter().cloned().zip(self.vertices.iter().map(|p| p.x.clone())).collect(),
        )
    }

    pub fn y_function(&self) -> PLFunction {
        PLFunction::from_sorted_unchecked(
            self.knots.iter().cloned().zip(self.vertices.iter().map(|p| p.y.clone())).collect(),
        )
    }

    /// The point at parameter `t ∈ [0, 1]`.
    pub fn eval(&self, t: &Scalar) -> Result<Point> {
        if t.is_negative() || *t > Scalar::one() {
            return Err(Error::Domain { value: t.clone().into(), lo: Scalar::zero().into(), hi: Scalar::one().into() });
        }
        let k = self.knots.partition_point(|kt| kt <= t);
        if k == self.knots.len() {
            return Ok(self.end().clone());
        }
        let (t0, t1) = (&self.knots[k - 1], &self.knots[k]);
        if t0 == t {
            return Ok(self.vertices[k - 1].clone());
        }
        let lambda = (t - t0) / (t1 - t0);
        Ok(lerp_point(&self.vertices[k - 1], &self.vertices[k], &lambda))
    }

    pub fn swap_xy(&self) -> PLCurve {
        PLCurve { knots: self.knots.clone(), vertices: self.vertices.iter().map(Point::swapped).collect() }
    }

    /// The same vertex sequence converted to floats.
    pub fn to_f64(&self) -> FloatCurve {
        FloatCurve {
            knots: self.knots.iter().map(Scalar::to_f64).collect(),
            vertices: self.vertices.iter().map(Point::to_f64).collect(),
        }
    }

    /// Smallest parameter at which the curve passes through `p`.
    pub fn locate(&self, p: &Point) -> Option<Scalar> {
        for k in 0..self.segment_count() {
            if let Some(lambda) = segment_param(&self.vertices[k], &self.vertices[k + 1], p) {
                return Some(lerp(&self.knots[k], &self.knots[k + 1], &lambda));
            }
        }
        None
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.locate(p).is_some()
    }

    /// Exact L∞ distance from `p` to the polyline.
    pub fn linf_distance(&self, p: &Point) -> Scalar {
        linf_distance_to_polyline(&self.vertices, p)
    }

    /// Smallest parameter of a point of the curve nearest to `p` in L∞.
    pub fn nearest_param(&self, p: &Point) -> Scalar {
        let (_, k, lambda) = linf_nearest(&self.vertices, p);
        if self.vertices.len() == 1 {
            return self.knots[0].clone();
        }
        lerp(&self.knots[k], &self.knots[k + 1], &lambda)
    }

    /// First parameter in `(0, 1)` where the curve leaves the open unit
    /// square, if any.
    pub fn first_non_interior(&self) -> Option<Scalar> {
        let inside = |p: &Point| {
            p.x.is_positive() && p.y.is_positive() && p.x < Scalar::one() && p.y < Scalar::one()
        };
        let n = self.vertices.len();
        // Segments touching the corners (0,0) or (1,1) stay interior as long as
        // their other end is interior, because the open square is convex.
        (1..n - 1).find(|&k| !inside(&self.vertices[k])).map(|k| self.knots[k].clone()).or_else(|| {
            if n == 2 {
                let (a, b) = (&self.vertices[0], &self.vertices[1]);
                let mid = Point::new(Scalar::midpoint(&a.x, &b.x), Scalar::midpoint(&a.y, &b.y));
                (!inside(&mid)).then(|| Scalar::ratio(1, 2))
            } else {
                None
            }
        })
    }

    /// True when every point with parameter in `(0, 1)` lies in
    /// `Δ = {(a, b) ∈ (0,1)² : a > b}`.
    pub fn is_delta_interior(&self) -> bool {
        let in_delta = |p: &Point| p.y.is_positive() && p.x > p.y && p.x < Scalar::one();
        let n = self.vertices.len();
        if n == 2 {
            return false;
        }
        (1..n - 1).all(|k| in_delta(&self.vertices[k]))
    }
}

impl fmt::Debug for PLCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PLCurve")?;
        f.debug_list().entries(self.knots.iter().zip(&self.vertices)).finish()
    }
}

/// Parameter `λ ∈ [0, 1]` with `a + λ(b − a) = p`, if `p` is on segment `ab`.
fn segment_param(a: &Point, b: &Point, p: &Point) -> Option<Scalar> {
    let (dx, dy) = (&b.x - &a.x, &b.y - &a.y);
    let (px, py) = (&p.x - &a.x, &p.y - &a.y);
    if !cross(&dx, &dy, &px, &py).is_zero() {
        return None;
    }
    let lambda = if !dx.is_zero() {
        &px / &dx
    } else if !dy.is_zero() {
        &py / &dy
    } else {
        return (a == p).then(Scalar::zero);
    };
    (!lambda.is_negative() && lambda <= Scalar::one()).then_some(lambda)
}

/// L∞ distance from `p` to a polyline given by its vertices. The minimum over a
/// segment of `max(|Δx(λ)|, |Δy(λ)|)` is attained at an endpoint, at a zero of
/// either difference, or where the two differences agree up to sign.
pub fn linf_distance_to_polyline<T: Coord>(vertices: &[Point<T>], p: &Point<T>) -> T {
    linf_nearest(vertices, p).0
}

/// Distance, segment index and segment parameter of the first nearest point.
fn linf_nearest<T: Coord>(vertices: &[Point<T>], p: &Point<T>) -> (T, usize, T) {
    let mut best: Option<(T, usize, T)> = None;
    let mut consider = |d: T, k: usize, l: &T| {
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, k, l.clone()));
        }
    };
    let one = T::one();
    for (k, w) in vertices.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        // Δx(λ) = ex + λ·dx, Δy(λ) = ey + λ·dy
        let ex = a.x.sub(&p.x);
        let ey = a.y.sub(&p.y);
        let dx = b.x.sub(&a.x);
        let dy = b.y.sub(&a.y);
        let at = |lambda: &T| {
            let u = ex.add(&lambda.mul(&dx)).abs();
            let v = ey.add(&lambda.mul(&dy)).abs();
            if u > v {
                u
            } else {
                v
            }
        };
        let mut candidates = alloc::vec![T::zero(), one.clone()];
        let mut root = |num: T, den: T| {
            if !den.is_zero() {
                let l = num.div(&den);
                if l >= T::zero() && l <= one {
                    candidates.push(l);
                }
            }
        };
        root(ex.neg(), dx.clone());
        root(ey.neg(), dy.clone());
        // ex + λdx = ey + λdy and ex + λdx = −(ey + λdy)
        root(ey.sub(&ex), dx.sub(&dy));
        root(ex.add(&ey).neg(), dx.add(&dy));
        // ascending λ so ties resolve to the smaller parameter
        candidates.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        for l in &candidates {
            consider(at(l), k, l);
        }
    }
    if vertices.len() == 1 {
        let q = &vertices[0];
        let u = q.x.sub(&p.x).abs();
        let v = q.y.sub(&p.y).abs();
        consider(if u > v { u } else { v }, 0, &T::zero());
    }
    best.expect("polyline has at least one vertex")
}

fn segment_intersection(
    (p0, p1): (&Point, &Point),
    (ta0, ta1): (&Scalar, &Scalar),
    (q0, q1): (&Point, &Point),
    (tb0, tb1): (&Scalar, &Scalar),
) -> Option<Intersection> {
    let (dx, dy) = (&p1.x - &p0.x, &p1.y - &p0.y);
    let (ex, ey) = (&q1.x - &q0.x, &q1.y - &q0.y);
    let (wx, wy) = (&q0.x - &p0.x, &q0.y - &p0.y);
    let d_zero = dx.is_zero() && dy.is_zero();
    let e_zero = ex.is_zero() && ey.is_zero();
    if d_zero {
        let mu = segment_param(q0, q1, p0)?;
        return Some(Intersection::Crossing { ta: ta0.clone(), tb: lerp(tb0, tb1, &mu), point: p0.clone() });
    }
    if e_zero {
        let lambda = segment_param(p0, p1, q0)?;
        return Some(Intersection::Crossing { ta: lerp(ta0, ta1, &lambda), tb: tb0.clone(), point: q0.clone() });
    }
    let denom = cross(&dx, &dy, &ex, &ey);
    if !denom.is_zero() {
        let lambda = cross(&wx, &wy, &ex, &ey) / &denom;
        let mu = cross(&wx, &wy, &dx, &dy) / &denom;
        let unit = |s: &Scalar| !s.is_negative() && *s <= Scalar::one();
        if unit(&lambda) && unit(&mu) {
            return Some(Intersection::Crossing {
                ta: lerp(ta0, ta1, &lambda),
                tb: lerp(tb0, tb1, &mu),
                point: lerp_point(p0, p1, &lambda),
            });
        }
        return None;
    }
    if !cross(&wx, &wy, &dx, &dy).is_zero() {
        return None;
    }
    // collinear: positions of q0, q1 along p0 → p1
    let dd = &dx * &dx + &dy * &dy;
    let along = |q: &Point| ((&q.x - &p0.x) * &dx + (&q.y - &p0.y) * &dy) / &dd;
    let (l0, l1) = (along(q0), along(q1));
    let (lo, hi) = if l0 <= l1 { (&l0, &l1) } else { (&l1, &l0) };
    let start = Scalar::max_of(lo, &Scalar::zero()).clone();
    let end = Scalar::min_of(hi, &Scalar::one()).clone();
    match start.cmp(&end) {
        Ordering::Greater => None,
        Ordering::Equal => {
            let point = lerp_point(p0, p1, &start);
            let mu = segment_param(q0, q1, &point)?;
            Some(Intersection::Crossing { ta: lerp(ta0, ta1, &start), tb: lerp(tb0, tb1, &mu), point })
        }
        Ordering::Less => {
            let a = lerp_point(p0, p1, &start);
            let b = lerp_point(p0, p1, &end);
            let mu_a = segment_param(q0, q1, &a)?;
            let mu_b = segment_param(q0, q1, &b)?;
            Some(Intersection::Overlap {
                ta: (lerp(ta0, ta1, &start), lerp(ta0, ta1, &end)),
                tb: (lerp(tb0, tb1, &mu_a), lerp(tb0, tb1, &mu_b)),
                start: a,
                end: b,
            })
        }
    }
}

fn within(span: &(Scalar, Scalar), t: &Scalar) -> bool {
    Scalar::min_of(&span.0, &span.1) <= t && t <= Scalar::max_of(&span.0, &span.1)
}

/// All intersections of two polylines, exact, ordered by the parameter on `a`.
///
/// Crossings at shared vertices are reported once; crossings inside a
/// reported overlap are dropped.
pub fn curve_intersections(a: &PLCurve, b: &PLCurve) -> Vec<Intersection> {
    let mut hits: Vec<Intersection> = Vec::new();
    for i in 0..a.segment_count() {
        let pa = (&a.vertices[i], &a.vertices[i + 1]);
        let ta = (&a.knots[i], &a.knots[i + 1]);
        for j in 0..b.segment_count() {
            let pb = (&b.vertices[j], &b.vertices[j + 1]);
            let tb = (&b.knots[j], &b.knots[j + 1]);
            if let Some(hit) = segment_intersection(pa, ta, pb, tb) {
                hits.push(hit);
            }
        }
    }
    let overlaps: Vec<(Scalar, Scalar, Scalar, Scalar)> = hits
        .iter()
        .filter_map(|h| match h {
            Intersection::Overlap { ta, tb, .. } => Some((ta.0.clone(), ta.1.clone(), tb.0.clone(), tb.1.clone())),
            _ => None,
        })
        .collect();
    hits.retain(|h| match h {
        Intersection::Crossing { ta, tb, .. } => {
            !overlaps.iter().any(|o| within(&(o.0.clone(), o.1.clone()), ta) && within(&(o.2.clone(), o.3.clone()), tb))
        }
        _ => true,
    });
    hits.sort_by(|x, y| {
        let kx = x.first_hit();
        let ky = y.first_hit();
        (kx.0, kx.1).cmp(&(ky.0, ky.1))
    });
    hits.dedup();
    hits
}

/// The componentwise affine frame of a curve tail starting at a diagonal point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailFrame {
    /// Parameter where the tail starts.
    pub t0: Scalar,
    /// The tail starts at `(a, a)`.
    pub a: Scalar,
}

impl TailFrame {
    /// Maps a point of the original curve into the normalized frame.
    pub fn to_frame(&self, p: &Point) -> Point {
        let s = Scalar::one() - &self.a;
        Point::new((&p.x - &self.a) / &s, (&p.y - &self.a) / &s)
    }

    /// Inverse of [`TailFrame::to_frame`].
    pub fn from_frame(&self, p: &Point) -> Point {
        let s = Scalar::one() - &self.a;
        Point::new(&self.a + &p.x * &s, &self.a + &p.y * &s)
    }

    pub fn param_from_frame(&self, t: &Scalar) -> Scalar {
        t * (Scalar::one() - &self.t0) + &self.t0
    }
}

/// The tail of `curve` after parameter `t0`, rescaled so it runs from
/// `(0, 0)` to `(1, 1)`: `η(t) = (γ(t(1 − t0) + t0) − (a, a)) / (1 − a)`
/// componentwise, where `γ(t0) = (a, a)`.
pub fn normalize_tail(curve: &PLCurve, t0: &Scalar) -> Result<(PLCurve, TailFrame)> {
    if t0.is_negative() || *t0 >= Scalar::one() {
        return Err(Error::precondition("tail start must lie in [0, 1)"));
    }
    let p = curve.eval(t0)?;
    if p.x != p.y {
        return Err(Error::Precondition { reason: "tail start is off the diagonal".into(), witness: Some(t0.clone()) });
    }
    if p.x >= Scalar::one() {
        return Err(Error::Precondition { reason: "tail start is (1, 1)".into(), witness: Some(t0.clone()) });
    }
    let frame = TailFrame { t0: t0.clone(), a: p.x.clone() };
    let span = Scalar::one() - t0;
    let mut knots = alloc::vec![Scalar::zero()];
    let mut vertices = alloc::vec![frame.to_frame(&p)];
    for (t, v) in curve.knots.iter().zip(&curve.vertices) {
        if t > t0 {
            knots.push((t - t0) / &span);
            vertices.push(frame.to_frame(v));
        }
    }
    Ok((PLCurve::new(knots, vertices)?, frame))
}

/// A float copy of a polyline used by the numerical oracles.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatCurve {
    pub knots: Vec<f64>,
    pub vertices: Vec<Point<f64>>,
}

impl FloatCurve {
    pub fn eval(&self, t: f64) -> Point<f64> {
        let k = self.knots.partition_point(|&kt| kt <= t).clamp(1, self.knots.len() - 1);
        let (t0, t1) = (self.knots[k - 1], self.knots[k]);
        let l = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        let (a, b) = (&self.vertices[k - 1], &self.vertices[k]);
        Point::new(a.x + l * (b.x - a.x), a.y + l * (b.y - a.y))
    }

    /// Smallest parameter `t > after` with `y(t) = target`, if any.
    pub fn next_level(&self, after: f64, target: f64) -> Option<f64> {
        let start = self.knots.partition_point(|&kt| kt <= after).max(1);
        for k in start..self.knots.len() {
            let (t0, t1) = (self.knots[k - 1].max(after), self.knots[k]);
            if t1 <= t0 {
                continue;
            }
            let y0 = if t0 == self.knots[k - 1] { self.vertices[k - 1].y } else { self.eval(t0).y };
            let y1 = self.vertices[k].y;
            let lo_in = if t0 == after { false } else { y0 == target };
            if lo_in {
                return Some(t0);
            }
            if (y0 < target && target <= y1) || (y0 > target && target >= y1) {
                let t = t0 + (target - y0) / (y1 - y0) * (t1 - t0);
                if t > after {
                    return Some(t.min(t1));
                }
            }
        }
        None
    }
}
