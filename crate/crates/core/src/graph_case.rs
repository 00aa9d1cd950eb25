//! Curves that are graphs `t ↦ (t, f(t))` of functions lying below the identity.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::{PLFunction, Point, Scalar};

/// Abscissae `0 = x_0 < x_1 < … < x_{n+1} = 1` with
/// `f(x_{i+1}) − f(x_i) = x_i − x_{i−1}` for `0 ≤ i ≤ n`, where `x_{−1} = x_n − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSolution {
    pub n: usize,
    /// Largest roots `a_1 < … < a_n` of the recursion.
    pub roots: Vec<Scalar>,
    /// `x_0 … x_{n+1}`.
    pub x: Vec<Scalar>,
    /// `f(x_0) … f(x_{n+1})`.
    pub fx: Vec<Scalar>,
}

impl GraphSolution {
    /// Number of increments, `n + 1`.
    pub fn increments(&self) -> usize {
        self.n + 1
    }

    pub fn points(&self) -> Vec<Point> {
        self.x.iter().zip(&self.fx).map(|(a, b)| Point::new(a.clone(), b.clone())).collect()
    }

    pub fn dx(&self) -> Vec<Scalar> {
        self.x.windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    pub fn dy(&self) -> Vec<Scalar> {
        self.fx.windows(2).map(|w| &w[1] - &w[0]).collect()
    }
}

fn check_input(f: &PLFunction, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::precondition("n must be positive"));
    }
    if !f.has_unit_domain() {
        return Err(Error::precondition("f must be defined on [0, 1]"));
    }
    if !f.start_value().is_zero() || *f.end_value() != Scalar::one() {
        return Err(Error::precondition("f must satisfy f(0) = 0 and f(1) = 1"));
    }
    // f − id is piecewise linear, so breakpoints decide f ≤ id
    if let Some((t, _)) = f.breakpoints().iter().find(|(t, v)| v > t) {
        return Err(Error::AboveIdentity { t: t.clone() });
    }
    Ok(())
}

/// `g_{i+1}(x) = x − 1 + f(g_i(x))` on `[a_i, 1]`.
fn next_g(f: &PLFunction, g: &PLFunction, a: &Scalar) -> Result<PLFunction> {
    let g = g.restrict(a, &Scalar::one())?;
    let fg = PLFunction::compose(f, &g)?;
    let id = PLFunction::identity_on(a.clone(), Scalar::one());
    Ok(id.add(&fg)?.affine_values(&Scalar::one(), &-Scalar::one()))
}

fn largest_root(g: &PLFunction) -> Result<Scalar> {
    g.level_set(&Scalar::zero())
        .last()
        .map(|c| c.end().clone())
        .ok_or_else(|| Error::internal("recursion function has no root"))
}

/// The recursion functions `g_0 … g_n` and largest roots `a_1 … a_n`.
fn chain(f: &PLFunction, n: usize) -> Result<(Vec<PLFunction>, Vec<Scalar>)> {
    check_input(f, n)?;
    let mut gs = alloc::vec![PLFunction::identity()];
    let mut roots: Vec<Scalar> = Vec::with_capacity(n);
    let mut a = Scalar::zero();
    for _ in 0..n {
        let g = next_g(f, gs.last().expect("g_0 present"), &a)?;
        a = largest_root(&g)?;
        gs.push(g);
        roots.push(a.clone());
    }
    Ok((gs, roots))
}

/// Largest roots `a_1 < … < a_n` of the recursion started at `g_0 = id`.
pub fn largest_root_chain(f: &PLFunction, n: usize) -> Result<Vec<Scalar>> {
    chain(f, n).map(|(_, roots)| roots)
}

/// Solves the graph case with `n + 1` increments.
pub fn solve_graph(f: &PLFunction, n: usize) -> Result<GraphSolution> {
    let (gs, roots) = chain(f, n)?;
    let an = &roots[n - 1];
    let mut x = Vec::with_capacity(n + 2);
    x.push(Scalar::zero());
    for i in 1..=n {
        x.push(gs[n - i].eval(an)?);
    }
    x.push(Scalar::one());
    let fx = f.eval_sorted(&x);
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::internal("graph-case abscissae are not strictly increasing"));
    }
    let x_wrap = &x[n] - Scalar::one();
    for i in 0..=n {
        let prev = if i == 0 { &x_wrap } else { &x[i - 1] };
        if &fx[i + 1] - &fx[i] != &x[i] - prev {
            return Err(Error::Internal {
                reason: format!("increment identity fails at i = {i}"),
                at: Some(Point::new(x[i].clone(), fx[i].clone()).into()),
            });
        }
    }
    Ok(GraphSolution { n, roots, x, fx })
}
