//! Dense univariate polynomials over a [`Field`], lowest degree first.

use crate::error::{Error, Result};
use crate::linalg::{inverse, mat_vec, Matrix};
use crate::scalar::Field;

pub fn evaluate<F: Field>(ctx: F::Ctx, coeffs: &[F], t: &F) -> F {
    coeffs.iter().rev().fold(F::zero(ctx), |acc, c| acc * t.clone() + c.clone())
}

/// Degree, or None for the zero polynomial.
pub fn degree<F: Field>(coeffs: &[F]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

/// Order of vanishing at t = 0, or None for the zero polynomial.
pub fn order_at_zero<F: Field>(coeffs: &[F]) -> Option<usize> {
    coeffs.iter().position(|c| !c.is_zero())
}

pub fn mul<F: Field>(ctx: F::Ctx, a: &[F], b: &[F]) -> Vec<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![F::zero(ctx); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

pub fn add<F: Field>(ctx: F::Ctx, a: &[F], b: &[F]) -> Vec<F> {
    (0..a.len().max(b.len()))
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| F::zero(ctx));
            let y = b.get(i).cloned().unwrap_or_else(|| F::zero(ctx));
            x + y
        })
        .collect()
}

pub fn scale<F: Field>(a: &[F], factor: &F) -> Vec<F> {
    a.iter().map(|x| x.clone() * factor.clone()).collect()
}

/// Recovers coefficients of a polynomial of degree < n from its values at n fixed nodes.
#[derive(Clone, Debug)]
pub struct Interpolator<F: Field> {
    ctx: F::Ctx,
    nodes: Vec<F>,
    inverse_vandermonde: Matrix<F>,
}

impl<F: Field> Interpolator<F> {
    pub fn new(ctx: F::Ctx, nodes: Vec<F>) -> Result<Self> {
        let n = nodes.len();
        let vandermonde: Matrix<F> = nodes
            .iter()
            .map(|t| {
                let mut row = Vec::with_capacity(n);
                let mut power = F::one(ctx);
                for _ in 0..n {
                    row.push(power.clone());
                    power = power * t.clone();
                }
                row
            })
            .collect();
        let inverse_vandermonde =
            inverse(ctx, &vandermonde).ok_or_else(|| Error::Degenerate("interpolation nodes are not distinct".into()))?;
        Ok(Interpolator { ctx, nodes, inverse_vandermonde })
    }

    /// Nodes 0, 1, …, n−1; needs n distinct field elements.
    pub fn consecutive(ctx: F::Ctx, n: usize) -> Result<Self> {
        let characteristic = F::characteristic(ctx) as usize;
        if characteristic != 0 && n > characteristic {
            return Err(Error::OutOfRange(format!("{n} interpolation nodes need a field with more than {characteristic} elements")));
        }
        Interpolator::new(ctx, (0..n as i64).map(|i| F::from_i64(ctx, i)).collect())
    }

    pub fn nodes(&self) -> &[F] {
        &self.nodes
    }

    pub fn coefficients(&self, values: &[F]) -> Vec<F> {
        mat_vec(self.ctx, &self.inverse_vandermonde, values)
    }
}

/// All roots in F_p by exhaustive evaluation; the caller supplies the field elements.
pub fn roots_among<F: Field>(ctx: F::Ctx, coeffs: &[F], candidates: impl Iterator<Item = F>) -> Vec<F> {
    candidates.filter(|t| evaluate(ctx, coeffs, t).is_zero()).collect()
}
