//! Gauss quadrature from a truncated Jacobi matrix.
//!
//! Nodes are the eigenvalues of the order-`n` Jacobi matrix and weights the
//! squared first components of its normalized eigenvectors (Golub–Welsch).
//! [`weights_from_associated`] recovers the same weights from the residues of
//! `Q^(1)_{n-1} / P_n`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::jacobi::{orthogonal_poly_derivative, q1_poly, JacobiSequence};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    /// Strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// The `n`-point Gauss rule of the measure encoded by `seq`.
pub fn gauss_rule(seq: &JacobiSequence, n: usize) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::InvalidArgument("Gauss rule order must be positive"));
    }
    let mut diag: Vec<f64> = (1..=n).map(|k| seq.alpha(k)).collect();
    let mut off: Vec<f64> = (1..=n)
        .map(|k| if k < n { seq.omega(k).sqrt() } else { 0.0 })
        .collect();
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    implicit_ql(&mut diag, &mut off, &mut first).map_err(|_| Error::EigenFailure { order: n })?;

    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first.into_iter().map(|v| v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(GaussRule { nodes, weights })
}

/// `A_l = Q^(1)_{n-1}(x_l) / P_n'(x_l)` at the given roots of `P_n`.
pub fn weights_from_associated(seq: &JacobiSequence, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    nodes
        .iter()
        .map(|&x| q1_poly(seq, n - 1, x) / orthogonal_poly_derivative(seq, n, x))
        .collect()
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// `off[i]` couples `i` and `i + 1`; `off[n-1]` is scratch. Only the first
/// row of the eigenvector matrix is accumulated, in `first`.
fn implicit_ql(d: &mut [f64], e: &mut [f64], first: &mut [f64]) -> core::result::Result<(), ()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(());
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let z = first[i + 1];
                first[i + 1] = s * first[i] + c * z;
                first[i] = c * first[i] - s * z;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
