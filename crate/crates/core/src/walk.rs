//! Stratum-level walk dynamics from the spectral measure.
//!
//! With orthonormal polynomials `p_k`, the stratum vector `Phi_k` evolves as
//! `<Phi_k| f(H) |o> = integral f(x) p_k(x) mu(dx)`. The quantum amplitude is
//! the `f = e^{-itx}` case. The classical stratum probability sums the
//! per-vertex probabilities over `V_k`, which is `sqrt(|V_k|)` times the
//! `f = e^{tx}` matrix element; `|V_k| = omega_1 ... omega_k` for spidernets.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bessel::{bessel_i_scaled_sequence, bessel_j_sequence};
use crate::graph::{SpidernetParams, WalkOperatorKind};
use crate::jacobi::{
    atom_orthonormal_polys, jacobi_for_spidernet, orthonormal_polys, JacobiSequence,
};
use crate::measure::{spectral_measure, Quadrature, SpectralMeasure};
use crate::{Complex64, Error, Result};

/// Largest point of the support tolerated for `e^{tH}` to be stochastic.
const SUP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Spectral,
    Oracle,
    ClosedForm,
}

/// Stratum values on a time grid.
///
/// `values` is time-major: entry `(i, k)` sits at `i * strata + k`. Classical
/// values are real and stored with zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrace {
    pub flavor: Flavor,
    /// `None` for the normalized `a -> infinity` limit.
    pub params: Option<SpidernetParams>,
    pub operator: WalkOperatorKind,
    pub times: Vec<f64>,
    pub strata: usize,
    pub values: Vec<Complex64>,
    pub method: Method,
    /// Trapezoid order reached by the spectral quadrature, if any.
    pub quadrature_order: Option<usize>,
}

impl WalkTrace {
    pub fn value(&self, time_index: usize, k: usize) -> Complex64 {
        self.values[time_index * self.strata + k]
    }

    /// `|q_k|^2` for quantum traces, `p_k` for classical ones.
    pub fn probability(&self, time_index: usize, k: usize) -> f64 {
        let v = self.value(time_index, k);
        match self.flavor {
            Flavor::Quantum => v.norm_sqr(),
            Flavor::Classical => v.re,
        }
    }

    /// The probability series of stratum `k` over the whole grid.
    pub fn series(&self, k: usize) -> Vec<(f64, f64)> {
        self.times
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, self.probability(i, k)))
            .collect()
    }

    /// Sum of stratum probabilities at one time.
    pub fn total(&self, time_index: usize) -> f64 {
        (0..self.strata)
            .map(|k| self.probability(time_index, k))
            .sum()
    }
}

fn check_stochastic(measure: &SpectralMeasure) -> Result<()> {
    let sup = measure.sup();
    if sup > SUP_SLACK {
        return Err(Error::UnsupportedMeasure { sup });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(
            "classical time must be finite and nonnegative",
        ));
    }
    Ok(())
}

fn integrate_polys(
    measure: &SpectralMeasure,
    strata: usize,
    t: f64,
    quad: &Quadrature,
    kernel: impl Fn(f64) -> Complex64,
) -> Result<(Vec<Complex64>, usize)> {
    let seq = measure.jacobi();
    let mut polys = vec![0.0; strata];
    let atoms = measure.atoms();
    measure.integrate_many_detailed(strata, t, quad, |x, out| {
        if atoms.iter().any(|a| a.location == x) {
            atom_orthonormal_polys(seq, x, &mut polys);
        } else {
            orthonormal_polys(seq, x, &mut polys);
        }
        let e = kernel(x);
        for (o, p) in out.iter_mut().zip(&polys) {
            *o = e * *p;
        }
    })
}

/// `q_k(t)` for `k < strata`.
pub fn quantum_amplitudes(
    measure: &SpectralMeasure,
    strata: usize,
    t: f64,
    quad: &Quadrature,
) -> Result<Vec<Complex64>> {
    Ok(integrate_polys(measure, strata, t, quad, |x| {
        Complex64::new(0.0, -t * x).exp()
    })?
    .0)
}

/// `q_k(t) = <Phi_k| e^{-itH} |o>`.
pub fn quantum_amplitude(
    measure: &SpectralMeasure,
    k: usize,
    t: f64,
    quad: &Quadrature,
) -> Result<Complex64> {
    Ok(quantum_amplitudes(measure, k + 1, t, quad)?[k])
}

/// `<Phi_k| e^{tH} |o>` for `k < strata`.
pub fn classical_matrix_elements(
    measure: &SpectralMeasure,
    strata: usize,
    t: f64,
    quad: &Quadrature,
) -> Result<Vec<f64>> {
    check_stochastic(measure)?;
    check_time(t)?;
    let (v, _) = integrate_polys(measure, strata, t, quad, |x| {
        Complex64::new((t * x).exp(), 0.0)
    })?;
    Ok(v.into_iter().map(|c| c.re).collect())
}

pub fn classical_matrix_element(
    measure: &SpectralMeasure,
    k: usize,
    t: f64,
    quad: &Quadrature,
) -> Result<f64> {
    Ok(classical_matrix_elements(measure, k + 1, t, quad)?[k])
}

/// Probability `p_k(t)` of finding the classical walker anywhere in `V_k`.
///
/// `measure` must be the NegativeLaplacian measure, or any measure supported
/// in `(-inf, 0]`.
pub fn classical_probabilities(
    measure: &SpectralMeasure,
    strata: usize,
    t: f64,
    quad: &Quadrature,
) -> Result<Vec<f64>> {
    let elements = classical_matrix_elements(measure, strata, t, quad)?;
    let seq = measure.jacobi();
    Ok(elements
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * seq.population(k).sqrt())
        .collect())
}

pub fn classical_probability(
    measure: &SpectralMeasure,
    k: usize,
    t: f64,
    quad: &Quadrature,
) -> Result<f64> {
    Ok(classical_probabilities(measure, k + 1, t, quad)?[k])
}

/// Classical stratum probabilities of an `a`-regular spidernet written as
/// `e^{-a t} integral e^{tx} p_k(x) mu_A(dx)` against the adjacency measure.
pub fn classical_probabilities_regular(
    adjacency: &SpectralMeasure,
    params: &SpidernetParams,
    strata: usize,
    t: f64,
    quad: &Quadrature,
) -> Result<Vec<f64>> {
    if !params.is_regular() {
        return Err(Error::InvalidArgument(
            "the degree prefactor form needs a regular spidernet",
        ));
    }
    check_time(t)?;
    let kappa = f64::from(params.b());
    let (v, _) = integrate_polys(adjacency, strata, t, quad, |x| {
        Complex64::new((t * (x - kappa)).exp(), 0.0)
    })?;
    let seq = adjacency.jacobi();
    Ok(v.into_iter()
        .enumerate()
        .map(|(k, c)| c.re * seq.population(k).sqrt())
        .collect())
}

/// Per-vertex value inside `V_k` for a stratum-level probability.
pub fn per_vertex(value_k: f64, params: &SpidernetParams, k: usize) -> f64 {
    value_k / params.stratum_size(k) as f64
}

/// Evaluates a full trace with the spectral method.
///
/// `params == None` selects the semicircle (normalized `a -> infinity`) limit.
/// Classical walks on the adjacency operator are accepted for regular
/// spidernets only, through the degree-prefactor form.
pub fn spectral_trace(
    params: Option<SpidernetParams>,
    operator: WalkOperatorKind,
    flavor: Flavor,
    times: &[f64],
    strata: usize,
    quad: &Quadrature,
) -> Result<WalkTrace> {
    let seq = match params {
        Some(p) => jacobi_for_spidernet(&p, operator),
        None => JacobiSequence::semicircle(),
    };
    let measure = spectral_measure(&seq)?;
    let regular_form = match (flavor, operator, params) {
        (Flavor::Classical, WalkOperatorKind::Adjacency, Some(p)) if p.is_regular() => Some(p),
        _ => None,
    };
    let mut values = Vec::with_capacity(times.len() * strata);
    let mut order = 0;
    for &t in times {
        match flavor {
            Flavor::Quantum => {
                let (v, n) = integrate_polys(&measure, strata, t, quad, |x| {
                    Complex64::new(0.0, -t * x).exp()
                })?;
                order = order.max(n);
                values.extend(v);
            }
            Flavor::Classical => {
                let v = match regular_form {
                    Some(p) => classical_probabilities_regular(&measure, &p, strata, t, quad)?,
                    None => classical_probabilities(&measure, strata, t, quad)?,
                };
                values.extend(v.into_iter().map(|p| Complex64::new(p, 0.0)));
            }
        }
    }
    Ok(WalkTrace {
        flavor,
        params,
        operator,
        times: times.to_vec(),
        strata,
        values,
        method: Method::Spectral,
        quadrature_order: (order > 0).then_some(order),
    })
}

/// `(-i)^k`.
fn minus_i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Quantum amplitudes `q_0..q_{strata-1}` on the line `S(2,2,1)`.
///
/// Adjacency: `q_0 = J_0(2t)`, `q_k = sqrt 2 (-i)^k J_k(2t)`. The
/// NegativeLaplacian is `A - 2`, which only adds the phase `e^{2it}`.
pub fn line_quantum(operator: WalkOperatorKind, strata: usize, t: f64) -> Vec<Complex64> {
    let j = bessel_j_sequence(strata.saturating_sub(1), 2.0 * t);
    let phase = match operator {
        WalkOperatorKind::Adjacency => Complex64::new(1.0, 0.0),
        WalkOperatorKind::NegativeLaplacian => Complex64::new(0.0, 2.0 * t).exp(),
    };
    j.iter()
        .enumerate()
        .take(strata)
        .map(|(k, &v)| {
            let scale = if k == 0 {
                1.0
            } else {
                core::f64::consts::SQRT_2
            };
            phase * minus_i_pow(k) * (scale * v)
        })
        .collect()
}

/// Classical stratum probabilities on the line: `e^{-2t} I_0(2t)` and
/// `2 e^{-2t} I_k(2t)`.
pub fn line_classical(strata: usize, t: f64) -> Vec<f64> {
    let i = bessel_i_scaled_sequence(strata.saturating_sub(1), 2.0 * t);
    i.iter()
        .enumerate()
        .take(strata)
        .map(|(k, &v)| if k == 0 { v } else { 2.0 * v })
        .collect()
}

/// `<Phi_k| e^{t(A-2)} |o>` on the line: `e^{-2t} I_0(2t)` and `sqrt 2 e^{-2t} I_k(2t)`.
pub fn line_classical_matrix_elements(strata: usize, t: f64) -> Vec<f64> {
    let i = bessel_i_scaled_sequence(strata.saturating_sub(1), 2.0 * t);
    i.iter()
        .enumerate()
        .take(strata)
        .map(|(k, &v)| {
            if k == 0 {
                v
            } else {
                core::f64::consts::SQRT_2 * v
            }
        })
        .collect()
}

/// Amplitude of the normalized `a -> infinity` walk:
/// `(-i)^k (k + 1) J_{k+1}(2t) / t`, with the limit `delta_{k0}` at `t = 0`.
pub fn limit_amplitude(k: usize, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    let j = bessel_j_sequence(k + 1, 2.0 * t)[k + 1];
    minus_i_pow(k) * ((k + 1) as f64 * j / t)
}

/// Chebyshev polynomial of the second kind `U_k(x)`.
pub fn chebyshev_u(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Closed-form traces: the line `S(2,2,1)` and the semicircle limit
/// (`params == None`, quantum only).
pub fn closed_form_trace(
    params: Option<SpidernetParams>,
    operator: WalkOperatorKind,
    flavor: Flavor,
    times: &[f64],
    strata: usize,
) -> Result<WalkTrace> {
    let mut values = Vec::with_capacity(times.len() * strata);
    match (params, flavor) {
        (None, Flavor::Quantum) => {
            for &t in times {
                values.extend((0..strata).map(|k| limit_amplitude(k, t)));
            }
        }
        (Some(p), _) if (p.a(), p.b(), p.c()) == (2, 2, 1) => {
            for &t in times {
                match flavor {
                    Flavor::Quantum => values.extend(line_quantum(operator, strata, t)),
                    Flavor::Classical => {
                        check_time(t)?;
                        values.extend(
                            line_classical(strata, t)
                                .into_iter()
                                .map(|v| Complex64::new(v, 0.0)),
                        );
                    }
                }
            }
        }
        _ => {
            return Err(Error::InvalidArgument(
                "closed forms exist for S(2,2,1) and the quantum semicircle limit only",
            ))
        }
    }
    Ok(WalkTrace {
        flavor,
        params,
        operator,
        times: times.to_vec(),
        strata,
        values,
        method: Method::ClosedForm,
        quadrature_order: None,
    })
}
