//! Spectral measures recovered from the Stieltjes transform.
//!
//! The absolutely continuous part lives on the tail support
//! `[alpha - 2 sqrt(omega), alpha + 2 sqrt(omega)]` and is read off the
//! boundary value `-Im G(x + i0) / pi`. Point masses sit at real zeros of the
//! outermost continued-fraction denominator outside that interval; their
//! weights are the residues of `G`.
//!
//! Integrals against the density use `x = alpha + 2 sqrt(omega) cos(theta)`,
//! which turns the square-root edge behaviour into a smooth periodic integrand
//! in `theta`; the trapezoid rule on `[0, pi]` then converges geometrically.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::jacobi::{
    real_denominator, stieltjes, stieltjes_boundary, stieltjes_boundary_angle, JacobiSequence,
};
use crate::{Complex64, Error, Result};

const ATOM_SCAN_POINTS: usize = 4000;
const BISECTION_STEPS: usize = 200;
/// Angle at which the endpoint limit of the `theta` integrand is sampled.
/// The integrand is even in `theta`, so the error is `O(EDGE_ANGLE^2)`.
const EDGE_ANGLE: f64 = 1e-7;
/// Differences below this fraction of `integral |f| dmu` are rounding noise.
const ROUNDOFF_FLOOR: f64 = 1e-14;

/// A point mass of the spectral measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Controls for the doubling trapezoid rule in `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Convergence threshold on the change between successive orders,
    /// relative to `max(1, |I|)`.
    pub tol: f64,
    pub min_order: usize,
    pub max_order: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            min_order: 16,
            max_order: 1 << 16,
        }
    }
}

impl Quadrature {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    seq: JacobiSequence,
    support: (f64, f64),
    atoms: Vec<Atom>,
}

/// Recovers the measure whose Jacobi data is `seq`.
pub fn spectral_measure(seq: &JacobiSequence) -> Result<SpectralMeasure> {
    let support = seq.tail_support();
    let bound = seq.spectral_bound() + 1.0;
    let mut atoms = Vec::new();
    for (edge, far) in [(support.0, -bound), (support.1, bound)] {
        let reach = (far - edge).abs().max(1.0) * (far - edge).signum();
        if let Some(atom) = find_atom(seq, edge, reach)? {
            atoms.push(atom);
        }
    }
    atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    Ok(SpectralMeasure {
        seq: seq.clone(),
        support,
        atoms,
    })
}

/// Scans `edge + reach * u^2`, `u in (0, 1]`, for a sign change of `1/G`.
///
/// Zeros of `1/G` on one side of the support are at most two; a second one
/// on the same side never occurs for a positive measure, so the first
/// genuine zero found is returned.
fn find_atom(seq: &JacobiSequence, edge: f64, reach: f64) -> Result<Option<Atom>> {
    let at = |i: usize| {
        let u = i as f64 / ATOM_SCAN_POINTS as f64;
        edge + reach * u * u
    };
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..=ATOM_SCAN_POINTS {
        let x = at(i);
        let Some((d, _)) = real_denominator(seq, x) else {
            prev = None;
            continue;
        };
        if let Some((px, pd)) = prev {
            if pd == 0.0 || pd.signum() != d.signum() {
                if let Some(atom) = refine_atom(seq, px, x)? {
                    return Ok(Some(atom));
                }
            }
        }
        prev = Some((x, d));
    }
    Ok(None)
}

fn refine_atom(seq: &JacobiSequence, a: f64, b: f64) -> Result<Option<Atom>> {
    let eval = |x: f64| real_denominator(seq, x).ok_or(Error::AtomSearchFailure { near: x });
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let lo_sign = eval(lo)?.0.signum();
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid)?.0.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let (d, dd) = eval(x)?;
    // A sign change through a pole of 1/G leaves |d| large: not an atom.
    if d.abs() > 1e-6 {
        return Ok(None);
    }
    let mass = 1.0 / dd;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::AtomSearchFailure { near: x });
    }
    Ok(Some(Atom { location: x, mass }))
}

impl SpectralMeasure {
    pub fn jacobi(&self) -> &JacobiSequence {
        &self.seq
    }

    /// Closed support of the absolutely continuous part.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Largest point of the measure's support, atoms included.
    pub fn sup(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.location)
            .fold(self.support.1, f64::max)
    }

    /// Density of the absolutely continuous part; zero off the support.
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support;
        if !(lo..=hi).contains(&x) {
            return 0.0;
        }
        let value = -stieltjes_boundary(&self.seq, x).im / PI;
        if value.is_finite() {
            value.max(0.0)
        } else {
            f64::INFINITY
        }
    }

    /// `(x, weight)` of the `theta` trapezoid node; `weight` folds in the
    /// density and the Jacobian `2 sqrt(omega) sin(theta)`.
    fn theta_node(&self, theta: f64) -> (f64, f64) {
        let theta = theta.clamp(EDGE_ANGLE, PI - EDGE_ANGLE);
        let (x, g) = stieltjes_boundary_angle(&self.seq, theta);
        let half = 0.5 * (self.support.1 - self.support.0);
        let w = (-g.im / PI).max(0.0) * half * theta.sin();
        (x, if w.is_finite() { w } else { 0.0 })
    }

    /// Integrates `outputs` functions at once; `f(x, buf)` writes their values
    /// at `x`. `time_scale` is the largest frequency in `exp(±i t x)`-type
    /// factors and sets the starting order.
    pub fn integrate_many<F>(
        &self,
        outputs: usize,
        time_scale: f64,
        quad: &Quadrature,
        f: F,
    ) -> Result<Vec<Complex64>>
    where
        F: FnMut(f64, &mut [Complex64]),
    {
        Ok(self
            .integrate_many_detailed(outputs, time_scale, quad, f)?
            .0)
    }

    /// As [`integrate_many`](Self::integrate_many), also returning the
    /// trapezoid order that met the tolerance.
    pub fn integrate_many_detailed<F>(
        &self,
        outputs: usize,
        time_scale: f64,
        quad: &Quadrature,
        mut f: F,
    ) -> Result<(Vec<Complex64>, usize)>
    where
        F: FnMut(f64, &mut [Complex64]),
    {
        let (mut result, order) = self.integrate_continuous(outputs, time_scale, quad, &mut f)?;
        let mut buf = vec![Complex64::new(0.0, 0.0); outputs];
        for atom in &self.atoms {
            f(atom.location, &mut buf);
            for (r, v) in result.iter_mut().zip(&buf) {
                *r += v * atom.mass;
            }
        }
        Ok((result, order))
    }

    fn integrate_continuous<F>(
        &self,
        outputs: usize,
        time_scale: f64,
        quad: &Quadrature,
        f: &mut F,
    ) -> Result<(Vec<Complex64>, usize)>
    where
        F: FnMut(f64, &mut [Complex64]),
    {
        let (lo, hi) = self.support;
        let oscillations = time_scale.abs() * (hi - lo) / (2.0 * PI);
        let mut n = quad
            .min_order
            .max(((8.0 * oscillations).ceil() as usize).next_power_of_two())
            .max(2);
        let zero = Complex64::new(0.0, 0.0);
        let mut sums = vec![zero; outputs];
        let mut mags = vec![0.0; outputs];
        let mut buf = vec![zero; outputs];
        let mut add = |theta: f64, share: f64, sums: &mut [Complex64], mags: &mut [f64]| {
            let (x, w) = self.theta_node(theta);
            let w = w * share;
            if w == 0.0 {
                return;
            }
            f(x, &mut buf);
            for ((s, m), v) in sums.iter_mut().zip(mags.iter_mut()).zip(&buf) {
                *s += v * w;
                *m += v.norm() * w;
            }
        };
        // Endpoints carry half weight; the integrand need not vanish there
        // (inverse square-root densities give a finite nonzero limit).
        add(0.0, 0.5, &mut sums, &mut mags);
        add(PI, 0.5, &mut sums, &mut mags);
        for j in 1..n {
            add(j as f64 * PI / n as f64, 1.0, &mut sums, &mut mags);
        }
        let mut prev: Vec<Complex64> = sums.iter().map(|s| s * (PI / n as f64)).collect();
        loop {
            let estimate_at = |cur: &[Complex64], prev: &[Complex64], mags: &[f64], h: f64| {
                cur.iter()
                    .zip(prev)
                    .zip(mags)
                    .map(|((c, p), m)| {
                        let floor = ROUNDOFF_FLOOR * m * h / quad.tol;
                        (c - p).norm() / c.norm().max(1.0).max(floor)
                    })
                    .fold(0.0, f64::max)
            };
            if 2 * n > quad.max_order {
                return Err(Error::QuadratureNonConvergence {
                    order: n,
                    estimate: f64::INFINITY,
                });
            }
            for j in (1..2 * n).step_by(2) {
                add(j as f64 * PI / (2 * n) as f64, 1.0, &mut sums, &mut mags);
            }
            n *= 2;
            let h = PI / n as f64;
            let cur: Vec<Complex64> = sums.iter().map(|s| s * h).collect();
            let estimate = estimate_at(&cur, &prev, &mags, h);
            if estimate <= quad.tol {
                return Ok((cur, n));
            }
            if 2 * n > quad.max_order {
                return Err(Error::QuadratureNonConvergence { order: n, estimate });
            }
            prev = cur;
        }
    }

    /// Real-valued integral of `f` against the full measure.
    pub fn integrate(&self, quad: &Quadrature, f: impl Fn(f64) -> f64) -> Result<f64> {
        let v = self.integrate_many(1, 0.0, quad, |x, out| out[0] = Complex64::new(f(x), 0.0))?;
        Ok(v[0].re)
    }

    /// Mass of the absolutely continuous part.
    pub fn continuous_mass(&self, quad: &Quadrature) -> Result<f64> {
        let v = self.integrate_continuous(1, 0.0, quad, &mut |_, out: &mut [Complex64]| {
            out[0] = Complex64::new(1.0, 0.0)
        })?;
        Ok(v.0[0].re)
    }

    pub fn total_mass(&self, quad: &Quadrature) -> Result<f64> {
        Ok(self.continuous_mass(quad)? + self.atoms.iter().map(|a| a.mass).sum::<f64>())
    }

    /// `integral of x^m mu(dx)`.
    pub fn moment(&self, m: u32, quad: &Quadrature) -> Result<f64> {
        self.integrate(quad, |x| x.powi(m as i32))
    }
}

/// `-Im G(x + i v) / pi`, Richardson-extrapolated in `v`.
///
/// An independent route to the density for `x` inside the support.
pub fn inversion_density(seq: &JacobiSequence, x: f64, v: f64) -> Result<f64> {
    let at = |v: f64| stieltjes(seq, Complex64::new(x, v)).map(|g| -g.im / PI);
    Ok(2.0 * at(0.5 * v)? - at(v)?)
}
