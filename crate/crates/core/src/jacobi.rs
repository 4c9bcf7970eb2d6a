//! Szegő–Jacobi data, the associated orthogonal polynomials and the
//! continued-fraction Stieltjes transform.
//!
//! Indices are 1-based to match the three-term recurrence
//! `x P_n = P_{n+1} + alpha_{n+1} P_n + omega_n P_{n-1}`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::graph::{SpidernetParams, WalkOperatorKind};
use crate::{Complex64, Error, Result};

/// Denominators smaller than this are treated as poles.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// Jacobi coefficients with a finite prefix followed by a constant tail.
///
/// `omega(k)` and `alpha(k)` for `k > prefix_len()` equal the tail values.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSequence {
    omega_prefix: Vec<f64>,
    alpha_prefix: Vec<f64>,
    omega_tail: f64,
    alpha_tail: f64,
}

impl JacobiSequence {
    pub fn new(
        omega_prefix: Vec<f64>,
        alpha_prefix: Vec<f64>,
        omega_tail: f64,
        alpha_tail: f64,
    ) -> Result<Self> {
        if omega_prefix.len() != alpha_prefix.len() {
            return Err(Error::InvalidArgument(
                "omega and alpha prefixes differ in length",
            ));
        }
        let all_positive = omega_prefix
            .iter()
            .chain([&omega_tail])
            .all(|&w| w > 0.0 && w.is_finite());
        if !all_positive {
            return Err(Error::InvalidArgument(
                "every omega must be positive and finite",
            ));
        }
        if !alpha_prefix
            .iter()
            .chain([&alpha_tail])
            .all(|a| a.is_finite())
        {
            return Err(Error::InvalidArgument("every alpha must be finite"));
        }
        Ok(Self {
            omega_prefix,
            alpha_prefix,
            omega_tail,
            alpha_tail,
        })
    }

    /// `omega_k = omega`, `alpha_k = alpha` for every `k`.
    pub fn constant(omega: f64, alpha: f64) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), omega, alpha)
    }

    /// The free Jacobi matrix (`omega = 1`, `alpha = 0`), whose measure is the
    /// semicircle on `[-2, 2]`.
    pub fn semicircle() -> Self {
        Self::constant(1.0, 0.0).expect("constant coefficients are valid")
    }

    pub fn prefix_len(&self) -> usize {
        self.omega_prefix.len()
    }

    pub fn omega_prefix(&self) -> &[f64] {
        &self.omega_prefix
    }

    pub fn alpha_prefix(&self) -> &[f64] {
        &self.alpha_prefix
    }

    pub fn omega_tail(&self) -> f64 {
        self.omega_tail
    }

    pub fn alpha_tail(&self) -> f64 {
        self.alpha_tail
    }

    /// `omega_k`, `k >= 1`.
    pub fn omega(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        self.omega_prefix
            .get(k - 1)
            .copied()
            .unwrap_or(self.omega_tail)
    }

    /// `alpha_k`, `k >= 1`.
    pub fn alpha(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        self.alpha_prefix
            .get(k - 1)
            .copied()
            .unwrap_or(self.alpha_tail)
    }

    /// `omega_1 * ... * omega_k`; for a spidernet this is `|V_k|`.
    pub fn population(&self, k: usize) -> f64 {
        (1..=k).map(|j| self.omega(j)).product()
    }

    /// Jacobi data of `H / s`.
    pub fn scaled(&self, s: f64) -> Self {
        let s2 = s * s;
        Self {
            omega_prefix: self.omega_prefix.iter().map(|w| w / s2).collect(),
            alpha_prefix: self.alpha_prefix.iter().map(|a| a / s).collect(),
            omega_tail: self.omega_tail / s2,
            alpha_tail: self.alpha_tail / s,
        }
    }

    /// Jacobi data of `H + shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            alpha_prefix: self.alpha_prefix.iter().map(|a| a + shift).collect(),
            alpha_tail: self.alpha_tail + shift,
            ..self.clone()
        }
    }

    /// `[alpha_tail - 2 sqrt(omega_tail), alpha_tail + 2 sqrt(omega_tail)]`.
    pub fn tail_support(&self) -> (f64, f64) {
        let half = 2.0 * self.omega_tail.sqrt();
        (self.alpha_tail - half, self.alpha_tail + half)
    }

    /// Gershgorin bound on the spectrum of the infinite Jacobi matrix.
    pub fn spectral_bound(&self) -> f64 {
        let mut bound: f64 = 0.0;
        for k in 1..=self.prefix_len() + 2 {
            let below = if k > 1 { self.omega(k - 1).sqrt() } else { 0.0 };
            bound = bound.max(self.alpha(k).abs() + below + self.omega(k).sqrt());
        }
        bound
    }
}

/// Jacobi data of a spidernet walk operator on the stratum vectors.
pub fn jacobi_for_spidernet(params: &SpidernetParams, kind: WalkOperatorKind) -> JacobiSequence {
    let a = f64::from(params.a());
    let b = f64::from(params.b());
    let c = f64::from(params.c());
    let lateral = f64::from(params.lateral_degree());
    let (alpha_1, alpha_tail) = match kind {
        WalkOperatorKind::Adjacency => (0.0, lateral),
        WalkOperatorKind::NegativeLaplacian => (-a, lateral - b),
    };
    JacobiSequence::new(alloc::vec![a], alloc::vec![alpha_1], c, alpha_tail)
        .expect("spidernet coefficients are positive")
}

/// Monic `P_k(x)`.
pub fn orthogonal_poly(seq: &JacobiSequence, k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..k {
        let omega = if n == 0 { 0.0 } else { seq.omega(n) };
        let next = (x - seq.alpha(n + 1)) * cur - omega * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_k'(x)`, from the differentiated recurrence.
pub fn orthogonal_poly_derivative(seq: &JacobiSequence, k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    let (mut dprev, mut dcur) = (0.0, 0.0);
    for n in 0..k {
        let omega = if n == 0 { 0.0 } else { seq.omega(n) };
        let shift = x - seq.alpha(n + 1);
        let next = shift * cur - omega * prev;
        let dnext = cur + shift * dcur - omega * dprev;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
    }
    dcur
}

/// Fills `out[k]` with the orthonormal `P_k(x) / sqrt(omega_1 ... omega_k)`.
pub fn orthonormal_polys(seq: &JacobiSequence, x: f64, out: &mut [f64]) {
    let Some(first) = out.first_mut() else { return };
    *first = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = (x - seq.alpha(1)) / seq.omega(1).sqrt();
    for n in 1..out.len() - 1 {
        let up = seq.omega(n + 1).sqrt();
        let down = seq.omega(n).sqrt();
        out[n + 1] = ((x - seq.alpha(n + 1)) * out[n] - down * out[n - 1]) / up;
    }
}

/// Orthonormal polynomials at an atom `x` of the measure.
///
/// Outside the support the forward recurrence amplifies the growing solution,
/// while at an atom the exact values decay geometrically past the prefix. The
/// prefix is run forward and the tail continued with the decaying root `rho`
/// of `sqrt(w) rho^2 - (x - a) rho + sqrt(w) = 0`.
pub fn atom_orthonormal_polys(seq: &JacobiSequence, x: f64, out: &mut [f64]) {
    let head = (seq.prefix_len() + 1).min(out.len());
    orthonormal_polys(seq, x, &mut out[..head]);
    let s = x - seq.alpha_tail();
    let root_w = seq.omega_tail().sqrt();
    let disc = (s * s - 4.0 * seq.omega_tail()).max(0.0).sqrt();
    // The product of the roots is 1; divide instead of subtracting to keep precision.
    let rho = 2.0 * root_w / (s + s.signum() * disc);
    for n in head..out.len() {
        out[n] = out[n - 1] * rho;
    }
}

/// The associated polynomials `Q^(1)_k`, built from the sequence shifted by one level.
pub fn q1_poly(seq: &JacobiSequence, k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..k {
        let omega = if n == 0 { 0.0 } else { seq.omega(n + 1) };
        let next = (x - seq.alpha(n + 2)) * cur - omega * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn sanitize(z: Complex64) -> Complex64 {
    // -0.0 would select the lower lip of the branch cut.
    Complex64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im })
}

/// `sqrt(w^2 - 4 omega)` on the branch that behaves like `w` at infinity and
/// has positive imaginary part in the upper half plane.
fn tail_root(w: Complex64, omega: f64) -> Complex64 {
    let r = 2.0 * omega.sqrt();
    let w = sanitize(w);
    (w - r).sqrt() * (w + r).sqrt()
}

/// The periodic tail `G~(z) = omega / (z - alpha - G~(z))` in closed form.
pub fn stieltjes_tail(seq: &JacobiSequence, z: Complex64) -> Complex64 {
    let w = z - seq.alpha_tail;
    // (w - s) / 2 rationalized; w + s never cancels on this branch.
    (w + tail_root(w, seq.omega_tail)).inv() * (2.0 * seq.omega_tail)
}

/// Boundary value `G~(x + i0)` for real `x`.
pub fn stieltjes_tail_boundary(seq: &JacobiSequence, x: f64) -> Complex64 {
    let w = x - seq.alpha_tail;
    let disc = w * w - 4.0 * seq.omega_tail;
    let root = if disc >= 0.0 {
        Complex64::new(disc.sqrt().copysign(w), 0.0)
    } else {
        Complex64::new(0.0, (-disc).sqrt())
    };
    (Complex64::new(w, 0.0) - root) * 0.5
}

fn fold_prefix(
    seq: &JacobiSequence,
    z: Complex64,
    tail: Complex64,
    check: bool,
) -> Result<Complex64> {
    // tail = G~, so F_{m+1} = G~ / omega_tail.
    let mut f = tail / seq.omega_tail;
    for j in (1..=seq.prefix_len()).rev() {
        let d = z - seq.alpha(j) - f * seq.omega(j);
        if check && d.norm() < POLE_THRESHOLD {
            return Err(Error::PoleProximity {
                level: j,
                magnitude: d.norm(),
            });
        }
        f = d.inv();
    }
    Ok(f)
}

/// `G(z) = integral of mu(dx) / (z - x)`, as the continued fraction through the
/// prefix closed by the periodic tail.
pub fn stieltjes(seq: &JacobiSequence, z: Complex64) -> Result<Complex64> {
    let z = sanitize(z);
    let tail = stieltjes_tail(seq, z);
    fold_prefix(seq, z, tail, true)
}

/// `G(x + i0)` for real `x`. Not checked for poles.
pub fn stieltjes_boundary(seq: &JacobiSequence, x: f64) -> Complex64 {
    let tail = stieltjes_tail_boundary(seq, x);
    fold_prefix(seq, Complex64::new(x, 0.0), tail, false).unwrap_or(Complex64::new(0.0, 0.0))
}

/// `(x, G(x + i0))` at `x = alpha + 2 sqrt(omega) cos(theta)` on the tail support.
///
/// The square root of the tail is taken as `2 sqrt(omega) sin(theta)`, which
/// keeps full relative accuracy next to the band edges.
pub fn stieltjes_boundary_angle(seq: &JacobiSequence, theta: f64) -> (f64, Complex64) {
    let scale = 2.0 * seq.omega_tail.sqrt();
    let w = scale * theta.cos();
    let x = seq.alpha_tail + w;
    let tail = Complex64::new(0.5 * w, -0.5 * scale * theta.sin());
    let g =
        fold_prefix(seq, Complex64::new(x, 0.0), tail, false).unwrap_or(Complex64::new(0.0, 0.0));
    (x, g)
}

/// Continued fraction of the Jacobi matrix cut after `n` levels.
pub fn stieltjes_truncated(seq: &JacobiSequence, n: usize, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "truncation needs at least one level",
        ));
    }
    let mut f = Complex64::new(0.0, 0.0);
    for j in (1..=n).rev() {
        let d = z - seq.alpha(j) - f * seq.omega(j);
        if d.norm() < POLE_THRESHOLD {
            return Err(Error::PoleProximity {
                level: j,
                magnitude: d.norm(),
            });
        }
        f = d.inv();
    }
    Ok(f)
}

/// Outermost continued-fraction denominator `1 / G(x)` and its derivative,
/// for real `x` outside the tail support.
///
/// Returns `None` if an inner level passes through zero (a pole of the
/// denominator, not a zero).
pub(crate) fn real_denominator(seq: &JacobiSequence, x: f64) -> Option<(f64, f64)> {
    let w = x - seq.alpha_tail;
    let disc = w * w - 4.0 * seq.omega_tail;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt().copysign(w);
    let tail = 0.5 * (w - s);
    let dtail = if s == 0.0 {
        f64::INFINITY
    } else {
        0.5 * (1.0 - w / s)
    };
    let (mut f, mut df) = (tail / seq.omega_tail, dtail / seq.omega_tail);
    // With no prefix the transform is the tail itself: 1/G = 1/F.
    let mut d = 1.0 / f;
    let mut dd = -df / (f * f);
    for j in (1..=seq.prefix_len()).rev() {
        d = x - seq.alpha(j) - seq.omega(j) * f;
        dd = 1.0 - seq.omega(j) * df;
        if j > 1 {
            if d == 0.0 {
                return None;
            }
            f = 1.0 / d;
            df = -dd / (d * d);
        }
    }
    Some((d, dd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SpidernetParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(a: u32, b: u32, c: u32, kind: WalkOperatorKind) -> JacobiSequence {
        jacobi_for_spidernet(&SpidernetParams::new(a, b, c).unwrap(), kind)
    }

    #[test]
    fn spidernet_sequences() {
        let adj = s(4, 6, 3, WalkOperatorKind::Adjacency);
        assert_eq!((adj.omega(1), adj.omega(2), adj.omega(7)), (4.0, 3.0, 3.0));
        assert_eq!((adj.alpha(1), adj.alpha(2), adj.alpha(7)), (0.0, 2.0, 2.0));

        let lap = s(4, 6, 3, WalkOperatorKind::NegativeLaplacian);
        assert_eq!((lap.omega(1), lap.omega(2)), (4.0, 3.0));
        assert_eq!(
            (lap.alpha(1), lap.alpha(2), lap.alpha(9)),
            (-4.0, -4.0, -4.0)
        );
        let (lo, hi) = lap.tail_support();
        assert!((lo + 4.0 + 2.0 * 3f64.sqrt()).abs() < 1e-15);
        assert!((hi + 4.0 - 2.0 * 3f64.sqrt()).abs() < 1e-15);

        for a in 2..8 {
            let kesten = s(a, a, a - 1, WalkOperatorKind::Adjacency);
            assert_eq!(kesten.omega(1), f64::from(a));
            assert_eq!(kesten.omega(3), f64::from(a - 1));
            assert_eq!((kesten.alpha(1), kesten.alpha(4)), (0.0, 0.0));
        }
    }

    #[test]
    fn rejects_malformed_sequences() {
        assert!(JacobiSequence::new(alloc::vec![1.0], alloc::vec![], 1.0, 0.0).is_err());
        assert!(JacobiSequence::new(alloc::vec![0.0], alloc::vec![0.0], 1.0, 0.0).is_err());
        assert!(JacobiSequence::constant(-1.0, 0.0).is_err());
    }

    #[test]
    fn polynomial_values() {
        let seq = s(4, 6, 3, WalkOperatorKind::Adjacency);
        assert_eq!(orthogonal_poly(&seq, 0, 1.7), 1.0);
        assert_eq!(orthogonal_poly(&seq, 1, 3.0), 3.0);
        // P_2(x) = (x - alpha_2) x - omega_1.
        assert_eq!(orthogonal_poly(&seq, 2, 0.0), -4.0);
        assert_eq!(q1_poly(&seq, 0, 0.3), 1.0);
        assert_eq!(q1_poly(&seq, 1, 0.0), -2.0);
    }

    #[test]
    fn orthonormal_polys_rescale_monic_ones() {
        let seq = s(4, 6, 3, WalkOperatorKind::NegativeLaplacian);
        let mut out = [0.0; 9];
        orthonormal_polys(&seq, -3.1, &mut out);
        for (k, v) in out.iter().enumerate() {
            let monic = orthogonal_poly(&seq, k, -3.1) / seq.population(k).sqrt();
            assert!((v - monic).abs() < 1e-12 * (1.0 + monic.abs()));
        }
    }

    #[test]
    fn atom_values_decay_and_sum_to_the_inverse_mass() {
        let seq = s(4, 6, 3, WalkOperatorKind::Adjacency);
        let mu = crate::measure::spectral_measure(&seq).unwrap();
        let atom = mu.atoms()[0];
        let mut stable = [0.0; 300];
        atom_orthonormal_polys(&seq, atom.location, &mut stable);
        let mut forward = [0.0; 8];
        orthonormal_polys(&seq, atom.location, &mut forward);
        for k in 0..8 {
            assert!((stable[k] - forward[k]).abs() < 1e-9, "k={k}");
        }
        // Christoffel: the atom mass is 1 / sum p_k(x)^2.
        let sum: f64 = stable.iter().map(|p| p * p).sum();
        assert!((sum * atom.mass - 1.0).abs() < 1e-10);
        assert!(stable[299].abs() < 1e-30);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let seq = s(3, 3, 2, WalkOperatorKind::Adjacency);
        for k in 1..7 {
            let x = 0.37;
            let h = 1e-5;
            let fd =
                (orthogonal_poly(&seq, k, x + h) - orthogonal_poly(&seq, k, x - h)) / (2.0 * h);
            assert!((orthogonal_poly_derivative(&seq, k, x) - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn tail_values() {
        let unit = JacobiSequence::constant(1.0, 0.0).unwrap();
        let g = stieltjes_tail(&unit, Complex64::new(2.0, 0.0));
        assert!((g - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let seq = JacobiSequence::constant(3.0, 2.0).unwrap();
        let far = stieltjes_tail(&seq, Complex64::new(1e6, 0.0));
        assert!((far.re * 1e6 - 3.0).abs() < 1e-4);
        for x in [-3.0, -1.0, 0.0, 0.5, 3.4] {
            let g = stieltjes_tail_boundary(&seq, 2.0 + x);
            assert!((g.im + (12.0 - x * x).sqrt() / 2.0).abs() < 1e-14);
            let near = stieltjes_tail(&seq, Complex64::new(2.0 + x, 1e-12));
            assert!((near - g).norm() < 1e-8);
        }
    }

    #[test]
    fn herglotz_sign_in_upper_half_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let seqs = [
            s(4, 6, 3, WalkOperatorKind::Adjacency),
            s(4, 6, 3, WalkOperatorKind::NegativeLaplacian),
            s(3, 3, 2, WalkOperatorKind::Adjacency),
            JacobiSequence::semicircle(),
        ];
        for seq in &seqs {
            for _ in 0..1000 {
                let z = Complex64::new(rng.gen_range(-12.0..12.0), rng.gen_range(1e-6..6.0));
                assert!(stieltjes(seq, z).unwrap().im < 0.0);
            }
        }
    }

    #[test]
    fn constant_sequence_transform_is_the_tail() {
        let seq = JacobiSequence::constant(2.0, -1.0).unwrap();
        let z = Complex64::new(0.3, 0.8);
        let g = stieltjes(&seq, z).unwrap();
        assert!((g - stieltjes_tail(&seq, z) / 2.0).norm() < 1e-15);
        // Self-consistency of the tail recursion.
        let lhs = g;
        let rhs = (z - seq.alpha(1) - g * seq.omega(1)).inv();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn pole_proximity_is_reported() {
        // A one-level truncation has its pole at alpha_1.
        let seq = s(4, 6, 3, WalkOperatorKind::Adjacency);
        let err = stieltjes_truncated(&seq, 1, Complex64::new(0.0, 0.0)).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::PoleProximity);
    }

    #[test]
    fn real_denominator_inverts_the_transform() {
        let seq = s(4, 6, 3, WalkOperatorKind::Adjacency);
        for x in [-4.0, -2.0, 6.0, 9.0] {
            let (d, dd) = real_denominator(&seq, x).unwrap();
            let g = stieltjes(&seq, Complex64::new(x, 0.0)).unwrap();
            assert!((d * g.re - 1.0).abs() < 1e-12);
            let h = 1e-6;
            let fd = (real_denominator(&seq, x + h).unwrap().0
                - real_denominator(&seq, x - h).unwrap().0)
                / (2.0 * h);
            assert!((dd - fd).abs() < 1e-6);
        }
        let semi = JacobiSequence::semicircle();
        let (d, _) = real_denominator(&semi, 3.0).unwrap();
        let g = stieltjes(&semi, Complex64::new(3.0, 0.0)).unwrap();
        assert!((d * g.re - 1.0).abs() < 1e-12);
    }
}
