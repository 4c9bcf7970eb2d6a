//! Integer-order Bessel functions `J_n` and `I_n` by Miller's downward
//! recurrence, normalized with the generating-function sums
//! `J_0 + 2 sum J_2k = 1` and `I_0 + 2 sum I_k = e^x`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

const RESCALE: f64 = 1e250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselKind {
    FirstKindJ,
    ModifiedI,
}

pub fn bessel(kind: BesselKind, n: usize, x: f64) -> f64 {
    match kind {
        BesselKind::FirstKindJ => bessel_j_sequence(n, x)[n],
        BesselKind::ModifiedI => bessel_i_scaled(n, x) * x.abs().exp(),
    }
}

/// `e^{-|x|} I_n(x)`, finite for all `x`.
pub fn bessel_i_scaled(n: usize, x: f64) -> f64 {
    bessel_i_scaled_sequence(n, x)[n]
}

fn start_index(n: usize, x: f64) -> usize {
    let top = (n as f64).max(x.abs());
    let m = (top + 30.0 + 6.0 * top.sqrt()) as usize;
    m + m % 2
}

/// `J_0(x), ..., J_n(x)`.
pub fn bessel_j_sequence(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let m = start_index(n, ax);
    let (mut above, mut cur) = (0.0, 1e-300);
    let mut norm = 0.0;
    for k in (0..=m).rev() {
        if k <= n {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let below = 2.0 * k as f64 / ax * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            above /= RESCALE;
            norm /= RESCALE;
            for v in out.iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    for (k, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `e^{-|x|} I_0(x), ..., e^{-|x|} I_n(x)`.
pub fn bessel_i_scaled_sequence(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let m = start_index(n, ax);
    let (mut above, mut cur) = (0.0, 1e-300);
    let mut norm = 0.0;
    for k in (0..=m).rev() {
        if k <= n {
            out[k] = cur;
        }
        norm += if k == 0 { cur } else { 2.0 * cur };
        if k == 0 {
            break;
        }
        let below = 2.0 * k as f64 / ax * cur + above;
        above = cur;
        cur = below;
        if cur > RESCALE {
            cur /= RESCALE;
            above /= RESCALE;
            norm /= RESCALE;
            for v in out.iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    for (k, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}
