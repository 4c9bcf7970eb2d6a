//! Envelopes, power-law fits and characteristic times of walk traces.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::jacobi::JacobiSequence;
use crate::walk::{Flavor, WalkTrace};
use crate::{Error, Result};

const MIN_FIT_POINTS: usize = 8;
const MIN_MAXIMA_SPACING: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square deviation in `ln(value)`.
    pub residual: f64,
    pub n_points: usize,
}

impl DecayFit {
    pub fn predict(&self, t: f64) -> f64 {
        (self.intercept + self.exponent * t.ln()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TcRule {
    /// First strict interior maximum, refined by a three-point parabola.
    FirstMaximum,
    /// Time after which the per-vertex probability stays within
    /// `(1 ± epsilon) / N`.
    Equipartition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicTime {
    pub t_c: f64,
    pub value_at_tc: f64,
    pub stratum: usize,
    pub flavor: Flavor,
    pub rule: TcRule,
}

/// Strictly interior local maxima of a sampled series.
///
/// Fails with `TooSparse` when two maxima are fewer than four samples apart,
/// which means the oscillation is not resolved.
pub fn envelope_points(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for i in 1..points.len().saturating_sub(1) {
        let v = points[i].1;
        if points[i - 1].1 < v && v > points[i + 1].1 {
            if let Some(j) = last {
                if i - j < MIN_MAXIMA_SPACING {
                    return Err(Error::TooSparse { t: points[i].0 });
                }
            }
            last = Some(i);
            out.push(points[i]);
        }
    }
    Ok(out)
}

/// Local maxima of the stratum-`k` probability of `trace`.
pub fn envelope(trace: &WalkTrace, k: usize) -> Result<Vec<(f64, f64)>> {
    envelope_points(&trace.series(k))
}

/// Least-squares line through `(ln t, ln value)` for points with `t` in `window`.
pub fn fit_power_law(points: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::InvalidArgument(
            "fit window must satisfy 0 < t_lo < t_hi",
        ));
    }
    let selected: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(t, _)| lo <= t && t <= hi)
        .collect();
    if selected.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            found: selected.len(),
        });
    }
    if let Some(&(t, value)) = selected.iter().find(|&&(_, v)| !(v > 0.0)) {
        return Err(Error::NonPositiveValue { t, value });
    }
    let n = selected.len() as f64;
    let logs: Vec<(f64, f64)> = selected.iter().map(|&(t, v)| (t.ln(), v.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "fit window holds a single distinct time",
        ));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (logs
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + exponent * x);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        window,
        exponent,
        intercept,
        residual,
        n_points: selected.len(),
    })
}

/// Classical default window `[0.3, 3.0] / sqrt(omega_inf)`.
pub fn classical_window(seq: &JacobiSequence) -> (f64, f64) {
    let s = seq.omega_tail().sqrt();
    (0.3 / s, 3.0 / s)
}

/// Which envelope maxima the quantum fit uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaximaWindow {
    /// Leading maxima dropped as pre-asymptotic.
    pub skip: usize,
    pub count: usize,
}

impl Default for MaximaWindow {
    fn default() -> Self {
        Self {
            skip: 20,
            count: 20,
        }
    }
}

/// Time window spanning the selected maxima of `maxima`.
pub fn quantum_window(maxima: &[(f64, f64)], select: MaximaWindow) -> Result<(f64, f64)> {
    let end = select.skip + select.count;
    if select.count < 2 || maxima.len() < end {
        return Err(Error::InsufficientPoints {
            found: maxima.len().saturating_sub(select.skip),
        });
    }
    Ok((maxima[select.skip].0, maxima[end - 1].0))
}

/// Time and value of the first strict interior maximum, at the vertex of the
/// parabola through it and its two neighbours.
pub fn first_maximum(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let i = (1..points.len().saturating_sub(1))
        .find(|&i| points[i - 1].1 < points[i].1 && points[i].1 > points[i + 1].1)
        .ok_or(Error::NoMaximumInRange)?;
    Ok(parabola_vertex(points[i - 1], points[i], points[i + 1]))
}

fn parabola_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> (f64, f64) {
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c = (d12 - d01) / (x2 - x0);
    if !(c < 0.0) {
        return (x1, y1);
    }
    // y = y1 + b (x - x1) + c (x - x1)^2 with b the slope at x1.
    let b = d01 + c * (x1 - x0);
    let x = (x1 - b / (2.0 * c)).clamp(x0, x2);
    let y = y1 + b * (x - x1) + c * (x - x1) * (x - x1);
    (x, y)
}

/// First time after which `value` stays inside `[target (1 - eps), target (1 + eps)]`,
/// linearly interpolated to the band edge it last crossed.
pub fn settle_time(points: &[(f64, f64)], target: f64, epsilon: f64) -> Result<(f64, f64)> {
    let (lo, hi) = (target * (1.0 - epsilon), target * (1.0 + epsilon));
    let inside = |v: f64| lo <= v && v <= hi;
    let last_out = points.iter().rposition(|p| !inside(p.1));
    match last_out {
        None => points.first().copied().ok_or(Error::NoMaximumInRange),
        Some(i) if i + 1 == points.len() => Err(Error::NoMaximumInRange),
        Some(i) => {
            let (t0, v0) = points[i];
            let (t1, v1) = points[i + 1];
            let edge = if v0 < lo { lo } else { hi };
            let t = t0 + (edge - v0) / (v1 - v0) * (t1 - t0);
            Ok((t.clamp(t0, t1), edge))
        }
    }
}

/// Characteristic time of stratum `k`.
///
/// With `graph_size = Some(N)` a classical trace uses the equipartition rule
/// on the per-vertex probability; everything else uses the first maximum.
pub fn characteristic_time(
    trace: &WalkTrace,
    k: usize,
    graph_size: Option<u64>,
    epsilon: f64,
) -> Result<CharacteristicTime> {
    if k >= trace.strata {
        return Err(Error::InvalidArgument("stratum outside the trace"));
    }
    let series = trace.series(k);
    let (t_c, value_at_tc, rule) = match (trace.flavor, graph_size) {
        (Flavor::Classical, Some(n)) => {
            let params = trace.params.ok_or(Error::InvalidArgument(
                "equipartition needs spidernet parameters",
            ))?;
            let size = params.stratum_size(k) as f64;
            let per_vertex: Vec<(f64, f64)> = series.iter().map(|&(t, v)| (t, v / size)).collect();
            let (t, v) = settle_time(&per_vertex, 1.0 / n as f64, epsilon)?;
            (t, v, TcRule::Equipartition)
        }
        _ => {
            let (t, v) = first_maximum(&series)?;
            (t, v, TcRule::FirstMaximum)
        }
    };
    Ok(CharacteristicTime {
        t_c,
        value_at_tc,
        stratum: k,
        flavor: trace.flavor,
        rule,
    })
}
