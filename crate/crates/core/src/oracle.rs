//! Direct evolution on an explicit truncated spidernet.
//!
//! Small graphs use a dense symmetric eigendecomposition of the operator
//! matrix. Larger ones (up to the edge cap) are propagated with a truncated
//! Taylor series of the exponential on substeps short enough that
//! `|tau| * ||H + shift|| <= 1`; for the classical walk the shifted operator
//! is entrywise nonnegative, so the series has no cancellation.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::graph::{StratifiedGraph, WalkOperatorKind};
use crate::jacobi::{jacobi_for_spidernet, JacobiSequence};
use crate::measure::{spectral_measure, Quadrature};
use crate::symmetric::{symmetric_eigen, SymmetricEigen};
use crate::walk::{classical_probabilities, quantum_amplitudes, Flavor, Method, WalkTrace};
use crate::{Complex64, Error, Result};

const TAYLOR_TERMS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub edge_cap: usize,
    /// Above this many vertices the Taylor propagator replaces the dense
    /// eigendecomposition.
    pub dense_vertex_cap: usize,
    pub light_cone_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            edge_cap: 200_000,
            dense_vertex_cap: 2_000,
            light_cone_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub flavor: Flavor,
    /// The generator actually used: the classical walk always runs on `A - D`.
    pub operator: WalkOperatorKind,
    pub times: Vec<f64>,
    pub vertex_count: usize,
    /// Time-major, `times.len() * vertex_count`.
    pub vertex_values: Vec<Complex64>,
    pub strata: usize,
    /// Time-major: sum of `|psi_v|^2` (quantum) or `p_v` (classical) over `V_k`.
    pub stratum_probabilities: Vec<f64>,
    /// Time-major: `<Phi_k| psi>` with the normalized stratum vector `Phi_k`.
    pub stratum_projections: Vec<Complex64>,
    pub light_cone: f64,
    pub trusted: Vec<bool>,
}

impl EvolutionResult {
    pub fn vertex_slice(&self, time_index: usize) -> &[Complex64] {
        &self.vertex_values[time_index * self.vertex_count..(time_index + 1) * self.vertex_count]
    }

    pub fn stratum_probability(&self, time_index: usize, k: usize) -> f64 {
        self.stratum_probabilities[time_index * self.strata + k]
    }

    pub fn stratum_projection(&self, time_index: usize, k: usize) -> Complex64 {
        self.stratum_projections[time_index * self.strata + k]
    }

    /// Fails on the first time beyond the light-cone bound.
    pub fn require_trusted(&self) -> Result<()> {
        match self.trusted.iter().position(|&ok| !ok) {
            Some(i) => Err(Error::TimeOutsideLightCone {
                t: self.times[i],
                bound: self.light_cone,
            }),
            None => Ok(()),
        }
    }

    /// Stratum values in the spectral method's convention: amplitudes for the
    /// quantum walk, stratum probabilities for the classical one.
    pub fn to_trace(&self, graph: &StratifiedGraph, strata: usize) -> WalkTrace {
        let strata = strata.min(self.strata);
        let mut values = Vec::with_capacity(self.times.len() * strata);
        for i in 0..self.times.len() {
            for k in 0..strata {
                values.push(match self.flavor {
                    Flavor::Quantum => self.stratum_projection(i, k),
                    Flavor::Classical => Complex64::new(self.stratum_probability(i, k), 0.0),
                });
            }
        }
        WalkTrace {
            flavor: self.flavor,
            params: Some(*graph.params()),
            operator: self.operator,
            times: self.times.clone(),
            strata,
            values,
            method: Method::Oracle,
            quadrature_order: None,
        }
    }
}

/// Evolves `|o>` under `e^{-itH}` (quantum) or `e^{t(A-D)}` (classical).
///
/// Times past the light-cone bound of the graph's depth are evaluated but
/// flagged untrusted.
pub fn evolve(
    graph: &StratifiedGraph,
    kind: WalkOperatorKind,
    flavor: Flavor,
    times: &[f64],
    options: &EvolveOptions,
) -> Result<EvolutionResult> {
    if graph.edge_count() > options.edge_cap {
        return Err(Error::GraphTooLarge {
            edges: graph.edge_count(),
            cap: options.edge_cap,
        });
    }
    let operator = match flavor {
        Flavor::Quantum => kind,
        Flavor::Classical => WalkOperatorKind::NegativeLaplacian,
    };
    if flavor == Flavor::Classical && times.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidArgument("classical time must be nonnegative"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be finite"));
    }
    let vertex_values = if graph.vertex_count() <= options.dense_vertex_cap {
        dense_evolve(graph, operator, flavor, times)?
    } else {
        taylor_evolve(graph, operator, flavor, times)
    };

    let seq = jacobi_for_spidernet(graph.params(), operator);
    let light_cone = light_cone_bound(&seq, graph.depth() + 1, options.light_cone_tol, flavor)?;
    let trusted = times.iter().map(|t| t.abs() <= light_cone).collect();

    let n = graph.vertex_count();
    let strata = graph.depth() + 1;
    let mut stratum_probabilities = Vec::with_capacity(times.len() * strata);
    let mut stratum_projections = Vec::with_capacity(times.len() * strata);
    for i in 0..times.len() {
        let psi = &vertex_values[i * n..(i + 1) * n];
        for range in graph.strata() {
            let block = &psi[range.clone()];
            let sum: Complex64 = block.iter().sum();
            stratum_projections.push(sum / (block.len() as f64).sqrt());
            stratum_probabilities.push(match flavor {
                Flavor::Quantum => block.iter().map(|v| v.norm_sqr()).sum(),
                Flavor::Classical => sum.re,
            });
        }
    }
    Ok(EvolutionResult {
        flavor,
        operator,
        times: times.to_vec(),
        vertex_count: n,
        vertex_values,
        strata,
        stratum_probabilities,
        stratum_projections,
        light_cone,
        trusted,
    })
}

/// Eigenpairs of the dense operator matrix.
pub fn eigendecomposition(
    graph: &StratifiedGraph,
    kind: WalkOperatorKind,
) -> Result<SymmetricEigen> {
    // Symmetric, so column-major storage reads as row-major.
    let m = graph.operator_matrix(kind);
    symmetric_eigen(m.as_slice().to_vec(), graph.vertex_count())
}

fn dense_evolve(
    graph: &StratifiedGraph,
    kind: WalkOperatorKind,
    flavor: Flavor,
    times: &[f64],
) -> Result<Vec<Complex64>> {
    let n = graph.vertex_count();
    let eig = eigendecomposition(graph, kind)?;
    // Origin is vertex 0, so <v_j|o> is the first component.
    let overlap: Vec<f64> = (0..n).map(|j| eig.vector(j)[0]).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); times.len() * n];
    for (i, &t) in times.iter().enumerate() {
        let psi = &mut out[i * n..(i + 1) * n];
        for j in 0..n {
            let phase = match flavor {
                Flavor::Quantum => Complex64::new(0.0, -t * eig.values[j]).exp(),
                Flavor::Classical => Complex64::new((t * eig.values[j]).exp(), 0.0),
            };
            let c = phase * overlap[j];
            for (slot, &x) in psi.iter_mut().zip(eig.vector(j)) {
                *slot += c * x;
            }
        }
    }
    Ok(out)
}

fn taylor_evolve(
    graph: &StratifiedGraph,
    kind: WalkOperatorKind,
    flavor: Flavor,
    times: &[f64],
) -> Vec<Complex64> {
    let n = graph.vertex_count();
    // H + shift has spectral radius at most the maximum degree.
    let shift = match kind {
        WalkOperatorKind::Adjacency => 0.0,
        WalkOperatorKind::NegativeLaplacian => graph.max_degree() as f64,
    };
    let norm = graph.max_degree() as f64;

    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&i, &j| times[i].total_cmp(&times[j]));
    let mut out = vec![Complex64::new(0.0, 0.0); times.len() * n];

    // March outward from t = 0 in both directions.
    let split = order.partition_point(|&i| times[i] < 0.0);
    let (backward, forward) = order.split_at(split);
    for sweep in [forward.to_vec(), backward.iter().rev().copied().collect()] {
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        psi[0] = Complex64::new(1.0, 0.0);
        let mut now = 0.0;
        for i in sweep {
            let dt = times[i] - now;
            let steps = (dt.abs() * norm).ceil().max(1.0) as usize;
            let tau = dt / steps as f64;
            for _ in 0..steps {
                taylor_step(graph, kind, flavor, shift, tau, &mut psi);
            }
            now = times[i];
            // Undo the shift on the whole interval from 0.
            let factor = match flavor {
                Flavor::Quantum => Complex64::new(0.0, now * shift).exp(),
                Flavor::Classical => Complex64::new((-now * shift).exp(), 0.0),
            };
            for (slot, v) in out[i * n..(i + 1) * n].iter_mut().zip(&psi) {
                *slot = v * factor;
            }
        }
    }
    out
}

/// `psi <- exp(z (H + shift)) psi` with `z = -i tau` or `z = tau`.
fn taylor_step(
    graph: &StratifiedGraph,
    kind: WalkOperatorKind,
    flavor: Flavor,
    shift: f64,
    tau: f64,
    psi: &mut [Complex64],
) {
    let z = match flavor {
        Flavor::Quantum => Complex64::new(0.0, -tau),
        Flavor::Classical => Complex64::new(tau, 0.0),
    };
    let mut term = psi.to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); psi.len()];
    let scale: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for j in 1..=TAYLOR_TERMS {
        graph.apply(kind, &term, &mut next);
        let zj = z / j as f64;
        let mut size = 0.0;
        for ((t, nx), p) in term.iter_mut().zip(&next).zip(psi.iter_mut()) {
            *t = (nx + *t * shift) * zj;
            *p += *t;
            size += t.norm_sqr();
        }
        if size.sqrt() <= 1e-18 * scale {
            break;
        }
    }
}

/// `<o| A^m |o>`, the number of closed walks of length `m` at the origin.
pub fn closed_walk_count(graph: &StratifiedGraph, m: usize) -> Result<u64> {
    if 2 * graph.depth() <= m {
        return Err(Error::DepthTooShallow {
            m,
            depth: graph.depth(),
        });
    }
    let n = graph.vertex_count();
    let mut cur = vec![0u64; n];
    cur[0] = 1;
    let mut next = vec![0u64; n];
    for _ in 0..m {
        for (u, slot) in next.iter_mut().enumerate() {
            let mut acc = 0u64;
            for &v in graph.neighbors(u) {
                acc = acc
                    .checked_add(cur[v as usize])
                    .ok_or(Error::Overflow { m })?;
            }
            *slot = acc;
        }
        core::mem::swap(&mut cur, &mut next);
    }
    Ok(cur[0])
}

/// `<o| H^m |o>` in floating point.
pub fn operator_moment(graph: &StratifiedGraph, kind: WalkOperatorKind, m: usize) -> Result<f64> {
    if 2 * graph.depth() <= m {
        return Err(Error::DepthTooShallow {
            m,
            depth: graph.depth(),
        });
    }
    let n = graph.vertex_count();
    let mut cur = vec![0.0; n];
    cur[0] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..m {
        graph.apply(kind, &cur, &mut next);
        core::mem::swap(&mut cur, &mut next);
    }
    Ok(cur[0])
}

/// Largest `t` up to which the spectral probability beyond stratum
/// `depth - 2` stays below `tolerance`.
///
/// Scans `t` upward from zero and bisects the first crossing. Classical walks
/// need a stochastic (NegativeLaplacian) sequence.
pub fn light_cone_bound(
    seq: &JacobiSequence,
    depth: usize,
    tolerance: f64,
    flavor: Flavor,
) -> Result<f64> {
    if depth < 2 {
        return Err(Error::InvalidArgument(
            "light-cone depth must be at least 2",
        ));
    }
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::InvalidArgument(
            "light-cone tolerance must lie in (0, 1)",
        ));
    }
    let measure = spectral_measure(seq)?;
    let quad = Quadrature::with_tol(1e-12_f64.max(tolerance * 1e-4));
    let kept = depth - 1;
    let tail = |t: f64| -> Result<f64> {
        let inside: f64 = match flavor {
            Flavor::Quantum => quantum_amplitudes(&measure, kept, t, &quad)?
                .iter()
                .map(|v| v.norm_sqr())
                .sum(),
            Flavor::Classical => classical_probabilities(&measure, kept, t, &quad)?
                .iter()
                .sum(),
        };
        Ok(1.0 - inside)
    };
    let speed = 2.0 * seq.omega_tail().sqrt() + seq.alpha_tail().abs();
    let step = 0.25 / speed.max(1.0);
    let (mut lo, mut hi) = (0.0, step);
    while tail(hi)? <= tolerance {
        lo = hi;
        hi += step;
        if hi > 1e6 {
            return Ok(lo);
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if tail(mid)? <= tolerance {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::{bessel, BesselKind};
    use crate::graph::{build, SpidernetParams};

    fn graph(a: u32, b: u32, c: u32, depth: usize) -> StratifiedGraph {
        build(SpidernetParams::new(a, b, c).unwrap(), depth).unwrap()
    }

    #[test]
    fn eigenpairs_have_small_residuals() {
        let g = graph(5, 7, 2, 5);
        for kind in [
            WalkOperatorKind::Adjacency,
            WalkOperatorKind::NegativeLaplacian,
        ] {
            let h = g.operator_matrix(kind);
            let eig = eigendecomposition(&g, kind).unwrap();
            let norm = g.operator_norm_bound(kind);
            for j in 0..eig.order {
                let v = nalgebra::DVector::from_column_slice(eig.vector(j));
                let r = &h * &v - &v * eig.values[j];
                assert!(r.norm() <= 1e-8 * norm);
            }
        }
    }

    #[test]
    fn starts_at_the_origin() {
        let g = graph(3, 3, 2, 5);
        let r = evolve(
            &g,
            WalkOperatorKind::Adjacency,
            Flavor::Quantum,
            &[0.0],
            &EvolveOptions::default(),
        )
        .unwrap();
        let psi = r.vertex_slice(0);
        assert!((psi[0] - 1.0).norm() < 1e-12);
        assert!(psi[1..].iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn line_return_amplitude_is_bessel() {
        let g = graph(2, 2, 1, 30);
        let r = evolve(
            &g,
            WalkOperatorKind::Adjacency,
            Flavor::Quantum,
            &[2.0],
            &EvolveOptions::default(),
        )
        .unwrap();
        let j0 = bessel(BesselKind::FirstKindJ, 0, 4.0);
        assert!((r.stratum_probability(0, 0) - j0 * j0).abs() < 1e-8);
        assert!(r.trusted[0]);
    }

    #[test]
    fn dense_and_taylor_routes_agree() {
        let g = graph(4, 6, 3, 4);
        let times = [0.0, 0.7, 1.9, -1.2];
        let dense = EvolveOptions::default();
        let taylor = EvolveOptions {
            dense_vertex_cap: 0,
            ..dense
        };
        for (kind, flavor, ts) in [
            (WalkOperatorKind::Adjacency, Flavor::Quantum, &times[..]),
            (
                WalkOperatorKind::NegativeLaplacian,
                Flavor::Quantum,
                &times[..],
            ),
            (
                WalkOperatorKind::NegativeLaplacian,
                Flavor::Classical,
                &times[..3],
            ),
        ] {
            let a = evolve(&g, kind, flavor, ts, &dense).unwrap();
            let b = evolve(&g, kind, flavor, ts, &taylor).unwrap();
            for (x, y) in a.vertex_values.iter().zip(&b.vertex_values) {
                assert!((x - y).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn evolution_is_unitary_or_stochastic() {
        let g = graph(4, 6, 3, 4);
        let times: Vec<f64> = (0..10).map(|i| 0.37 * i as f64).collect();
        let opts = EvolveOptions::default();
        let q = evolve(
            &g,
            WalkOperatorKind::Adjacency,
            Flavor::Quantum,
            &times,
            &opts,
        )
        .unwrap();
        let c = evolve(
            &g,
            WalkOperatorKind::NegativeLaplacian,
            Flavor::Classical,
            &times,
            &opts,
        )
        .unwrap();
        for i in 0..times.len() {
            let norm: f64 = q.vertex_slice(i).iter().map(|v| v.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
            let p = c.vertex_slice(i);
            assert!(p.iter().all(|v| v.re >= -1e-12));
            assert!((p.iter().map(|v| v.re).sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn vertices_in_a_stratum_share_their_probability() {
        let g = graph(4, 6, 3, 5);
        let opts = EvolveOptions::default();
        for flavor in [Flavor::Quantum, Flavor::Classical] {
            let r = evolve(
                &g,
                WalkOperatorKind::NegativeLaplacian,
                flavor,
                &[0.4, 1.3],
                &opts,
            )
            .unwrap();
            for i in 0..2 {
                let psi = r.vertex_slice(i);
                for range in g.strata() {
                    let p: Vec<f64> = psi[range.clone()].iter().map(|v| v.norm_sqr()).collect();
                    let spread = p.iter().cloned().fold(f64::MIN, f64::max)
                        - p.iter().cloned().fold(f64::MAX, f64::min);
                    assert!(spread <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn closed_walks_on_small_cases() {
        let g = graph(4, 6, 3, 6);
        assert_eq!(closed_walk_count(&g, 0).unwrap(), 1);
        assert_eq!(closed_walk_count(&g, 1).unwrap(), 0);
        assert_eq!(closed_walk_count(&g, 2).unwrap(), 4);
        assert_eq!(closed_walk_count(&g, 3).unwrap(), 8);
        // omega_1 alpha_2 = 4 * 2.
        let seq = jacobi_for_spidernet(g.params(), WalkOperatorKind::Adjacency);
        assert_eq!(seq.omega(1) * seq.alpha(2), 8.0);
        assert!(closed_walk_count(&g, 12).is_err());
    }

    #[test]
    fn closed_walks_overflow_is_reported() {
        // Degree 100 everywhere past the origin: 100^11 does not fit 64 bits.
        let g = graph(100, 100, 1, 6);
        assert!(closed_walk_count(&g, 4).is_ok());
        assert_eq!(
            closed_walk_count(&g, 11).unwrap_err().kind(),
            crate::ErrorKind::Overflow
        );
    }

    #[test]
    fn light_cone_is_generous_on_the_line() {
        let seq = jacobi_for_spidernet(
            &SpidernetParams::new(2, 2, 1).unwrap(),
            WalkOperatorKind::Adjacency,
        );
        let t = light_cone_bound(&seq, 30, 1e-6, Flavor::Quantum).unwrap();
        assert!(t >= 10.0, "{t}");
        let small = light_cone_bound(&seq, 2, 1e-6, Flavor::Quantum).unwrap();
        assert!(small > 0.0 && small < 0.1);
        let mut last = 0.0;
        for k in [2, 4, 8, 16] {
            let t = light_cone_bound(&seq, k, 1e-6, Flavor::Quantum).unwrap();
            assert!(t >= last);
            last = t;
        }
    }

    #[test]
    fn untrusted_times_are_flagged() {
        let g = graph(4, 6, 3, 2);
        let r = evolve(
            &g,
            WalkOperatorKind::Adjacency,
            Flavor::Quantum,
            &[0.01, 10.0],
            &EvolveOptions::default(),
        )
        .unwrap();
        assert_eq!(r.trusted, [true, false]);
        assert_eq!(
            r.require_trusted().unwrap_err().kind(),
            crate::ErrorKind::TimeOutsideLightCone
        );
    }

    #[test]
    fn edge_cap_is_enforced() {
        let g = graph(4, 6, 3, 6);
        let opts = EvolveOptions {
            edge_cap: 100,
            ..EvolveOptions::default()
        };
        let err = evolve(
            &g,
            WalkOperatorKind::Adjacency,
            Flavor::Quantum,
            &[1.0],
            &opts,
        )
        .unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::GraphTooLarge);
    }
}
