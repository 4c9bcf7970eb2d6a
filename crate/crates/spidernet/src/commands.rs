//! Subcommand implementations.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use spidernet_core::decay::{
    characteristic_time, classical_window, envelope, fit_power_law, quantum_window,
    CharacteristicTime, DecayFit, MaximaWindow,
};
use spidernet_core::oracle::{evolve, light_cone_bound, EvolveOptions};
use spidernet_core::walk::{closed_form_trace, spectral_trace};
use spidernet_core::{
    build, jacobi_for_spidernet, spectral_measure, Flavor, JacobiSequence, Quadrature,
    WalkOperatorKind, WalkTrace,
};

use crate::config::{Format, MethodTag, RunConfig};
use crate::io::{self, DensityFile, DensityMeta, FitReport, TcReport, TraceMeta};
use crate::CliError;

pub const DEFAULT_EPSILON: f64 = 0.05;

/// Spectral density on `cfg.steps` points over the support, atoms appended.
pub fn cmd_density(cfg: &RunConfig, w: &mut impl Write) -> Result<(), CliError> {
    cfg.validate()?;
    let measure = spectral_measure(&cfg.jacobi()?)?;
    match cfg.format {
        Format::Csv => io::write_density_csv(&measure, cfg.steps, w)?,
        Format::Json => {
            let meta = DensityMeta {
                params: cfg.params,
                operator: cfg.operator,
                config: Some(cfg.clone()),
            };
            io::write_json(&DensityFile::new(&measure, cfg.steps, meta), w)?;
        }
    }
    Ok(())
}

/// The trace `walk` would emit, covering strata `0..cfg.strata.end`.
pub fn walk_trace(cfg: &RunConfig) -> Result<WalkTrace, CliError> {
    cfg.validate()?;
    let times = cfg.times();
    let params = cfg.spidernet()?;
    let strata = cfg.strata.end;
    let trace = if cfg.closed_form {
        closed_form_trace(params, cfg.kind(), cfg.walk_flavor(), &times, strata)?
    } else {
        spectral_trace(
            params,
            cfg.kind(),
            cfg.walk_flavor(),
            &times,
            strata,
            &cfg.quadrature(),
        )?
    };
    Ok(trace)
}

pub fn write_trace(trace: &WalkTrace, cfg: &RunConfig, w: &mut impl Write) -> Result<(), CliError> {
    match cfg.format {
        Format::Csv => io::write_trace_csv(trace, cfg.strata.range(), w)?,
        Format::Json => io::write_trace_json(trace, cfg.strata.range(), Some(cfg), w)?,
    }
    Ok(())
}

pub fn cmd_walk(cfg: &RunConfig, w: &mut impl Write) -> Result<(), CliError> {
    let trace = walk_trace(cfg)?;
    write_trace(&trace, cfg, w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub reference: MethodTag,
    pub max_deviation: f64,
    pub worst_t: f64,
    pub worst_k: usize,
    pub tolerance: f64,
    /// Trusted-time bound of the oracle graph; absent for closed forms.
    pub light_cone: Option<f64>,
    pub n_times: usize,
    pub pass: bool,
    pub meta: RunConfig,
}

/// Spectral trace against the oracle (or, with `closed_form`, the Bessel
/// forms) on the configured grid. `cfg.tol` is the pass threshold; the
/// quadrature runs a thousand times tighter.
///
/// With `clip` the grid is cut at the light-cone bound instead of failing
/// with `TimeOutsideLightCone`.
pub fn compare(cfg: &RunConfig, clip: bool) -> Result<CompareReport, CliError> {
    cfg.validate()?;
    let flavor = cfg.walk_flavor();
    let kind = cfg.kind();
    let params = cfg.spidernet()?;
    let quad = Quadrature::with_tol((cfg.tol * 1e-3).max(1e-13));
    let mut times = cfg.times();
    let strata = cfg.strata;

    let (reference, light_cone) = if cfg.closed_form {
        (
            closed_form_trace(params, kind, flavor, &times, strata.end)?,
            None,
        )
    } else {
        let p = cfg.require_spidernet("oracle comparison")?;
        if strata.end > cfg.depth + 1 {
            return Err(CliError::Usage(format!(
                "--strata reaches past depth {}",
                cfg.depth
            )));
        }
        let graph = build(p, cfg.depth)?;
        let opts = EvolveOptions::default();
        let seq = jacobi_for_spidernet(
            &p,
            if flavor == Flavor::Classical {
                WalkOperatorKind::NegativeLaplacian
            } else {
                kind
            },
        );
        let bound = light_cone_bound(&seq, graph.depth() + 1, opts.light_cone_tol, flavor)?;
        if clip {
            times.retain(|&t| t.abs() <= bound);
            if times.is_empty() {
                return Err(
                    spidernet_core::Error::TimeOutsideLightCone { t: cfg.tmin, bound }.into(),
                );
            }
        }
        let result = evolve(&graph, kind, flavor, &times, &opts)?;
        result.require_trusted()?;
        (result.to_trace(&graph, strata.end), Some(bound))
    };
    let spectral = spectral_trace(params, kind, flavor, &times, strata.end, &quad)?;

    let (mut max_deviation, mut worst_t, mut worst_k) = (0.0f64, times[0], strata.start);
    for (i, &t) in times.iter().enumerate() {
        for k in strata.range() {
            let d = (spectral.value(i, k) - reference.value(i, k)).norm();
            if !(d <= max_deviation) {
                (max_deviation, worst_t, worst_k) = (d, t, k);
            }
        }
    }
    Ok(CompareReport {
        reference: reference.method.into(),
        max_deviation,
        worst_t,
        worst_k,
        tolerance: cfg.tol,
        light_cone,
        n_times: times.len(),
        pass: max_deviation <= cfg.tol,
        meta: cfg.clone(),
    })
}

/// Writes the report and fails with `ComparisonFailed` when it did not pass.
pub fn cmd_compare(
    cfg: &RunConfig,
    clip: bool,
    w: &mut impl Write,
) -> Result<CompareReport, CliError> {
    let report = compare(cfg, clip)?;
    io::write_json(&report, w)?;
    if !report.pass {
        return Err(CliError::ComparisonFailed {
            deviation: report.max_deviation,
            tolerance: report.tolerance,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub stratum: usize,
    /// Overrides the default window.
    pub window: Option<(f64, f64)>,
    pub maxima: MaximaWindow,
}

fn trace_jacobi(trace: &WalkTrace) -> JacobiSequence {
    match trace.params {
        Some(p) => jacobi_for_spidernet(&p, trace.operator),
        None => JacobiSequence::semicircle(),
    }
}

/// Power-law fit of one stratum: the raw probability for classical traces,
/// the envelope maxima for quantum ones.
pub fn fit_trace(trace: &WalkTrace, opts: &FitOptions) -> Result<DecayFit, CliError> {
    if opts.stratum >= trace.strata {
        return Err(CliError::Usage(format!(
            "stratum {} is not in the trace",
            opts.stratum
        )));
    }
    let fit = match trace.flavor {
        Flavor::Classical => {
            let window = opts
                .window
                .unwrap_or_else(|| classical_window(&trace_jacobi(trace)));
            fit_power_law(&trace.series(opts.stratum), window)?
        }
        Flavor::Quantum => {
            let maxima = envelope(trace, opts.stratum)?;
            let window = match opts.window {
                Some(w) => w,
                None => quantum_window(&maxima, opts.maxima)?,
            };
            fit_power_law(&maxima, window)?
        }
    };
    Ok(fit)
}

/// Metadata assumed for CSV inputs, which carry none.
pub fn fallback_meta(cfg: &RunConfig) -> TraceMeta {
    TraceMeta {
        params: cfg.params,
        operator: cfg.operator,
        flavor: cfg.flavor,
        method: MethodTag::Spectral,
        quadrature_order: None,
        config: None,
    }
}

pub fn load_trace(path: &Path, cfg: &RunConfig) -> Result<WalkTrace, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(io::read_trace(BufReader::new(file), &fallback_meta(cfg))?.0)
}

pub fn cmd_fit(
    cfg: &RunConfig,
    opts: &FitOptions,
    input: Option<&Path>,
    w: &mut impl Write,
) -> Result<FitReport, CliError> {
    let trace = match input {
        Some(path) => load_trace(path, cfg)?,
        None => walk_trace(cfg)?,
    };
    let report = FitReport::from(fit_trace(&trace, opts)?);
    io::write_json(&report, w)?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcOptions {
    pub stratum: usize,
    /// Classical only: evolve the finite graph of `cfg.depth` and use the
    /// equipartition rule with `N` its vertex count.
    pub equipartition: bool,
    /// Equipartition size for loaded classical traces.
    pub graph_size: Option<u64>,
    pub epsilon: f64,
}

impl Default for TcOptions {
    fn default() -> Self {
        Self {
            stratum: 1,
            equipartition: false,
            graph_size: None,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// Finite-graph classical trace on the configured grid; times beyond the
/// light cone are kept on purpose.
pub fn finite_classical_trace(cfg: &RunConfig) -> Result<(WalkTrace, u64), CliError> {
    cfg.validate()?;
    let p = cfg.require_spidernet("equipartition")?;
    let graph = build(p, cfg.depth)?;
    let result = evolve(
        &graph,
        WalkOperatorKind::NegativeLaplacian,
        Flavor::Classical,
        &cfg.times(),
        &EvolveOptions::default(),
    )?;
    Ok((
        result.to_trace(&graph, graph.depth() + 1),
        graph.vertex_count() as u64,
    ))
}

pub fn tc(
    cfg: &RunConfig,
    opts: &TcOptions,
    input: Option<&Path>,
) -> Result<CharacteristicTime, CliError> {
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) {
        return Err(CliError::Usage("--epsilon must lie in (0, 1)".into()));
    }
    let (trace, size) = match input {
        Some(path) => (load_trace(path, cfg)?, opts.graph_size),
        None if opts.equipartition => {
            if cfg.flavor != crate::config::FlavorArg::Classical {
                return Err(CliError::Usage(
                    "--equipartition applies to classical walks".into(),
                ));
            }
            let (trace, n) = finite_classical_trace(cfg)?;
            (trace, Some(opts.graph_size.unwrap_or(n)))
        }
        None => (walk_trace(cfg)?, opts.graph_size),
    };
    Ok(characteristic_time(
        &trace,
        opts.stratum,
        size,
        opts.epsilon,
    )?)
}

pub fn cmd_tc(
    cfg: &RunConfig,
    opts: &TcOptions,
    input: Option<&Path>,
    w: &mut impl Write,
) -> Result<TcReport, CliError> {
    let report = TcReport::from(tc(cfg, opts, input)?);
    io::write_json(&report, w)?;
    Ok(report)
}

pub fn cmd_graph(cfg: &RunConfig, w: &mut impl Write) -> Result<(), CliError> {
    let p = cfg.require_spidernet("graph")?;
    let graph = build(p, cfg.depth)?;
    io::write_edge_list(&graph, w)?;
    Ok(())
}
