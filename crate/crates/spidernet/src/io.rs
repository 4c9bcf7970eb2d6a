//! Text formats: edge lists, density grids, walk traces and reports.
//!
//! Floats are written in their shortest round-trip form, so reading a file
//! back reproduces the in-memory values bit for bit.

use std::io::{BufRead, Write};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use spidernet_core::decay::{CharacteristicTime, DecayFit, TcRule};
use spidernet_core::{Complex64, SpectralMeasure, SpidernetParams, StratifiedGraph, WalkTrace};

use crate::config::{FlavorArg, MethodTag, OperatorArg, RunConfig};
use crate::CliError;

pub const TRACE_HEADER: &str = "t,k,value_re,value_im,prob";
pub const DENSITY_HEADER: &str = "x,density";

fn malformed(line: usize, what: impl std::fmt::Display) -> CliError {
    CliError::Format(format!("line {line}: {what}"))
}

fn parse<T: std::str::FromStr>(field: &str, line: usize) -> Result<T, CliError> {
    field
        .trim()
        .parse()
        .map_err(|_| malformed(line, format_args!("cannot parse `{field}`")))
}

// ---- edge lists ----

/// Header `spidernet a b c depth`, then one `u v` pair per line with `u < v`.
pub fn write_edge_list(graph: &StratifiedGraph, w: &mut impl Write) -> std::io::Result<()> {
    let p = graph.params();
    writeln!(
        w,
        "spidernet {} {} {} {}",
        p.a(),
        p.b(),
        p.c(),
        graph.depth()
    )?;
    for (u, v) in graph.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub params: SpidernetParams,
    pub depth: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn read_edge_list(r: impl BufRead) -> Result<EdgeList, CliError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| malformed(1, "empty edge list"))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "spidernet" {
        return Err(malformed(1, "expected `spidernet a b c depth`"));
    }
    let params = SpidernetParams::new(
        parse(fields[1], 1)?,
        parse(fields[2], 1)?,
        parse(fields[3], 1)?,
    )?;
    let depth = parse(fields[4], 1)?;
    let mut edges = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(u), Some(v), None) => edges.push((parse(u, i + 2)?, parse(v, i + 2)?)),
            _ => return Err(malformed(i + 2, "expected `u v`")),
        }
    }
    Ok(EdgeList {
        params,
        depth,
        edges,
    })
}

// ---- density ----

/// `points` equally spaced samples over the absolutely continuous support,
/// endpoints included.
pub fn density_grid(measure: &SpectralMeasure, points: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = measure.support();
    let last = (points.max(2) - 1) as f64;
    (0..points.max(2))
        .map(|i| {
            let x = if i as f64 == last {
                hi
            } else {
                lo + (hi - lo) * i as f64 / last
            };
            (x, measure.density(x))
        })
        .collect()
}

pub fn write_density_csv(
    measure: &SpectralMeasure,
    points: usize,
    w: &mut impl Write,
) -> std::io::Result<()> {
    writeln!(w, "{DENSITY_HEADER}")?;
    for (x, d) in density_grid(measure, points) {
        writeln!(w, "{x:?},{d:?}")?;
    }
    for atom in measure.atoms() {
        writeln!(w, "# atom {:?} {:?}", atom.location, atom.mass)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMeta {
    pub params: Option<[u32; 3]>,
    pub operator: OperatorArg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub x: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub location: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub meta: DensityMeta,
    pub support: [f64; 2],
    pub grid: Vec<DensityPoint>,
    pub atoms: Vec<AtomRecord>,
}

impl DensityFile {
    pub fn new(measure: &SpectralMeasure, points: usize, meta: DensityMeta) -> Self {
        let (lo, hi) = measure.support();
        Self {
            meta,
            support: [lo, hi],
            grid: density_grid(measure, points)
                .into_iter()
                .map(|(x, density)| DensityPoint { x, density })
                .collect(),
            atoms: measure
                .atoms()
                .iter()
                .map(|a| AtomRecord {
                    location: a.location,
                    mass: a.mass,
                })
                .collect(),
        }
    }
}

/// `(x, density)` samples and `(location, mass)` atoms.
pub type DensityTable = (Vec<(f64, f64)>, Vec<(f64, f64)>);

pub fn read_density_csv(r: impl BufRead) -> Result<DensityTable, CliError> {
    let mut grid = Vec::new();
    let mut atoms = Vec::new();
    let mut header = false;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if let Some(rest) = line.strip_prefix("# atom ") {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() != 2 {
                return Err(malformed(n, "expected `# atom <location> <mass>`"));
            }
            atoms.push((parse(f[0], n)?, parse(f[1], n)?));
        } else if !header {
            if line.trim() != DENSITY_HEADER {
                return Err(malformed(
                    n,
                    format_args!("expected header `{DENSITY_HEADER}`"),
                ));
            }
            header = true;
        } else {
            let (x, d) = line
                .split_once(',')
                .ok_or_else(|| malformed(n, "expected `x,density`"))?;
            grid.push((parse(x, n)?, parse(d, n)?));
        }
    }
    Ok((grid, atoms))
}

// ---- traces ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub params: Option<[u32; 3]>,
    pub operator: OperatorArg,
    pub flavor: FlavorArg,
    pub method: MethodTag,
    pub quadrature_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
}

impl TraceMeta {
    pub fn of(trace: &WalkTrace, config: Option<&RunConfig>) -> Self {
        Self {
            params: trace.params.map(|p| [p.a(), p.b(), p.c()]),
            operator: trace.operator.into(),
            flavor: trace.flavor.into(),
            method: trace.method.into(),
            quadrature_order: trace.quadrature_order,
            config: config.cloned(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub k: usize,
    pub value_re: f64,
    pub value_im: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub meta: TraceMeta,
    pub rows: Vec<TraceRow>,
}

/// Rows for strata in `strata`, time-major.
pub fn trace_rows(trace: &WalkTrace, strata: Range<usize>) -> Vec<TraceRow> {
    let end = strata.end.min(trace.strata);
    let mut rows = Vec::with_capacity(trace.times.len() * end.saturating_sub(strata.start));
    for (i, &t) in trace.times.iter().enumerate() {
        for k in strata.start..end {
            let v = trace.value(i, k);
            rows.push(TraceRow {
                t,
                k,
                value_re: v.re,
                value_im: v.im,
                prob: trace.probability(i, k),
            });
        }
    }
    rows
}

pub fn write_trace_csv(
    trace: &WalkTrace,
    strata: Range<usize>,
    w: &mut impl Write,
) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in trace_rows(trace, strata) {
        writeln!(
            w,
            "{:?},{},{:?},{:?},{:?}",
            r.t, r.k, r.value_re, r.value_im, r.prob
        )?;
    }
    Ok(())
}

pub fn write_trace_json(
    trace: &WalkTrace,
    strata: Range<usize>,
    config: Option<&RunConfig>,
    w: &mut impl Write,
) -> Result<(), CliError> {
    let file = TraceFile {
        meta: TraceMeta::of(trace, config),
        rows: trace_rows(trace, strata),
    };
    write_json(&file, w)
}

pub fn write_json<T: Serialize>(value: &T, w: &mut impl Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(|e| CliError::Format(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

pub fn read_trace_rows_csv(r: impl BufRead) -> Result<Vec<TraceRow>, CliError> {
    let mut rows = Vec::new();
    let mut header = false;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !header {
            if line.trim() != TRACE_HEADER {
                return Err(malformed(
                    n,
                    format_args!("expected header `{TRACE_HEADER}`"),
                ));
            }
            header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(malformed(n, "expected 5 columns"));
        }
        rows.push(TraceRow {
            t: parse(f[0], n)?,
            k: parse(f[1], n)?,
            value_re: parse(f[2], n)?,
            value_im: parse(f[3], n)?,
            prob: parse(f[4], n)?,
        });
    }
    if !header {
        return Err(malformed(1, "missing header"));
    }
    Ok(rows)
}

pub fn read_trace_json(r: impl BufRead) -> Result<TraceFile, CliError> {
    serde_json::from_reader(r).map_err(|e| CliError::Format(e.to_string()))
}

/// Rebuilds a trace from time-major rows. Strata below the first one in the
/// file are filled with NaN.
pub fn trace_from_rows(rows: &[TraceRow], meta: &TraceMeta) -> Result<WalkTrace, CliError> {
    let first = rows
        .first()
        .ok_or_else(|| CliError::Format("trace has no rows".into()))?;
    let k0 = first.k;
    let per_time = rows
        .iter()
        .take_while(|r| r.t.to_bits() == first.t.to_bits())
        .count();
    if !rows.len().is_multiple_of(per_time) {
        return Err(CliError::Format(
            "ragged trace: every time needs the same strata".into(),
        ));
    }
    let strata = k0 + per_time;
    let mut times = Vec::with_capacity(rows.len() / per_time);
    let mut values = Vec::with_capacity(times.capacity() * strata);
    for chunk in rows.chunks(per_time) {
        let t = chunk[0].t;
        for (j, r) in chunk.iter().enumerate() {
            if r.k != k0 + j || r.t.to_bits() != t.to_bits() {
                return Err(CliError::Format(format!("ragged trace near t = {t}")));
            }
        }
        if times.last().is_some_and(|&last| !(t > last)) {
            return Err(CliError::Format(format!("times not increasing at t = {t}")));
        }
        times.push(t);
        values.extend(std::iter::repeat_n(Complex64::new(f64::NAN, f64::NAN), k0));
        values.extend(chunk.iter().map(|r| Complex64::new(r.value_re, r.value_im)));
    }
    let params = match meta.params {
        Some([a, b, c]) => Some(SpidernetParams::new(a, b, c)?),
        None => None,
    };
    Ok(WalkTrace {
        flavor: meta.flavor.into(),
        params,
        operator: meta.operator.into(),
        times,
        strata,
        values,
        method: meta.method.into(),
        quadrature_order: meta.quadrature_order,
    })
}

/// Reads a trace file, telling JSON from CSV by its first non-blank byte.
/// CSV files carry no metadata, so `fallback` supplies it.
pub fn read_trace(
    mut r: impl BufRead,
    fallback: &TraceMeta,
) -> Result<(WalkTrace, TraceMeta), CliError> {
    let is_json = loop {
        let buf = r.fill_buf()?;
        match buf.iter().position(|b| !b.is_ascii_whitespace()) {
            Some(i) => {
                let json = buf[i] == b'{';
                break json;
            }
            None if buf.is_empty() => return Err(CliError::Format("empty trace file".into())),
            None => {
                let n = buf.len();
                r.consume(n);
            }
        }
    };
    if is_json {
        let file = read_trace_json(r)?;
        let trace = trace_from_rows(&file.rows, &file.meta)?;
        Ok((trace, file.meta))
    } else {
        let rows = read_trace_rows_csv(r)?;
        let trace = trace_from_rows(&rows, fallback)?;
        Ok((trace, fallback.clone()))
    }
}

// ---- reports ----

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub window: [f64; 2],
    pub exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    pub n_points: usize,
}

impl From<DecayFit> for FitReport {
    fn from(f: DecayFit) -> Self {
        Self {
            window: [f.window.0, f.window.1],
            exponent: f.exponent,
            intercept: f.intercept,
            residual: f.residual,
            n_points: f.n_points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleTag {
    FirstMaximum,
    Equipartition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TcReport {
    pub t_c: f64,
    pub value_at_tc: f64,
    pub stratum: usize,
    pub flavor: FlavorArg,
    pub rule: RuleTag,
}

impl From<CharacteristicTime> for TcReport {
    fn from(c: CharacteristicTime) -> Self {
        Self {
            t_c: c.t_c,
            value_at_tc: c.value_at_tc,
            stratum: c.stratum,
            flavor: c.flavor.into(),
            rule: match c.rule {
                TcRule::FirstMaximum => RuleTag::FirstMaximum,
                TcRule::Equipartition => RuleTag::Equipartition,
            },
        }
    }
}
