//! Argument parsing and dispatch for the `spidernet` binary.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use spidernet_core::decay::MaximaWindow;

use crate::commands::{self, FitOptions, TcOptions, DEFAULT_EPSILON};
use crate::config::{
    config_file_args, FlavorArg, Format, OperatorArg, RunConfig, Spacing, StrataRange,
};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "spidernet",
    version,
    about = "Continuous-time walks on spidernet lattices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral density on a grid over its support, atoms as comment lines.
    Density(RunArgs),
    /// Stratum amplitudes or probabilities on a time grid.
    Walk(RunArgs),
    /// Spectral method against the truncated-graph oracle or closed forms.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Drop grid times past the light-cone bound instead of failing.
        #[arg(long)]
        clip_light_cone: bool,
    },
    /// Power-law fit of a stratum probability (classical) or its envelope (quantum).
    Fit {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Characteristic time of a stratum.
    Tc {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        tc: TcArgs,
    },
    /// Edge list of the truncated lattice.
    Graph(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub a: Option<u32>,
    #[arg(long)]
    pub b: Option<u32>,
    #[arg(long)]
    pub c: Option<u32>,
    /// Normalized a -> infinity family (semicircle measure) instead of S(a,b,c).
    #[arg(long, conflicts_with_all = ["a", "b", "c"])]
    pub limit: bool,
    #[arg(long, value_enum, default_value = "adjacency")]
    pub operator: OperatorArg,
    #[arg(long, value_enum, default_value = "quantum")]
    pub flavor: FlavorArg,
    /// Depth of the truncated graph (oracle, graph export, equipartition).
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tmin: f64,
    #[arg(long, default_value_t = 10.0)]
    pub tmax: f64,
    /// Grid points in time, or in x for `density`.
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "lin")]
    pub spacing: Spacing,
    /// `K`, `A..B` or `A..=B`.
    #[arg(long, default_value = "0..8")]
    pub strata: StrataRange,
    /// Quadrature tolerance; the pass threshold for `compare`.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use the Bessel closed forms (S(2,2,1) and the limit family).
    #[arg(long)]
    pub closed_form: bool,
    /// Free text recorded in JSON metadata.
    #[arg(long)]
    pub stamp: Option<String>,
    /// File of `key=value` lines with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    pub fn to_config(&self) -> Result<RunConfig, CliError> {
        let params = match (self.limit, self.a, self.b, self.c) {
            (true, ..) => None,
            (false, Some(a), Some(b), Some(c)) => Some([a, b, c]),
            _ => return Err(CliError::Usage("give --a --b --c or --limit".into())),
        };
        let cfg = RunConfig {
            params,
            operator: self.operator,
            flavor: self.flavor,
            depth: self.depth,
            tmin: self.tmin,
            tmax: self.tmax,
            steps: self.steps,
            spacing: self.spacing,
            strata: self.strata,
            tol: self.tol,
            format: self.format,
            out: self.out.clone(),
            closed_form: self.closed_form,
            stamp: self.stamp.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Trace file (CSV or JSON) to fit instead of computing one.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub stratum: usize,
    #[arg(long, requires = "window_hi")]
    pub window_lo: Option<f64>,
    #[arg(long, requires = "window_lo")]
    pub window_hi: Option<f64>,
    /// Leading envelope maxima skipped by the default quantum window.
    #[arg(long, default_value_t = MaximaWindow::default().skip)]
    pub skip_maxima: usize,
    /// Envelope maxima spanned by the default quantum window.
    #[arg(long, default_value_t = MaximaWindow::default().count)]
    pub maxima: usize,
}

#[derive(Debug, Args)]
pub struct TcArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub stratum: usize,
    /// Classical: evolve the depth-`--depth` graph and use the equipartition rule.
    #[arg(long)]
    pub equipartition: bool,
    /// Vertex count N for the equipartition rule on loaded traces.
    #[arg(long)]
    pub graph_size: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

/// Splices the contents of `--config FILE` in front of the explicit flags so
/// that later occurrences override it.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut out = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let p = it
                .next()
                .ok_or_else(|| CliError::Usage("--config needs a path".into()))?;
            path = Some(PathBuf::from(p));
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else {
            out.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(out);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let extra = config_file_args(&text)?;
    // Program name, then the subcommand; file flags go right after it.
    let at = out.len().min(2);
    out.splice(at..at, extra.into_iter().map(OsString::from));
    Ok(out)
}

/// Writes the finished output in one piece, so failures leave no partial file.
fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    if bytes.is_empty() {
        return Ok(());
    }
    match &cfg.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            w.write_all(bytes)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            w.write_all(bytes)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let mut buf = Vec::new();
    let (cfg, result) = match command {
        Command::Density(args) => {
            let cfg = args.to_config()?;
            let r = commands::cmd_density(&cfg, &mut buf);
            (cfg, r)
        }
        Command::Walk(args) => {
            let cfg = args.to_config()?;
            let r = commands::cmd_walk(&cfg, &mut buf);
            (cfg, r)
        }
        Command::Compare {
            run,
            clip_light_cone,
        } => {
            let cfg = run.to_config()?;
            let r = commands::cmd_compare(&cfg, clip_light_cone, &mut buf).map(drop);
            (cfg, r)
        }
        Command::Fit { run, fit } => {
            let cfg = run.to_config()?;
            let opts = FitOptions {
                stratum: fit.stratum,
                window: fit.window_lo.zip(fit.window_hi),
                maxima: MaximaWindow {
                    skip: fit.skip_maxima,
                    count: fit.maxima,
                },
            };
            let r = commands::cmd_fit(&cfg, &opts, fit.input.as_deref(), &mut buf).map(drop);
            (cfg, r)
        }
        Command::Tc { run, tc } => {
            let cfg = run.to_config()?;
            let opts = TcOptions {
                stratum: tc.stratum,
                equipartition: tc.equipartition,
                graph_size: tc.graph_size,
                epsilon: tc.epsilon,
            };
            let r = commands::cmd_tc(&cfg, &opts, tc.input.as_deref(), &mut buf).map(drop);
            (cfg, r)
        }
        Command::Graph(args) => {
            let cfg = args.to_config()?;
            let r = commands::cmd_graph(&cfg, &mut buf);
            (cfg, r)
        }
    };
    emit(&cfg, &buf)?;
    result
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = match expand_config(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("spidernet: {e}");
            return e.exit_code();
        }
    };
    let command = Cli::command()
        .args_override_self(true)
        .mut_subcommands(|s| s.args_override_self(true));
    let parsed = command
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("spidernet: {e}");
            e.exit_code()
        }
    }
}
