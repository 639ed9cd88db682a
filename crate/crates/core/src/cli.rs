//! The `rifs` command line: subcommands over JSON inputs, JSON or CSV out.
//!
//! Exit status is 0 on success, 1 on a domain error (reported on standard
//! error as `{"error": code, "message": text}`), and 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::approx::{minimizing_sequence, project, CandidateSet, HULL_TOL};
use crate::deciders::{check, CHECKS};
use crate::error::{Error, Result};
use crate::harness::{
    dukm_sequence_run, fundamental_limits, rotundity_probe, run_core_suite, run_kmono_suite, skm_probe,
    TrialConfig,
};
use crate::io::{load, read_arg, to_json};
use crate::norms::{fundamental_function, OrliczFlavor, SpaceHandle};
use crate::orlicz::OrliczSpec;
use crate::rearrange::{hlp_dominates, hlp_violation, default_hlp_tol, maximal_curve, rearrange};
use crate::step::{Alpha, StepFunction};
use crate::weight::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Curve {
    Star,
    Starstar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Core,
    Kmono,
    Dukm,
    Limits,
    Rotundity,
    Skm,
}

#[derive(Debug, Parser)]
#[command(name = "rifs", version, about = "Rearrangements, majorization and norms of step functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decreasing rearrangement of a step function.
    Rearrange {
        /// Step function (inline JSON or path).
        #[arg(long = "in")]
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Sample x* or x** on a grid.
    Maximal {
        #[arg(long = "in")]
        input: String,
        #[arg(long, value_enum, default_value_t = Curve::Starstar)]
        what: Curve,
        /// Comma-separated increasing grid.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Whether x ≺ y (x** <= y** everywhere).
    Dominates {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Absolute tolerance; defaults to 1e-12 relative to y's scale.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Norm of a step function in a space.
    Norm {
        #[arg(long)]
        space: String,
        #[arg(long = "in")]
        input: String,
    },
    /// Fundamental function φ(t) = ‖χ_(0,t)‖.
    Fundamental {
        #[arg(long)]
        space: String,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a structural decider.
    Check {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(CHECKS))]
        name: String,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Best approximation from a candidate set.
    Project {
        #[arg(long)]
        space: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        candidates: String,
        /// Optimize over the convex hull of the candidates.
        #[arg(long)]
        hull: bool,
        #[arg(long, default_value_t = HULL_TOL)]
        tol: f64,
        /// Write the minimizing sequence (iterate, gap) as CSV to this path.
        #[arg(long)]
        trace_csv: Option<String>,
        #[arg(long, default_value_t = 20)]
        trace_len: usize,
    },
    /// Randomized property probes and counterexample constructions.
    Verify {
        #[arg(value_enum)]
        property: Property,
        #[arg(long)]
        space: Option<String>,
        #[arg(long, env = "RIFS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        jobs: Option<usize>,
        /// Largest n of the sequence table.
        #[arg(long, default_value_t = 50)]
        n_max: usize,
        /// Cells of the rotundity grid.
        #[arg(long, default_value_t = 8)]
        dim: usize,
        /// Write the sequence table as CSV to this path.
        #[arg(long)]
        csv: Option<String>,
    },
}

/// A space given whole, or assembled from its parts.
#[derive(Debug, clap::Args)]
pub struct SpaceArgs {
    #[arg(long, conflicts_with_all = ["p", "weight", "psi"])]
    pub space: Option<String>,
    #[arg(long, requires = "weight")]
    pub p: Option<f64>,
    /// Weight for Γ_{p,w}.
    #[arg(long)]
    pub weight: Option<String>,
    /// Orlicz function, Luxemburg norm.
    #[arg(long, conflicts_with = "weight")]
    pub psi: Option<String>,
    #[arg(long, default_value = "inf")]
    pub alpha: String,
}

fn parse_alpha(s: &str) -> Result<Alpha> {
    match s {
        "inf" => Ok(Alpha::Infinite),
        "1" => Ok(Alpha::Unit),
        other => Err(Error::Domain(format!("alpha must be \"1\" or \"inf\", got {other:?}"))),
    }
}

impl SpaceArgs {
    fn resolve(&self) -> Result<SpaceHandle> {
        let alpha = parse_alpha(&self.alpha)?;
        if let Some(s) = &self.space {
            return SpaceHandle::from_json(&read_arg(s)?);
        }
        if let Some(w) = &self.weight {
            let p = self.p.ok_or_else(|| Error::Domain("--weight needs --p".into()))?;
            let w: WeightSpec = load(w)?;
            return SpaceHandle::gamma(p, w, alpha);
        }
        if let Some(psi) = &self.psi {
            let psi: OrliczSpec = load(psi)?;
            return Ok(SpaceHandle::orlicz(psi, OrliczFlavor::Luxemburg, alpha));
        }
        Err(Error::Domain("give --space, --p with --weight, or --psi".into()))
    }
}

/// `x*` or `x**` sampled on an increasing grid.
pub fn curve_values(x: &StepFunction, what: Curve, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::Domain("grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Domain("grid must be finite, nonnegative and increasing".into()));
    }
    Ok(match what {
        Curve::Star => {
            let s = rearrange(x);
            grid.iter().map(|&t| s.value_at(t)).collect()
        }
        Curve::Starstar => {
            let c = maximal_curve(x);
            grid.iter().map(|&t| c.eval(t)).collect()
        }
    })
}

/// Two-column CSV `t,value` of `x*` or `x**` on an increasing grid.
pub fn emit_curve(x: &StepFunction, what: Curve, grid: &[f64]) -> Result<String> {
    let values = curve_values(x, what, grid)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t", "value"]).map_err(csv_err)?;
    for (t, v) in grid.iter().zip(&values) {
        w.serialize((t, v)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn pieces_csv(f: &StepFunction) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t0", "t1", "v"]).map_err(csv_err)?;
    for p in f.pieces() {
        w.serialize((p.t0, p.t1, p.v)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn write_file(path: &str, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{path}: {e}")))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Domain(e.to_string())),
    }
}

/// Runs one parsed command and returns what goes to standard output.
pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Rearrange { input, format } => {
            let x: StepFunction = load(&input)?;
            let s = rearrange(&x);
            match format {
                Format::Json => Ok(to_json(&s)),
                Format::Csv => pieces_csv(&s),
            }
        }
        Command::Maximal {
            input,
            what,
            grid,
            format,
        } => {
            let x: StepFunction = load(&input)?;
            match format {
                Format::Csv => emit_curve(&x, what, &grid),
                Format::Json => Ok(json!({"t": grid, "value": curve_values(&x, what, &grid)?}).to_string()),
            }
        }
        Command::Dominates { x, y, tol } => {
            let (x, y): (StepFunction, StepFunction) = (load(&x)?, load(&y)?);
            if x.alpha() != y.alpha() {
                return Err(Error::AlphaMismatch("x and y live on different domains".into()));
            }
            let tol = tol.unwrap_or_else(|| default_hlp_tol(&y));
            let violation = hlp_violation(&x, &y, tol).map(|(t, d)| json!({"t": t, "excess": d}));
            Ok(json!({"dominates": hlp_dominates(&x, &y, tol), "violation": violation}).to_string())
        }
        Command::Norm { space, input } => {
            let space = SpaceHandle::from_json(&read_arg(&space)?)?;
            let x: StepFunction = load(&input)?;
            Ok(json!({"norm": space.norm(&x)?}).to_string())
        }
        Command::Fundamental { space, t, format } => {
            let space = SpaceHandle::from_json(&read_arg(&space)?)?;
            let phi = t
                .iter()
                .map(|&t| fundamental_function(&space, t))
                .collect::<Result<Vec<f64>>>()?;
            match format {
                Format::Json => Ok(json!({"t": t, "phi": phi}).to_string()),
                Format::Csv => {
                    let mut out = String::from("t,phi\n");
                    for (a, b) in t.iter().zip(&phi) {
                        out.push_str(&format!("{a},{b}\n"));
                    }
                    Ok(out)
                }
            }
        }
        Command::Check { name, space } => Ok(to_json(&check(&name, &space.resolve()?)?)),
        Command::Project {
            space,
            target,
            candidates,
            hull,
            tol,
            trace_csv,
            trace_len,
        } => {
            let space = SpaceHandle::from_json(&read_arg(&space)?)?;
            let x: StepFunction = load(&target)?;
            let set: CandidateSet = load(&candidates)?;
            let set = if hull && !set.is_hull() {
                CandidateSet::new(set.members().to_vec(), true, set.is_rearrangement_closed())?
            } else {
                set
            };
            let res = project(&x, &set, &space, tol)?;
            if let Some(path) = trace_csv {
                let seq = minimizing_sequence(&x, &set, &space, trace_len)?;
                let mut text = String::from("k,gap,residual_norm\n");
                for (k, s) in seq.iter().enumerate() {
                    text.push_str(&format!("{k},{},{}\n", s.gap, space.norm(&s.residual)?));
                }
                write_file(&path, &text)?;
            }
            Ok(to_json(&res))
        }
        Command::Verify {
            property,
            space,
            seed,
            trials,
            tolerance,
            jobs,
            n_max,
            dim,
            csv,
        } => {
            let mut cfg = TrialConfig::new(seed, trials);
            if let Some(t) = tolerance {
                cfg.tolerance = t;
            }
            let space = || -> Result<SpaceHandle> {
                let s = space
                    .as_deref()
                    .ok_or_else(|| Error::Domain(format!("verify {property:?} needs --space")))?;
                SpaceHandle::from_json(&read_arg(s)?)
            };
            match property {
                Property::Core => Ok(to_json(&with_jobs(jobs, || run_core_suite(&cfg))??)),
                Property::Kmono => {
                    let s = space()?;
                    Ok(to_json(&with_jobs(jobs, || run_kmono_suite(&s, &cfg))??))
                }
                Property::Dukm => {
                    let s = space()?;
                    let table = with_jobs(jobs, || dukm_sequence_run(&s, n_max))??;
                    if let Some(path) = csv {
                        write_file(&path, &table.to_csv()?)?;
                    }
                    Ok(to_json(&table))
                }
                Property::Limits => Ok(to_json(&fundamental_limits(&space()?)?)),
                Property::Rotundity => {
                    let s = space()?;
                    Ok(to_json(&with_jobs(jobs, || rotundity_probe(&s, dim, &cfg))??))
                }
                Property::Skm => {
                    let s = space()?;
                    Ok(to_json(&with_jobs(jobs, || skm_probe(&s, &cfg))??))
                }
            }
        }
    }
}

/// Parses `args`, runs the command, prints, and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            if !out.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            0
        }
        Err(e) => {
            eprintln!("{}", json!({"error": e.code(), "message": e.to_string()}));
            1
        }
    }
}
