//! Command-line front end. Every subcommand resolves its flags into a
//! [`RunConfig`], runs it through [`execute`] and writes a JSON report, plus
//! a CSV table for tabular commands.
//!
//! Exit codes: 0 on success, 2 when a checked invariant is falsified, 1 on
//! usage, input or resource errors.

mod config;
mod execute;
mod schema;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{RunConfig, CACHE_ENV};
pub use execute::{execute, parse_component, Report, CEILING_TOL, VERSION};
pub use schema::{commands, csv_columns, validate_csv, validate_report, SCHEMA_TEXT, SCHEMA_VERSION};

use crate::error::{Error, Result};
use crate::groups::{make_model, Element, GroupModel};
use crate::qmetric::StateSpec;
use crate::util::{C64, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FALSIFIED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fcstar", version, about = "Filtered group algebras, Haagerup-type constants and truncated Connes metrics")]
struct Cli {
    /// Directory for report files.
    #[arg(long, global = true, default_value = "fcstar-out")]
    out: PathBuf,
    /// Sphere cache directory.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Skip the CSV table.
    #[arg(long, global = true)]
    no_csv: bool,
    /// Run a saved config instead of a subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug)]
struct ModelArg {
    /// Group model, e.g. free2, zd(2), heisenberg, cyclic(5), fpc(3,2), dinf.
    #[arg(long)]
    model: String,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 20)]
    starts: usize,
    #[arg(long, default_value_t = 30)]
    iters: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sphere and ball sizes.
    Spheres {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 5)]
        radius: usize,
    },
    /// Growth fit and the cubic growth test.
    Growth {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 12)]
        p_max: usize,
    },
    /// Four-point hyperbolicity defect.
    Delta {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// Sample this many quadruples instead of scanning all.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Best block ratios over all triples up to `--max`.
    HaagerupScan {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 4)]
        max: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Exact divergence witness on Z^2.
    Z2Witness {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Growth inequalities on random elements.
    Inequalities {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 3)]
        top: usize,
        /// Defaults to `--top` plus 3.
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Far-band smoothing bound on random elements.
    Smoothing {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 1)]
        n_cut: usize,
        #[arg(long, default_value_t = 8)]
        radius: usize,
        #[arg(long, default_value_t = 3)]
        top: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Truncation budget (N, K) for a target accuracy.
    Budget {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        c: f64,
    },
    /// Free-product bound and cell structure.
    FreeprodCheck {
        /// `trivial`, `cyclic(p)` or a JSON structure tensor file.
        #[arg(long, default_value = "cyclic(2)")]
        a: String,
        #[arg(long, default_value = "cyclic(2)")]
        b: String,
        #[arg(long, default_value_t = 3)]
        max: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        #[arg(long, default_value_t = 30)]
        iters: usize,
    },
    /// Free-product blocks against group convolution on Z/2 * Z/2.
    CrossValidate {
        #[arg(long, default_value_t = 4)]
        max: usize,
    },
    /// Truncated distances between states.
    Metric {
        #[command(flatten)]
        model: ModelArg,
        /// `trace`, `vector:ELEM=COEF;...` or `character:RE,IM;...`.
        #[arg(long = "state")]
        state: Vec<String>,
        /// JSON file holding a list of states.
        #[arg(long)]
        states: Option<PathBuf>,
        #[arg(long = "big-k", default_value_t = 2)]
        big_k: usize,
        #[arg(long = "big-r", default_value_t = 8)]
        big_r: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        #[arg(long, default_value_t = 400)]
        iters: usize,
        #[arg(long)]
        c: Option<f64>,
    },
}

/// Parses one `--state` value.
pub fn parse_state(model: &GroupModel, spec: &str) -> Result<StateSpec> {
    let spec = spec.trim();
    if spec == "trace" {
        return Ok(StateSpec::Trace);
    }
    let bad = || Error::Parse(format!("bad state '{spec}'"));
    if let Some(rest) = spec.strip_prefix("vector:") {
        let terms = rest
            .split(';')
            .map(|t| {
                let (x, c) = t.split_once('=').ok_or_else(bad)?;
                let x: Element = x.trim().parse()?;
                let c: f64 = c.trim().parse().map_err(|_| bad())?;
                Ok((x, C64::new(c, 0.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        let st = StateSpec::vector_from_terms(model, &terms)?;
        return Ok(st);
    }
    if let Some(rest) = spec.strip_prefix("character:") {
        let phases = rest
            .split(';')
            .map(|p| {
                let (re, im) = p.split_once(',').ok_or_else(bad)?;
                Ok([re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?])
            })
            .collect::<Result<Vec<_>>>()?;
        let st = StateSpec::Character { phases };
        st.validate(model)?;
        return Ok(st);
    }
    Err(bad())
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return RunConfig::from_json(&text);
    }
    let command = cli
        .command
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("a subcommand or --config is required".into()))?;
    let name = match command {
        Command::Spheres { .. } => "spheres",
        Command::Growth { .. } => "growth",
        Command::Delta { .. } => "delta",
        Command::HaagerupScan { .. } => "haagerup-scan",
        Command::Z2Witness { .. } => "z2-witness",
        Command::Inequalities { .. } => "inequalities",
        Command::Smoothing { .. } => "smoothing",
        Command::Budget { .. } => "budget",
        Command::FreeprodCheck { .. } => "freeprod-check",
        Command::CrossValidate { .. } => "cross-validate",
        Command::Metric { .. } => "metric",
    };
    let mut cfg = RunConfig::new(name, cli.seed);
    cfg.csv = !cli.no_csv;
    cfg.cache_dir = cli.cache_dir.clone();
    let search = |cfg: &mut RunConfig, s: &SearchArgs| {
        cfg.trials = Some(s.trials);
        cfg.starts = Some(s.starts);
        cfg.iters = Some(s.iters);
    };
    match command {
        Command::Spheres { model, radius } => {
            cfg.model = Some(model.model.clone());
            cfg.radius = Some(*radius);
        }
        Command::Growth { model, p_max } => {
            cfg.model = Some(model.model.clone());
            cfg.p_max = Some(*p_max);
        }
        Command::Delta { model, radius, sample } => {
            cfg.model = Some(model.model.clone());
            cfg.radius = Some(*radius);
            cfg.exhaustive = Some(sample.is_none());
            cfg.trials = *sample;
        }
        Command::HaagerupScan { model, max, search: s } => {
            cfg.model = Some(model.model.clone());
            cfg.max = Some(*max);
            search(&mut cfg, s);
        }
        Command::Z2Witness { k, n } => {
            cfg.k = Some(*k);
            cfg.n = Some(*n);
        }
        Command::Inequalities { model, c, top, radius, samples } => {
            cfg.model = Some(model.model.clone());
            cfg.c = Some(*c);
            cfg.top = Some(*top);
            cfg.radius = Some(radius.unwrap_or(top + 3));
            cfg.samples = Some(*samples);
        }
        Command::Smoothing { model, n_cut, radius, top, samples, c } => {
            cfg.model = Some(model.model.clone());
            cfg.n_cut = Some(*n_cut);
            cfg.radius = Some(*radius);
            cfg.top = Some(*top);
            cfg.samples = Some(*samples);
            cfg.c = *c;
        }
        Command::Budget { eps, c } => {
            cfg.eps = Some(*eps);
            cfg.c = Some(*c);
        }
        Command::FreeprodCheck { a, b, max, trials, starts, iters } => {
            cfg.components = Some([a.clone(), b.clone()]);
            cfg.max = Some(*max);
            search(&mut cfg, &SearchArgs { trials: *trials, starts: *starts, iters: *iters });
        }
        Command::CrossValidate { max } => cfg.max = Some(*max),
        Command::Metric { model, state, states, big_k, big_r, tol, starts, iters, c } => {
            cfg.model = Some(model.model.clone());
            let group = make_model(model.model.parse()?)?;
            let mut list = match states {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                    serde_json::from_str::<Vec<StateSpec>>(&text)?
                }
                None => vec![],
            };
            for s in state {
                list.push(parse_state(&group, s)?);
            }
            if list.is_empty() {
                return Err(Error::InvalidParameter("metric needs at least one --state".into()));
            }
            cfg.states = Some(list);
            cfg.big_k = Some(*big_k);
            cfg.big_r = Some(*big_r);
            cfg.tol = Some(*tol);
            cfg.starts = Some(*starts);
            cfg.iters = Some(*iters);
            cfg.c = *c;
        }
    }
    Ok(cfg)
}

/// Writes the report files into `dir`, atomically, and returns their paths.
pub fn write_report(dir: &Path, report: &Report) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = vec![];
    let json = dir.join(format!("{}.json", report.command));
    crate::groups::cache::write_atomic(&json, report.json.as_bytes())?;
    paths.push(json);
    if let Some(csv) = &report.csv {
        let path = dir.join(format!("{}.csv", report.command));
        crate::groups::cache::write_atomic(&path, csv.as_bytes())?;
        paths.push(path);
    }
    Ok(paths)
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = build_config(&cli).and_then(|cfg| {
        let report = execute(&cfg)?;
        let paths = write_report(&cli.out, &report)?;
        Ok((report, paths))
    });
    match result {
        Ok((report, paths)) => {
            println!("{}", report.summary);
            for p in paths {
                println!("wrote {}", p.display());
            }
            if report.falsified {
                eprintln!("error: a checked invariant was falsified; see the report");
                EXIT_FALSIFIED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn main_entry() -> i32 {
    run(std::env::args_os())
}
