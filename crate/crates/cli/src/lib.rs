//! `coorbit` command-line front end.
//!
//! ```text
//! coorbit embed        --config c.toml --input x.csv [--output e.csv]
//! coorbit dist         --config c.toml --x a.csv --y b.csv [--output d.csv]
//! coorbit lipschitz    --config c.toml [--seed S] [--trials PAIRS] [--output r.json]
//! coorbit project      --config c.toml --input e.csv [--q Q] [--seed S] [--output p.csv]
//! coorbit inject-check --config c.toml [--trials T] [--seed S] [--q Q] [--tol TOL]
//! coorbit selftest     --config c.toml [--trials T] [--seed S]
//! ```
//!
//! Exit status is 0 on success, 1 for usage, configuration or input errors and
//! 2 for runtime failures.

mod config;
mod error;
mod io;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use coorbit::lipschitz::enumeration_size;
use coorbit::projection::random_projection_with_tol;
use coorbit::{check_injectivity, estimate_lower_bound, quotient_distance, run_invariant_suite, ProjectionMap};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use config::{LoadedConfig, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "coorbit", version, about = "Coorbit embeddings of finite group actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for batch processing.
    #[arg(long)]
    threads: Option<usize>,
    /// CSV files carry a header row.
    #[arg(long)]
    header: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embed each row of a CSV file.
    Embed {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Quotient distance and aligning element for paired rows.
    Dist {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Upper bounds and a sampled lower Lipschitz estimate, as JSON.
    Lipschitz {
        #[command(flatten)]
        common: Common,
        /// Overrides the sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the number of sampled pairs.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Apply a random linear projection to embedding rows.
    Project {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        /// Output dimension (default 2d).
        #[arg(long)]
        q: Option<usize>,
        /// Overrides the projection seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Search for pairs the (projected) embedding fails to separate.
    InjectCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output dimension; 0 checks the unprojected embedding.
        #[arg(long)]
        q: Option<usize>,
        /// Collision threshold relative to `1 + ‖Φ(x)‖`.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Sampled structural invariants of level sets and gaps.
    Selftest {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Embed { common, .. }
            | Command::Dist { common, .. }
            | Command::Lipschitz { common, .. }
            | Command::Project { common, .. }
            | Command::InjectCheck { common, .. }
            | Command::Selftest { common, .. } => common,
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter("COORBIT_LOG");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("coorbit: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command) -> Result<(), CliError> {
    let threads = cmd.common().threads;
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            pool.install(|| dispatch(cmd))
        }
        None => dispatch(cmd),
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    let loaded = LoadedConfig::load(&cmd.common().config)?;
    let cfg = loaded.coorbit()?;
    log::info!(
        "group {} of order {} on R^{}, {} windows, embedding dimension {}",
        cfg.group().label(),
        cfg.group().order(),
        cfg.dim(),
        cfg.num_windows(),
        cfg.embedding_dim()
    );
    match cmd {
        Command::Embed { common, input } => {
            let xs = io::read_rows(&input, common.header, Some(cfg.dim()))?;
            let out = cfg.embed_batch(&xs)?;
            let header = common.header.then(|| {
                cfg.coordinates()
                    .map(|(i, j)| format!("w{}_r{}", i + 1, j + 1))
                    .collect()
            });
            io::write_rows(io::open_output(common.output.as_deref())?, header, &out)
        }
        Command::Dist { common, x, y } => {
            let xs = io::read_rows(&x, common.header, Some(cfg.dim()))?;
            let ys = io::read_rows(&y, common.header, Some(cfg.dim()))?;
            if xs.len() != ys.len() {
                return Err(CliError::Input(format!(
                    "--x has {} rows but --y has {}",
                    xs.len(),
                    ys.len()
                )));
            }
            let rows = xs
                .par_iter()
                .zip(&ys)
                .map(|(a, b)| {
                    let r = quotient_distance(cfg.group(), a, b)?;
                    Ok(vec![r.distance.to_string(), r.aligner.to_string()])
                })
                .collect::<Result<Vec<_>, coorbit::Error>>()?;
            let header = common
                .header
                .then(|| vec!["distance".to_string(), "aligner".to_string()]);
            io::write_rows(io::open_output(common.output.as_deref())?, header, &rows)
        }
        Command::Lipschitz {
            common,
            seed,
            trials,
        } => {
            let mut plan = loaded.run.sampling.plan();
            if let Some(s) = seed {
                plan.seed = s;
            }
            if let Some(t) = trials {
                plan.pairs = t;
            }
            let report = estimate_lower_bound(&cfg, &plan)?;
            let doc = LipschitzDocument {
                config_sha256: config_hash(&loaded.bytes),
                group: cfg.group().label().to_string(),
                order: cfg.group().order(),
                dim: cfg.dim(),
                embedding_dim: cfg.embedding_dim(),
                enumeration_size: enumeration_size(&cfg),
                report,
            };
            io::write_json(io::open_output(common.output.as_deref())?, &doc)
        }
        Command::Project {
            common,
            input,
            q,
            seed,
        } => {
            let rows = io::read_rows(&input, common.header, Some(cfg.embedding_dim()))?;
            let proj = projection(&loaded, &cfg, q, seed)?
                .ok_or_else(|| CliError::Usage("--q must be positive".into()))?;
            let out = rows
                .par_iter()
                .map(|r| proj.apply(r))
                .collect::<Result<Vec<_>, _>>()?;
            let header = common
                .header
                .then(|| (1..=proj.rows).map(|k| format!("y{k}")).collect());
            io::write_rows(io::open_output(common.output.as_deref())?, header, &out)
        }
        Command::InjectCheck {
            common,
            trials,
            seed,
            q,
            tol,
        } => {
            let proj = projection(&loaded, &cfg, q, None)?;
            let report = check_injectivity(&cfg, proj.as_ref(), trials, seed, tol)?;
            log::info!("{} violations in {} trials", report.violations, trials);
            io::write_json(io::open_output(common.output.as_deref())?, &report)
        }
        Command::Selftest {
            common,
            trials,
            seed,
        } => {
            let checks = run_invariant_suite(&cfg, trials, seed)?;
            let mut out = io::open_output(common.output.as_deref())?;
            let write_err = |e: std::io::Error| CliError::Runtime(format!("write failed: {e}"));
            for c in &checks {
                let status = if c.passed() { "PASS" } else { "FAIL" };
                writeln!(out, "{status} {} checks={} violations={}", c.name, c.checks, c.violations)
                    .map_err(write_err)?;
                for ex in &c.examples {
                    writeln!(out, "  {ex}").map_err(write_err)?;
                }
            }
            out.flush().map_err(write_err)?;
            let failed = checks.iter().filter(|c| !c.passed()).count();
            if failed > 0 {
                return Err(CliError::Runtime(format!("{failed} invariant checks failed")));
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct LipschitzDocument {
    config_sha256: String,
    group: String,
    order: usize,
    dim: usize,
    embedding_dim: usize,
    enumeration_size: f64,
    report: coorbit::LipschitzReport,
}

fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Projection from `--q`/`--seed`, then the `[projection]` section, then `q = 2d`.
/// `q = 0` means no projection.
fn projection(
    loaded: &LoadedConfig,
    cfg: &coorbit::CoorbitConfig,
    q: Option<usize>,
    seed: Option<u64>,
) -> Result<Option<ProjectionMap>, CliError> {
    let section = loaded.run.projection.clone().unwrap_or_default();
    let q = q.or(section.q).unwrap_or(2 * cfg.dim());
    if q == 0 {
        return Ok(None);
    }
    let seed = seed.unwrap_or(section.seed);
    let proj = random_projection_with_tol(cfg.embedding_dim(), q, seed, loaded.run.tolerances.svd)?;
    Ok(Some(proj))
}

/// Runs `run` on a path-like argument list; convenience for tests.
pub fn run_args(args: &[&str]) -> i32 {
    run(std::iter::once("coorbit").chain(args.iter().copied()))
}
