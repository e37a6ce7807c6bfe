//! `fraclp` binary: merge settings layers (built-in defaults, config file,
//! environment, flags), run one verification campaign, persist the bundle,
//! and map the outcome to an exit code.
//!
//! Exit codes: 0 all checks pass, 1 at least one check fails, 2 bad input
//! (usage, config, or I/O failure before any results exist).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use fraclp_cli::config::{parse_config, resolve, ConventionTag, Resolved, Settings};
use fraclp_cli::error::CliError;
use fraclp_cli::output::{fmt_float, write_run_dir};
use fraclp_cli::run::{defaults, execute, Command};

#[derive(Debug, Parser)]
#[command(name = "fraclp", version, about = "Fractional heat kernel and square-function diagnostics")]
struct Cli {
    /// Flat `key = value` config file; flags override file values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Order of the fractional Laplacian, in (0, 2].
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Smoothing weight t^{beta/alpha} |D|^beta applied under the semigroup.
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Lebesgue exponent for norm-based checks.
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Spatial dimension.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Spatial grid points per axis.
    #[arg(long, global = true)]
    nx: Option<usize>,
    /// Time steps (or quadrature resolution, per command).
    #[arg(long, global = true)]
    nt: Option<usize>,
    /// Base RNG seed; reruns with the same seed reproduce results exactly.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random samples / Monte Carlo paths.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Worker threads (also settable via FRACLP_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Root directory for run bundles.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Kernel normalization for tables: unit-mass `canonical` or `paper`.
    #[arg(long, global = true, value_enum)]
    convention: Option<ConventionArg>,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Canonical,
    Paper,
}

impl From<ConventionArg> for ConventionTag {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Canonical => ConventionTag::Canonical,
            ConventionArg::Paper => ConventionTag::Paper,
        }
    }
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Tabulate the stable kernel and run positivity/decay/envelope checks.
    Kernel,
    /// Verify the L2 square-function identity across time windows.
    VerifyL2,
    /// Estimate the Lp square-function constant on a resolution ladder.
    EstimateConstant,
    /// Check parabolic scaling covariance of the square function.
    Scaling,
    /// Compare the sharp square function against maximal-function bounds.
    Sharp,
    /// Simulate the stochastically forced equation; test the Ito isometry.
    Spde,
}

impl CliCommand {
    fn command(&self) -> Command {
        match self {
            CliCommand::Kernel => Command::Kernel,
            CliCommand::VerifyL2 => Command::VerifyL2,
            CliCommand::EstimateConstant => Command::EstimateConstant,
            CliCommand::Scaling => Command::Scaling,
            CliCommand::Sharp => Command::Sharp,
            CliCommand::Spde => Command::Spde,
        }
    }
}

impl Cli {
    fn settings(&self) -> Settings {
        Settings {
            alpha: self.alpha,
            beta: self.beta,
            p: self.p,
            dim: self.dim,
            nx: self.nx,
            nt: self.nt,
            seed: self.seed,
            samples: self.samples,
            workers: self.workers,
            out: self.out.clone(),
            convention: self.convention.map(ConventionTag::from),
        }
    }
}

fn env_settings() -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Ok(raw) = std::env::var("FRACLP_WORKERS") {
        let workers: usize = raw.trim().parse().map_err(|_| {
            CliError::Usage(format!("FRACLP_WORKERS expects a positive integer, got `{raw}`"))
        })?;
        s.workers = Some(workers);
    }
    Ok(s)
}

fn metadata(cmd: Command, r: &Resolved, wall_ms: u128) -> Vec<(String, String)> {
    let kv = |k: &str, v: String| (k.to_string(), v);
    vec![
        kv("tool", format!("fraclp {}", env!("CARGO_PKG_VERSION"))),
        kv("command", cmd.name().to_string()),
        kv("alpha", fmt_float(r.alpha)),
        kv("beta", fmt_float(r.beta)),
        kv("p", fmt_float(r.p)),
        kv("dim", r.dim.to_string()),
        kv("nx", r.nx.to_string()),
        kv("nt", r.nt.to_string()),
        kv("seed", r.seed.to_string()),
        kv("samples", r.samples.to_string()),
        kv("workers", r.workers.map_or_else(|| "auto".into(), |w| w.to_string())),
        kv("convention", r.convention.as_str().to_string()),
        kv("wall_time_ms", wall_ms.to_string()),
    ]
}

fn try_main(cli: &Cli) -> Result<bool, CliError> {
    let started = Instant::now();
    let cmd = cli.command.command();

    let file_settings = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            parse_config(&text)?
        }
        None => Settings::default(),
    };
    let resolved = resolve(&defaults(cmd), &file_settings, &env_settings()?, &cli.settings());

    if let Some(workers) = resolved.workers {
        if workers == 0 {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        // A failure here means a pool already exists (e.g. under a test
        // harness); the run proceeds on that pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }

    let out = execute(cmd, &resolved)?;
    let dir = write_run_dir(&resolved.out, cmd.name(), &out, &metadata(
        cmd,
        &resolved,
        started.elapsed().as_millis(),
    ))?;

    println!("run bundle: {}", dir.display());
    let summary = std::fs::read_to_string(dir.join("summary.txt"))?;
    print!("{summary}");
    Ok(out.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match try_main(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fraclp: {e}");
            ExitCode::from(2)
        }
    }
}
