use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vortlab::diagnostics::HolderOptions;
use vortlab::exponents::{parse_rational, Exponent, Q};
use vortlab::io::RunConfig;
use vortlab_cli::diagnose::{diagnose, DiagnoseOptions};
use vortlab_cli::exponents::{classify_report, scan_report, tuple_report};
use vortlab_cli::simulate::simulate;
use vortlab_cli::verify::{run_suite, Suite, VerifyOptions};
use vortlab_cli::{exit, CliError, CliResult};

#[derive(Parser)]
#[command(name = "vortlab", version, about = "Spectral Navier-Stokes runs, vorticity-direction diagnostics and exponent scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation from a TOML config, writing timeseries.csv and checkpoints.
    Simulate { config: PathBuf, out_dir: PathBuf },
    /// Hölder fit and Riesz bound for a checkpoint.
    Diagnose(DiagnoseArgs),
    /// Exact exponent calculus.
    Exponents {
        #[command(subcommand)]
        command: ExponentsCommand,
    },
    /// Run oracle verification suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        images: u32,
    },
}

#[derive(Args)]
struct DiagnoseArgs {
    checkpoint: PathBuf,
    /// Directory for holder.csv and summary.toml.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 200_000)]
    n_pairs: usize,
    #[arg(long, default_value_t = 0.95)]
    quantile: f64,
    #[arg(long, default_value_t = 12)]
    n_bins: usize,
    #[arg(long)]
    k_threshold: Option<f64>,
    #[arg(long)]
    delta_max: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    riesz_beta: f64,
}

#[derive(Subcommand)]
enum ExponentsCommand {
    /// Exponent tuples at r (natural weights and feasible-polygon vertices).
    Tuple {
        #[arg(value_parser = rational)]
        r: Q,
    },
    /// Attainable β over a grid of r.
    Scan {
        #[arg(long = "r", value_delimiter = ',', required = true, value_parser = rational)]
        r: Vec<Q>,
        #[arg(long, default_value_t = 12)]
        denom: i64,
        /// Also report the β range with the weight constraints dropped.
        #[arg(long)]
        unconstrained: bool,
    },
    /// Region of L^s(L^q) velocity, or L^s(L^r) vorticity with --vorticity.
    Classify {
        #[arg(value_parser = exponent)]
        s: Exponent,
        #[arg(value_parser = exponent)]
        q: Exponent,
        #[arg(long)]
        vorticity: bool,
    },
}

fn rational(s: &str) -> Result<Q, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn exponent(s: &str) -> Result<Exponent, String> {
    s.parse::<Exponent>().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { config, out_dir } => {
            let cfg = RunConfig::load(&config)?;
            let out = simulate(&cfg, &out_dir)?;
            println!("wrote {} records to {}", out.records, out.timeseries.display());
            for cp in &out.checkpoints {
                println!("checkpoint {}", cp.display());
            }
        }
        Command::Diagnose(a) => {
            let opts = DiagnoseOptions {
                holder: HolderOptions {
                    k_threshold: a.k_threshold,
                    delta_max: a.delta_max,
                    n_pairs: a.n_pairs,
                    quantile: a.quantile,
                    n_bins: a.n_bins,
                    seed: a.seed,
                },
                riesz_beta: a.riesz_beta,
            };
            let (summary, _) = diagnose(&a.checkpoint, &opts, a.out.as_deref())?;
            let text = toml::to_string(&summary).map_err(|e| CliError::Usage(e.to_string()))?;
            print!("{text}");
        }
        Command::Exponents { command } => {
            let text = match command {
                ExponentsCommand::Tuple { r } => tuple_report(r)?,
                ExponentsCommand::Scan { r, denom, unconstrained } => scan_report(&r, denom, unconstrained)?,
                ExponentsCommand::Classify { s, q, vorticity } => classify_report(s, q, vorticity),
            };
            println!("{text}");
        }
        Command::Verify { suite, n, images } => {
            let checks = run_suite(suite, &VerifyOptions { n, images })?;
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            println!("{} passed, {failed} failed", checks.len() - failed);
            if failed > 0 {
                return Err(CliError::VerificationFailed(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
