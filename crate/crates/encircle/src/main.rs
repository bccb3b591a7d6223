use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use encircle::acceptance::{self, random_spacing};
use encircle::commands::{
    cmd_analyze_spectrum, cmd_run, cmd_stability, regenerate_report, REPORT_JSON,
};
use encircle::config::{Overrides, RunConfig};
use encircle::examples;
use encircle::output::report_from_json;
use encircle::{CliError, CliResult};
use encircle_core::formation::FormationSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "encircle",
    version,
    about = "Limit-cycle formation control around a target"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a configuration and write CSV, JSON and SVG outputs.
    Run(RunArgs),
    /// Spectrum of the spacing Laplacian and the stacked consensus matrix.
    AnalyzeSpectrum(SpectrumArgs),
    /// Single-agent characteristic polynomials and Routh arrays.
    Stability(StabilityArgs),
    /// Run the acceptance criteria and print one line per criterion.
    Acceptance(AcceptanceArgs),
    /// Rebuild report.json of a finished run from its trajectory.csv and compare.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file, or one of example1, example2, example3.
    #[arg(long)]
    config: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: OverrideArgs,
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Take the spacings from a config file (or bundled example name).
    #[arg(long, conflicts_with_all = ["d", "n"])]
    config: Option<String>,
    /// "equal", "random", or a comma-separated list of radians.
    #[arg(long, default_value = "equal")]
    d: String,
    /// Number of agents for "equal" and "random".
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Seed for "random".
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    lambda1: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda2: f64,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    sigma: f64,
}

#[derive(Args)]
struct AcceptanceArgs {
    /// Run only these criteria (1-10); all when omitted.
    #[arg(long = "criterion")]
    criteria: Vec<u32>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn load_config(name: &str) -> CliResult<RunConfig> {
    let path = Path::new(name);
    if !path.exists() {
        if let Some(c) = examples::by_name(name) {
            return Ok(c);
        }
    }
    RunConfig::load(path)
}

fn spacing_spec(args: &SpectrumArgs) -> CliResult<FormationSpec> {
    if let Some(name) = &args.config {
        return load_config(name)?.spec();
    }
    let d = match args.d.as_str() {
        "equal" => vec![std::f64::consts::TAU / args.n as f64; args.n],
        "random" => random_spacing(&mut ChaCha8Rng::seed_from_u64(args.seed), args.n, 0.1, 1.0),
        list => list
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Config(format!("--d: {x:?}: {e}")))
            })
            .collect::<CliResult<_>>()?,
    };
    let n = d.len();
    Ok(FormationSpec {
        d,
        radii: vec![1.0; n],
        omega: 0.0,
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run(a) => {
            let mut config = load_config(&a.config)?;
            config.apply(&Overrides {
                seed: a.overrides.seed,
                dt: a.overrides.dt,
                t_end: a.overrides.t_end,
            });
            let report = cmd_run(&config, &a.out)?;
            println!("{}", encircle::output::report_to_json(&report)?);
            println!("outputs written to {}", a.out.display());
        }
        Command::AnalyzeSpectrum(a) => {
            let spec = spacing_spec(&a)?;
            print!("{}", cmd_analyze_spectrum(&spec, a.lambda1, a.lambda2)?);
        }
        Command::Stability(a) => print!("{}", cmd_stability(a.omega, a.mu, a.radius, a.sigma)?),
        Command::Acceptance(a) => {
            let ids = if a.criteria.is_empty() {
                acceptance::CRITERIA.to_vec()
            } else {
                a.criteria
            };
            let mut failed = 0;
            for id in ids {
                let r = acceptance::run_criterion(id)
                    .ok_or_else(|| CliError::Config(format!("no criterion {id}")))?;
                println!("{r}");
                failed += usize::from(!r.passed);
            }
            if failed > 0 {
                return Err(CliError::CheckFailed(format!("{failed} criteria failed")));
            }
        }
        Command::Report(a) => {
            let rebuilt = regenerate_report(&a.out)?;
            let saved = report_from_json(&std::fs::read_to_string(a.out.join(REPORT_JSON))?)?;
            println!("{}", encircle::output::report_to_json(&rebuilt)?);
            if rebuilt != saved {
                return Err(CliError::CheckFailed(
                    "regenerated report differs from report.json".into(),
                ));
            }
            println!("report.json matches the trajectory");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed(text)) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
