use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use powerbasket_cli::commands::{self, CommandOutput};
use powerbasket_cli::config::{EngineChoice, Format, Overrides};
use powerbasket_cli::reproduce::{self, ReproduceOptions};
use powerbasket_cli::{CliError, RunConfig};

/// Design and evaluate single-stage basket trials with information borrowing.
#[derive(Parser)]
#[command(name = "powerbasket", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate the decision threshold of every design to the target FWER.
    Calibrate(RunArgs),
    /// Operating characteristics of every design under every scenario.
    Oc(RunArgs),
    /// Grid search over tuning parameters by mean ECD.
    Tune(RunArgs),
    /// Rerun the built-in comparison study and diff it against the published values.
    ReproducePaper(ReproduceArgs),
    /// Print a starter config for the built-in study.
    Example,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Exact,
    Sim,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Simulated replicates per scenario.
    #[arg(long, value_name = "N")]
    sims: Option<usize>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Simulated replicates for MML, JSD-Global and BMA.
    #[arg(long, value_name = "N", default_value_t = powerbasket::presets::N_SIMS)]
    sims: usize,
    #[arg(long, value_name = "U64", default_value_t = powerbasket::presets::SEED)]
    seed: u64,
}

const EXAMPLE: &str = r#"# Built-in trial (4 baskets of 20, p0 = 0.15) and scenarios.
preset = "paper-table-1"
alpha = 0.05
lambda_digits = 3

[engine]
kind = "exact"

[output]
dir = "out"
format = "csv"

[[designs]]
family = "cpp"
a = 2.0
b = 1.5

[[designs]]
family = "fujikawa"
epsilon = 1.5
tau = 0.0

[[grids]]
family = "cpp"
preset = "paper-grids"
"#;

fn load(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut run = RunConfig::load(&args.config)?;
    let overrides = Overrides {
        engine: args.engine.engine.map(|e| match e {
            EngineArg::Exact => EngineChoice::Exact,
            EngineArg::Sim => EngineChoice::Sim,
        }),
        sims: args.engine.sims,
        seed: args.engine.seed,
        out: args.out.clone(),
        format: args.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
    };
    overrides.apply(&mut run)?;
    Ok(run)
}

fn report(out: CommandOutput) {
    print!("{}", out.summary);
    for f in out.files {
        eprintln!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Calibrate(args) => report(commands::calibrate(&load(&args)?)?),
        Command::Oc(args) => report(commands::oc(&load(&args)?)?),
        Command::Tune(args) => report(commands::tune(&load(&args)?)?),
        Command::ReproducePaper(args) => {
            if args.sims == 0 {
                return Err(CliError::Config("--sims must be positive".into()));
            }
            let opts = ReproduceOptions {
                out: args.out,
                n_sims: args.sims,
                seed: args.seed,
            };
            let rep = reproduce::build_report(&opts)?;
            let files = reproduce::write_report(&rep, &opts.out)?;
            print!("{}", reproduce::summary(&rep));
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            if rep.failures() > 0 {
                return Err(CliError::ReproductionDiff(format!(
                    "{} of {} cells out of tolerance",
                    rep.failures(),
                    rep.cells.len()
                )));
            }
        }
        Command::Example => print!("{EXAMPLE}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
