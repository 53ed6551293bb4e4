use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use parima::ErrorClass;
use parima_cli::commands::{self, BenchKind};
use parima_cli::config::{load_file, RunConfig};
use parima_cli::error::{exit_code, ErrorReport};
use parima_cli::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ErrorFormat {
    Text,
    Json,
}

/// ARIMA forecasting with a parallel AIC grid search.
#[derive(Parser)]
#[command(name = "parima", version)]
struct Cli {
    /// JSON config file with the same keys as the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// How errors are reported on stderr.
    #[arg(long, global = true, value_enum, default_value = "text")]
    errors: ErrorFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an ARIMA(p,d,q) path.
    Simulate(RunConfig),
    /// Outlier masking, gap filling, decomposition, scaling and differencing.
    Preprocess(RunConfig),
    /// Fit one ARIMA order and save the model.
    Fit(RunConfig),
    /// Forecast from a saved model or from a fresh fit.
    Forecast(RunConfig),
    /// AIC grid search over (p,d,q) on a worker pool.
    Gridsearch(RunConfig),
    /// Rolling-origin cross-validation and residual diagnostics.
    Validate(RunConfig),
    /// Scaling experiments.
    #[command(subcommand)]
    Benchmark(Bench),
}

#[derive(Subcommand)]
enum Bench {
    /// Sequential vs parallel grid search across series sizes.
    SizeSweep(RunConfig),
    /// Fixed size, growing worker count.
    Strong(RunConfig),
    /// Size growing with the worker count.
    Weak(RunConfig),
    /// Batched segment fits across model orders.
    OrderSweep(RunConfig),
}

fn report(err: &CliError, format: ErrorFormat) -> ExitCode {
    let rep = ErrorReport::from(err);
    match format {
        ErrorFormat::Json => eprintln!("{}", serde_json::to_string(&rep).expect("serializable")),
        ErrorFormat::Text => eprintln!("error: {err}"),
    }
    ExitCode::from(rep.exit_code as u8)
}

fn wants_json_errors() -> bool {
    let args: Vec<String> = std::env::args().collect();
    args.iter().any(|a| a == "--errors=json") || args.windows(2).any(|w| w[0] == "--errors" && w[1] == "json")
}

fn run(cli: Cli) -> Result<String, CliError> {
    let file = cli.config.as_deref().map(load_file).transpose()?;
    let (name, flags, kind) = match cli.command {
        Command::Simulate(c) => ("simulate", c, None),
        Command::Preprocess(c) => ("preprocess", c, None),
        Command::Fit(c) => ("fit", c, None),
        Command::Forecast(c) => ("forecast", c, None),
        Command::Gridsearch(c) => ("gridsearch", c, None),
        Command::Validate(c) => ("validate", c, None),
        Command::Benchmark(b) => match b {
            Bench::SizeSweep(c) => ("benchmark size-sweep", c, Some(BenchKind::SizeSweep)),
            Bench::Strong(c) => ("benchmark strong", c, Some(BenchKind::Strong)),
            Bench::Weak(c) => ("benchmark weak", c, Some(BenchKind::Weak)),
            Bench::OrderSweep(c) => ("benchmark order-sweep", c, Some(BenchKind::OrderSweep)),
        },
    };
    let cfg = RunConfig::resolve(name, file, flags)?;
    cfg.write_manifest()?;
    match (name, kind) {
        (_, Some(kind)) => commands::benchmark(kind, &cfg),
        ("simulate", _) => commands::simulate(&cfg),
        ("preprocess", _) => commands::preprocess(&cfg),
        ("fit", _) => commands::fit(&cfg),
        ("forecast", _) => commands::forecast(&cfg),
        ("gridsearch", _) => commands::gridsearch(&cfg),
        ("validate", _) => commands::validate(&cfg),
        _ => unreachable!("every command is dispatched"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() && wants_json_errors() => {
            let rep = ErrorReport::new(ErrorClass::Usage, "Usage".into(), e.kind().to_string());
            eprintln!("{}", serde_json::to_string(&rep).expect("serializable"));
            return ExitCode::from(exit_code(ErrorClass::Usage) as u8);
        }
        Err(e) => e.exit(),
    };
    let format = cli.errors;
    match run(cli) {
        Ok(summary) => {
            commands::emit(&summary);
            ExitCode::SUCCESS
        }
        Err(e) => report(&e, format),
    }
}
