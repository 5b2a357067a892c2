//! Command-line front end. All computation lives in the library; this binary
//! resolves configuration (flags > config file > reference defaults) and
//! dispatches.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qar::config::{ModelChoice, OutputFormat, RunConfig};
use qar::run;

#[derive(Parser)]
#[command(
    name = "qar",
    version,
    about = "Steady-state thermodynamics of noise-driven quantum absorption refrigerators"
)]
struct Cli {
    /// TOML configuration file; defaults are the reference operating point
    /// of the selected model.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Model choice, overriding the config file.
    #[arg(long, global = true, value_enum)]
    model: Option<ModelArg>,

    /// Output directory, overriding the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps and scaling studies.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Table output format, overriding the config file.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Gaussian,
    Poisson,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Steady state at one operating point: populations, currents, COP,
    /// entropy production.
    Steady,
    /// One-parameter sweep (config [sweep] section) to a 9-column table.
    Sweep,
    /// Impulse sweep at the reference operating point; plot-ready CSV.
    Fig2,
    /// Third-law exponent fits per bath dimension.
    Scaling,
    /// Truncated-Fock-space oracle versus the moment models.
    Oracle,
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, qar::Error> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => match (&cli.command, cli.model) {
            (Command::Fig2, _) | (_, Some(ModelArg::Poisson)) | (_, None) => {
                RunConfig::reference_poisson()
            }
            (_, Some(ModelArg::Gaussian)) => RunConfig::reference_gaussian(),
        },
    };
    if let Some(model) = cli.model {
        let requested = match model {
            ModelArg::Gaussian => ModelChoice::Gaussian,
            ModelArg::Poisson => ModelChoice::Poisson,
        };
        if requested != config.model && cli.config.is_some() {
            return Err(qar::Error::Config(format!(
                "--model {requested:?} conflicts with the config file's model; \
                 edit the file or drop the flag"
            )));
        }
        config.model = requested;
    }
    if let Some(out) = &cli.out {
        config.output.directory = out.clone();
    }
    if let Some(jobs) = cli.jobs {
        config.output.jobs = jobs;
    }
    if let Some(format) = cli.format {
        config.output.format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Structured => OutputFormat::Structured,
        };
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if config.output.jobs > 1 {
        // ignore failure: the pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(config.output.jobs)
            .build_global();
    }
    let result = match cli.command {
        Command::Steady => run::cmd_steady(&config),
        Command::Sweep => run::cmd_sweep(&config),
        Command::Fig2 => run::cmd_fig2(&config),
        Command::Scaling => run::cmd_scaling(&config),
        Command::Oracle => run::cmd_oracle(&config),
    };
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
