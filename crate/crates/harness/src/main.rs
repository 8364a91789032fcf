use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use covmc_harness::run::tabulate_references;
use covmc_harness::spec::{MethodName, ReferenceSpec};
use covmc_harness::{emit, presets, run_experiment, ExperimentSpec, Format, HarnessError, Result};

#[derive(Parser)]
#[command(name = "covmc", about = "Change-of-variables Monte Carlo sensitivity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and print its relative-error table.
    Run {
        /// Preset id or path to a spec file.
        #[arg(long)]
        experiment: String,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Markdown)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the preset experiments.
    List,
    /// Compute large-sample reference values for a greeks experiment and print them as a spec-file table.
    Reference {
        #[arg(long)]
        experiment: String,
        #[arg(long)]
        n_ref: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Include conditional Monte Carlo in the inverse-variance combination.
        #[arg(long)]
        with_cmc: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Markdown,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("COVMC_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| HarnessError::Spec(format!("COVMC_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(HarnessError::Spec("COVMC_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| HarnessError::Spec(e.to_string()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::List => {
            for id in presets::ids() {
                let spec = ExperimentSpec::parse(presets::get(id).unwrap())?;
                println!("{id:<8} n={:<8} {}", spec.n, spec.title);
            }
        }
        Command::Run { experiment, n, seed, format, out } => {
            let mut spec = ExperimentSpec::load(&experiment)?;
            if let Some(n) = n {
                spec.n = n;
            }
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            let report = run_experiment(&spec)?;
            let format = match format {
                OutputFormat::Csv => Format::Csv,
                OutputFormat::Markdown => Format::Markdown,
            };
            let text = emit(&report, format);
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Reference { experiment, n_ref, seed, with_cmc } => {
            let mut spec = ExperimentSpec::load(&experiment)?;
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            let mut methods = vec![MethodName::Lr];
            if with_cmc {
                methods.push(MethodName::Cmc);
            }
            let values = tabulate_references(&spec, n_ref, &methods)?;
            let names: Vec<&str> = methods.iter().map(|m| if *m == MethodName::Lr { "LR" } else { "CMC" }).collect();
            let generated_by = format!("{} estimate, n_ref = {n_ref}, seed = {}", names.join(" + "), spec.seed);
            let reference = ReferenceSpec::Tabulated { generated_by, values };
            #[derive(serde::Serialize)]
            struct Greeks {
                reference: ReferenceSpec,
            }
            #[derive(serde::Serialize)]
            struct Wrapper {
                greeks: Greeks,
            }
            let text = toml::to_string(&Wrapper { greeks: Greeks { reference } }).map_err(|e| HarnessError::Spec(e.to_string()))?;
            print!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
