use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use charp_hodge::harness::{list_examples, run_scenario, verify, Format, Options, Report, DEFAULT_SEED, EXIT_INPUT};
use charp_hodge::registry;
use charp_hodge::scenario::{parse_scenario, InputError};

#[derive(Parser)]
#[command(name = "charp-hodge", version, about = "Verify twisted pullbacks and inverse Cartier transforms of Higgs bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(clap::Args)]
struct Common {
    /// Override the prime of the scenario, or restrict suites to one prime.
    #[arg(long)]
    prime: Option<u64>,
    /// Seed for randomized suites and checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
    /// Write the report to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Degree cap for the isomorphism search between F^r and E^r.
    #[arg(long = "degree-cap")]
    degree_cap: Option<u32>,
}

impl Common {
    fn options(&self) -> Options {
        Options { prime: self.prime, seed: self.seed, degree_cap: self.degree_cap }
    }

    fn format(&self) -> Format {
        match self.report {
            ReportFormat::Json => Format::Json,
            ReportFormat::Text => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run acceptance suites.
    Verify {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the checks of a scenario file or built-in example.
    Run {
        scenario: String,
        /// Checks to run, in order. Defaults to the scenario's own list.
        #[arg(long = "check", num_args = 1..)]
        checks: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Inspect the built-in examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// List examples and the statements they exercise.
    List {
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
    },
    /// Print the scenario JSON of an example.
    Show {
        name: String,
        #[arg(long, default_value_t = 5)]
        prime: u64,
    },
}

fn input_error(e: InputError) -> ExitCode {
    eprintln!("input error: {e}");
    ExitCode::from(EXIT_INPUT as u8)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), InputError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| InputError {
            location: path.display().to_string(),
            error: charp_hodge::Error::Invalid(format!("cannot write report: {e}")),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_scenario(arg: &str, prime: Option<u64>) -> Result<charp_hodge::scenario::Scenario, InputError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(ex) = registry::find(arg) {
            return ex.load(prime.unwrap_or(5));
        }
    }
    let text = std::fs::read_to_string(path).map_err(|e| InputError {
        location: arg.to_string(),
        error: charp_hodge::Error::Invalid(format!("cannot read scenario: {e}")),
    })?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| InputError {
        location: format!("{arg}:{}:{}", e.line(), e.column()),
        error: charp_hodge::Error::Parse(e.to_string()),
    })?;
    parse_scenario(&value, prime)
}

fn finish(report: Result<Report, InputError>, common: &Common) -> ExitCode {
    let report = match report {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    if let Err(e) = emit(&report.render(common.format()), common.out.as_deref()) {
        return input_error(e);
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { suite, common } => finish(verify(&suite, &common.options()), &common),
        Command::Run { scenario, checks, common } => {
            let report = load_scenario(&scenario, common.prime).and_then(|s| run_scenario(&s, &checks, &common.options()));
            finish(report, &common)
        }
        Command::Examples { action: ExamplesAction::List { report } } => {
            let format = match report {
                ReportFormat::Json => Format::Json,
                ReportFormat::Text => Format::Text,
            };
            print!("{}", list_examples(format));
            ExitCode::SUCCESS
        }
        Command::Examples { action: ExamplesAction::Show { name, prime } } => match registry::find(&name) {
            Some(ex) => {
                println!("{}", serde_json::to_string_pretty(&ex.scenario(prime)).expect("scenario serializes"));
                ExitCode::SUCCESS
            }
            None => input_error(InputError {
                location: name,
                error: charp_hodge::Error::Invalid("no such example".into()),
            }),
        },
    }
}
