//! Command-line surface: analyze scenario and CbD files, expose the
//! built-in example library, and generate quantum order-effect systems.
//!
//! Exit codes are part of the contract: 0 success, 1 I/O failure, 2 input
//! syntax error, 3 validation or request error, 4 size-cap exceeded, 70
//! broken internal invariant.

mod analysis;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error as ThisError;

use ctxkit::cbd::{build_order_effect_system, quantum_order_model, serialize_cbd, SurdMatrix};
use ctxkit::fixtures::{fixture, Fixture, FIXTURE_NAMES};
use ctxkit::lp::DEFAULT_MAX_COLUMNS;
use ctxkit::surd::Surd;
use ctxkit::{parse_rational, Error};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid request: {0}")]
    Request(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Syntax(_)) => 2,
            CliError::Core(Error::Invalid(_)) => 3,
            CliError::Core(Error::TooLarge { .. }) => 4,
            CliError::Core(Error::Internal(_)) => 70,
            CliError::Io { .. } => 1,
            CliError::Request(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ctxkit",
    version,
    about = "Exact contextuality analysis for empirical models and CbD systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a scenario model or CbD system file
    Analyze {
        /// Input file; the name of a built-in example also works
        file: String,
        /// Comma-separated checks, any order, from: signalling, logical,
        /// strong, lp, fraction, cech (scenario inputs) and cbd, qq (CbD
        /// inputs); default is every check applicable to the input
        #[arg(long)]
        checks: Option<String>,
        /// Report format
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Cap on LP column counts (global assignments or coupling atoms)
        #[arg(long, default_value_t = DEFAULT_MAX_COLUMNS)]
        max_columns: u64,
    },
    /// List, print, or write the built-in example files
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Generate an order-effect CbD file from a rational state and two
    /// rational projector matrices
    GenQorder {
        /// State vector as comma-separated rationals, for example "3/5,4/5"
        #[arg(long)]
        state: String,
        /// First projector, row-major comma-separated rationals
        #[arg(long)]
        proj_a: String,
        /// Second projector, row-major comma-separated rationals
        #[arg(long)]
        proj_b: String,
        /// Output path
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// Print the example names, one per line
    List,
    /// Print an example file to stdout
    Show { name: String },
    /// Write an example file to a path
    Write { name: String, path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze {
            file,
            checks,
            format,
            max_columns,
        } => {
            let text = load_input(&file)?;
            let report = analysis::analyze(&text, checks.as_deref(), max_columns)?;
            match format {
                Format::Text => print!("{}", report.render_text()),
                Format::Json => print!("{}", report.render_json()),
            }
            Ok(())
        }
        Command::Examples { action } => match action {
            ExamplesAction::List => {
                for name in FIXTURE_NAMES {
                    println!("{name}");
                }
                Ok(())
            }
            ExamplesAction::Show { name } => {
                print!("{}", example_text(&name)?);
                Ok(())
            }
            ExamplesAction::Write { name, path } => {
                let text = example_text(&name)?;
                write_file(&path, &text)
            }
        },
        Command::GenQorder {
            state,
            proj_a,
            proj_b,
            output,
        } => {
            let state = parse_surd_vector(&state, "--state")?;
            let dim = state.len();
            let a = parse_projector_matrix(&proj_a, dim, "--proj-a")?;
            let b = parse_projector_matrix(&proj_b, dim, "--proj-b")?;
            let data = quantum_order_model(&state, &a, &b)?;
            let sys = build_order_effect_system(&data)?;
            write_file(&output, &with_trailing_newline(serialize_cbd(&sys)))
        }
    }
}

/// Reads the input file, falling back to the built-in example of the same
/// name when no such file exists.
fn load_input(arg: &str) -> Result<String, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        });
    }
    if fixture(arg).is_some() {
        return example_text(arg);
    }
    Err(CliError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(
            std::io::ErrorKind::NotFound,
            "no such file or built-in example",
        ),
    })
}

/// Canonical file text of a built-in example, trailing newline included.
fn example_text(name: &str) -> Result<String, CliError> {
    let fixture = fixture(name).ok_or_else(|| {
        CliError::Request(format!(
            "unknown example '{name}'; available: {}",
            FIXTURE_NAMES.join(", ")
        ))
    })?;
    let text = match fixture {
        Fixture::Scenario(m) => ctxkit::serialize_model(&m),
        Fixture::Cbd(sys) => serialize_cbd(&sys),
    };
    Ok(with_trailing_newline(text))
}

fn with_trailing_newline(mut text: String) -> String {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    text
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_surd_vector(raw: &str, flag: &str) -> Result<Vec<Surd>, CliError> {
    raw.split(',')
        .map(|token| {
            let token = token.trim();
            parse_rational(token)
                .map(Surd::from_rational)
                .ok_or_else(|| {
                    Error::syntax(format!("{flag}: '{token}' is not a rational number")).into()
                })
        })
        .collect()
}

fn parse_projector_matrix(raw: &str, dim: usize, flag: &str) -> Result<SurdMatrix, CliError> {
    let entries = parse_surd_vector(raw, flag)?;
    if entries.len() != dim * dim {
        return Err(Error::invalid(format!(
            "{flag} needs {dim}x{dim} = {} entries to match the state dimension, got {}",
            dim * dim,
            entries.len()
        ))
        .into());
    }
    let rows = entries.chunks(dim).map(<[Surd]>::to_vec).collect();
    Ok(SurdMatrix::from_rows(rows)?)
}
