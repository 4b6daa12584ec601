use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spancat::cli::{run, Options, OutputFormat, Verb, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "spancat", version, about = "Exact computations with finite categories, fibrations and spans")]
struct Args {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    output: Format,
    /// Maximum number of candidate assignments a search may try.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Recorded in the report.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document and check every block.
    Validate { file: PathBuf },
    /// Classify the fibration in the last block.
    Classify { file: PathBuf },
    /// Compute the span category of the triple in the last block.
    Span { file: PathBuf },
    /// Dualize the fibration in the last block.
    Dualize { file: PathBuf },
    /// Straighten the orthofibration in the last block.
    Straighten { file: PathBuf },
    /// Unstraighten the diagram in the last block.
    Unstraighten { file: PathBuf },
    /// Compute the mate of the lax transformation in the last block.
    Mate { file: PathBuf },
    /// Compute the oplax structure on the left adjoint of a lax monoidal functor.
    MonoidalMate { file: PathBuf },
    /// Run the acceptance criteria.
    Selftest {
        /// Only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

fn read_input(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = Options {
        output: match args.output {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        },
        budget: args.budget,
        seed: args.seed,
    };
    let (verb, file) = match args.command {
        Command::Validate { file } => (Verb::Validate, Some(file)),
        Command::Classify { file } => (Verb::Classify, Some(file)),
        Command::Span { file } => (Verb::Span, Some(file)),
        Command::Dualize { file } => (Verb::Dualize, Some(file)),
        Command::Straighten { file } => (Verb::Straighten, Some(file)),
        Command::Unstraighten { file } => (Verb::Unstraighten, Some(file)),
        Command::Mate { file } => (Verb::Mate, Some(file)),
        Command::MonoidalMate { file } => (Verb::MonoidalMate, Some(file)),
        Command::Selftest { only } => (Verb::Selftest(only), None),
    };
    let input = match file.map(|f| (read_input(&f), f)) {
        Some((Ok(s), _)) => s,
        Some((Err(e), f)) => {
            eprintln!("cannot read {}: {e}", f.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
        None => String::new(),
    };
    let outcome = run(&verb, &input, &opts);
    print!("{}", outcome.output);
    ExitCode::from(outcome.code as u8)
}
