mod commands;
mod config;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] nettagger::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    /// 1 for usage and configuration problems, 2 for unreadable or
    /// malformed input, 3 when training diverges.
    pub fn exit_code(&self) -> u8 {
        use nettagger::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Core(E::Argument(_) | E::Config(_)) => 1,
            CliError::Core(E::Parse { .. } | E::UnknownTag { .. } | E::Format(_) | E::Io(_)) => 2,
            CliError::Core(E::Numeric(_)) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nettagger", version, about = "Neural part-of-speech tagger")]
struct Cli {
    /// `key = value` file with run settings; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the lexicon from a tagged corpus and write it to `lexicon`
    BuildLexicon,
    /// Train a network on `corpus` using `lexicon`; writes `model`
    Train,
    /// Tag raw text (one word per line, blank line between sentences)
    Tag {
        /// Input text; standard input when omitted
        #[arg(long)]
        input: Option<PathBuf>,
        /// Append every output activation to each line
        #[arg(long)]
        scores: bool,
    },
    /// Score a tagged file against a gold corpus
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        tagged: PathBuf,
        /// A second tagged file; reports how many errors the two share
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Accuracy on a held-out tail of `corpus` for growing training prefixes
    LearningCurve {
        /// Tokens held out from the end of the corpus for scoring
        #[arg(long)]
        test_tokens: usize,
        /// Comma-separated ascending training sizes in tokens
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    /// Show lexicon statistics, or how one word is looked up
    Inspect {
        #[arg(long)]
        word: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_config = match &cli.config {
        Some(path) => RunConfig::parse(&files::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    let cfg = file_config.overridden_by(cli.settings);
    eprintln!("# resolved configuration");
    for (key, value) in cfg.resolved() {
        eprintln!("# {key} = {value}");
    }
    match cli.command {
        Command::BuildLexicon => commands::build_lexicon(&cfg),
        Command::Train => commands::train(&cfg),
        Command::Tag { input, scores } => commands::tag(&cfg, input.as_deref(), scores),
        Command::Eval {
            gold,
            tagged,
            compare,
        } => commands::eval(&cfg, &gold, &tagged, compare.as_deref()),
        Command::LearningCurve { test_tokens, sizes } => {
            commands::learning_curve(&cfg, test_tokens, &sizes)
        }
        Command::Inspect { word } => commands::inspect(&cfg, word.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
