//! `integra`: command-line pipeline for loanword integration analysis.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use integra_core::lexicon::WordClass;

use config::{ConfigError, GlobalArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "integra", version, about = "Measure how loanword verbs integrate into Spanish posts")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

fn parse_class(s: &str) -> Result<WordClass, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine unlisted ENGLISH_WORD + -(e)ar verbs from the input posts
    Discover(DiscoverArgs),
    /// Write every searchable surface form of the lexicon
    Expand,
    /// Find integrated and light-verb uses in the input posts
    Match,
    /// Build per-use design records and per-author profiles
    Features,
    /// Integration rates of the most frequent words in a match summary
    Rate(RateArgs),
    /// Compare per-word integration rates between two corpora
    Compare(CompareArgs),
    /// Fit the fixed-effects ridge logistic regression
    Regress(RegressArgs),
    /// Train a language model from `lang<TAB>text` lines
    TrainLangid(TrainLangidArgs),
}

#[derive(Debug, Args)]
struct DiscoverArgs {
    /// English wordlist, one lowercase word per line
    #[arg(long, value_name = "FILE")]
    english: PathBuf,
    /// Spanish wordlist, one lowercase word per line
    #[arg(long, value_name = "FILE")]
    spanish: PathBuf,
}

#[derive(Debug, Args)]
struct RateArgs {
    /// Summary TSV from `match` (default: <output-dir>/summary.tsv)
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    top_k: usize,
    #[arg(long, value_parser = parse_class, default_value = "loanword")]
    word_class: WordClass,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Summary TSV of the first corpus
    #[arg(long, value_name = "FILE")]
    a: PathBuf,
    /// Summary TSV of the second corpus
    #[arg(long, value_name = "FILE")]
    b: PathBuf,
    #[arg(long, value_parser = parse_class, default_value = "loanword")]
    word_class: WordClass,
    #[arg(long, default_value_t = 50)]
    top_k: usize,
    /// Number of comparisons in the Bonferroni family
    #[arg(long, default_value_t = 1)]
    family_size: usize,
    /// Also write a per-word rate scatter plot as SVG
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Args)]
struct RegressArgs {
    /// Design records from `features` (default: <output-dir>/design.jsonl)
    #[arg(long, value_name = "FILE")]
    design: Option<PathBuf>,
    /// Author profiles from `features` (default: <output-dir>/profiles.jsonl)
    #[arg(long, value_name = "FILE")]
    profiles: Option<PathBuf>,
    #[arg(long, value_parser = parse_class, default_value = "loanword")]
    word_class: WordClass,
    /// Share of observations held out to choose the L2 weight
    #[arg(long, default_value_t = 0.1)]
    test_fraction: f64,
}

#[derive(Debug, Args)]
struct TrainLangidArgs {
    /// Training TSV with `lang<TAB>text` rows
    #[arg(long, value_name = "FILE")]
    training: PathBuf,
    #[arg(long, default_value_t = integra_core::langid::DEFAULT_ORDER)]
    order: usize,
    #[arg(long, default_value_t = integra_core::langid::DEFAULT_ALPHA)]
    alpha: f64,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::resolve(&cli.global)?;
    // Fails only if a global pool already exists.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    match cli.command {
        Command::Discover(a) => commands::discover(&cfg, &a.english, &a.spanish),
        Command::Expand => commands::expand(&cfg),
        Command::Match => commands::match_posts(&cfg),
        Command::Features => commands::features(&cfg),
        Command::Rate(a) => commands::rate(&cfg, a.summary.as_deref(), a.top_k, a.word_class),
        Command::Compare(a) => commands::compare(&cfg, &a.a, &a.b, a.word_class, a.top_k, a.family_size, a.svg),
        Command::Regress(a) => {
            commands::regress(&cfg, a.design.as_deref(), a.profiles.as_deref(), a.word_class, a.test_fraction)
        }
        Command::TrainLangid(a) => commands::train_langid(&cfg, &a.training, a.order, a.alpha),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut message = String::new();
            for cause in e.chain().map(|c| c.to_string()) {
                if !message.contains(&cause) {
                    message = if message.is_empty() { cause } else { format!("{message}: {cause}") };
                }
            }
            eprintln!("error: {message}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
