use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

/// A problem with flags, the config file or referenced paths (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Flags shared by every subcommand. Each may also be set in the `--config`
/// file under the same name with underscores; flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML file with default values for any of these flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random choice (required by `regress`)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory that receives all outputs
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Post JSONL input files
    #[arg(long, global = true, num_args = 1.., value_name = "FILE")]
    pub input: Vec<PathBuf>,
    /// Lexicon TSV files (default: the shipped loanword and native lexicons)
    #[arg(long, global = true, num_args = 1.., value_name = "FILE")]
    pub lexicon: Vec<PathBuf>,
    /// Surfaces never matched, one per line (default: shipped list with the shipped lexicon)
    #[arg(long, global = true, value_name = "FILE")]
    pub exclusions: Option<PathBuf>,
    /// Location keyword to region TSV (default: shipped gazetteer)
    #[arg(long, global = true, value_name = "FILE")]
    pub gazetteer: Option<PathBuf>,
    /// Language model TSV (default: shipped es/en/pt model)
    #[arg(long, global = true, value_name = "FILE")]
    pub langid_model: Option<PathBuf>,
    /// Minimum uses before an author or word gets its own column
    #[arg(long, global = true)]
    pub rare_threshold: Option<usize>,
    /// Comma-separated L2 weights to search
    #[arg(long, global = true, value_delimiter = ',', num_args = 1.., value_name = "WEIGHTS")]
    pub l2_grid: Vec<f64>,
    /// Match with diacritics stripped on both sides
    #[arg(long, global = true)]
    pub fold_diacritics: bool,
    /// Free words allowed after a light-verb head
    #[arg(long, global = true)]
    pub window: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    threads: Option<usize>,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    input: Option<Vec<PathBuf>>,
    lexicon: Option<Vec<PathBuf>>,
    exclusions: Option<PathBuf>,
    gazetteer: Option<PathBuf>,
    langid_model: Option<PathBuf>,
    rare_threshold: Option<usize>,
    l2_grid: Option<Vec<f64>>,
    fold_diacritics: Option<bool>,
    window: Option<usize>,
}

/// Resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub threads: usize,
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
    pub inputs: Vec<PathBuf>,
    pub lexicons: Vec<PathBuf>,
    pub exclusions: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub langid_model: Option<PathBuf>,
    pub rare_threshold: Option<usize>,
    pub l2_grid: Option<Vec<f64>>,
    pub fold_diacritics: bool,
    pub window: usize,
}

fn must_exist(path: &Path, what: &str) -> anyhow::Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(config_error(format!("{what} {} does not exist", path.display())))
    }
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> anyhow::Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| config_error(format!("config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let pick_vec = |flag: &Vec<PathBuf>, file: Option<Vec<PathBuf>>| if flag.is_empty() { file.unwrap_or_default() } else { flag.clone() };
        let threads = args
            .threads
            .or(file.threads)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if threads == 0 {
            return Err(config_error("--threads must be at least 1"));
        }
        let cfg = RunConfig {
            threads,
            seed: args.seed.or(file.seed),
            output_dir: args.output_dir.clone().or(file.output_dir).unwrap_or_else(|| PathBuf::from(".")),
            inputs: pick_vec(&args.input, file.input),
            lexicons: pick_vec(&args.lexicon, file.lexicon),
            exclusions: args.exclusions.clone().or(file.exclusions),
            gazetteer: args.gazetteer.clone().or(file.gazetteer),
            langid_model: args.langid_model.clone().or(file.langid_model),
            rare_threshold: args.rare_threshold.or(file.rare_threshold),
            l2_grid: if args.l2_grid.is_empty() { file.l2_grid } else { Some(args.l2_grid.clone()) },
            fold_diacritics: args.fold_diacritics || file.fold_diacritics.unwrap_or(false),
            window: args.window.or(file.window).unwrap_or(0),
        };
        for p in &cfg.inputs {
            must_exist(p, "input")?;
        }
        for p in &cfg.lexicons {
            must_exist(p, "lexicon")?;
        }
        for (p, what) in [(&cfg.exclusions, "exclusions file"), (&cfg.gazetteer, "gazetteer"), (&cfg.langid_model, "language model")] {
            if let Some(p) = p {
                must_exist(p, what)?;
            }
        }
        Ok(cfg)
    }

    pub fn require_inputs(&self) -> anyhow::Result<&[PathBuf]> {
        if self.inputs.is_empty() {
            return Err(config_error("no --input files given"));
        }
        Ok(&self.inputs)
    }

    pub fn output(&self, name: &str) -> anyhow::Result<PathBuf> {
        fs::create_dir_all(&self.output_dir)
            .map_err(|e| anyhow::anyhow!("cannot create output directory {}: {e}", self.output_dir.display()))?;
        Ok(self.output_dir.join(name))
    }
}
