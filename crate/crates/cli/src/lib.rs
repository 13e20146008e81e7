//! The `stereosmell` pipeline: scan, detect, classify, integrate, analyze,
//! mine and train over a workspace directory.

pub mod config;
mod stages;
pub mod workspace;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::Config;
pub use workspace::Workspace;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    ModelNotFound(String),
    #[error("{0}")]
    NoClasses(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    /// 1 for usage and configuration problems, 2 for bad or missing data.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::ModelNotFound(_) => 1,
            CliError::NoClasses(_) | CliError::Data(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::ModelNotFound(_) => "model-not-found",
            CliError::NoClasses(_) => "no-classes",
            CliError::Data(_) => "data",
        }
    }

    /// One JSON object on a single line, for stderr.
    pub fn machine_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "exit": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

#[derive(Debug, Parser)]
#[command(name = "stereosmell", version, about = "Design smells and role stereotypes in Java code bases")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Directory holding the pipeline artifacts.
    #[arg(long, global = true, default_value = "workspace")]
    pub workspace: PathBuf,
    /// Corpus manifest (TOML).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// `key = value` configuration file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run seed; required by train and mine.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Apriori support threshold in (0, 1] [default: 0.05].
    #[arg(long, global = true)]
    pub min_support: Option<f64>,
    /// Clustering exponent [default: 2].
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Directory of rule-card files replacing the built-in cards.
    #[arg(long, global = true)]
    pub rule_cards: Option<PathBuf>,
    /// Classifier model (read by classify, written by train).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Keep only classes with at least one smell after integration.
    #[arg(long, global = true)]
    pub filter_smelly_only: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse every project of the manifest and compute class metrics.
    Scan,
    /// Run the rule cards over the scanned classes.
    Detect {
        /// Rebuild smells.csv from `.ini` result files under this directory
        /// (one sub-directory per project) instead of running the cards.
        #[arg(long)]
        from_ini: Option<PathBuf>,
    },
    /// Label every scanned class with a role stereotype.
    Classify,
    /// Join smells and stereotypes into the per-class records.
    Integrate {
        /// Import an existing per-class CSV as the records instead.
        #[arg(long)]
        import: Option<PathBuf>,
    },
    /// Statistics and report tables over the records.
    Analyze,
    /// Clustering, dendrograms and association rules over the records.
    Mine,
    /// Fit the stereotype classifier.
    Train {
        /// Labelled classes: a feature table with a `label` column, or just
        /// `FullClassPath,label` rows matched against the scanned features.
        #[arg(long)]
        labeled: PathBuf,
        #[arg(long, default_value_t = 100)]
        trees: usize,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Balance labels by oversampling before training.
        #[arg(long)]
        oversample: bool,
    },
}

impl GlobalArgs {
    fn config(&self) -> Result<Config, CliError> {
        let file = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let flags = Config {
            manifest: self.manifest.clone(),
            rule_cards: self.rule_cards.clone(),
            model: self.model.clone(),
            seed: self.seed,
            theta: self.theta,
            min_support: self.min_support,
            filter_smelly_only: self.filter_smelly_only.then_some(true),
            svg: None,
        };
        let c = file.overlay(flags);
        c.validate()?;
        Ok(c)
    }
}

/// Parses `args` (program name first) and runs one stage.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    let config = cli.global.config()?;
    let ws = Workspace::new(&cli.global.workspace);
    match cli.command {
        Command::Scan => stages::scan::run(&ws, &config),
        Command::Detect { from_ini } => stages::detect::run(&ws, &config, from_ini.as_deref()),
        Command::Classify => stages::classify::run(&ws, &config),
        Command::Integrate { import } => stages::integrate::run(&ws, &config, import.as_deref()),
        Command::Analyze => stages::analyze::run(&ws, &config),
        Command::Mine => stages::mine::run(&ws, &config),
        Command::Train { labeled, trees, max_depth, oversample } => {
            stages::classify::train(&ws, &config, &labeled, trees, max_depth, oversample)
        }
    }
}

/// Mixes a stage name into the run seed so stages draw independent streams.
pub fn stage_seed(seed: u64, stage: &str) -> u64 {
    let h = stage.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    seed ^ h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::ModelNotFound("x".into()).exit_code(), 1);
        assert_eq!(CliError::Data("x".into()).exit_code(), 2);
        let line = CliError::NoClasses("empty".into()).machine_line();
        assert_eq!(line, r#"{"error":"no-classes","exit":2,"message":"empty"}"#);
    }

    #[test]
    fn bad_flags_are_usage_errors() {
        let err = run(["stereosmell", "frobnicate"]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let err = run(["stereosmell", "mine", "--min-support", "2"]).unwrap_err();
        assert_eq!(err.kind(), "config");
    }

    #[test]
    fn stage_seeds_differ() {
        assert_ne!(stage_seed(1, "mine"), stage_seed(1, "train"));
        assert_eq!(stage_seed(1, "mine"), stage_seed(1, "mine"));
    }
}
