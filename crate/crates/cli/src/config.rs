//! `key = value` configuration files.
//!
//! ```text
//! # comments start with '#'
//! manifest = corpus/manifest.toml
//! seed = 42
//! min_support = 0.05
//! ```
//!
//! Relative paths are resolved against the directory of the file.

use std::path::{Path, PathBuf};

use crate::CliError;

pub const DEFAULT_MIN_SUPPORT: f64 = 0.05;
pub const DEFAULT_THETA: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    pub manifest: Option<PathBuf>,
    pub rule_cards: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub seed: Option<u64>,
    pub theta: Option<f64>,
    pub min_support: Option<f64>,
    pub filter_smelly_only: Option<bool>,
    /// Whether report stages also draw SVG charts.
    pub svg: Option<bool>,
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config(format!("{key}: bad number '{v}'")))
}

impl Config {
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut c = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let path = || base.join(value);
            match key {
                "manifest" => c.manifest = Some(path()),
                "rule_cards" => c.rule_cards = Some(path()),
                "model" => c.model = Some(path()),
                "seed" => c.seed = Some(parse_num(key, value)?),
                "theta" => c.theta = Some(parse_num(key, value)?),
                "min_support" => c.min_support = Some(parse_num(key, value)?),
                "filter_smelly_only" => c.filter_smelly_only = Some(parse_bool(key, value)?),
                "svg" => c.svg = Some(parse_bool(key, value)?),
                _ => return Err(CliError::Config(format!("line {}: unknown key '{key}'", n + 1))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Values set in `other` win.
    pub fn overlay(self, other: Config) -> Config {
        Config {
            manifest: other.manifest.or(self.manifest),
            rule_cards: other.rule_cards.or(self.rule_cards),
            model: other.model.or(self.model),
            seed: other.seed.or(self.seed),
            theta: other.theta.or(self.theta),
            min_support: other.min_support.or(self.min_support),
            filter_smelly_only: other.filter_smelly_only.or(self.filter_smelly_only),
            svg: other.svg.or(self.svg),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(s) = self.min_support {
            if !(s > 0.0 && s <= 1.0) {
                return Err(CliError::Config(format!("min_support must lie in (0, 1], got {s}")));
            }
        }
        if let Some(t) = self.theta {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("theta must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn require_seed(&self, stage: &str) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Usage(format!("{stage} needs a seed (--seed or seed = ... in the config)")))
    }

    pub fn min_support(&self) -> f64 {
        self.min_support.unwrap_or(DEFAULT_MIN_SUPPORT)
    }

    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or(DEFAULT_THETA)
    }

    pub fn svg(&self) -> bool {
        self.svg.unwrap_or(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves_paths() {
        let c = Config::parse("# run\nmanifest = m.toml\nseed=7\nmin_support = 0.1\nsvg = off\n", Path::new("/cfg")).unwrap();
        assert_eq!(c.manifest, Some(PathBuf::from("/cfg/m.toml")));
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.min_support(), 0.1);
        assert!(!c.svg());
        assert_eq!(c.theta(), 2.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Config::parse("colour = red", Path::new(".")).is_err());
        assert!(Config::parse("seed", Path::new(".")).is_err());
        assert!(Config::parse("min_support = 0", Path::new(".")).is_err());
        assert!(Config::parse("min_support = 1.5", Path::new(".")).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = Config { seed: Some(1), theta: Some(3.0), ..Config::default() };
        let flags = Config { seed: Some(9), ..Config::default() };
        let c = file.overlay(flags);
        assert_eq!((c.seed, c.theta), (Some(9), Some(3.0)));
    }
}
