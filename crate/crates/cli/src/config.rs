//! TOML configuration shared by all subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use lla_core::features::{FeatureConfig, HeaderWordSet};
use lla_core::rules::{Annotator, RuleSet, Thresholds, DEFAULT_RULES};

/// Settings read from `--config`. Relative paths resolve against the
/// directory of the config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Rule file replacing the shipped rules.
    pub rule_file: Option<PathBuf>,
    /// Header phrases, one per line, replacing the shipped list.
    pub header_words: Option<PathBuf>,
    /// Overrides of named rule constants.
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    /// Constants added for custom rule files.
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    /// Reference title used by `simTitle` for every document.
    pub doc_title: Option<String>,
    /// Pattern marking lines as `ctnTotal`.
    pub ctn_total: Option<String>,
    pub seed: Option<u64>,
    #[serde(skip)]
    base: PathBuf,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Config = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut t = Thresholds::default();
        for (k, v) in &cfg.thresholds {
            t.set(k, *v).with_context(|| format!("in config {}", path.display()))?;
        }
        Ok(cfg)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn thresholds(&self) -> Result<Thresholds> {
        let mut t = Thresholds::default();
        for (k, v) in &self.thresholds {
            t.set(k, *v)?;
        }
        for (k, v) in &self.constants {
            t.define(k, *v);
        }
        Ok(t)
    }

    pub fn rule_set(&self) -> Result<RuleSet> {
        let (text, origin) = match &self.rule_file {
            Some(p) => {
                let p = self.resolve(p);
                (std::fs::read_to_string(&p).with_context(|| format!("reading rule file {}", p.display()))?, p.display().to_string())
            }
            None => (DEFAULT_RULES.to_string(), "shipped rules".to_string()),
        };
        RuleSet::parse(&text, self.thresholds()?).with_context(|| format!("in {origin}"))
    }

    pub fn feature_config(&self) -> Result<FeatureConfig> {
        let header_words = match &self.header_words {
            Some(p) => {
                let p = self.resolve(p);
                let text = std::fs::read_to_string(&p).with_context(|| format!("reading header words {}", p.display()))?;
                HeaderWordSet::parse(&text).with_context(|| format!("in {}", p.display()))?
            }
            None => HeaderWordSet::default(),
        };
        let ctn_total = match &self.ctn_total {
            Some(re) => Some(regex::Regex::new(re).context("invalid ctn_total pattern")?),
            None => None,
        };
        Ok(FeatureConfig { header_words, ctn_total })
    }

    pub fn annotator(&self) -> Result<Annotator> {
        Ok(Annotator::new(self.rule_set()?, self.feature_config()?))
    }
}
