//! Declarative experiment configuration, loadable from TOML and
//! overridable by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qacd_core::pc::PcParams;
use qacd_core::qacd::QacdParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Qacd,
    Pc,
    #[value(name = "qacd_ablation_t0")]
    QacdAblationT0,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Qacd => "qacd",
            Method::Pc => "pc",
            Method::QacdAblationT0 => "qacd_ablation_t0",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Path to the BIF network file.
    pub network_path: PathBuf,
    pub method: Method,
    pub n_samples: usize,
    pub seeds: Vec<u64>,
    pub qacd: QacdParams,
    pub pc: PcParams,
    pub output_dir: PathBuf,
    pub compute_sid: bool,
    pub sid_cap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            network_path: PathBuf::new(),
            method: Method::Qacd,
            n_samples: 5000,
            seeds: (0..50).collect(),
            qacd: QacdParams::default(),
            pc: PcParams::default(),
            output_dir: PathBuf::from("results"),
            compute_sid: true,
            sid_cap: 100_000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.network_path.as_os_str().is_empty() {
            bail!("no network file given (set network_path or pass --network)");
        }
        if self.n_samples == 0 {
            bail!("n_samples must be positive");
        }
        if self.seeds.is_empty() {
            bail!("the seed list must be nonempty");
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            bail!("the seed list contains duplicates");
        }
        Ok(())
    }
}
