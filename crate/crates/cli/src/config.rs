use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use ctp_core::error::{CtpError, Result};
use ctp_core::lattice::{HopRange, LatticeConfig};
use ctp_core::SlitExperiment;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub sites: usize,
    pub steps: usize,
    pub alpha: f64,
    #[serde(default = "all_hops")]
    pub hop_range: HopRange,
}

fn all_hops() -> HopRange {
    HopRange::All
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub source: usize,
    pub barrier_t: usize,
    pub slits: Vec<usize>,
    /// 1-based slit numbers carrying a detector.
    #[serde(default)]
    pub measured: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub n: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub sampling: Option<SamplingSection>,
    #[serde(default)]
    pub output: OutputSection,
}

pub const PRESETS: [&str; 3] = ["exp1", "exp2", "nslit3m1"];

impl RunConfig {
    /// Pinned presets. Changing any number here changes emitted bytes.
    pub fn preset(name: &str) -> Result<Self> {
        let (slits, measured) = match name {
            "exp1" => (vec![28, 36], vec![]),
            "exp2" => (vec![28, 36], vec![2]),
            "nslit3m1" => (vec![26, 32, 38], vec![1]),
            other => {
                return Err(CtpError::InvalidConfig(format!(
                    "unknown preset {other:?}, expected one of {PRESETS:?}"
                )))
            }
        };
        Ok(RunConfig {
            lattice: LatticeSection {
                sites: 64,
                steps: 8,
                alpha: 0.5,
                hop_range: HopRange::All,
            },
            experiment: ExperimentSection {
                source: 32,
                barrier_t: 4,
                slits,
                measured,
            },
            sampling: None,
            output: OutputSection::default(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CtpError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CtpError::InvalidConfig(format!("cannot parse {}: {e}", path.display())))
    }

    /// Builds and validates the experiment. Detector numbers are converted
    /// from 1-based to the engine's 0-based indices here.
    pub fn experiment(&self) -> Result<SlitExperiment> {
        let l = &self.lattice;
        let config = LatticeConfig::new(l.sites, l.steps, l.alpha)?.with_hop_range(l.hop_range)?;
        let e = &self.experiment;
        let mut measured = BTreeSet::new();
        for &m in &e.measured {
            if m == 0 || m > e.slits.len() {
                return Err(CtpError::InvalidConfig(format!(
                    "measured slit {m} is not in 1..={}",
                    e.slits.len()
                )));
            }
            measured.insert(m - 1);
        }
        SlitExperiment::new(config, e.source, e.barrier_t, e.slits.clone(), measured)
    }
}
