use std::path::{Path, PathBuf};

use mixlit::approx::RealTarget;
use mixlit::criteria::WeightKind;
use mixlit::pseudo_norm::{PseudoValueSequence, SequenceFamily, SequenceSpec};
use mixlit::psi::{PsiConfig, PsiFamily, PsiSpec};
use mixlit::text::parse_rational;
use mixlit::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Largest `N` any subcommand accepts.
pub const MAX_N: u64 = 1_000_000_000;
/// Widest `N0..=N1` the exact measure commands accept.
pub const MAX_MEASURE_WIDTH: u64 = 1_000_000;
pub const MAX_SAMPLES: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A weight in the config file. Single-sequence weights pick one of the
/// configured sequences by position; family weights use all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    InverseNormProduct,
    DsWeighted,
    MultiCount,
    HarrapCount {
        #[serde(default)]
        sequence: usize,
    },
    LogPower {
        k: u32,
    },
    FrakM {
        #[serde(default)]
        sequence: usize,
    },
    FrakMLog {
        #[serde(default)]
        sequence: usize,
        epsilon: String,
    },
}

/// Everything one experiment needs. Command-line flags override these fields.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub sequences: Vec<SequenceSpec>,
    #[serde(default)]
    pub psi: Option<PsiConfig>,
    #[serde(default)]
    pub weights: Vec<WeightConfig>,
    #[serde(default)]
    pub alphas: Vec<RealTarget>,
    #[serde(default)]
    pub n: Option<u64>,
    #[serde(default)]
    pub n0: Option<u64>,
    #[serde(default)]
    pub n1: Option<u64>,
    #[serde(default)]
    pub n_max: Option<u64>,
    /// Largest tuple index for the tuple density scan.
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default)]
    pub epsilon: Option<String>,
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub scan_cap: Option<u64>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub budget_mem: Option<u64>,
    /// Output path; not part of the config hash.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn family(&self) -> Result<SequenceFamily, CliError> {
        if self.sequences.is_empty() {
            return Err(CliError::Config("at least one sequence is required".into()));
        }
        SequenceFamily::from_specs(&self.sequences).map_err(|e| CliError::Config(e.to_string()))
    }

    fn sequence(&self, i: usize) -> Result<PseudoValueSequence, CliError> {
        let spec = self
            .sequences
            .get(i)
            .ok_or_else(|| CliError::Config(format!("weight refers to sequence {i}, which is not configured")))?;
        PseudoValueSequence::new(spec.clone()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn psi(&self) -> Result<PsiSpec, CliError> {
        let cfg = self
            .psi
            .clone()
            .ok_or_else(|| CliError::Config("a psi function is required".into()))?;
        PsiSpec::try_from(cfg).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn weights(&self) -> Result<Vec<WeightKind>, CliError> {
        if self.weights.is_empty() {
            return Err(CliError::Config("at least one weight is required".into()));
        }
        self.weights
            .iter()
            .map(|w| {
                Ok(match w {
                    WeightConfig::InverseNormProduct => WeightKind::InverseNormProduct(self.family()?),
                    WeightConfig::DsWeighted => WeightKind::DSWeighted(self.family()?),
                    WeightConfig::MultiCount => WeightKind::MultiCount(self.family()?),
                    WeightConfig::HarrapCount { sequence } => WeightKind::HarrapCount(self.sequence(*sequence)?),
                    WeightConfig::LogPower { k } => WeightKind::LogPower(*k),
                    WeightConfig::FrakM { sequence } => WeightKind::FrakM(self.sequence(*sequence)?),
                    WeightConfig::FrakMLog { sequence, epsilon } => WeightKind::FrakMLog {
                        sequence: self.sequence(*sequence)?,
                        epsilon: rational(epsilon, "weight epsilon")?,
                    },
                })
            })
            .collect()
    }

    pub fn alphas(&self) -> Result<&[RealTarget], CliError> {
        if self.alphas.is_empty() {
            return Err(CliError::Config("at least one alpha is required".into()));
        }
        Ok(&self.alphas)
    }

    pub fn epsilon(&self) -> Result<BigRational, CliError> {
        match &self.epsilon {
            Some(e) => rational(e, "epsilon"),
            None => Err(CliError::Config("epsilon is required".into())),
        }
    }

    pub fn require(&self, value: Option<u64>, name: &str) -> Result<u64, CliError> {
        let v = value.ok_or_else(|| CliError::Config(format!("{name} is required")))?;
        if v > MAX_N {
            return Err(CliError::Config(format!("{name} = {v} exceeds the limit {MAX_N}")));
        }
        Ok(v)
    }

    /// `N0..=N1`, both present and ordered.
    pub fn range(&self) -> Result<(u64, u64), CliError> {
        let n0 = self.require(self.n0, "n0")?;
        let n1 = self.require(self.n1, "n1")?;
        if n1 < n0 || n0 == 0 {
            return Err(CliError::Config(format!("empty range n0={n0}, n1={n1}")));
        }
        Ok((n0, n1))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Config("a seed is required for stochastic runs".into()))
    }
}

pub fn rational(text: &str, what: &str) -> Result<BigRational, CliError> {
    parse_rational(text).ok_or_else(|| CliError::Config(format!("{what}: cannot parse {text:?} as a rational")))
}

/// `ψ` restricted to `n0..`: tables drop their leading values, other
/// families just move their start.
pub fn psi_from(psi: PsiSpec, n0: u64) -> Result<PsiSpec, CliError> {
    let start = psi.start_index();
    let shifted = match psi.family() {
        PsiFamily::Table { values } => {
            if n0 < start {
                return Err(CliError::Config(format!("n0={n0} precedes the table start {start}")));
            }
            let skip = (n0 - start) as usize;
            if skip >= values.len() {
                return Err(CliError::Config(format!("n0={n0} is past the end of the table")));
            }
            PsiSpec::table(n0, values[skip..].to_vec())
        }
        _ => psi.with_start(n0),
    };
    shifted.map_err(|e| CliError::Config(e.to_string()))
}
