//! Experiment configuration: a versioned, human-readable TOML document
//! holding one or two measure specs plus command parameters.
//!
//! Matrices are row-major arrays of decimals; sequences are tagged records
//! selected by a `kind` field. Configurations round-trip through
//! serialization.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qsmarkov::matseq::{CoeffFamily, Direction, MatrixSequence, StochasticMatrix};
use qsmarkov::measure::MarkovMeasureSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub measure: MeasureConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<MeasureConfig>,
    #[serde(default)]
    pub params: Params,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).context("malformed config")?;
        if config.schema != SCHEMA_VERSION {
            bail!(
                "unsupported schema version {}, expected {SCHEMA_VERSION}",
                config.schema
            );
        }
        config.params.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("config serialization failed")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    /// `"derived"` (Perron vector of the first matrix) or an explicit
    /// positive probability vector fixed by it.
    #[serde(default)]
    pub lambda: LambdaMode,
    pub sequence: SequenceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaMode {
    Mode(String),
    Explicit(Vec<f64>),
}

impl Default for LambdaMode {
    fn default() -> Self {
        LambdaMode::Mode("derived".to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceConfig {
    Constant {
        matrix: Vec<Vec<f64>>,
    },
    EventuallyConstant {
        prefix: Vec<Vec<Vec<f64>>>,
        tail: Vec<Vec<f64>>,
    },
    Geometric {
        limit: Vec<Vec<f64>>,
        direction: Vec<Vec<f64>>,
        ratio: f64,
    },
    Power {
        limit: Vec<Vec<f64>>,
        direction: Vec<Vec<f64>>,
        exponent: f64,
    },
    SignedPower {
        limit: Vec<Vec<f64>>,
        direction: Vec<Vec<f64>>,
        exponent: f64,
    },
    Explicit {
        matrices: Vec<Vec<Vec<f64>>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        tail: Option<Vec<Vec<f64>>>,
    },
}

impl MeasureConfig {
    pub fn build(&self) -> Result<MarkovMeasureSpec> {
        let seq = self.sequence.build()?;
        match &self.lambda {
            LambdaMode::Mode(mode) if mode == "derived" => {
                MarkovMeasureSpec::with_derived_lambda(seq).context("deriving lambda failed")
            }
            LambdaMode::Mode(other) => bail!("unknown lambda mode {other:?}; use \"derived\""),
            LambdaMode::Explicit(lambda) => MarkovMeasureSpec::with_lambda(lambda.clone(), seq)
                .context("explicit lambda rejected"),
        }
    }
}

impl SequenceConfig {
    pub fn build(&self) -> Result<MatrixSequence> {
        let seq = match self {
            SequenceConfig::Constant { matrix } => {
                MatrixSequence::constant(StochasticMatrix::from_rows(matrix)?)
            }
            SequenceConfig::EventuallyConstant { prefix, tail } => {
                let prefix = prefix
                    .iter()
                    .map(|m| StochasticMatrix::from_rows(m))
                    .collect::<Result<Vec<_>, _>>()?;
                MatrixSequence::eventually_constant(prefix, StochasticMatrix::from_rows(tail)?)?
            }
            SequenceConfig::Geometric {
                limit,
                direction,
                ratio,
            } => MatrixSequence::perturbation(
                StochasticMatrix::from_rows(limit)?,
                Direction::from_rows(direction)?,
                CoeffFamily::Geometric { ratio: *ratio },
            )?,
            SequenceConfig::Power {
                limit,
                direction,
                exponent,
            } => MatrixSequence::perturbation(
                StochasticMatrix::from_rows(limit)?,
                Direction::from_rows(direction)?,
                CoeffFamily::Power {
                    exponent: *exponent,
                },
            )?,
            SequenceConfig::SignedPower {
                limit,
                direction,
                exponent,
            } => MatrixSequence::perturbation(
                StochasticMatrix::from_rows(limit)?,
                Direction::from_rows(direction)?,
                CoeffFamily::SignedPower {
                    exponent: *exponent,
                },
            )?,
            SequenceConfig::Explicit { matrices, tail } => {
                let matrices = matrices
                    .iter()
                    .map(|m| StochasticMatrix::from_rows(m))
                    .collect::<Result<Vec<_>, _>>()?;
                let tail = tail
                    .as_ref()
                    .map(|t| StochasticMatrix::from_rows(t))
                    .transpose()?;
                MatrixSequence::explicit(matrices, tail)?
            }
        };
        Ok(seq)
    }
}

/// Command parameters; every field has a command-side default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub seed: Option<u64>,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub level: Option<usize>,
    pub eps_f: Option<f64>,
    pub k_max: Option<usize>,
    pub path_len: Option<usize>,
    pub word_i: Option<String>,
    pub word_j: Option<String>,
    pub out: Option<PathBuf>,
}

impl Params {
    fn validate(&self) -> Result<()> {
        for (name, value) in [("tol", self.tol), ("eps_f", self.eps_f)] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    bail!("parameter {name} must be positive, got {v}");
                }
            }
        }
        Ok(())
    }
}
