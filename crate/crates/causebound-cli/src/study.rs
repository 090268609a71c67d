//! Study file parsing and validation.
//!
//! A study file is TOML with a mandatory `version = 1`, optional `label`,
//! `notes`, and `assumptions` fields, and at least one of an `experimental`
//! or `observational` block. Each block is a 2x2 table keyed by treatment
//! (`x`, `x_prime`) and outcome (`y`, `y_prime`) whose `mode` is either
//! `"counts"` (nonnegative integers) or `"probabilities"` (numbers in
//! `[0, 1]`; the observational cells must sum to 1 and each experimental
//! treatment row must sum to 1, within 1e-9, and are then renormalized
//! exactly). Probability values may be written as TOML numbers or as strings
//! (`"0.016"`, `"1/500"`) for exact rational entry.

use causebound::rational::{from_f64, parse_number, pow10_reciprocal};
use causebound::{AssumptionSet, CausalEffects, CountTable, DatasetCounts, JointDistribution, Rat};
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::CliError;

pub const STUDY_FORMAT_VERSION: u64 = 1;

/// A validated study: evidence converted to exact rationals plus metadata.
#[derive(Debug, Clone)]
pub struct Study {
    pub label: Option<String>,
    pub notes: Option<String>,
    /// Assumptions declared in the file.
    pub declared: AssumptionSet,
    pub joint: Option<JointDistribution>,
    pub effects: Option<CausalEffects>,
    /// Count tables echoed when the blocks were given in counts mode.
    pub observational_counts: Option<CountTable>,
    pub experimental_counts: Option<CountTable>,
    /// True when any block used probabilities mode; selects the float
    /// exogeneity tolerance.
    pub uses_probability_inputs: bool,
}

impl Study {
    pub fn evidence_summary(&self) -> String {
        match (&self.effects, &self.joint) {
            (Some(_), Some(_)) => "experimental + observational".into(),
            (Some(_), None) => "experimental only".into(),
            (None, Some(_)) => "observational only".into(),
            (None, None) => "none".into(),
        }
    }

    /// Default exogeneity-test tolerance: exact for count data, `1e-6` for
    /// hand-entered probabilities.
    pub fn default_tolerance(&self) -> Rat {
        if self.uses_probability_inputs {
            pow10_reciprocal(6)
        } else {
            Rat::zero()
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStudy {
    version: Option<u64>,
    label: Option<String>,
    notes: Option<String>,
    assumptions: Option<Vec<String>>,
    experimental: Option<RawBlock>,
    observational: Option<RawBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    mode: String,
    x: RawRow,
    x_prime: RawRow,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    y: RawNumber,
    y_prime: RawNumber,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RawNumber {
    fn as_count(&self, location: &str) -> Result<u64, CliError> {
        let invalid = |message: String| CliError::Validation {
            location: location.to_string(),
            message,
        };
        match self {
            RawNumber::Int(n) if *n >= 0 => Ok(*n as u64),
            RawNumber::Int(n) => Err(invalid(format!("count {n} is negative"))),
            RawNumber::Float(f) => Err(invalid(format!(
                "counts mode requires nonnegative integers, got {f}"
            ))),
            RawNumber::Text(s) => s.trim().parse::<u64>().map_err(|_| {
                invalid(format!(
                    "counts mode requires nonnegative integers, got `{s}`"
                ))
            }),
        }
    }

    fn as_probability(&self, location: &str) -> Result<Rat, CliError> {
        let invalid = |message: String| CliError::Validation {
            location: location.to_string(),
            message,
        };
        let value = match self {
            RawNumber::Int(n) => Rat::from_integer((*n).into()),
            RawNumber::Float(f) => {
                from_f64(*f).ok_or_else(|| invalid(format!("`{f}` is not a finite number")))?
            }
            RawNumber::Text(s) => parse_number(s)
                .ok_or_else(|| invalid(format!("`{s}` is not a decimal or rational literal")))?,
        };
        if value.is_negative() || value > Rat::one() {
            return Err(invalid("probability is outside [0, 1]".into()));
        }
        Ok(value)
    }
}

enum Block {
    Counts(CountTable),
    Probabilities(Box<[Rat; 4]>),
}

fn parse_block(raw: &RawBlock, location: &str) -> Result<Block, CliError> {
    let cell = |name: &str| format!("{location}.{name}");
    match raw.mode.as_str() {
        "counts" => Ok(Block::Counts(CountTable::new(
            raw.x.y.as_count(&cell("x.y"))?,
            raw.x.y_prime.as_count(&cell("x.y_prime"))?,
            raw.x_prime.y.as_count(&cell("x_prime.y"))?,
            raw.x_prime.y_prime.as_count(&cell("x_prime.y_prime"))?,
        ))),
        "probabilities" => Ok(Block::Probabilities(Box::new([
            raw.x.y.as_probability(&cell("x.y"))?,
            raw.x.y_prime.as_probability(&cell("x.y_prime"))?,
            raw.x_prime.y.as_probability(&cell("x_prime.y"))?,
            raw.x_prime
                .y_prime
                .as_probability(&cell("x_prime.y_prime"))?,
        ]))),
        other => Err(CliError::Validation {
            location: format!("{location}.mode"),
            message: format!("mode must be \"counts\" or \"probabilities\", got `{other}`"),
        }),
    }
}

/// Renormalizes a treatment row that sums to 1 within 1e-9 and returns the
/// exact outcome probability.
fn row_probability(y: &Rat, y_prime: &Rat, location: &str) -> Result<Rat, CliError> {
    let sum = y + y_prime;
    if (&sum - Rat::one()).abs() > pow10_reciprocal(9) || sum.is_zero() {
        return Err(CliError::Validation {
            location: location.to_string(),
            message: format!("treatment row must sum to 1 within 1e-9, got {sum}"),
        });
    }
    Ok(y / sum)
}

/// Parses and validates a study file.
pub fn parse_study(text: &str) -> Result<Study, CliError> {
    let raw: RawStudy = toml::from_str(text).map_err(|err| CliError::Parse {
        message: err.to_string(),
    })?;
    match raw.version {
        Some(STUDY_FORMAT_VERSION) => {}
        Some(other) => {
            return Err(CliError::Validation {
                location: "version".into(),
                message: format!("unsupported version {other}, expected {STUDY_FORMAT_VERSION}"),
            })
        }
        None => {
            return Err(CliError::Validation {
                location: "version".into(),
                message: "the version field is mandatory".into(),
            })
        }
    }
    if raw.experimental.is_none() && raw.observational.is_none() {
        return Err(CliError::Validation {
            location: "<root>".into(),
            message: "at least one of [experimental] or [observational] must be present".into(),
        });
    }
    let declared = match &raw.assumptions {
        Some(list) => {
            list.join(",")
                .parse::<AssumptionSet>()
                .map_err(|message| CliError::Validation {
                    location: "assumptions".into(),
                    message,
                })?
        }
        None => AssumptionSet::NONE,
    };

    let mut uses_probability_inputs = false;
    let mut observational_counts = None;
    let mut experimental_counts = None;

    let joint = match &raw.observational {
        Some(block) => Some(match parse_block(block, "observational")? {
            Block::Counts(table) => {
                observational_counts = Some(table);
                // Surfaces ZeroTotal with its location.
                DatasetCounts::new(None, Some(table)).map_err(|err| CliError::Validation {
                    location: "observational".into(),
                    message: err.to_string(),
                })?;
                JointDistribution::from_counts(&table).expect("validated")
            }
            Block::Probabilities(cells) => {
                uses_probability_inputs = true;
                JointDistribution::from_cells(*cells).map_err(|err| CliError::Validation {
                    location: "observational".into(),
                    message: err.to_string(),
                })?
            }
        }),
        None => None,
    };

    let effects = match &raw.experimental {
        Some(block) => Some(match parse_block(block, "experimental")? {
            Block::Counts(table) => {
                experimental_counts = Some(table);
                DatasetCounts::new(Some(table), None).map_err(|err| CliError::Validation {
                    location: "experimental".into(),
                    message: err.to_string(),
                })?;
                CausalEffects::from_counts(&table).expect("validated")
            }
            Block::Probabilities(cells) => {
                uses_probability_inputs = true;
                let [x_y, x_y_prime, xp_y, xp_y_prime] = *cells;
                let p_y_x = row_probability(&x_y, &x_y_prime, "experimental.x")?;
                let p_y_xp = row_probability(&xp_y, &xp_y_prime, "experimental.x_prime")?;
                CausalEffects::new(p_y_x, p_y_xp).expect("row probabilities are in [0, 1]")
            }
        }),
        None => None,
    };

    Ok(Study {
        label: raw.label,
        notes: raw.notes,
        declared,
        joint,
        effects,
        observational_counts,
        experimental_counts,
        uses_probability_inputs,
    })
}
