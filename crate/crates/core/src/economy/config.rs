use serde::{Deserialize, Serialize};

use super::{CobbDouglas, Consumer, EconomyError, EconomySpec, TableEconomy};
use crate::scalar::{parse_rational, Coord};
use crate::simplex_grid::{GridVertex, Subdivision};

/// A number in a config file: a JSON number, a decimal string, or `"a/b"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigNumber {
    Number(f64),
    Text(String),
}

impl ConfigNumber {
    pub fn value(&self) -> Result<f64, EconomyError> {
        match self {
            ConfigNumber::Number(x) => Ok(*x),
            ConfigNumber::Text(s) => Ok(Coord::to_f64(&parse_rational(s)?)),
        }
    }
}

impl From<f64> for ConfigNumber {
    fn from(x: f64) -> Self {
        ConfigNumber::Number(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsumerConfig {
    pub alpha: Vec<ConfigNumber>,
    pub endowment: Vec<ConfigNumber>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub vertex: GridVertex,
    pub excess: Vec<ConfigNumber>,
}

/// The economy config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EconomyConfig {
    CobbDouglas {
        goods: usize,
        consumers: Vec<ConsumerConfig>,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        goods: Option<usize>,
        m: u32,
        values: Vec<TableEntry>,
    },
}

fn numbers(xs: &[ConfigNumber]) -> Result<Vec<f64>, EconomyError> {
    xs.iter().map(ConfigNumber::value).collect()
}

impl EconomyConfig {
    pub fn from_json(text: &str) -> Result<Self, EconomyError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build(&self) -> Result<EconomySpec, EconomyError> {
        match self {
            EconomyConfig::CobbDouglas { goods, consumers } => {
                let consumers = consumers
                    .iter()
                    .map(|c| {
                        Ok(Consumer {
                            alpha: numbers(&c.alpha)?,
                            endowment: numbers(&c.endowment)?,
                        })
                    })
                    .collect::<Result<Vec<_>, EconomyError>>()?;
                let econ = CobbDouglas::new(consumers)?;
                if econ.consumers()[0].alpha.len() != *goods {
                    return Err(EconomyError::WrongGoodCount {
                        expected: *goods,
                        found: econ.consumers()[0].alpha.len(),
                    });
                }
                Ok(EconomySpec::CobbDouglas(econ))
            }
            EconomyConfig::Table { goods, m, values } => {
                let goods = match (goods, values.first()) {
                    (Some(g), _) => *g,
                    (None, Some(e)) => e.vertex.0.len(),
                    (None, None) => return Err(EconomyError::Invalid("empty table".into())),
                };
                if goods < 2 {
                    return Err(EconomyError::Invalid("need at least two goods".into()));
                }
                let sub = Subdivision::new(goods - 1, *m)?;
                let entries = values
                    .iter()
                    .map(|e| Ok((e.vertex.clone(), numbers(&e.excess)?)))
                    .collect::<Result<Vec<_>, EconomyError>>()?;
                Ok(EconomySpec::Table(TableEconomy::new(sub, entries)?))
            }
        }
    }
}

impl From<&CobbDouglas> for EconomyConfig {
    fn from(e: &CobbDouglas) -> Self {
        let list = |xs: &[f64]| xs.iter().map(|&x| ConfigNumber::from(x)).collect();
        EconomyConfig::CobbDouglas {
            goods: e.consumers()[0].alpha.len(),
            consumers: e
                .consumers()
                .iter()
                .map(|c| ConsumerConfig {
                    alpha: list(&c.alpha),
                    endowment: list(&c.endowment),
                })
                .collect(),
        }
    }
}

impl From<&TableEconomy> for EconomyConfig {
    fn from(e: &TableEconomy) -> Self {
        EconomyConfig::Table {
            goods: Some(e.sub().dim() + 1),
            m: e.sub().resolution(),
            values: e
                .entries()
                .map(|(vertex, f)| TableEntry {
                    vertex,
                    excess: f.iter().map(|&x| ConfigNumber::from(x)).collect(),
                })
                .collect(),
        }
    }
}

impl From<&EconomySpec> for EconomyConfig {
    fn from(e: &EconomySpec) -> Self {
        match e {
            EconomySpec::CobbDouglas(c) => c.into(),
            EconomySpec::Table(t) => t.into(),
        }
    }
}
