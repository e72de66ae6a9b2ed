//! Scenario config files.
//!
//! A config is a single TOML document whose tables mirror [`Scenario`]:
//!
//! ```toml
//! total_vehicles = 1000.0
//! dwpt_ratio = 0.2
//!
//! [soc]
//! distribution = "uniform"   # or "discrete" with `values = [...]`
//! s_lo = 0.1
//! s_hi = 0.9
//!
//! [prefs]
//! vot = 50.0                 # JPY per minute
//! voe = 100.0                # JPY per unit of charging utility
//!
//! [toll]
//! system = "fixed"           # or "free"
//! price = 100.0              # JPY
//!
//! [network.link1]            # the ERS link
//! free_flow_time = 10.0      # minutes
//! capacity = 500.0           # vehicles
//! bpr_alpha = 0.15
//! bpr_beta = 4.0
//! ers_power_kw = 30.0
//!
//! [network.link2]            # plain link, same keys without ers_power_kw
//! ```
//!
//! A uniform population always holds `dwpt_ratio * total_vehicles` vehicles.
//! A discrete population must list exactly that many values.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ers_core::model::{
    LinkParams, Network, Preferences, Scenario, SocDistribution, SocKind, TollSystem,
};
use serde::{Deserialize, Serialize};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub total_vehicles: f64,
    pub dwpt_ratio: f64,
    pub soc: SocConfig,
    pub prefs: PrefsConfig,
    pub toll: TollConfig,
    pub network: NetworkConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case")]
pub enum SocConfig {
    Uniform { s_lo: f64, s_hi: f64 },
    Discrete { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrefsConfig {
    pub vot: f64,
    pub voe: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum TollConfig {
    Free,
    Fixed { price: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub link1: LinkConfig,
    pub link2: LinkConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub free_flow_time: f64,
    pub capacity: f64,
    pub bpr_alpha: f64,
    pub bpr_beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ers_power_kw: Option<f64>,
}

/// Scalar parameters addressable by `--set` overrides and sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamPath {
    TollPrice,
    PrefsVoe,
    PrefsVot,
    DwptRatio,
    SocLo,
    SocHi,
}

impl ParamPath {
    pub const ALL: [ParamPath; 6] = [
        ParamPath::TollPrice,
        ParamPath::PrefsVoe,
        ParamPath::PrefsVot,
        ParamPath::DwptRatio,
        ParamPath::SocLo,
        ParamPath::SocHi,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamPath::TollPrice => "toll.price",
            ParamPath::PrefsVoe => "prefs.voe",
            ParamPath::PrefsVot => "prefs.vot",
            ParamPath::DwptRatio => "dwpt_ratio",
            ParamPath::SocLo => "soc.s_lo",
            ParamPath::SocHi => "soc.s_hi",
        }
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamPath {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamPath::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| HarnessError::Validation {
                field: s.to_owned(),
                reason: format!(
                    "unknown parameter path; expected one of {}",
                    ParamPath::ALL.map(ParamPath::as_str).join(", ")
                ),
            })
    }
}

/// Parses `path=value`.
pub fn parse_override(arg: &str) -> Result<(ParamPath, f64), HarnessError> {
    let (path, value) = arg
        .split_once('=')
        .ok_or_else(|| HarnessError::Validation {
            field: arg.to_owned(),
            reason: "override must look like path=value".into(),
        })?;
    let path: ParamPath = path.trim().parse()?;
    let value = value
        .trim()
        .parse::<f64>()
        .map_err(|e| HarnessError::Validation {
            field: path.to_string(),
            reason: format!("not a number: {e}"),
        })?;
    Ok((path, value))
}

fn invalid(prefix: &str, err: ers_core::Error) -> HarnessError {
    match err {
        ers_core::Error::Invalid { field, reason } => HarnessError::Validation {
            field: if prefix.is_empty() {
                field.to_owned()
            } else {
                format!("{prefix}.{field}")
            },
            reason: reason.to_owned(),
        },
        other => HarnessError::Core(other),
    }
}

impl LinkConfig {
    fn to_params(self, name: &str, ers: bool) -> Result<LinkParams, HarnessError> {
        match (ers, self.ers_power_kw) {
            (true, None) => {
                return Err(HarnessError::Validation {
                    field: format!("{name}.ers_power_kw"),
                    reason: "required on the ERS link".into(),
                })
            }
            (false, Some(_)) => {
                return Err(HarnessError::Validation {
                    field: format!("{name}.ers_power_kw"),
                    reason: "the plain link has no ERS".into(),
                })
            }
            _ => {}
        }
        LinkParams::new(
            self.free_flow_time,
            self.capacity,
            self.bpr_alpha,
            self.bpr_beta,
            self.ers_power_kw,
        )
        .map_err(|e| invalid(name, e))
    }

    fn from_params(p: &LinkParams) -> Self {
        LinkConfig {
            free_flow_time: p.free_flow_time(),
            capacity: p.capacity(),
            bpr_alpha: p.bpr_alpha(),
            bpr_beta: p.bpr_beta(),
            ers_power_kw: p.has_ers().then(|| p.ers_power_kw()),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Parse {
            origin: origin.to_owned(),
            message: e.to_string(),
        })
    }

    pub fn to_toml_string(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Output(e.to_string()))
    }

    /// Applies one override. Setting a price on a toll-free config switches
    /// it to a fixed toll.
    pub fn set(&mut self, path: ParamPath, value: f64) -> Result<(), HarnessError> {
        match path {
            ParamPath::TollPrice => self.toll = TollConfig::Fixed { price: value },
            ParamPath::PrefsVoe => self.prefs.voe = value,
            ParamPath::PrefsVot => self.prefs.vot = value,
            ParamPath::DwptRatio => self.dwpt_ratio = value,
            ParamPath::SocLo | ParamPath::SocHi => match &mut self.soc {
                SocConfig::Uniform { s_lo, s_hi } => {
                    if path == ParamPath::SocLo {
                        *s_lo = value
                    } else {
                        *s_hi = value
                    }
                }
                SocConfig::Discrete { .. } => {
                    return Err(HarnessError::Validation {
                        field: path.to_string(),
                        reason: "only applies to a uniform SoC distribution".into(),
                    })
                }
            },
        }
        Ok(())
    }

    /// Validates every field and builds the scenario.
    pub fn to_scenario(&self) -> Result<Scenario, HarnessError> {
        let link1 = self.network.link1.to_params("network.link1", true)?;
        let link2 = self.network.link2.to_params("network.link2", false)?;
        let network = Network::new(link1, link2).map_err(|e| invalid("network", e))?;
        let prefs =
            Preferences::new(self.prefs.vot, self.prefs.voe).map_err(|e| invalid("prefs", e))?;
        let toll = match self.toll {
            TollConfig::Free => TollSystem::Free,
            TollConfig::Fixed { price } => TollSystem::fixed(price).map_err(|e| invalid("", e))?,
        };
        if !(self.total_vehicles > 0.0) || !self.total_vehicles.is_finite() {
            return Err(HarnessError::Validation {
                field: "total_vehicles".into(),
                reason: "must be positive and finite".into(),
            });
        }
        if !(self.dwpt_ratio > 0.0 && self.dwpt_ratio < 1.0) {
            return Err(HarnessError::Validation {
                field: "dwpt_ratio".into(),
                reason: format!("must lie strictly between 0 and 1, got {}", self.dwpt_ratio),
            });
        }
        let soc = match &self.soc {
            SocConfig::Uniform { s_lo, s_hi } => {
                SocDistribution::uniform(*s_lo, *s_hi, self.dwpt_ratio * self.total_vehicles)
            }
            SocConfig::Discrete { values } => SocDistribution::discrete(values.clone()),
        }
        .map_err(|e| invalid("", e))?;
        Scenario::new(
            self.total_vehicles,
            self.dwpt_ratio,
            soc,
            prefs,
            toll,
            network,
        )
        .map_err(|e| invalid("", e))
    }

    pub fn from_scenario(scenario: &Scenario) -> Self {
        let soc = match scenario.soc().kind() {
            SocKind::UniformContinuum { s_lo, s_hi, .. } => SocConfig::Uniform { s_lo, s_hi },
            SocKind::DiscreteAgents(values) => SocConfig::Discrete {
                values: values.to_vec(),
            },
        };
        let toll = match scenario.toll() {
            TollSystem::Free => TollConfig::Free,
            TollSystem::Fixed(price) => TollConfig::Fixed { price },
        };
        ScenarioConfig {
            total_vehicles: scenario.total_vehicles(),
            dwpt_ratio: scenario.dwpt_ratio(),
            soc,
            prefs: PrefsConfig {
                vot: scenario.prefs().vot(),
                voe: scenario.prefs().voe(),
            },
            toll,
            network: NetworkConfig {
                link1: LinkConfig::from_params(scenario.network().link1()),
                link2: LinkConfig::from_params(scenario.network().link2()),
            },
        }
    }

    /// Current value of a parameter; `None` where it does not apply.
    pub fn get(&self, path: ParamPath) -> Option<f64> {
        match path {
            ParamPath::TollPrice => Some(match self.toll {
                TollConfig::Free => 0.0,
                TollConfig::Fixed { price } => price,
            }),
            ParamPath::PrefsVoe => Some(self.prefs.voe),
            ParamPath::PrefsVot => Some(self.prefs.vot),
            ParamPath::DwptRatio => Some(self.dwpt_ratio),
            ParamPath::SocLo => match self.soc {
                SocConfig::Uniform { s_lo, .. } => Some(s_lo),
                SocConfig::Discrete { .. } => None,
            },
            ParamPath::SocHi => match self.soc {
                SocConfig::Uniform { s_hi, .. } => Some(s_hi),
                SocConfig::Discrete { .. } => None,
            },
        }
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ScenarioConfig::from_toml_str(&text, &path.display().to_string())
}

/// Reads and validates a scenario config file.
pub fn load_scenario(path: &Path) -> Result<Scenario, HarnessError> {
    load_config(path)?.to_scenario()
}

/// Renders a scenario as a config document.
pub fn serialize_scenario(scenario: &Scenario) -> Result<String, HarnessError> {
    ScenarioConfig::from_scenario(scenario).to_toml_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::presets::TABLE1_CFG;

    fn table1() -> ScenarioConfig {
        ScenarioConfig::from_toml_str(TABLE1_CFG, "table1.cfg").unwrap()
    }

    #[test]
    fn bundled_table1() {
        let sc = table1().to_scenario().unwrap();
        assert_eq!(sc.total_vehicles(), 1000.0);
        assert_eq!(sc.dwpt_ratio(), 0.2);
        assert_eq!(sc.soc().min(), 0.1);
        assert_eq!(sc.soc().max(), 0.9);
        assert_eq!(sc.dwpt_mass(), 200.0);
        let l1 = sc.network().link1();
        assert_eq!(
            (
                l1.free_flow_time(),
                l1.capacity(),
                l1.bpr_alpha(),
                l1.bpr_beta(),
                l1.ers_power_kw()
            ),
            (10.0, 500.0, 0.15, 4.0, 30.0)
        );
        assert!(!sc.network().link2().has_ers());
        assert_eq!(sc.toll(), TollSystem::Fixed(100.0));
    }

    #[test]
    fn ratio_out_of_range_names_field() {
        let mut cfg = table1();
        cfg.set(ParamPath::DwptRatio, 1.2).unwrap();
        match cfg.to_scenario() {
            Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "dwpt_ratio"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_ers_power_is_rejected() {
        let text = TABLE1_CFG.replace("ers_power_kw = 30.0", "");
        let cfg = ScenarioConfig::from_toml_str(&text, "t").unwrap();
        match cfg.to_scenario() {
            Err(HarnessError::Validation { field, .. }) => {
                assert_eq!(field, "network.link1.ers_power_kw")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn soc_outside_unit_interval_names_field() {
        let mut cfg = table1();
        cfg.set(ParamPath::SocHi, 1.3).unwrap();
        match cfg.to_scenario() {
            Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "soc.s_hi"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_link_value_names_link() {
        let mut cfg = table1();
        cfg.network.link2.capacity = -3.0;
        match cfg.to_scenario() {
            Err(HarnessError::Validation { field, .. }) => {
                assert_eq!(field, "network.link2.capacity")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = ScenarioConfig::from_toml_str("total_vehicles = \n", "broken.cfg").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("broken.cfg") && msg.contains("line 1"),
            "{msg}"
        );
        let err = ScenarioConfig::from_toml_str(&TABLE1_CFG.replace("capacity", "capacty"), "x")
            .unwrap_err();
        assert!(err.to_string().contains("capacty"));
    }

    #[test]
    fn overrides() {
        assert_eq!(
            parse_override("toll.price=50").unwrap(),
            (ParamPath::TollPrice, 50.0)
        );
        assert!(parse_override("toll.prize=50").is_err());
        assert!(parse_override("toll.price").is_err());
        assert!(parse_override("prefs.voe=abc").is_err());

        let mut cfg = table1();
        cfg.toll = TollConfig::Free;
        cfg.set(ParamPath::TollPrice, 20.0).unwrap();
        assert_eq!(cfg.toll, TollConfig::Fixed { price: 20.0 });

        cfg.soc = SocConfig::Discrete { values: vec![0.5] };
        assert!(cfg.set(ParamPath::SocLo, 0.2).is_err());
        assert_eq!(cfg.get(ParamPath::SocLo), None);
    }

    #[test]
    fn discrete_round_trip() {
        let mut cfg = table1();
        cfg.total_vehicles = 10.0;
        cfg.dwpt_ratio = 0.3;
        cfg.soc = SocConfig::Discrete {
            values: vec![0.25, 0.125, 0.7],
        };
        cfg.toll = TollConfig::Free;
        let sc = cfg.to_scenario().unwrap();
        let text = serialize_scenario(&sc).unwrap();
        let back = ScenarioConfig::from_toml_str(&text, "rt")
            .unwrap()
            .to_scenario()
            .unwrap();
        assert_eq!(back, sc);
    }
}
