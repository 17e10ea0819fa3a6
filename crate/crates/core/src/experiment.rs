//! State literals and the TOML experiment file.
//!
//! A state literal is one of
//!
//! ```json
//! {"c": [[re, im], [re, im], [re, im]]}
//! {"modes": [{"theta": t, "phi": p}, {"theta": t, "phi": p}]}
//! {"named": "HV"}
//! ```
//!
//! Modes may also be given by name (`"H"`, `"Db"`, ...). Amplitude triples
//! are accepted when their norm is within `1e-6` of one and are then
//! renormalized exactly.
//!
//! An experiment file has the sections `state`, `tuning`, `source` and
//! `montecarlo`:
//!
//! ```toml
//! [state]
//! named = "DDb"
//!
//! [tuning]
//! arm1 = "H"
//! arm2 = "H"
//!
//! [montecarlo]
//! integration_time = 50.0
//! observable = "exact"
//! ```
//!
//! `source` replaces `state` by the output of a three-arm source. Unknown
//! keys are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::braun_twiss::DetectorTuning;
use crate::error::{Error, Result};
use crate::montecarlo::ExperimentConfig;
use crate::qutrit::{standard_state, BiphotonState, PolarizationMode, StandardState};
use crate::source::SourceConfig;

/// Accepted deviation of a literal's norm from one before renormalizing.
pub const LITERAL_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeLiteral {
    Named(String),
    Angles(AnglePair),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnglePair {
    pub theta: f64,
    pub phi: f64,
}

impl ModeLiteral {
    pub fn resolve(&self) -> Result<PolarizationMode> {
        match self {
            ModeLiteral::Named(name) => name.parse(),
            ModeLiteral::Angles(a) => {
                if !(a.theta.is_finite() && a.phi.is_finite()) {
                    return Err(Error::Parse("mode angles must be finite".into()));
                }
                Ok(PolarizationMode::new(a.theta, a.phi))
            }
        }
    }
}

impl From<PolarizationMode> for ModeLiteral {
    fn from(m: PolarizationMode) -> Self {
        ModeLiteral::Angles(AnglePair {
            theta: m.theta,
            phi: m.phi,
        })
    }
}

/// Exactly one of the fields must be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateLiteral {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<[[f64; 2]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<[ModeLiteral; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named: Option<String>,
}

impl StateLiteral {
    pub fn named(name: &str) -> Self {
        StateLiteral {
            named: Some(name.to_string()),
            ..Default::default()
        }
    }

    pub fn amplitudes(state: &BiphotonState) -> Self {
        StateLiteral {
            c: Some(state.amplitudes().map(|z| [z.re, z.im])),
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn resolve(&self) -> Result<BiphotonState> {
        match (&self.c, &self.modes, &self.named) {
            (Some(c), None, None) => {
                let amps = c.map(|[re, im]| Complex64::new(re, im));
                if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Parse("amplitudes must be finite".into()));
                }
                BiphotonState::normalize_within(amps, LITERAL_NORM_TOLERANCE)
            }
            (None, Some([u, v]), None) => Ok(BiphotonState::from_modes(&u.resolve()?, &v.resolve()?)),
            (None, None, Some(name)) => standard_state(name),
            (None, None, None) => Err(Error::Parse(
                "state literal needs one of `c`, `modes`, `named`".into(),
            )),
            _ => Err(Error::Parse(
                "state literal must set exactly one of `c`, `modes`, `named`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningLiteral {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm1: Option<ModeLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm2: Option<ModeLiteral>,
    /// A named product state whose two modes become `arm1` and `arm2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named: Option<String>,
}

impl TuningLiteral {
    pub fn resolve(&self) -> Result<DetectorTuning> {
        match (&self.arm1, &self.arm2, &self.named) {
            (Some(a), Some(b), None) => Ok(DetectorTuning::new(a.resolve()?, b.resolve()?)),
            (None, None, Some(name)) => Ok(DetectorTuning::from_standard(name.parse::<StandardState>()?)),
            _ => Err(Error::Parse(
                "tuning needs both `arm1` and `arm2`, or `named`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateLiteral>,
    pub tuning: TuningLiteral,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<ExperimentConfig>,
}

/// A loaded and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub input: BiphotonState,
    pub tuning: DetectorTuning,
    pub config: ExperimentConfig,
}

impl ExperimentFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }

    pub fn resolve(&self) -> Result<Experiment> {
        let input = match (&self.state, &self.source) {
            (Some(s), None) => s.resolve()?,
            (None, Some(src)) => src.emit()?,
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "give either `state` or `source`, not both".into(),
                ))
            }
            (None, None) => return Err(Error::InvalidConfig("missing `state` or `source`".into())),
        };
        let config = self.montecarlo.clone().unwrap_or_default();
        config.validate()?;
        Ok(Experiment {
            input,
            tuning: self.tuning.resolve()?,
            config,
        })
    }
}
