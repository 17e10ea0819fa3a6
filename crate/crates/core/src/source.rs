//! Three-arm interferometric source: one down-converter per basis ket.
//!
//! Each arm emits one of `|2,0⟩, |1,1⟩, |0,2⟩` with an amplitude linear in
//! its pump field amplitude and a phase set by the arm's mirror. The arms
//! recombine coherently into a single biphoton.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qutrit::BiphotonState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisState {
    #[serde(rename = "20")]
    TwoZero,
    #[serde(rename = "11")]
    OneOne,
    #[serde(rename = "02")]
    ZeroTwo,
}

impl BasisState {
    pub const ALL: [BasisState; 3] = [BasisState::TwoZero, BasisState::OneOne, BasisState::ZeroTwo];

    pub fn index(&self) -> usize {
        match self {
            BasisState::TwoZero => 0,
            BasisState::OneOne => 1,
            BasisState::ZeroTwo => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmSetting {
    pub pump_amplitude: f64,
    #[serde(default)]
    pub phase: f64,
    pub basis_state: BasisState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub arms: [ArmSetting; 3],
}

impl SourceConfig {
    /// Arms in basis order with the given pump amplitudes and phases.
    pub fn new(amplitudes: [f64; 3], phases: [f64; 3]) -> Result<Self> {
        let arms = [0, 1, 2].map(|i| ArmSetting {
            pump_amplitude: amplitudes[i],
            phase: phases[i],
            basis_state: BasisState::ALL[i],
        });
        let config = SourceConfig { arms };
        config.validate()?;
        Ok(config)
    }

    /// Every basis ket in exactly one arm, amplitudes finite and
    /// non-negative.
    pub fn validate(&self) -> Result<()> {
        let mut seen = [false; 3];
        for arm in &self.arms {
            if !(arm.pump_amplitude.is_finite() && arm.pump_amplitude >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "pump amplitude {} must be finite and non-negative",
                    arm.pump_amplitude
                )));
            }
            if !arm.phase.is_finite() {
                return Err(Error::InvalidConfig("arm phase must be finite".into()));
            }
            let i = arm.basis_state.index();
            if seen[i] {
                return Err(Error::InvalidConfig(format!(
                    "basis state {:?} appears in more than one arm",
                    arm.basis_state
                )));
            }
            seen[i] = true;
        }
        Ok(())
    }

    /// Coherent sum of the three arms, normalized.
    pub fn emit(&self) -> Result<BiphotonState> {
        self.validate()?;
        let mut c = [Complex64::new(0.0, 0.0); 3];
        for arm in &self.arms {
            c[arm.basis_state.index()] = Complex64::from_polar(arm.pump_amplitude, arm.phase);
        }
        if c.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::AllArmsDark);
        }
        BiphotonState::normalize(c[0], c[1], c[2])
    }

    /// Pump amplitudes `|c_i|` and phases `arg c_i` that reproduce `target`.
    pub fn settings_for(target: &BiphotonState) -> Self {
        let c = target.amplitudes();
        let arms = [0, 1, 2].map(|i| ArmSetting {
            pump_amplitude: c[i].norm(),
            phase: if c[i].norm() == 0.0 { 0.0 } else { c[i].arg() },
            basis_state: BasisState::ALL[i],
        });
        SourceConfig { arms }
    }
}
