//! Polarization qutrits encoded in single-mode photon pairs.
//!
//! The crate models the full chain: a three-arm source that prepares an
//! arbitrary biphoton, a nonpolarizing beam splitter followed by a
//! polarization filter and detector in each arm, and the coincidence
//! statistics that vanish exactly when the input is orthogonal to the
//! state the detectors are tuned to.

pub mod braun_twiss;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod montecarlo;
pub mod qutrit;
pub mod source;

pub use braun_twiss::{Arm, CoincidenceResult, DetectorTuning};
pub use error::{Error, Result};
pub use fock::{FockState, ModeMap, Occupation};
pub use montecarlo::{CountRecord, ExperimentConfig, Observable};
pub use qutrit::{BiphotonState, PoincarePair, PolarizationMode, StandardState};
pub use source::{ArmSetting, BasisState, SourceConfig};

