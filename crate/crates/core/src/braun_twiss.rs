//! Two-detector correlation scheme behind a nonpolarizing beam splitter.
//!
//! The input biphoton meets a 50/50 splitter, `a† → (a₁† + i a₂†)/√2`.
//! Arm 1 passes only polarization mode `a` and arm 2 only mode `b`; a
//! coincidence needs one photon through each filter. The coincidence
//! amplitude is computed twice: by brute force in the four-mode Fock space
//! (arm1-H, arm1-V, arm2-H, arm2-V) and by the pairing formula over a
//! factorization `(c, d)` of the input,
//!
//! ```text
//! A = i (⟨a|c⟩⟨b|d⟩ + ⟨a|d⟩⟨b|c⟩) / (2 ‖c†d†|vac⟩‖)
//! ```
//!
//! so `|A|² = |⟨Ψ_ab|Ψ_cd⟩|² (1 + |⟨a|b⟩|²) / 4`. Coincidences vanish iff
//! the input is orthogonal to the tuned state `Ψ_ab`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeMap, DEFAULT_CUTOFF};
use crate::qutrit::{BiphotonState, PolarizationMode, StandardState};

/// Fock-space mode indices after the splitter.
const ARM1_H: usize = 0;
const ARM1_V: usize = 1;
const ARM2_H: usize = 2;
const ARM2_V: usize = 3;

/// Output arm of the splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    One,
    Two,
}

impl Arm {
    fn base(&self) -> usize {
        match self {
            Arm::One => ARM1_H,
            Arm::Two => ARM2_H,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Arm::One),
            2 => Ok(Arm::Two),
            _ => Err(Error::InvalidConfig(format!("arm must be 1 or 2, got {i}"))),
        }
    }
}

/// Polarization modes selected by the filters in arm 1 (`a`) and arm 2 (`b`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorTuning {
    pub arm1_mode: PolarizationMode,
    pub arm2_mode: PolarizationMode,
}

impl DetectorTuning {
    pub fn new(arm1_mode: PolarizationMode, arm2_mode: PolarizationMode) -> Self {
        DetectorTuning {
            arm1_mode,
            arm2_mode,
        }
    }

    pub fn from_standard(state: StandardState) -> Self {
        let (a, b) = state.modes();
        DetectorTuning::new(a, b)
    }

    /// The biphoton `Ψ_ab` the device is tuned to.
    pub fn target(&self) -> BiphotonState {
        BiphotonState::from_modes(&self.arm1_mode, &self.arm2_mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceResult {
    /// Probability per incident pair of one photon through each filter.
    pub exact_probability: f64,
    /// `|⟨Ψ_ab|input⟩|²`.
    pub overlap_squared: f64,
    /// Probability that both photons leave through the same arm.
    pub same_arm_probability: f64,
    pub amplitude: Complex64,
}

/// Four-mode Fock state behind the splitter.
pub fn split(input: &BiphotonState) -> FockState {
    let [c1, c2, c3] = input.amplitudes();
    let embedded = FockState::from_terms(
        4,
        DEFAULT_CUTOFF,
        [
            (vec![2, 0, 0, 0], c1),
            (vec![1, 1, 0, 0], c2),
            (vec![0, 2, 0, 0], c3),
        ],
    )
    .expect("two photons fit the cutoff");
    embedded
        .apply_mode_map(&splitter_map())
        .expect("four-mode map on a four-mode state")
}

/// Input port modes (H, V) occupy indices 0 and 1, the unused port 2 and 3.
/// Column `j` is the image of input `a_j†`.
fn splitter_map() -> ModeMap {
    let t = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let r = Complex64::new(0.0, FRAC_1_SQRT_2);
    let o = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let rows = [
        t, o, r, o,
        o, t, o, r,
        r, o, t, o,
        o, r, o, t,
    ];
    ModeMap::from_row_slice(4, &rows).expect("4x4")
}

/// `a†(mode)` in the given arm applied to `state`.
fn create_in_arm(state: &FockState, arm: Arm, mode: &PolarizationMode) -> Result<FockState> {
    let [h, v] = mode.jones();
    let base = arm.base();
    state
        .create(base)?
        .scaled(h)
        .add_scaled(&state.create(base + 1)?, v)
}

/// `a(mode)` in the given arm applied to `state`.
fn annihilate_in_arm(state: &FockState, arm: Arm, mode: &PolarizationMode) -> Result<FockState> {
    let [h, v] = mode.jones();
    let base = arm.base();
    state
        .annihilate(base)?
        .scaled(h.conj())
        .add_scaled(&state.annihilate(base + 1)?, v.conj())
}

/// `a₁† b₂† |vac⟩`, the detection ket of a tuned coincidence.
fn detection_ket(tuning: &DetectorTuning) -> FockState {
    let vac = FockState::vacuum(4, DEFAULT_CUTOFF);
    let one = create_in_arm(&vac, Arm::One, &tuning.arm1_mode).expect("within cutoff");
    create_in_arm(&one, Arm::Two, &tuning.arm2_mode).expect("within cutoff")
}

/// Brute-force coincidence statistics in the four-mode Fock space.
pub fn coincidence_probability(input: &BiphotonState, tuning: &DetectorTuning) -> CoincidenceResult {
    let out = split(input);
    let amplitude = detection_ket(tuning).inner(&out).expect("same space");
    let same_arm_probability = out.outcome_probability(|n| {
        let arm1 = n[ARM1_H] + n[ARM1_V];
        let arm2 = n[ARM2_H] + n[ARM2_V];
        arm1 == 2 || arm2 == 2
    });
    CoincidenceResult {
        exact_probability: amplitude.norm_sqr(),
        overlap_squared: tuning.target().overlap(input).norm_sqr(),
        same_arm_probability,
        amplitude,
    }
}

/// Coincidence amplitude from the pairing formula for an explicit
/// factorization `input = e^{iγ} Ψ_cd`.
pub fn pairing_amplitude(
    c: &PolarizationMode,
    d: &PolarizationMode,
    global_phase: f64,
    tuning: &DetectorTuning,
) -> Complex64 {
    let (a, b) = (&tuning.arm1_mode, &tuning.arm2_mode);
    let pairing = a.inner(c) * b.inner(d) + a.inner(d) * b.inner(c);
    let norm = (1.0 + c.inner(d).norm_sqr()).sqrt();
    Complex64::new(0.0, 0.5) * pairing / norm * Complex64::from_polar(1.0, global_phase)
}

/// Closed-form coincidence probability via the Poincaré factorization.
pub fn pairing_probability(input: &BiphotonState, tuning: &DetectorTuning) -> Result<f64> {
    let pair = input.to_modes()?;
    Ok(pairing_amplitude(&pair.first, &pair.second, pair.global_phase, tuning).norm_sqr())
}

/// True iff the coincidence probability is below `tol²`.
pub fn orthogonality_test(input: &BiphotonState, tuning: &DetectorTuning, tol: f64) -> bool {
    coincidence_probability(input, tuning).exact_probability < tol * tol
}

/// Mean photon number in `analyzer` behind the given arm.
pub fn singles_intensity(input: &BiphotonState, arm: Arm, analyzer: &PolarizationMode) -> f64 {
    let lowered = annihilate_in_arm(&split(input), arm, analyzer).expect("mode in range");
    lowered.norm_sqr()
}

/// Distribution `[P(0), P(1), P(2)]` of the photon number passing
/// `analyzer` in the given arm, from the factorial moments `‖aψ‖²` and
/// `‖a²ψ‖²`.
pub fn filtered_number_distribution(
    input: &BiphotonState,
    arm: Arm,
    analyzer: &PolarizationMode,
) -> [f64; 3] {
    let once = annihilate_in_arm(&split(input), arm, analyzer).expect("mode in range");
    let twice = annihilate_in_arm(&once, arm, analyzer).expect("mode in range");
    let p2 = twice.norm_sqr() / 2.0;
    let p1 = (once.norm_sqr() - 2.0 * p2).max(0.0);
    [(1.0 - p1 - p2).max(0.0), p1, p2]
}

/// `(1 + S·n̂/2) / 2` from the input's mean Stokes vector.
pub fn singles_from_stokes(stokes: &[f64; 3], analyzer: &PolarizationMode) -> f64 {
    let n = analyzer.poincare_vector();
    let dot: f64 = stokes.iter().zip(n).map(|(s, k)| s * k).sum();
    (1.0 + dot / 2.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityScan {
    pub max: f64,
    pub min: f64,
    pub visibility: f64,
}

impl VisibilityScan {
    fn from_extremes(max: f64, min: f64) -> Self {
        let visibility = if max + min > 0.0 {
            (max - min) / (max + min)
        } else {
            0.0
        };
        VisibilityScan {
            max,
            min,
            visibility,
        }
    }
}

/// Singles extremes over all analyzers: evaluated along `±S`.
pub fn visibility_scan(input: &BiphotonState, arm: Arm) -> VisibilityScan {
    let s = input.mean_stokes();
    let len = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    let along = if len < 1e-15 {
        PolarizationMode::H
    } else {
        PolarizationMode::new((s[2] / len).clamp(-1.0, 1.0).acos(), s[1].atan2(s[0]))
    };
    let a = singles_intensity(input, arm, &along);
    let b = singles_intensity(input, arm, &along.orthogonal());
    VisibilityScan::from_extremes(a.max(b), a.min(b))
}

/// One analyzer setting of a sphere scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub theta: f64,
    pub phi: f64,
    pub intensity: f64,
}

/// Singles over a `(steps + 1) × 2·steps` grid in `(θ, φ)`.
pub fn grid_scan(input: &BiphotonState, arm: Arm, steps: usize) -> Vec<ScanPoint> {
    let steps = steps.max(1);
    let out = split(input);
    let mut points = Vec::with_capacity((steps + 1) * 2 * steps);
    for i in 0..=steps {
        let theta = PI * i as f64 / steps as f64;
        for j in 0..2 * steps {
            let phi = TAU * j as f64 / (2 * steps) as f64;
            let analyzer = PolarizationMode { theta, phi };
            let intensity = annihilate_in_arm(&out, arm, &analyzer)
                .expect("mode in range")
                .norm_sqr();
            points.push(ScanPoint {
                theta,
                phi,
                intensity,
            });
        }
    }
    points
}

/// Extremes and visibility of a grid scan.
pub fn summarize_scan(points: &[ScanPoint]) -> VisibilityScan {
    let max = points.iter().map(|p| p.intensity).fold(f64::MIN, f64::max);
    let min = points.iter().map(|p| p.intensity).fold(f64::MAX, f64::min);
    VisibilityScan::from_extremes(max, min)
}
