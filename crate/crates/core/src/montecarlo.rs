//! Photon-counting simulation of the coincidence experiment.
//!
//! Pairs arrive as a Poisson stream. Each pair independently produces a
//! true coincidence, a click in arm 1 only, a click in arm 2 only, or
//! nothing. Detector dark counts add to the singles, and accidental
//! coincidences are an independent Poisson stream with mean `R₁R₂τT`, where
//! `R₁, R₂` are the expected singles rates.
//!
//! The default configuration is fitted, not derived: `pair_rate·η₁η₂ =
//! 14.8 s⁻¹` puts the matched `HV → HV` true rate at 3.7 s⁻¹, and the
//! dark rates and window place the accidental floor near 0.3 s⁻¹, for a
//! matched total of 4.0 s⁻¹.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::braun_twiss::{self, Arm, DetectorTuning};
use crate::error::{Error, Result};
use crate::qutrit::{BiphotonState, StandardState};

/// Which per-pair coincidence probability drives the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    /// `|⟨Ψ_ab|input⟩|² / 4`: the exact probability for orthogonal filter
    /// modes, without the `(1 + |⟨a|b⟩|²)` enhancement of degenerate ones.
    #[default]
    Overlap2,
    /// Exact Fock-space probability of one photon through each filter.
    Exact,
}

impl std::str::FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overlap2" => Ok(Observable::Overlap2),
            "exact" => Ok(Observable::Exact),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Pairs per second reaching the splitter.
    pub pair_rate: f64,
    /// Seconds.
    pub integration_time: f64,
    pub efficiency1: f64,
    pub efficiency2: f64,
    /// Counts per second.
    pub dark_rate1: f64,
    pub dark_rate2: f64,
    /// Seconds.
    pub coincidence_window: f64,
    pub observable: Observable,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pair_rate: 370.0,
            integration_time: 100.0,
            efficiency1: 0.2,
            efficiency2: 0.2,
            dark_rate1: 600.0,
            dark_rate2: 600.0,
            coincidence_window: 7.5e-7,
            observable: Observable::Overlap2,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("pair_rate", self.pair_rate),
            ("integration_time", self.integration_time),
            ("dark_rate1", self.dark_rate1),
            ("dark_rate2", self.dark_rate2),
            ("coincidence_window", self.coincidence_window),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        for (name, v) in [("efficiency1", self.efficiency1), ("efficiency2", self.efficiency2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CountRecord {
    pub singles1: u64,
    pub singles2: u64,
    /// True plus accidental coincidences.
    pub coincidences: u64,
    pub true_coincidences: u64,
    pub accidental_coincidences: u64,
    /// Expected accidental count `R₁R₂τT`.
    pub accidental_estimate: f64,
    /// Seconds.
    pub duration: f64,
}

impl CountRecord {
    pub fn rate(&self) -> f64 {
        if self.duration > 0.0 {
            self.coincidences as f64 / self.duration
        } else {
            0.0
        }
    }

    /// Poisson standard error of [`rate`](Self::rate).
    pub fn stderr(&self) -> f64 {
        if self.duration > 0.0 {
            (self.coincidences as f64).sqrt() / self.duration
        } else {
            0.0
        }
    }

    /// Sum of two independent runs.
    pub fn merge(&self, other: &CountRecord) -> CountRecord {
        CountRecord {
            singles1: self.singles1 + other.singles1,
            singles2: self.singles2 + other.singles2,
            coincidences: self.coincidences + other.coincidences,
            true_coincidences: self.true_coincidences + other.true_coincidences,
            accidental_coincidences: self.accidental_coincidences + other.accidental_coincidences,
            accidental_estimate: self.accidental_estimate + other.accidental_estimate,
            duration: self.duration + other.duration,
        }
    }

    pub const CSV_HEADER: &'static str =
        "singles1,singles2,coincidences,true_coincidences,accidental_coincidences,accidental_estimate,duration,rate,stderr";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            self.singles1,
            self.singles2,
            self.coincidences,
            self.true_coincidences,
            self.accidental_coincidences,
            self.accidental_estimate,
            self.duration,
            self.rate(),
            self.stderr()
        )
    }
}

/// `R₁ R₂ τ`, the uncorrelated-coincidence rate.
pub fn accidental_rate(singles1_rate: f64, singles2_rate: f64, window: f64) -> f64 {
    singles1_rate * singles2_rate * window
}

/// Per-pair probabilities derived from the state and tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStatistics {
    /// Selected observable before detector efficiencies.
    pub coincidence: f64,
    /// Probability that a pair makes arm 1 (resp. arm 2) click.
    pub click1: f64,
    pub click2: f64,
}

impl PairStatistics {
    pub fn new(input: &BiphotonState, tuning: &DetectorTuning, config: &ExperimentConfig) -> Self {
        let result = braun_twiss::coincidence_probability(input, tuning);
        let coincidence = match config.observable {
            Observable::Exact => result.exact_probability,
            Observable::Overlap2 => result.overlap_squared / 4.0,
        };
        let click = |arm, mode, eta: f64| {
            let [_, p1, p2] = braun_twiss::filtered_number_distribution(input, arm, mode);
            p1 * eta + p2 * (1.0 - (1.0 - eta).powi(2))
        };
        PairStatistics {
            coincidence,
            click1: click(Arm::One, &tuning.arm1_mode, config.efficiency1),
            click2: click(Arm::Two, &tuning.arm2_mode, config.efficiency2),
        }
    }

    /// `[coincidence, arm 1 only, arm 2 only]` per pair, efficiencies
    /// included. Under `overlap2` the marginals are rescaled if they would
    /// overflow a unit total.
    pub fn categories(&self, config: &ExperimentConfig) -> [f64; 3] {
        let both = self.coincidence * config.efficiency1 * config.efficiency2;
        let mut only1 = (self.click1 - both).max(0.0);
        let mut only2 = (self.click2 - both).max(0.0);
        let room = (1.0 - both).max(0.0);
        if only1 + only2 > room {
            let k = room / (only1 + only2);
            only1 *= k;
            only2 *= k;
        }
        [both, only1, only2]
    }

    /// Expected singles rates `(R₁, R₂)` in counts per second.
    pub fn singles_rates(&self, config: &ExperimentConfig) -> (f64, f64) {
        (
            config.pair_rate * self.click1 + config.dark_rate1,
            config.pair_rate * self.click2 + config.dark_rate2,
        )
    }
}

/// Expected coincidence rate, true plus accidental, in s⁻¹.
pub fn expected_rate(input: &BiphotonState, tuning: &DetectorTuning, config: &ExperimentConfig) -> f64 {
    let stats = PairStatistics::new(input, tuning, config);
    let [both, _, _] = stats.categories(config);
    let (r1, r2) = stats.singles_rates(config);
    config.pair_rate * both + accidental_rate(r1, r2, config.coincidence_window)
}

/// One simulated integration, deterministic in `config.seed`.
pub fn run(input: &BiphotonState, tuning: &DetectorTuning, config: &ExperimentConfig) -> Result<CountRecord> {
    run_stream(input, tuning, config, 0)
}

/// Like [`run`] on an independent substream of the seed's generator.
pub fn run_stream(
    input: &BiphotonState,
    tuning: &DetectorTuning,
    config: &ExperimentConfig,
    stream: u64,
) -> Result<CountRecord> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);

    let t = config.integration_time;
    let stats = PairStatistics::new(input, tuning, config);
    let [both, only1, only2] = stats.categories(config);

    let pairs = poisson(&mut rng, config.pair_rate * t);
    let true_coincidences = binomial(&mut rng, pairs, both);
    let rest = pairs - true_coincidences;
    let singles_only1 = binomial(&mut rng, rest, conditional(only1, both));
    let rest = rest - singles_only1;
    let singles_only2 = binomial(&mut rng, rest, conditional(only2, both + only1));

    let dark1 = poisson(&mut rng, config.dark_rate1 * t);
    let dark2 = poisson(&mut rng, config.dark_rate2 * t);

    let (r1, r2) = stats.singles_rates(config);
    let accidental_estimate = accidental_rate(r1, r2, config.coincidence_window) * t;
    let accidental_coincidences = poisson(&mut rng, accidental_estimate);

    Ok(CountRecord {
        singles1: true_coincidences + singles_only1 + dark1,
        singles2: true_coincidences + singles_only2 + dark2,
        coincidences: true_coincidences + accidental_coincidences,
        true_coincidences,
        accidental_coincidences,
        accidental_estimate,
        duration: t,
    })
}

/// `p / (1 - used)`: the probability of a category given that none of the
/// earlier ones occurred.
fn conditional(p: f64, used: f64) -> f64 {
    let left = 1.0 - used;
    if left <= 0.0 {
        0.0
    } else {
        (p / left).clamp(0.0, 1.0)
    }
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as u64
}

fn binomial<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    let d = Binomial::new(n, p.min(1.0)).expect("probability in [0, 1]");
    d.sample(rng)
}

/// The seven (input, detected) combinations of the published table, with
/// the reported rate and its uncertainty in s⁻¹.
pub const TABLE_ROWS: [(StandardState, StandardState, f64, f64); 7] = [
    (StandardState::HV, StandardState::HV, 4.0, 0.4),
    (StandardState::RL, StandardState::HV, 0.5, 0.25),
    (StandardState::DDbar, StandardState::HV, 0.25, 0.1),
    (StandardState::HV, StandardState::DDbar, 0.25, 0.1),
    (StandardState::DDbar, StandardState::DDbar, 3.8, 0.4),
    (StandardState::HV, StandardState::HH, 0.15, 0.05),
    (StandardState::DDbar, StandardState::HH, 1.9, 0.2),
];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub input: StandardState,
    pub detected: StandardState,
    pub input_polarization: f64,
    pub detected_polarization: f64,
    pub exact_probability: f64,
    pub overlap_squared: f64,
    /// Selected observable per pair.
    pub probability: f64,
    pub orthogonal: bool,
    /// Present when simulated.
    pub record: Option<CountRecord>,
}

impl TableRow {
    pub fn rate(&self) -> Option<f64> {
        self.record.map(|r| r.rate())
    }
}

/// Ideal probabilities for every table row, plus a simulated record per
/// row when `simulate` is set. Row `i` draws from substream `i`.
pub fn reproduce_table(config: &ExperimentConfig, simulate: bool) -> Result<Vec<TableRow>> {
    config.validate()?;
    TABLE_ROWS
        .iter()
        .enumerate()
        .map(|(i, &(input, detected, _, _))| {
            let state = input.state();
            let tuning = DetectorTuning::from_standard(detected);
            let result = braun_twiss::coincidence_probability(&state, &tuning);
            let probability = match config.observable {
                Observable::Exact => result.exact_probability,
                Observable::Overlap2 => result.overlap_squared / 4.0,
            };
            let record = if simulate {
                Some(run_stream(&state, &tuning, config, i as u64)?)
            } else {
                None
            };
            Ok(TableRow {
                input,
                detected,
                input_polarization: state.degree_of_polarization()?,
                detected_polarization: tuning.target().degree_of_polarization()?,
                exact_probability: result.exact_probability,
                overlap_squared: result.overlap_squared,
                probability,
                orthogonal: braun_twiss::orthogonality_test(&state, &tuning, 1e-10),
                record,
            })
        })
        .collect()
}

pub const TABLE_MC_HEADER: &str = "input,detected,P_in,P_det,rate,stderr";
pub const TABLE_IDEAL_HEADER: &str =
    "input,detected,P_in,P_det,probability,exact_probability,overlap_squared,orthogonal";

/// CSV rendering of [`reproduce_table`] output, header included.
pub fn table_csv(rows: &[TableRow]) -> String {
    let simulated = rows.iter().all(|r| r.record.is_some()) && !rows.is_empty();
    let mut out = String::new();
    out.push_str(if simulated { TABLE_MC_HEADER } else { TABLE_IDEAL_HEADER });
    out.push('\n');
    for row in rows {
        let lead = format!(
            "{},{},{:.6},{:.6}",
            row.input.label(),
            row.detected.label(),
            row.input_polarization,
            row.detected_polarization
        );
        match (&row.record, simulated) {
            (Some(rec), true) => {
                out.push_str(&format!("{lead},{:.6},{:.6}\n", rec.rate(), rec.stderr()));
            }
            _ => {
                out.push_str(&format!(
                    "{lead},{:.9},{:.9},{:.9},{}\n",
                    row.probability,
                    row.exact_probability,
                    row.overlap_squared,
                    if row.orthogonal { "yes" } else { "no" }
                ));
            }
        }
    }
    out
}

/// Sums `runs` independent integrations on substreams `0..runs`.
pub fn run_repeated(
    input: &BiphotonState,
    tuning: &DetectorTuning,
    config: &ExperimentConfig,
    runs: u64,
) -> Result<CountRecord> {
    (0..runs).try_fold(CountRecord::default(), |acc, k| {
        Ok(acc.merge(&run_stream(input, tuning, config, k)?))
    })
}
