//! Polarization qutrits carried by a single-mode photon pair.
//!
//! A [`BiphotonState`] is the amplitude triple over `|2,0⟩, |1,1⟩, |0,2⟩` in
//! the H/V Fock basis. Every such state factorizes as
//! `a†(u) a†(v)|vac⟩ / ‖·‖` for an unordered pair of single-photon modes
//! `(u, v)`, i.e. a pair of points on the Poincaré sphere.
//!
//! Jones conventions: `H = (1,0)`, `V = (0,1)`, `D = (1,1)/√2`,
//! `D̄ = (1,−1)/√2`, `R = (1,i)/√2`, `L = (1,−i)/√2`. A mode with polar
//! angle `θ` and azimuth `φ` has Jones vector `(cos θ/2, e^{iφ} sin θ/2)`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, DEFAULT_CUTOFF};

/// Absolute tolerance on `Σ|c_i|² = 1`.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Amplitudes with modulus below this are treated as exact zeros when the
/// Majorana quadratic degenerates.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One photon's polarization as a point on the Poincaré sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationMode {
    /// Polar angle in `[0, π]`; `0` is H, `π` is V.
    pub theta: f64,
    /// Azimuth in `[0, 2π)`.
    pub phi: f64,
}

impl PolarizationMode {
    pub const H: PolarizationMode = PolarizationMode { theta: 0.0, phi: 0.0 };
    pub const V: PolarizationMode = PolarizationMode { theta: PI, phi: 0.0 };
    pub const D: PolarizationMode = PolarizationMode { theta: FRAC_PI_2, phi: 0.0 };
    pub const D_BAR: PolarizationMode = PolarizationMode { theta: FRAC_PI_2, phi: PI };
    pub const R: PolarizationMode = PolarizationMode { theta: FRAC_PI_2, phi: FRAC_PI_2 };
    pub const L: PolarizationMode = PolarizationMode { theta: FRAC_PI_2, phi: 3.0 * FRAC_PI_2 };

    /// Wraps `theta` into `[0, π]` and `phi` into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        PolarizationMode { theta, phi }
    }

    /// Mode of a Jones vector; its global phase and length are discarded.
    pub fn from_jones(h: Complex64, v: Complex64) -> Result<Self> {
        let (nh, nv) = (h.norm(), v.norm());
        if nh == 0.0 && nv == 0.0 {
            return Err(Error::ZeroState);
        }
        let theta = 2.0 * nv.atan2(nh);
        let phi = if nh == 0.0 || nv == 0.0 {
            0.0
        } else {
            (v.arg() - h.arg()).rem_euclid(TAU)
        };
        Ok(PolarizationMode::new(theta, phi))
    }

    /// `(cos θ/2, e^{iφ} sin θ/2)`, exact at the poles.
    pub fn jones(&self) -> [Complex64; 2] {
        let half = self.theta / 2.0;
        let (s, c) = if self.theta == 0.0 {
            (0.0, 1.0)
        } else if self.theta == PI {
            (1.0, 0.0)
        } else if self.theta == FRAC_PI_2 {
            (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
        } else {
            half.sin_cos()
        };
        [Complex64::new(c, 0.0), s * unit_phase(self.phi)]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PolarizationMode) -> Complex64 {
        let [a, b] = self.jones();
        let [c, d] = other.jones();
        a.conj() * c + b.conj() * d
    }

    /// Unit Poincaré vector `(sin θ cos φ, sin θ sin φ, cos θ)`, ordered to
    /// match [`BiphotonState::mean_stokes`].
    pub fn poincare_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Uniformly distributed on the Poincaré sphere.
    pub fn random_with<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        PolarizationMode::new((1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(), TAU * v)
    }

    /// The antipodal (orthogonal) mode.
    pub fn orthogonal(&self) -> Self {
        PolarizationMode::new(PI - self.theta, self.phi + PI)
    }

    /// Equality up to global phase: `|⟨u|v⟩| = 1` within `1e-12`.
    pub fn same_as(&self, other: &PolarizationMode) -> bool {
        (self.inner(other).norm() - 1.0).abs() < 1e-12
    }
}

impl FromStr for PolarizationMode {
    type Err = Error;

    /// Accepts `H`, `V`, `D`, `Db` (also `Dbar`, `D̄`), `R`, `L`, or a
    /// `theta:phi` pair in radians.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "H" | "h" => Ok(Self::H),
            "V" | "v" => Ok(Self::V),
            "D" | "d" => Ok(Self::D),
            "Db" | "db" | "Dbar" | "dbar" | "D̄" | "A" => Ok(Self::D_BAR),
            "R" | "r" => Ok(Self::R),
            "L" | "l" => Ok(Self::L),
            _ => {
                let (a, b) = t
                    .split_once(':')
                    .ok_or_else(|| Error::UnknownName(t.to_string()))?;
                let theta = a.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
                let phi = b.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
                Ok(PolarizationMode::new(theta, phi))
            }
        }
    }
}

impl fmt::Display for PolarizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(theta={:.6}, phi={:.6})", self.theta, self.phi)
    }
}

/// Unordered pair of Poincaré points plus the global phase that maps
/// `from_modes(first, second)` back onto the original amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincarePair {
    pub first: PolarizationMode,
    pub second: PolarizationMode,
    pub global_phase: f64,
}

impl PoincarePair {
    /// Orders the modes by `θ`, then `φ`.
    pub fn new(u: PolarizationMode, v: PolarizationMode, global_phase: f64) -> Self {
        let key = |m: &PolarizationMode| (m.theta, m.phi);
        let (first, second) = if key(&v).partial_cmp(&key(&u)) == Some(std::cmp::Ordering::Less) {
            (v, u)
        } else {
            (u, v)
        };
        PoincarePair {
            first,
            second,
            global_phase,
        }
    }

    /// `|⟨u|v⟩| = cos(α/2)`, `α` being the angle between the points.
    pub fn mode_overlap(&self) -> f64 {
        self.first.inner(&self.second).norm()
    }

    /// Angle subtended by the two points at the sphere's center.
    pub fn separation(&self) -> f64 {
        2.0 * self.mode_overlap().min(1.0).acos()
    }

    pub fn to_state(&self) -> BiphotonState {
        BiphotonState::from_modes(&self.first, &self.second).with_phase(self.global_phase)
    }
}

/// Normalized amplitudes `(c1, c2, c3)` over `|2,0⟩, |1,1⟩, |0,2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiphotonState {
    c: [Complex64; 3],
}

impl BiphotonState {
    /// Checks the normalization to [`NORM_TOLERANCE`].
    pub fn new(c1: Complex64, c2: Complex64, c3: Complex64) -> Result<Self> {
        let norm = (c1.norm_sqr() + c2.norm_sqr() + c3.norm_sqr()).sqrt();
        if (norm * norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                norm,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(BiphotonState { c: [c1, c2, c3] })
    }

    /// Rescales arbitrary non-zero amplitudes onto the unit sphere.
    pub fn normalize(c1: Complex64, c2: Complex64, c3: Complex64) -> Result<Self> {
        let norm = (c1.norm_sqr() + c2.norm_sqr() + c3.norm_sqr()).sqrt();
        if norm < 1e-12 {
            return Err(Error::ZeroState);
        }
        Ok(BiphotonState {
            c: [c1 / norm, c2 / norm, c3 / norm],
        })
    }

    /// Like [`normalize`](Self::normalize) but rejects inputs whose norm is
    /// off by more than `tolerance`.
    pub fn normalize_within(c: [Complex64; 3], tolerance: f64) -> Result<Self> {
        let norm = (c.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt();
        if (norm - 1.0).abs() > tolerance {
            return Err(Error::NotNormalized { norm, tolerance });
        }
        Self::normalize(c[0], c[1], c[2])
    }

    pub fn amplitudes(&self) -> [Complex64; 3] {
        self.c
    }

    pub fn c1(&self) -> Complex64 {
        self.c[0]
    }

    pub fn c2(&self) -> Complex64 {
        self.c[1]
    }

    pub fn c3(&self) -> Complex64 {
        self.c[2]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `e^{i·phase}`.
    pub fn with_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        BiphotonState {
            c: self.c.map(|z| z * p),
        }
    }

    /// `a†(u) a†(v)|vac⟩`, normalized by `√(1 + |⟨u|v⟩|²)`.
    pub fn from_modes(u: &PolarizationMode, v: &PolarizationMode) -> Self {
        let [uh, uv] = u.jones();
        let [vh, vv] = v.jones();
        let norm = (1.0 + u.inner(v).norm_sqr()).sqrt();
        BiphotonState {
            c: [
                SQRT_2 * (uh * vh) / norm,
                (uh * vv + uv * vh) / norm,
                SQRT_2 * (uv * vv) / norm,
            ],
        }
    }

    /// Factorizes the state into two Poincaré points via the roots of
    /// `(c1/√2) z² − c2 z + c3/√2 = 0`, `z = e^{iφ} tan(θ/2)`.
    pub fn to_modes(&self) -> Result<PoincarePair> {
        if self.norm_sqr().sqrt() < 1e-12 {
            return Err(Error::ZeroState);
        }
        let [c1, c2, c3] = self.c;
        let a = c1 / SQRT_2;
        let b = -c2;
        let c = c3 / SQRT_2;
        let at_infinity = PolarizationMode::V;

        let (u, v) = if c1.norm() < DEGENERACY_THRESHOLD {
            if c2.norm() < DEGENERACY_THRESHOLD {
                (at_infinity, at_infinity)
            } else {
                // -c2 z + c3/√2 = 0, plus the root at infinity
                (mode_from_root(c / c2), at_infinity)
            }
        } else if c1.norm() >= c3.norm() {
            let (z1, z2) = stable_quadratic_roots(a, b, c);
            (mode_from_root(z1), mode_from_root(z2))
        } else {
            // roots in w = 1/z of (c3/√2) w² − c2 w + c1/√2
            let (w1, w2) = stable_quadratic_roots(c, b, a);
            (mode_from_inverse_root(w1), mode_from_inverse_root(w2))
        };

        let rebuilt = BiphotonState::from_modes(&u, &v);
        let projection: Complex64 = rebuilt
            .c
            .iter()
            .zip(self.c.iter())
            .map(|(f, s)| f.conj() * s)
            .sum();
        Ok(PoincarePair::new(u, v, projection.arg()))
    }

    /// `⟨self|other⟩ = Σ c_i* c'_i`.
    pub fn overlap(&self, other: &BiphotonState) -> Complex64 {
        self.c
            .iter()
            .zip(other.c.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn is_orthogonal(&self, other: &BiphotonState, tol: f64) -> bool {
        self.overlap(other).norm() < tol
    }

    /// `P = 2cos(α/2) / (1 + cos²(α/2))` with `cos(α/2) = |⟨u|v⟩|` for the
    /// Poincaré pair.
    pub fn degree_of_polarization(&self) -> Result<f64> {
        let c = self.to_modes()?.mode_overlap().min(1.0);
        Ok(2.0 * c / (1.0 + c * c))
    }

    /// Two-photon Stokes vector
    /// `(⟨a_H†a_V + a_V†a_H⟩, ⟨−i a_H†a_V + i a_V†a_H⟩, ⟨n_H − n_V⟩)`,
    /// evaluated with the Fock engine.
    pub fn mean_stokes(&self) -> [f64; 3] {
        let psi = self.to_fock();
        let expect = |bra_mode: usize, ket_mode: usize| -> Complex64 {
            // ⟨a_bra† a_ket⟩ = ⟨a_bra ψ | a_ket ψ⟩
            let left = psi.annihilate(bra_mode).expect("mode in range");
            let right = psi.annihilate(ket_mode).expect("mode in range");
            left.inner(&right).expect("same space")
        };
        let hv = expect(0, 1);
        let vh = expect(1, 0);
        let nh = expect(0, 0).re;
        let nv = expect(1, 1).re;
        let i = Complex64::i();
        [(hv + vh).re, (-i * hv + i * vh).re, nh - nv]
    }

    /// Embedding as a two-mode (H, V) Fock state with cutoff 2.
    pub fn to_fock(&self) -> FockState {
        FockState::from_terms(
            2,
            DEFAULT_CUTOFF,
            [
                (vec![2, 0], self.c[0]),
                (vec![1, 1], self.c[1]),
                (vec![0, 2], self.c[2]),
            ],
        )
        .expect("two-photon kets fit the default cutoff")
    }

    /// Haar-random pure state, reproducible per seed.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng)
    }

    pub fn random_with<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut draw = || {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            };
            let (a, b, c) = (draw(), draw(), draw());
            if let Ok(s) = Self::normalize(a, b, c) {
                return s;
            }
        }
    }

    /// Evaluates the closed-form angle expressions for the Poincaré pair and
    /// compares them with the quadratic-root factorization.
    pub fn closed_form_angles(&self) -> ClosedFormDiagnostic {
        closed_form_diagnostic(self)
    }
}

impl fmt::Display for BiphotonState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.c;
        write!(
            f,
            "({:.9},{:.9}; {:.9},{:.9}; {:.9},{:.9})",
            a.re, a.im, b.re, b.im, c.re, c.im
        )
    }
}

/// `e^{iφ}`, exact on the four cardinal azimuths.
fn unit_phase(phi: f64) -> Complex64 {
    if phi == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if phi == FRAC_PI_2 {
        Complex64::new(0.0, 1.0)
    } else if phi == PI {
        Complex64::new(-1.0, 0.0)
    } else if phi == 3.0 * FRAC_PI_2 {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::from_polar(1.0, phi)
    }
}

/// `az² + bz + c = 0` without cancellation; `a` must be non-zero.
fn stable_quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let disc = (b * b - 4.0 * a * c).sqrt();
    let plus = b + disc;
    let minus = b - disc;
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    if big.norm() == 0.0 {
        // b = 0 and c = 0: double root at the origin
        return (ZERO, ZERO);
    }
    let q = -0.5 * big;
    (q / a, c / q)
}

fn mode_from_root(z: Complex64) -> PolarizationMode {
    PolarizationMode::from_jones(Complex64::new(1.0, 0.0), z).expect("non-zero Jones vector")
}

fn mode_from_inverse_root(w: Complex64) -> PolarizationMode {
    PolarizationMode::from_jones(w, Complex64::new(1.0, 0.0)).expect("non-zero Jones vector")
}

/// Named product states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StandardState {
    HV,
    RL,
    DDbar,
    HH,
    VV,
    DD,
    DbarDbar,
    RR,
    LL,
}

impl StandardState {
    pub const ALL: [StandardState; 9] = [
        StandardState::HV,
        StandardState::RL,
        StandardState::DDbar,
        StandardState::HH,
        StandardState::VV,
        StandardState::DD,
        StandardState::DbarDbar,
        StandardState::RR,
        StandardState::LL,
    ];

    pub fn modes(&self) -> (PolarizationMode, PolarizationMode) {
        use PolarizationMode as M;
        match self {
            StandardState::HV => (M::H, M::V),
            StandardState::RL => (M::R, M::L),
            StandardState::DDbar => (M::D, M::D_BAR),
            StandardState::HH => (M::H, M::H),
            StandardState::VV => (M::V, M::V),
            StandardState::DD => (M::D, M::D),
            StandardState::DbarDbar => (M::D_BAR, M::D_BAR),
            StandardState::RR => (M::R, M::R),
            StandardState::LL => (M::L, M::L),
        }
    }

    pub fn state(&self) -> BiphotonState {
        let (u, v) = self.modes();
        BiphotonState::from_modes(&u, &v)
    }

    pub fn label(&self) -> &'static str {
        match self {
            StandardState::HV => "HV",
            StandardState::RL => "RL",
            StandardState::DDbar => "DDb",
            StandardState::HH => "HH",
            StandardState::VV => "VV",
            StandardState::DD => "DD+",
            StandardState::DbarDbar => "DbDb",
            StandardState::RR => "RR",
            StandardState::LL => "LL",
        }
    }
}

impl FromStr for StandardState {
    type Err = Error;

    /// `DD` is read as the `D D̄` pair, matching the table shorthand; the
    /// two-photon `D, D` state is `DD+`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "HV" | "VH" => Ok(StandardState::HV),
            "RL" | "LR" => Ok(StandardState::RL),
            "DDb" | "DDbar" | "DD̄" | "DD" | "DbD" => Ok(StandardState::DDbar),
            "HH" => Ok(StandardState::HH),
            "VV" => Ok(StandardState::VV),
            "DD+" => Ok(StandardState::DD),
            "DbDb" | "DbarDbar" => Ok(StandardState::DbarDbar),
            "RR" => Ok(StandardState::RR),
            "LL" => Ok(StandardState::LL),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

pub fn standard_state(name: &str) -> Result<BiphotonState> {
    Ok(name.parse::<StandardState>()?.state())
}

/// Side-by-side evaluation of the closed-form angle expressions.
///
/// The azimuths are `φ₃/2 ± ½ arccos[X]` with phases taken relative to
/// `c1`; the polar angles use `cos(2φ − φ₃)` with `φ` the photon's own
/// azimuth. Since `φ₃/2` is only defined mod `π`, both branches are tried.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormDiagnostic {
    /// `None` when `c1` or `c3` vanishes and the expressions are singular.
    pub azimuths: Option<(f64, f64)>,
    pub polar_angles: Option<(f64, f64)>,
    /// Largest angular mismatch (radians) against the quadratic roots,
    /// compared as unordered sets; `None` when not evaluable.
    pub discrepancy: Option<f64>,
}

impl ClosedFormDiagnostic {
    pub fn agrees(&self, tol: f64) -> bool {
        matches!(self.discrepancy, Some(d) if d < tol)
    }
}

fn closed_form_diagnostic(state: &BiphotonState) -> ClosedFormDiagnostic {
    let singular = ClosedFormDiagnostic {
        azimuths: None,
        polar_angles: None,
        discrepancy: None,
    };
    let [c1, c2, c3] = state.c;
    let (m1, m2, m3) = (c1.norm(), c2.norm(), c3.norm());
    if m1 < DEGENERACY_THRESHOLD || m3 < DEGENERACY_THRESHOLD {
        return singular;
    }
    let p2 = c2.arg() - c1.arg();
    let p3 = c3.arg() - c1.arg();
    let ratio = m2 * m2 / (m1 * m3);
    let x = ratio / 2.0 - (1.0 + ratio * ratio / 4.0 - ratio * (2.0 * p2 - p3).cos()).sqrt();
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&x) {
        return singular;
    }
    let half = 0.5 * x.clamp(-1.0, 1.0).acos();
    let polar = |phi: f64| -> Option<(f64, f64)> {
        let cosine = (2.0 * phi - p3).cos();
        let den = 1.0 + m2 * m2 - 2.0 * m1 * m3 * cosine;
        let rad = (m2 * m2 - m1 * m3 * cosine).powi(2) - m1 * m1 * m3 * m3;
        if rad < -1e-12 || den.abs() < 1e-15 {
            return None;
        }
        let root = 2.0 * rad.max(0.0).sqrt();
        let t_plus = ((m1 * m1 - m3 * m3 + root) / den).clamp(-1.0, 1.0).acos();
        let t_minus = ((m1 * m1 - m3 * m3 - root) / den).clamp(-1.0, 1.0).acos();
        Some((t_plus, t_minus))
    };

    let roots = match state.to_modes() {
        Ok(p) => p,
        Err(_) => return singular,
    };
    // (mismatch, azimuths, polar angles)
    type Candidate = (f64, (f64, f64), (f64, f64));
    let mut best: Option<Candidate> = None;
    for shift in [0.0, PI] {
        let phis = (
            (p3 / 2.0 + shift + half).rem_euclid(TAU),
            (p3 / 2.0 + shift - half).rem_euclid(TAU),
        );
        let Some(thetas) = polar(phis.0) else { continue };
        let err = unordered_mismatch(
            (roots.first.theta, roots.second.theta),
            thetas,
            |a, b| (a - b).abs(),
        )
        .max(unordered_mismatch(
            (roots.first.phi, roots.second.phi),
            phis,
            azimuth_distance,
        ));
        if best.is_none_or(|(e, _, _)| err < e) {
            best = Some((err, phis, thetas));
        }
    }
    match best {
        Some((err, phis, thetas)) => ClosedFormDiagnostic {
            azimuths: Some(phis),
            polar_angles: Some(thetas),
            discrepancy: Some(err),
        },
        None => singular,
    }
}

fn azimuth_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn unordered_mismatch(x: (f64, f64), y: (f64, f64), dist: impl Fn(f64, f64) -> f64) -> f64 {
    let straight = dist(x.0, y.0).max(dist(x.1, y.1));
    let crossed = dist(x.0, y.1).max(dist(x.1, y.0));
    straight.min(crossed)
}
