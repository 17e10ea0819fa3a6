//! Test-only helpers shared by the integration suites.

#![allow(dead_code)]

use biphoton::braun_twiss::{self, Arm, DetectorTuning};
use biphoton::qutrit::{BiphotonState, PolarizationMode};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-ish unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    m.qr().q()
}

/// Arm-2 mode `b` that makes `Ψ_ab` orthogonal to `input` for the given
/// arm-1 mode `a`. Solves the linear condition
/// `b_H*(√2 a_H* c1 + a_V* c2) + b_V*(a_H* c2 + √2 a_V* c3) = 0` by hand.
pub fn orthogonal_partner(input: &BiphotonState, a: &PolarizationMode) -> PolarizationMode {
    let [c1, c2, c3] = input.amplitudes();
    let [ah, av] = a.jones();
    let s2 = std::f64::consts::SQRT_2;
    let alpha = s2 * ah.conj() * c1 + av.conj() * c2;
    let beta = ah.conj() * c2 + s2 * av.conj() * c3;
    if alpha.norm() < 1e-15 && beta.norm() < 1e-15 {
        return PolarizationMode::H;
    }
    PolarizationMode::from_jones(beta.conj(), -alpha.conj()).unwrap()
}

/// Independent brute-force pairing formula over an explicit factorization.
pub fn pairing_oracle(
    c: &PolarizationMode,
    d: &PolarizationMode,
    tuning: &DetectorTuning,
) -> f64 {
    let (a, b) = (&tuning.arm1_mode, &tuning.arm2_mode);
    let pairing = a.inner(c) * b.inner(d) + a.inner(d) * b.inner(c);
    pairing.norm_sqr() / (4.0 * (1.0 + c.inner(d).norm_sqr()))
}

/// Singles extremes by a `(steps+1) × 2·steps` grid followed by repeated
/// local zooming around the best grid point. Never looks at the Stokes
/// vector.
pub fn refined_extremes(input: &BiphotonState, arm: Arm, steps: usize) -> (f64, f64) {
    let points = braun_twiss::grid_scan(input, arm, steps);
    let f = |t: f64, p: f64| braun_twiss::singles_intensity(input, arm, &PolarizationMode::new(t, p));
    let refine = |sign: f64| {
        let best = points
            .iter()
            .max_by(|x, y| (sign * x.intensity).total_cmp(&(sign * y.intensity)))
            .unwrap();
        let (mut t, mut p, mut v) = (best.theta, best.phi, sign * best.intensity);
        let mut h = std::f64::consts::PI / steps as f64;
        for _ in 0..60 {
            let mut moved = false;
            for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
                let cand = sign * f(t + dt, p + dp);
                if cand > v {
                    t += dt;
                    p += dp;
                    v = cand;
                    moved = true;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        sign * v
    };
    (refine(1.0), refine(-1.0))
}
