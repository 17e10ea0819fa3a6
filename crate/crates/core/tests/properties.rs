mod common;

use biphoton::braun_twiss::{self, Arm, DetectorTuning};
use biphoton::fock::{FockState, ModeMap};
use biphoton::montecarlo::{self, ExperimentConfig, Observable};
use biphoton::qutrit::{BiphotonState, PolarizationMode, StandardState};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn random_fock<R: rand::Rng>(rng: &mut R, modes: usize) -> FockState {
    // every occupation with at most two photons
    let mut terms = Vec::new();
    let mut push = |v: Vec<u32>, rng: &mut R| terms.push((v, gaussian_complex(rng)));
    push(vec![0; modes], rng);
    for i in 0..modes {
        let mut v = vec![0; modes];
        v[i] = 1;
        push(v, rng);
        for j in i..modes {
            let mut w = vec![0; modes];
            w[i] += 1;
            w[j] += 1;
            push(w, rng);
        }
    }
    FockState::from_terms(modes, 2, terms).unwrap().normalized().unwrap()
}

fn total_number(s: &FockState) -> f64 {
    (0..s.mode_count()).map(|m| s.number_expectation(m).unwrap()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_maps_preserve_inner_products(seed in any::<u64>(), modes in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = ModeMap::new(random_unitary(&mut rng, modes)).unwrap();
        prop_assert!(map.is_unitary());
        let (x, y) = (random_fock(&mut rng, modes), random_fock(&mut rng, modes));
        let before = x.inner(&y).unwrap();
        let after = x.apply_mode_map(&map).unwrap().inner(&y.apply_mode_map(&map).unwrap()).unwrap();
        prop_assert!((before - after).norm() < 1e-12);
    }

    #[test]
    fn adjoint_map_undoes_map(seed in any::<u64>(), modes in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = ModeMap::new(random_unitary(&mut rng, modes)).unwrap();
        let s = random_fock(&mut rng, modes);
        let back = s.apply_mode_map(&map).unwrap().apply_mode_map(&map.adjoint()).unwrap();
        prop_assert!(back.add_scaled(&s, Complex64::new(-1.0, 0.0)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn photon_number_is_conserved(seed in any::<u64>(), modes in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = ModeMap::new(random_unitary(&mut rng, modes)).unwrap();
        let s = random_fock(&mut rng, modes);
        let out = s.apply_mode_map(&map).unwrap();
        prop_assert!((total_number(&s) - total_number(&out)).abs() < 1e-12);
    }

    #[test]
    fn from_modes_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = PolarizationMode::random_with(&mut rng);
        let v = PolarizationMode::random_with(&mut rng);
        prop_assert_eq!(BiphotonState::from_modes(&u, &v), BiphotonState::from_modes(&v, &u));
    }

    #[test]
    fn overlap_pairing_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [a, b, c, d] = [0; 4].map(|_| PolarizationMode::random_with(&mut rng));
        let lhs = BiphotonState::from_modes(&a, &b).overlap(&BiphotonState::from_modes(&c, &d));
        let rhs = (a.inner(&c) * b.inner(&d) + a.inner(&d) * b.inner(&c))
            / ((1.0 + a.inner(&b).norm_sqr()) * (1.0 + c.inner(&d).norm_sqr())).sqrt();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn overlap_matches_fock_inner_and_cauchy_schwarz(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (x, y) = (BiphotonState::random(s1), BiphotonState::random(s2));
        let direct = x.overlap(&y);
        let engine = x.to_fock().inner(&y.to_fock()).unwrap();
        prop_assert!((direct - engine).norm() < 1e-12);
        prop_assert!(direct.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn polarization_extremes_track_pair_geometry(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = PolarizationMode::random_with(&mut rng);
        let antipodal = BiphotonState::from_modes(&u, &u.orthogonal());
        prop_assert!(antipodal.degree_of_polarization().unwrap() < 1e-8);
        prop_assert!(antipodal.to_modes().unwrap().mode_overlap() < 1e-9);
        let coincident = BiphotonState::from_modes(&u, &u);
        prop_assert!((coincident.degree_of_polarization().unwrap() - 1.0).abs() < 1e-9);
        let generic = BiphotonState::random(seed);
        let p = generic.degree_of_polarization().unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn factorization_order_and_phase_do_not_matter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = BiphotonState::random(seed);
        let tuning = DetectorTuning::new(
            PolarizationMode::random_with(&mut rng),
            PolarizationMode::random_with(&mut rng),
        );
        let pair = input.to_modes().unwrap();
        let forward = braun_twiss::pairing_amplitude(&pair.first, &pair.second, pair.global_phase, &tuning);
        let swapped = braun_twiss::pairing_amplitude(&pair.second, &pair.first, pair.global_phase, &tuning);
        prop_assert!((forward - swapped).norm() < 1e-12);
        // Jones vectors of the roots rescaled by arbitrary phases: same |A|²
        let oracle = pairing_oracle(&pair.second, &pair.first, &tuning);
        prop_assert!((forward.norm_sqr() - oracle).abs() < 1e-12);
        let exact = braun_twiss::coincidence_probability(&input, &tuning);
        prop_assert!((exact.amplitude - forward).norm() < 1e-12);
    }

    #[test]
    fn tuned_probability_relation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = BiphotonState::random(seed);
        let a = PolarizationMode::random_with(&mut rng);
        for b in [PolarizationMode::random_with(&mut rng), a.orthogonal()] {
            let t = DetectorTuning::new(a, b);
            let r = braun_twiss::coincidence_probability(&input, &t);
            let factor = (1.0 + a.inner(&b).norm_sqr()) / 4.0;
            prop_assert!((r.exact_probability - r.overlap_squared * factor).abs() < 1e-12);
            prop_assert!((r.same_arm_probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn singles_match_stokes_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = BiphotonState::random(seed);
        let analyzer = PolarizationMode::random_with(&mut rng);
        let s = input.mean_stokes();
        for arm in [Arm::One, Arm::Two] {
            let engine = braun_twiss::singles_intensity(&input, arm, &analyzer);
            prop_assert!((engine - braun_twiss::singles_from_stokes(&s, &analyzer)).abs() < 1e-12);
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&engine));
        }
    }
}

#[test]
fn ladder_algebra_on_every_basis_state() {
    // cutoff 3 so that a† never overflows on the ≤ 2 photon kets
    let modes = 3;
    let mut basis = vec![vec![0u32; modes]];
    for i in 0..modes {
        let mut v = vec![0; modes];
        v[i] = 1;
        basis.push(v.clone());
        for j in i..modes {
            let mut w = vec![0; modes];
            w[i] += 1;
            w[j] += 1;
            basis.push(w);
        }
    }
    for counts in basis {
        let s = FockState::from_terms(modes, 3, [(counts.clone(), Complex64::new(1.0, 0.0))]).unwrap();
        for m in 0..modes {
            let a_adag = s.create(m).unwrap().annihilate(m).unwrap();
            let lowered = s.annihilate(m).unwrap();
            let adag_a = if lowered.is_zero() { lowered } else { lowered.create(m).unwrap() };
            let commutator = a_adag.add_scaled(&adag_a, Complex64::new(-1.0, 0.0)).unwrap();
            let resid = commutator.add_scaled(&s, Complex64::new(-1.0, 0.0)).unwrap();
            assert!(resid.norm() < 1e-12, "{counts:?} mode {m}");
        }
    }
}

#[test]
fn visibility_closed_form_matches_refined_grid() {
    for seed in 0..20 {
        let input = BiphotonState::random(seed);
        let closed = braun_twiss::visibility_scan(&input, Arm::One);
        let (max, min) = refined_extremes(&input, Arm::One, 71);
        let vis = (max - min) / (max + min);
        assert!((closed.max - max).abs() < 1e-6, "seed {seed}");
        assert!((closed.min - min).abs() < 1e-6, "seed {seed}");
        assert!((closed.visibility - vis).abs() < 1e-6, "seed {seed}");
    }
}

#[test]
fn orthogonal_partner_oracle_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..100 {
        let input = BiphotonState::random(seed);
        let a = PolarizationMode::random_with(&mut rng);
        let b = orthogonal_partner(&input, &a);
        assert!(BiphotonState::from_modes(&a, &b).overlap(&input).norm() < 1e-12);
    }
}

#[test]
fn monte_carlo_converges_to_expected_rate() {
    let cfg = ExperimentConfig {
        integration_time: 200.0,
        ..Default::default()
    };
    let input = StandardState::DDbar.state();
    let tuning = DetectorTuning::from_standard(StandardState::HH);
    let expected = montecarlo::expected_rate(&input, &tuning, &cfg);
    for seed in 0..10 {
        let rec = montecarlo::run(&input, &tuning, &ExperimentConfig { seed, ..cfg.clone() }).unwrap();
        let se = (expected * cfg.integration_time).sqrt() / cfg.integration_time;
        assert!((rec.rate() - expected).abs() < 5.0 * se, "seed {seed}: {} vs {expected}", rec.rate());
        assert!(rec.coincidences <= rec.singles1.min(rec.singles2) + rec.accidental_coincidences);
    }
}

#[test]
fn exact_observable_on_orthogonal_pairs_has_no_true_coincidences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..10 {
        let input = BiphotonState::random(seed);
        let a = PolarizationMode::random_with(&mut rng);
        let tuning = DetectorTuning::new(a, orthogonal_partner(&input, &a));
        let cfg = ExperimentConfig {
            observable: Observable::Exact,
            seed,
            ..Default::default()
        };
        let rec = montecarlo::run(&input, &tuning, &cfg).unwrap();
        assert_eq!(rec.true_coincidences, 0);
    }
}

#[test]
fn counts_scale_with_integration_time() {
    let input = StandardState::HV.state();
    let tuning = DetectorTuning::from_standard(StandardState::HV);
    let base = ExperimentConfig::default();
    let k = 4.0;
    let long = ExperimentConfig {
        integration_time: base.integration_time * k,
        ..base.clone()
    };
    let short = montecarlo::run_repeated(&input, &tuning, &base, 10).unwrap();
    let longer = montecarlo::run_repeated(&input, &tuning, &long, 10).unwrap();
    let ratio = longer.coincidences as f64 / short.coincidences as f64;
    // both sums have > 4000 counts; 5σ on the ratio is well under 0.5
    assert!((ratio - k).abs() < 0.5, "{ratio}");
    let singles_ratio = longer.singles1 as f64 / short.singles1 as f64;
    assert!((singles_ratio - k).abs() < 0.1, "{singles_ratio}");
}
