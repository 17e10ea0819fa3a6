use biphoton_web::{coincidence_report, named_amplitudes, scan_intensities, state_report};
use serde_json::Value;

fn json(text: String) -> Value {
    serde_json::from_str(&text).unwrap()
}

#[test]
fn scan_extremes_match_degree_of_polarization() {
    for name in ["HV", "HH", "RL", "DDb", "DD+"] {
        let c = named_amplitudes(name).unwrap();
        let p = json(state_report(&c).unwrap())["degree_of_polarization"].as_f64().unwrap();
        let grid = scan_intensities(&c, 2, 8).unwrap();
        let max = grid.iter().cloned().fold(f64::MIN, f64::max);
        let min = grid.iter().cloned().fold(f64::MAX, f64::min);
        // Named states have their Stokes axis on the grid, so the grid hits the extremes.
        assert!(((max - min) / (max + min) - p).abs() < 1e-9, "{name}");
    }
}

#[test]
fn photons_reproduce_state() {
    let c = [0.3, 0.1, -0.5, 0.7, 0.2, -0.4];
    let r = json(state_report(&c).unwrap());
    let vectors: Vec<[f64; 3]> = (0..2)
        .map(|k| {
            let v = &r["photons"][k]["vector"];
            [0, 1, 2].map(|i| v[i].as_f64().unwrap())
        })
        .collect();
    let stokes: Vec<f64> = (0..3).map(|i| r["stokes"][i].as_f64().unwrap()).collect();
    // The mean Stokes vector is the photons' Poincaré vectors weighted by
    // the state's normalization, so it must lie along their sum.
    let sum = [0, 1, 2].map(|i| vectors[0][i] + vectors[1][i]);
    let cross = [
        sum[1] * stokes[2] - sum[2] * stokes[1],
        sum[2] * stokes[0] - sum[0] * stokes[2],
        sum[0] * stokes[1] - sum[1] * stokes[0],
    ];
    assert!(cross.iter().all(|x| x.abs() < 1e-9), "{cross:?}");
}

#[test]
fn tuning_to_the_state_itself_is_not_orthogonal() {
    let c = [0.3, 0.1, -0.5, 0.7, 0.2, -0.4];
    let r = json(state_report(&c).unwrap());
    let angle = |k: usize, key: &str| r["photons"][k][key].as_f64().unwrap();
    let matched = json(coincidence_report(&c, angle(0, "theta"), angle(0, "phi"), angle(1, "theta"), angle(1, "phi")).unwrap());
    assert_eq!(matched["orthogonal"], false);
    assert!((matched["overlap_squared"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}
