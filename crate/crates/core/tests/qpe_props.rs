mod common;

use std::f64::consts::PI;

use common::*;
use nmrq::exact_diag::eigen_decompose;
use nmrq::simulator::{sample, StateVector};
use nmrq::trotter_qpe::*;
use nmrq::{PauliSum, C64};
use proptest::prelude::*;

/// `|2^-t sum_k e^{2 pi i k (phi - x / 2^t)}|^2`.
fn textbook_probability(phi: f64, x: usize, t: usize) -> f64 {
    let m = (1usize << t) as f64;
    let s: C64 = (0..1usize << t)
        .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 * (phi - x as f64 / m)))
        .sum();
    (s / m).norm_sqr()
}

fn exact_cfg(t: usize) -> QpeConfig {
    QpeConfig {
        t_ancillas: t,
        evolution: Evolution::Exact,
        ..QpeConfig::default()
    }
}

fn hermitian_2q() -> impl Strategy<Value = PauliSum> {
    prop::collection::vec(-2.0f64..2.0, 6).prop_map(|c| {
        PauliSum::from_words(&[
            ("ZI", c[0]),
            ("IZ", c[1]),
            ("XX", c[2]),
            ("YY", c[3]),
            ("ZZ", c[4]),
            ("XZ", c[5]),
        ])
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The shifted readout equals plain phase estimation of `H_scaled + 0.25 I`.
    #[test]
    fn shift_construction_matches_plain_qpe(h in hermitian_2q(), t in 2usize..=6, seed in any::<u64>()) {
        let scaled = scale_hamiltonian(&h).unwrap();
        let e = eigen_decompose(&scaled.scaled.to_dense().unwrap()).unwrap();
        let psi = StateVector::random(2, seed);
        let weights: Vec<f64> = (0..4).map(|m| overlap_sq(&e.eigenvector(m), psi.amplitudes())).collect();
        let got = outcome_distribution(&scaled, &exact_cfg(t), &psi).unwrap();
        for (x, p) in got.iter().enumerate() {
            let want: f64 = (0..4).map(|m| weights[m] * textbook_probability(e.eigenvalues[m] + 0.25, x, t)).sum();
            prop_assert!((p - want).abs() < 1e-9, "x {x}: {p} vs {want}");
        }
    }

    #[test]
    fn modal_outcome_is_nearest_grid_point(a in 0.01f64..0.24, t in 3usize..=7) {
        // a Z alone scales to +-0.25, which sits on the grid; the X term moves it off
        let h = PauliSum::from_words(&[("Z", a), ("X", 0.1)]).unwrap();
        let scaled = scale_hamiltonian(&h).unwrap();
        let e = eigen_decompose(&scaled.scaled.to_dense().unwrap()).unwrap();
        for k in 0..2 {
            let v = StateVector::from_amplitudes(e.eigenvector(k)).unwrap();
            let p = outcome_distribution(&scaled, &exact_cfg(t), &v).unwrap();
            let m = (1usize << t) as f64;
            let nearest = ((e.eigenvalues[k] + 0.25) * m).round() as usize % (1 << t);
            let modal = (0..p.len()).max_by(|&i, &j| p[i].total_cmp(&p[j])).unwrap();
            prop_assert_eq!(modal, nearest);
            prop_assert!(p[modal] >= 4.0 / (PI * PI));
        }
    }
}

#[test]
fn outcome_weights_follow_overlaps() {
    let h = PauliSum::from_words(&[("ZI", 0.9), ("IZ", -0.35), ("XX", 0.2), ("YY", 0.2)]).unwrap();
    let scaled = scale_hamiltonian(&h).unwrap();
    let e = eigen_decompose(&scaled.scaled.to_dense().unwrap()).unwrap();
    let coeffs = [0.1, 0.2, 0.3, 0.4f64];
    let mut amps = vec![C64::new(0.0, 0.0); 4];
    for m in 0..4 {
        for (a, v) in amps.iter_mut().zip(e.eigenvector(m)) {
            *a += v * coeffs[m].sqrt();
        }
    }
    let psi = StateVector::from_amplitudes(amps).unwrap();
    let t = 8;
    let cfg = QpeConfig {
        t_ancillas: t,
        ..QpeConfig::default()
    };
    let state = qpe_final_state(&scaled, &cfg, &psi).unwrap();
    let exact = state
        .marginal_probabilities(&(0..t).collect::<Vec<_>>())
        .unwrap();
    let shots = 20_000u64;
    let counts = sample(&state, &(0..t).collect::<Vec<_>>(), shots, 42).unwrap();
    // bins assigned to the nearest eigenphase on the circle
    let m = (1usize << t) as f64;
    let owner = |x: usize| {
        (0..4)
            .min_by(|&i, &j| {
                let d = |k: usize| {
                    let d = (x as f64 / m - (e.eigenvalues[k] + 0.25)).rem_euclid(1.0);
                    d.min(1.0 - d)
                };
                d(i).total_cmp(&d(j))
            })
            .unwrap()
    };
    for k in 0..4 {
        let mass: f64 = (0..1 << t)
            .filter(|&x| owner(x) == k)
            .map(|x| exact[x])
            .sum();
        let freq: f64 = (0..1 << t)
            .filter(|&x| owner(x) == k)
            .map(|x| counts.frequency(x))
            .sum();
        assert!(
            (mass - coeffs[k]).abs() < 0.03,
            "eigenphase {k}: mass {mass}"
        );
        let sigma = (mass * (1.0 - mass) / shots as f64).sqrt();
        assert!(
            (freq - mass).abs() < 5.0 * sigma,
            "eigenphase {k}: {freq} vs {mass}"
        );
    }
}

#[test]
fn gate_level_and_compiled_paths_agree() {
    let h = PauliSum::from_words(&[
        ("ZI", 0.9),
        ("IZ", -0.35),
        ("XX", 0.2),
        ("YY", 0.2),
        ("ZZ", 0.2),
    ])
    .unwrap();
    let scaled = scale_hamiltonian(&h).unwrap();
    let psi = StateVector::random(2, 11);
    let cfg = |evolution| QpeConfig {
        t_ancillas: 5,
        trotter_steps: 3,
        evolution,
        ..QpeConfig::default()
    };
    let a = qpe_final_state(&scaled, &cfg(Evolution::Gates), &psi).unwrap();
    let b = qpe_final_state(&scaled, &cfg(Evolution::CompiledTrotter), &psi).unwrap();
    assert!(a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .all(|(x, y)| (x - y).norm() < 1e-9));
}

#[test]
fn trotter_circuit_approaches_exponential() {
    let h = PauliSum::from_words(&[("ZI", 0.3), ("XX", 0.2), ("YZ", -0.1)]).unwrap();
    let exact = expm_i(&dense_of(&h), 1.5);
    let e1 = diff_norm(
        &trotterized_unitary(&h, 1.5, 4).unwrap().unitary(4).unwrap(),
        &exact,
    );
    let e2 = diff_norm(
        &trotterized_unitary(&h, 1.5, 8).unwrap().unitary(4).unwrap(),
        &exact,
    );
    assert!(e2 < 0.6 * e1, "{e1} {e2}");
}

#[test]
fn ancilla_count_formula() {
    assert_eq!(required_ancillas(4, 0.1).unwrap(), 4 + 3);
    assert_eq!(required_ancillas(8, 0.25).unwrap(), 8 + 2);
    assert!(required_ancillas(4, 0.0).is_err());
}

#[test]
fn trace_completion() {
    assert_eq!(
        complete_by_trace(&[1.0, 2.0], 10.0, 3).unwrap(),
        vec![1.0, 2.0, 7.0]
    );
    assert!(complete_by_trace(&[1.0], 0.0, 3).is_err());
}

#[test]
fn zero_hamiltonian_cannot_be_scaled() {
    assert!(scale_hamiltonian(&PauliSum::new(2)).is_err());
}

#[test]
fn random_states_find_every_level_small_case() {
    let h = PauliSum::from_words(&[("ZI", 0.9), ("IZ", -0.35), ("XX", 0.05)]).unwrap();
    let cfg = QpeConfig {
        t_ancillas: 8,
        shots: 50,
        seed: 3,
        ..QpeConfig::default()
    };
    let r = run_qpe(&h, &cfg, &random_initial_states(2, 12, 3)).unwrap();
    let e = eigen_decompose(&h.to_dense().unwrap()).unwrap();
    for est in r.distinct_verified() {
        let cell = r.c_scale / 256.0;
        assert!(e
            .eigenvalues
            .iter()
            .any(|l| (l - est.eigenvalue).abs() <= cell));
    }
    assert!(!r.distinct_verified().is_empty());
}
