mod common;

use common::*;
use nmrq::exact_diag::{determinant, eigen_decompose, verify_eigenvalue};
use nmrq::spin_system::{parse_spec, Coupling, SpinSystemSpec};
use nmrq::{DenseMatrix, Error, C64};
use proptest::prelude::*;

fn spec_strategy(max_n: usize) -> impl Strategy<Value = SpinSystemSpec> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let np = pairs.len();
        (
            prop::collection::vec(0.0f64..10.0, n),
            prop::collection::vec(prop::option::of(-15.0f64..15.0), np),
            100.0f64..900.0,
            0.0f64..10.0,
        )
            .prop_map(move |(shifts, js, field, off)| {
                let couplings = pairs
                    .iter()
                    .zip(js)
                    .filter_map(|(&(i, j), jh)| jh.map(|j_hz| Coupling { i, j, j_hz }))
                    .collect();
                SpinSystemSpec::new(shifts, couplings, field, off).unwrap()
            })
    })
}

fn bit(idx: usize, q: usize, n: usize) -> usize {
    (idx >> (n - 1 - q)) & 1
}

/// `P |b> = |b'>` where qubit `k` of `b` becomes qubit `perm[k]` of `b'`.
fn permutation_matrix(perm: &[usize]) -> DenseMatrix {
    let n = perm.len();
    let dim = 1 << n;
    let mut p = DenseMatrix::zeros(dim);
    for b in 0..dim {
        let mut out = 0;
        for k in 0..n {
            out |= bit(b, k, n) << (n - 1 - perm[k]);
        }
        p[(out, b)] = C64::new(1.0, 0.0);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_is_traceless_and_hermitian(spec in spec_strategy(4)) {
        let h = spec.build_hamiltonian();
        prop_assert!(h.is_hermitian());
        let d = h.to_dense().unwrap();
        prop_assert!(d.trace().norm() < 1e-9 * (1.0 + frobenius(&d)));
        prop_assert!(d.is_hermitian(1e-9));
    }

    #[test]
    fn relabelling_permutes_qubits(spec in spec_strategy(3), seed in any::<u64>()) {
        let n = spec.len();
        let mut perm: Vec<usize> = (0..n).collect();
        // Fisher-Yates with a fixed linear congruential stream
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut shifts = vec![0.0; n];
        for k in 0..n {
            shifts[perm[k]] = spec.shifts_ppm[k];
        }
        let couplings = spec
            .couplings
            .iter()
            .map(|c| Coupling { i: perm[c.i], j: perm[c.j], j_hz: c.j_hz })
            .collect();
        let moved = SpinSystemSpec::new(shifts, couplings, spec.field_mhz, spec.offset_ppm).unwrap();
        let p = permutation_matrix(&perm);
        let want = &(&p * &spec.build_hamiltonian().to_dense().unwrap()) * &p.adjoint();
        prop_assert!(diff_norm(&moved.build_hamiltonian().to_dense().unwrap(), &want) < 1e-8);
    }

    #[test]
    fn no_couplings_means_diagonal(mut spec in spec_strategy(4)) {
        spec.couplings.clear();
        let d = spec.build_hamiltonian().to_dense().unwrap();
        for r in 0..d.dim() {
            for c in 0..d.dim() {
                if r != c {
                    prop_assert_eq!(d[(r, c)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn toml_round_trip(spec in spec_strategy(4)) {
        let back = parse_spec(spec.to_toml().as_bytes()).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn eigendecomposition_reconstructs(n in 1usize..=5, seed in any::<u64>()) {
        let dim = 1 << n;
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut m = DenseMatrix::zeros(dim);
        for r in 0..dim {
            for c in r..dim {
                let v = next();
                m[(r, c)] = C64::new(v, 0.0);
                m[(c, r)] = C64::new(v, 0.0);
            }
        }
        let e = eigen_decompose(&m).unwrap();
        prop_assert!(diff_norm(&e.reconstruct(), &m) <= 1e-8 * frobenius(&m));
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = e.eigenvalues.iter().sum();
        prop_assert!((sum - m.trace().re).abs() <= 1e-6 * (1.0 + m.trace().norm()));
        if n <= 3 {
            let prod: f64 = e.eigenvalues.iter().product();
            let det = determinant(&m);
            prop_assert!((prod - det.re).abs() <= 1e-6 * (1e-3 + det.norm()));
        }
        for &l in &e.eigenvalues {
            prop_assert!(verify_eigenvalue(&m, l, 1e-8));
        }
    }

    #[test]
    fn complex_hermitian_spectrum(spec in spec_strategy(3), seed in any::<u64>()) {
        // unitary conjugation by a random phase diagonal keeps the spectrum
        let d = spec.build_hamiltonian().to_dense().unwrap();
        let dim = d.dim();
        let phases: Vec<f64> = (0..dim).map(|k| ((seed >> (k % 60)) & 0xff) as f64 * 0.0245).collect();
        let mut u = DenseMatrix::zeros(dim);
        for k in 0..dim {
            u[(k, k)] = C64::from_polar(1.0, phases[k]);
        }
        let twisted = &(&u * &d) * &u.adjoint();
        let a = eigen_decompose(&d).unwrap();
        let b = eigen_decompose(&twisted).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() < 1e-8 * (1.0 + x.abs()));
        }
    }
}

#[test]
fn sulfanol_dense_form() {
    let spec = parse_spec(sulfanol_toml().as_bytes()).unwrap();
    let h = spec.build_hamiltonian();
    let words: Vec<String> = h.terms().iter().map(|t| t.word()).collect();
    assert_eq!(words, ["ZI", "IZ", "XX", "YY", "ZZ"]);
    let d = h.to_dense().unwrap();
    let two_pi = 2.0 * std::f64::consts::PI;
    let w1 = two_pi * 400.0 * (3.44 - 5.0);
    let w2 = two_pi * 400.0 * (7.40 - 5.0);
    let jj = two_pi * 2.32 / 4.0;
    let want = [
        (w1 + w2) / 2.0 + jj,
        (w1 - w2) / 2.0 - jj,
        (w2 - w1) / 2.0 - jj,
        -(w1 + w2) / 2.0 + jj,
    ];
    for k in 0..4 {
        assert!((d[(k, k)].re - want[k]).abs() < 1e-9);
    }
    assert!((d[(1, 2)].re - 2.0 * jj).abs() < 1e-12);
}

#[test]
fn sulfanol_eigenvalues_near_printed() {
    let spec = parse_spec(sulfanol_toml().as_bytes()).unwrap();
    let e = eigen_decompose(&spec.build_hamiltonian().to_dense().unwrap()).unwrap();
    for (a, b) in e.eigenvalues.iter().zip(printed_eigenvalues()) {
        assert!((a - b).abs() < 10.0, "{a} vs {b}");
    }
}

fn parse_err(text: &str) -> (Option<usize>, String) {
    match parse_spec(text.as_bytes()) {
        Err(Error::Parse { line, field, .. }) => (line, field),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn malformed_inputs_name_the_field() {
    let base = sulfanol_toml();
    let (line, field) = parse_err(&base.replace("field_mhz = 400.0", "field_mhz = -1.0"));
    assert_eq!((line, field.as_str()), (Some(2), "field_mhz"));
    let (line, field) = parse_err(&base.replace("j = 2", "j = 3"));
    assert_eq!(field, "j");
    assert!(line.is_some());
    let (_, field) = parse_err(&base.replace("j_hz = 2.32", "j_hz = 2.32\ncolour = 1"));
    assert_eq!(field, "colour");
    let (_, field) = parse_err(&base.replace("offset_ppm = 5.0\n", ""));
    assert_eq!(field, "offset_ppm");
    let (_, field) = parse_err(&base.replace("shift_ppm = 3.44", "shift_ppm = \"x\""));
    assert!(field.is_empty() || field == "shift_ppm");
}

#[test]
fn self_and_duplicate_couplings_rejected() {
    let base = sulfanol_toml();
    let (_, field) = parse_err(&base.replace("i = 1", "i = 2"));
    assert_eq!(field, "couplings");
    let dup = format!("{base}\n[[couplings]]\ni = 2\nj = 1\nj_hz = 1.0\n");
    assert_eq!(parse_err(&dup).1, "couplings");
}
