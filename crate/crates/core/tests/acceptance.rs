//! Acceptance criteria for the sulfanol pipeline, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always print. The process
//! fails on any FAIL except those listed in `KNOWN_UNATTAINABLE`, which
//! still print FAIL with their reason.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use nmrq::exact_diag::{eigen_decompose, EigenDecomposition};
use nmrq::rng::derive_seed;
use nmrq::simulator::{Circuit, Gate, NoiseModel, StateVector};
use nmrq::spectrum::*;
use nmrq::spin_system::{parse_spec, SpinSystemSpec};
use nmrq::trotter_qpe::*;
use nmrq::vqe::*;
use nmrq::zne::*;
use nmrq::{DenseMatrix, PauliString, PauliSum, C64};

/// Criteria whose printed reference data cannot be met by any correct
/// implementation; see the decisions ledger.
const KNOWN_UNATTAINABLE: &[(usize, &str)] = &[(
    2,
    "printed nu3 (0,-0.00073,0.99999,0) is not orthogonal to printed nu0; the true vector has +0.00073",
)];

struct Check {
    ok: bool,
    detail: String,
}

impl Check {
    fn new() -> Self {
        Check {
            ok: true,
            detail: String::new(),
        }
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        if self.ok {
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }
}

fn uniform(seed: u64, k: u64) -> f64 {
    (derive_seed(seed, k) >> 11) as f64 / (1u64 << 53) as f64
}

fn fixture() -> SpinSystemSpec {
    parse_spec(sulfanol_toml().as_bytes()).unwrap()
}

fn fixture_h() -> PauliSum {
    fixture().build_hamiltonian()
}

fn printed_h() -> PauliSum {
    PauliSum::from_dense(&printed_matrix()).unwrap()
}

fn c1_hamiltonian(c: &mut Check) {
    let d = fixture_h().to_dense().unwrap();
    let p = printed_matrix();
    let worst = (0..4)
        .flat_map(|r| (0..4).map(move |col| (r, col)))
        .map(|(r, col)| (d[(r, col)] - p[(r, col)]).norm())
        .fold(0.0, f64::max);
    c.require(
        worst <= 10.0,
        format!("max entry deviation {worst:.3} > 10 rad/s"),
    );
    let off = d[(1, 2)];
    c.require(
        (off.re - 7.288).abs() <= 1e-3 && off.im == 0.0,
        format!("off-diagonal {off}"),
    );
    c.require(
        d.max_abs_diff(&d.adjoint()) == 0.0,
        "dense form not Hermitian",
    );
    c.note(format!(
        "max entry deviation {worst:.3} rad/s, off-diagonal {:.4}",
        off.re
    ));
}

fn c2_exact_diag(c: &mut Check) {
    let e = eigen_decompose(&printed_matrix()).unwrap();
    let printed = [-4970.9263, -1054.927, 1062.215, 4963.6383];
    for (k, (got, want)) in e.eigenvalues.iter().zip(printed).enumerate() {
        c.require(
            (got - want).abs() <= 1e-3,
            format!("lambda{k} = {got:.5}, printed {want}"),
        );
    }
    let vectors: [[f64; 4]; 4] = [
        [0.0, 0.99999, -0.00073, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -0.00073, 0.99999, 0.0],
    ];
    for (k, want) in vectors.iter().enumerate() {
        let v = e.eigenvector(k);
        let dev = |s: f64| {
            (0..4)
                .map(|i| (v[i] - C64::new(s * want[i], 0.0)).norm())
                .fold(0.0, f64::max)
        };
        let best = dev(1.0).min(dev(-1.0));
        c.require(
            best <= 1e-3,
            format!("nu{k} component deviation {best:.2e} > 1e-3"),
        );
    }
    c.note("eigenvalues within 1e-3, all eigenvectors within 1e-3");
}

fn c3_scale(c: &mut Check) {
    let s = scale_hamiltonian(&printed_h()).unwrap();
    c.require(
        (s.c_scale - 24881.07).abs() <= 0.5,
        format!("C = {:.4}", s.c_scale),
    );
    c.note(format!("C = {:.4}", s.c_scale));
}

fn c4_trotter(c: &mut Check) {
    let s = scale_hamiltonian(&fixture_h()).unwrap();
    let bound = s.scaled.trotter_error_bound(2.0 * PI, 10).unwrap();
    c.require(
        (3.0e-4..=3.6e-4).contains(&bound),
        format!("bound {bound:.4e} outside [3.0e-4, 3.6e-4]"),
    );
    let u = trotterized_unitary(&s.scaled, 2.0 * PI, 10)
        .unwrap()
        .unitary(2)
        .unwrap();
    let exact = expm_i(&dense_of(&s.scaled), 2.0 * PI);
    let err = diff_norm(&u, &exact);
    c.require(
        err <= bound,
        format!("measured error {err:.4e} exceeds bound {bound:.4e}"),
    );
    c.note(format!("bound {bound:.4e}, measured {err:.4e}"));
}

fn c5_qpe(c: &mut Check) {
    let h = printed_h();
    let e = eigen_decompose(&printed_matrix()).unwrap();
    let s = scale_hamiltonian(&h).unwrap();
    let bound = s.scaled.trotter_error_bound(2.0 * PI, 10).unwrap();
    let inits: Vec<StateVector> = (1..4)
        .map(|k| StateVector::from_amplitudes(e.eigenvector(k)).unwrap())
        .collect();

    let cfg = QpeConfig {
        t_ancillas: 12,
        trotter_steps: 10,
        seed: 7,
        ..QpeConfig::default()
    };
    let r = run_qpe(&h, &cfg, &inits).unwrap();
    let found: Vec<f64> = (0..3)
        .map(|i| {
            let hits: Vec<_> = r
                .estimates
                .iter()
                .filter(|x| x.initial == i && x.verified)
                .collect();
            hits.first().map_or(f64::NAN, |x| x.scaled_eigenvalue)
        })
        .collect();
    let printed = [-0.042480468750, 0.042724609375, 0.199462890625];
    for (got, want) in found.iter().zip(printed) {
        c.require(*got == want, format!("phase {got} != printed {want}"));
    }
    let completed = complete_by_trace(&found, h.trace() / s.c_scale, 4).unwrap();
    c.require(
        completed[3] == -0.199707031250,
        format!("trace completion gave {}", completed[3]),
    );
    let slack = s.c_scale / 4096.0 + s.c_scale * bound;
    let mut all: Vec<f64> = completed.iter().map(|x| x * s.c_scale).collect();
    all.sort_by(f64::total_cmp);
    for (got, want) in all.iter().zip(&e.eigenvalues) {
        c.require(
            (got - want).abs() <= slack,
            format!("eigenvalue {got:.3} vs oracle {want:.3}"),
        );
    }

    // CI gate: gate-by-gate circuit at t = 8 must agree with the compiled path
    let t0 = Instant::now();
    let small = |evolution| QpeConfig {
        t_ancillas: 8,
        trotter_steps: 10,
        seed: 7,
        evolution,
        ..QpeConfig::default()
    };
    let gates = run_qpe(&h, &small(Evolution::Gates), &inits).unwrap();
    let compiled = run_qpe(&h, &small(Evolution::CompiledTrotter), &inits).unwrap();
    let gate_time = t0.elapsed();
    let bins = |r: &QpeReport| r.estimates.iter().map(|x| x.raw_index).collect::<Vec<_>>();
    c.require(
        bins(&gates) == bins(&compiled),
        "t=8 gate-level and compiled readouts differ",
    );
    c.require(
        gates.estimates.iter().all(|x| x.verified),
        "t=8 estimate not verified",
    );
    c.require(
        gate_time < Duration::from_secs(30),
        format!("t=8 variant took {gate_time:?}"),
    );
    c.note(format!(
        "phases {found:?}, completed {}, t=8 gate-level {gate_time:.2?}",
        completed[3]
    ));
}

fn c6_probability_floor(c: &mut Check) {
    let h = fixture_h();
    let s = scale_hamiltonian(&h).unwrap();
    let e = eigen_decompose(&s.scaled.to_dense().unwrap()).unwrap();
    let t = 6;
    let m = (1usize << t) as f64;
    let cfg = QpeConfig {
        t_ancillas: t,
        evolution: Evolution::Exact,
        ..QpeConfig::default()
    };
    let mut tested = 0;
    let mut worst: f64 = 1.0;
    for k in 0..4 {
        let phase = (e.eigenvalues[k] + 0.25) * m;
        if (phase - phase.round()).abs() < 1e-3 {
            continue;
        }
        tested += 1;
        let v = StateVector::from_amplitudes(e.eigenvector(k)).unwrap();
        let p = outcome_distribution(&s, &cfg, &v).unwrap();
        let modal = (0..p.len()).max_by(|&i, &j| p[i].total_cmp(&p[j])).unwrap();
        c.require(
            modal == phase.round() as usize % (1 << t),
            format!("level {k}: modal {modal} not nearest grid point"),
        );
        worst = worst.min(p[modal]);
    }
    c.require(tested > 0, "no off-grid eigenphase to test");
    c.require(
        worst >= 4.0 / (PI * PI),
        format!("modal probability {worst:.4} < 4/pi^2"),
    );
    c.note(format!(
        "{tested} off-grid levels, min modal probability {worst:.4}"
    ));
}

fn c7_vqe_ground(c: &mut Check) {
    let h = fixture_h();
    let l0 = eigen_decompose(&h.to_dense().unwrap()).unwrap().eigenvalues[0];
    let a = XyAnsatz::new(2).unwrap();
    let init = InitialState::singlet();
    c.require(
        init.state()
            .amplitudes()
            .iter()
            .zip([0.0, 1.0, -1.0, 0.0])
            .all(|(x, w)| (x - C64::new(w / 2f64.sqrt(), 0.0)).norm() < 1e-12),
        "initial state is not (0,1,-1,0)/sqrt2",
    );
    let r = vqe_minimize(&h, a, &init, &[0.0, 0.0], &VqeOptions::default()).unwrap();
    let exact_err = (r.eigenvalue - l0).abs();
    c.require(
        exact_err <= 0.05,
        format!("exact mode error {exact_err:.4}"),
    );
    let mut hits = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let opts = VqeOptions {
            mode: CostMode::Sampled {
                shots: 10_000,
                noise: None,
                zne: None,
            },
            seed,
            ..VqeOptions::default()
        };
        let r = vqe_minimize(&h, a, &init, &[0.0, 0.0], &opts).unwrap();
        let err = (r.eigenvalue - l0).abs();
        worst = worst.max(err);
        if err <= 1.5 {
            hits += 1;
        }
    }
    c.require(
        hits >= 18,
        format!("sampled mode within 1.5 rad/s for {hits}/20 seeds"),
    );
    c.note(format!(
        "exact error {exact_err:.2e}, sampled {hits}/20 within 1.5 (worst {worst:.3})"
    ));
}

fn c8_folded(c: &mut Check) {
    let h = fixture_h();
    let e = eigen_decompose(&h.to_dense().unwrap()).unwrap();
    let a = XyAnsatz::new(2).unwrap();
    let sweep = folded_sweep(
        &h,
        a,
        &default_sweep_states(2).unwrap(),
        &w_grid(&h, 16).unwrap(),
        &VqeOptions::default(),
        1.0,
    )
    .unwrap();
    let got = sweep.eigenvalues();
    c.require(
        got.len() == 4,
        format!("{} distinct eigenvalues recovered", got.len()),
    );
    for (k, want) in e.eigenvalues.iter().enumerate() {
        let Some(pair) = sweep.eigenpairs.iter().min_by(|x, y| {
            (x.folded.result.eigenvalue - want)
                .abs()
                .total_cmp(&(y.folded.result.eigenvalue - want).abs())
        }) else {
            c.require(false, "no eigenpairs");
            return;
        };
        let err = (pair.folded.result.eigenvalue - want).abs();
        c.require(err <= 0.1, format!("lambda{k} error {err:.4}"));
        let ov = overlap_sq(
            &e.eigenvector(k),
            pair.folded.result.eigenvector.amplitudes(),
        );
        c.require(
            ov >= 0.999,
            format!("lambda{k} eigenvector overlap {ov:.5}"),
        );
    }
    let negative: Vec<_> = sweep
        .candidates
        .iter()
        .filter(|x| x.folded.w < 0.0 && x.folded.consistent)
        .collect();
    c.require(!negative.is_empty(), "no consistent candidate with w < 0");
    for x in &negative {
        let r = &x.folded.result;
        let want = x.folded.w - r.cost.max(0.0).sqrt();
        c.require(
            r.eigenvalue == want && r.eigenvalue <= x.folded.w,
            "negative-root rule not applied",
        );
    }
    c.note(format!(
        "eigenvalues {:?}",
        got.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
    ));
}

fn c9_deflation(c: &mut Check) {
    let h = fixture_h();
    let e = eigen_decompose(&h.to_dense().unwrap()).unwrap();
    let a = XyAnsatz::new(2).unwrap();
    let levels = deflation_vqe(
        &h,
        2,
        None,
        a,
        &InitialState::singlet(),
        &[0.0, 0.0],
        &VqeOptions::default(),
    )
    .unwrap();
    let verified = verify_levels(&levels, &e.eigenvalues, 1.0);
    c.require(verified[0], "ground level not verified");
    let second_ok = verified[1] && levels[1].result.converged;
    c.require(
        !second_ok,
        format!(
            "second level unexpectedly verified at {:.3}",
            levels[1].result.eigenvalue
        ),
    );

    let mut leak: f64 = 0.0;
    for k in 0..1000u64 {
        let theta = [
            PI * (2.0 * uniform(99, 3 * k) - 1.0),
            PI * (2.0 * uniform(99, 3 * k + 1) - 1.0),
        ];
        let u = a.circuit(&theta).unwrap();
        let phi = 2.0 * PI * uniform(99, 3 * k + 2);
        let mut odd = StateVector::from_amplitudes(vec![
            C64::new(0.0, 0.0),
            C64::new(phi.cos(), 0.0),
            C64::from_polar(phi.sin(), phi),
            C64::new(0.0, 0.0),
        ])
        .unwrap();
        odd.apply_circuit(&u).unwrap();
        leak = leak
            .max(odd.amplitudes()[0].norm())
            .max(odd.amplitudes()[3].norm());
        let mut even = StateVector::from_amplitudes(vec![
            C64::new(phi.cos(), 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(phi.sin(), -phi),
        ])
        .unwrap();
        even.apply_circuit(&u).unwrap();
        leak = leak
            .max(even.amplitudes()[1].norm())
            .max(even.amplitudes()[2].norm());
    }
    c.require(
        leak < 1e-12,
        format!("amplitude leaked across sectors: {leak:.2e}"),
    );
    c.note(format!(
        "second level landed on {:.3} (oracle lambda1 {:.3}), max leak {leak:.1e}",
        levels[1].result.eigenvalue, e.eigenvalues[1]
    ));
}

fn c10_zne(c: &mut Check) {
    let h = fixture_h();
    let a = XyAnsatz::new(2).unwrap();
    let init = InitialState::singlet();
    let r = vqe_minimize(&h, a, &init, &[0.0, 0.0], &VqeOptions::default()).unwrap();
    let ideal = r.eigenvector.expectation(&h).unwrap();
    let mut prep = init.prep().unwrap().clone();
    prep.append(&a.circuit(&r.theta_star).unwrap()).unwrap();
    let g = group_terms(&h);
    let noise = NoiseModel::default();
    let mut wins = 0;
    let (mut unmit, mut mit) = (0.0, 0.0);
    for seed in 0..50 {
        let cfg = ZneConfig {
            seed,
            ..ZneConfig::default()
        };
        c.require(
            cfg.scales() == [1.0, 3.0, 5.0, 7.0, 9.0],
            "fold scales are not 1,3,5,7,9",
        );
        let z = mitigated_expectation(&prep, &g, &noise, &cfg).unwrap();
        unmit += (z.unmitigated() - ideal).abs();
        mit += (z.mitigated - ideal).abs();
        if (z.mitigated - ideal).abs() < (z.unmitigated() - ideal).abs() {
            wins += 1;
        }
    }
    c.require(wins >= 40, format!("mitigation helped in {wins}/50 seeds"));
    c.note(format!(
        "mitigation helped in {wins}/50, mean |err| {:.1} -> {:.1}",
        unmit / 50.0,
        mit / 50.0
    ));
}

/// `(center ppm, splitting Hz)` of the two doublets, or a reason.
fn doublets(peaks: &[Peak]) -> Result<[(f64, f64); 2], String> {
    if peaks.len() != 4 {
        return Err(format!("{} peaks", peaks.len()));
    }
    // peaks are sorted by ppm descending
    let pair = |a: &Peak, b: &Peak| ((a.ppm + b.ppm) / 2.0, (a.hz - b.hz).abs());
    Ok([pair(&peaks[0], &peaks[1]), pair(&peaks[2], &peaks[3])])
}

fn spectrum_of(d: &EigenDecomposition, spec: &SpinSystemSpec) -> Spectrum {
    let fo = FidOptions {
        t2: Some(1.0),
        ..FidOptions::new(16384, 4800.0)
    };
    fid_to_spectrum(&compute_fid(d, &fo).unwrap(), spec, DftMethod::Auto).unwrap()
}

fn c11_spectrum(c: &mut Check) {
    let spec = fixture();
    let h = spec.build_hamiltonian();
    let e = eigen_decompose(&h.to_dense().unwrap()).unwrap();
    let s = spectrum_of(&e, &spec);
    let bin = s.resolution();
    let max = s.intensity.iter().cloned().fold(0.0, f64::max);
    let peaks = peak_list(&s, 0.1 * max).unwrap();
    match doublets(&peaks) {
        Err(why) => c.require(false, format!("exact pipeline: {why}")),
        Ok([(hi, split_hi), (lo, split_lo)]) => {
            c.require(
                (hi - 7.40).abs() <= 0.01,
                format!("downfield doublet at {hi:.4} ppm"),
            );
            c.require(
                (lo - 3.44).abs() <= 0.01,
                format!("upfield doublet at {lo:.4} ppm"),
            );
            for split in [split_hi, split_lo] {
                c.require(
                    (split - 2.32).abs() <= bin,
                    format!("splitting {split:.3} Hz (bin {bin:.3})"),
                );
            }
            c.note(format!(
                "doublets {hi:.4}/{lo:.4} ppm split {split_hi:.3}/{split_lo:.3} Hz"
            ));
        }
    }

    let a = XyAnsatz::new(2).unwrap();
    let sweep = folded_sweep(
        &h,
        a,
        &default_sweep_states(2).unwrap(),
        &w_grid(&h, 16).unwrap(),
        &VqeOptions::default(),
        1.0,
    )
    .unwrap();
    if sweep.eigenpairs.len() != 4 {
        c.require(
            false,
            format!("VQE sweep found {} eigenpairs", sweep.eigenpairs.len()),
        );
        return;
    }
    let mut v = DenseMatrix::zeros(4);
    for (col, p) in sweep.eigenpairs.iter().enumerate() {
        for (row, amp) in p.folded.result.eigenvector.amplitudes().iter().enumerate() {
            v[(row, col)] = *amp;
        }
    }
    let vqe = EigenDecomposition {
        eigenvalues: sweep.eigenvalues(),
        eigenvectors: v,
    };
    let budget = vqe
        .eigenvalues
        .iter()
        .zip(&e.eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let sv = spectrum_of(&vqe, &spec);
    let vmax = sv.intensity.iter().cloned().fold(0.0, f64::max);
    let vpeaks = peak_list(&sv, 0.1 * vmax).unwrap();
    c.require(
        vpeaks.len() == peaks.len(),
        format!("VQE pipeline has {} peaks", vpeaks.len()),
    );
    let shift = peaks
        .iter()
        .zip(&vpeaks)
        .map(|(p, q)| (p.hz - q.hz).abs())
        .fold(0.0, f64::max);
    c.require(
        shift <= 2.0 * budget / (2.0 * PI) + bin,
        format!("VQE peaks moved {shift:.3} Hz"),
    );
    c.note(format!(
        "VQE peaks within {shift:.3} Hz (budget {:.2e} rad/s)",
        budget
    ));
}

fn random_sum(seed: u64, n: usize, terms: usize) -> PauliSum {
    let axes = ['I', 'X', 'Y', 'Z'];
    let mut s = PauliSum::new(n);
    for t in 0..terms as u64 {
        let word: String = (0..n as u64)
            .map(|q| axes[(derive_seed(seed, 100 * t + q) % 4) as usize])
            .collect();
        let re = 4.0 * uniform(seed, 1000 + 2 * t) - 2.0;
        let im = 4.0 * uniform(seed, 1001 + 2 * t) - 2.0;
        let p = PauliString::parse(&word, 1.0)
            .unwrap()
            .with_coefficient(C64::new(re, im));
        s.push(p).unwrap();
    }
    s
}

fn c12_oracles(c: &mut Check) {
    let mut worst = [0.0f64; 5];
    for seed in 0..200u64 {
        let n = 1 + (seed % 4) as usize;
        let a = random_sum(seed, n, 5);
        let b = random_sum(seed + 7919, n, 5);
        let d = (&dense_of(&a) * &dense_of(&b))
            .max_abs_diff(&a.product(&b).unwrap().to_dense().unwrap());
        worst[0] = worst[0]
            .max(d)
            .max(a.to_dense().unwrap().max_abs_diff(&dense_of(&a)));
    }
    for seed in 0..100u64 {
        let n = 2 + (seed % 2) as usize;
        let x = XyAnsatz::new(n).unwrap();
        let theta: Vec<f64> = (0..x.parameter_count() as u64)
            .map(|k| 6.0 * uniform(seed, k) - 3.0)
            .collect();
        let mut want = DenseMatrix::identity(1 << n);
        for (&(p, q), &t) in x.pairs().iter().zip(&theta) {
            want = &expm_i(
                &kron_word(&x.generator(p, q).word(), C64::new(1.0, 0.0)),
                -t,
            ) * &want;
        }
        worst[1] = worst[1].max(
            x.circuit(&theta)
                .unwrap()
                .unitary(3)
                .unwrap()
                .max_abs_diff(&want),
        );
    }
    for seed in 0..100u64 {
        let n = 3;
        let gates: Vec<Gate> = (0..20u64)
            .map(|k| {
                let q = (derive_seed(seed, k) % 3) as usize;
                let r = (q + 1 + (derive_seed(seed, k + 50) % 2) as usize) % 3;
                let ang = 6.0 * uniform(seed, k + 100) - 3.0;
                match derive_seed(seed, k + 200) % 12 {
                    0 => Gate::H(q),
                    1 => Gate::X(q),
                    2 => Gate::Y(q),
                    3 => Gate::Z(q),
                    4 => Gate::SDag(q),
                    5 => Gate::Rx(q, ang),
                    6 => Gate::Ry(q, ang),
                    7 => Gate::Rz(q, ang),
                    8 => Gate::Phase(q, ang),
                    9 => Gate::Cnot {
                        control: q,
                        target: r,
                    },
                    10 => Gate::CPhase {
                        control: q,
                        target: r,
                        angle: ang,
                    },
                    _ => Gate::GlobalPhase(ang),
                }
            })
            .collect();
        let circ = Circuit::from_gates(n, gates).unwrap();
        let mut s1 = StateVector::random(n, seed);
        let mut s2 = s1.clone();
        s1.apply_circuit(&circ).unwrap();
        s2.apply_circuit(&fold_circuit(&circ, 1 + (seed % 3) as usize))
            .unwrap();
        let d = s1
            .amplitudes()
            .iter()
            .zip(s2.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        worst[2] = worst[2].max(d);
    }
    for seed in 0..200u64 {
        let m = 2 + (seed % 4) as usize;
        let coef: Vec<f64> = (0..m as u64)
            .map(|k| 10.0 * uniform(seed, k) - 5.0)
            .collect();
        let pts: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let l = (1 + 2 * i) as f64;
                (l, coef.iter().rev().fold(0.0, |acc, c| acc * l + c))
            })
            .collect();
        worst[3] = worst[3].max((richardson_extrapolate(&pts).unwrap() - coef[0]).abs());
    }
    for seed in 0..30u64 {
        let n = 1 + (seed % 3) as usize;
        let h = random_sum(seed, n, 4);
        // real parts only, scaled to tens of rad/s
        let herm = PauliSum::from_terms(
            n,
            h.terms()
                .iter()
                .map(|t| t.with_coefficient(C64::new(20.0 * t.coefficient().re, 0.0)))
                .collect(),
        )
        .unwrap();
        let d = herm.to_dense().unwrap();
        let fo = FidOptions::new(12, 50.0);
        let fid = compute_fid(&eigen_decompose(&d).unwrap(), &fo).unwrap();
        let (sx, sy) = collective_spin_operators(n).unwrap();
        let splus = &sx + &sy.scale(C64::new(0.0, 1.0));
        for (p, &t) in fid.points.iter().zip(&fid.times) {
            let u = expm_i(&d, -t);
            let want = (&(&(&u * &sx) * &u.adjoint()) * &splus).trace();
            worst[4] = worst[4].max((p - want).norm());
        }
    }
    let names = [
        "Pauli vs dense",
        "ansatz vs exponentials",
        "folding",
        "Richardson",
        "FID vs propagator",
    ];
    let tols = [1e-9, 1e-9, 1e-9, 1e-9, 1e-8];
    for k in 0..5 {
        c.require(
            worst[k] <= tols[k],
            format!("{}: {:.2e} > {:.0e}", names[k], worst[k], tols[k]),
        );
    }
    c.note(format!(
        "worst deviations {:?}",
        worst.iter().map(|w| format!("{w:.1e}")).collect::<Vec<_>>()
    ));
}

type Criterion = (usize, &'static str, Duration, fn(&mut Check));

fn main() {
    let criteria: [Criterion; 12] = [
        (
            1,
            "Hamiltonian reproduction",
            Duration::from_secs(1),
            c1_hamiltonian,
        ),
        (
            2,
            "exact diagonalization",
            Duration::from_secs(1),
            c2_exact_diag,
        ),
        (3, "scaling constant", Duration::from_secs(1), c3_scale),
        (4, "Trotter bound", Duration::from_secs(5), c4_trotter),
        (5, "QPE phases", Duration::from_secs(600), c5_qpe),
        (
            6,
            "QPE probability floor",
            Duration::from_secs(10),
            c6_probability_floor,
        ),
        (
            7,
            "VQE ground state",
            Duration::from_secs(60),
            c7_vqe_ground,
        ),
        (8, "folded spectrum", Duration::from_secs(120), c8_folded),
        (
            9,
            "deflation limitation",
            Duration::from_secs(60),
            c9_deflation,
        ),
        (
            10,
            "zero-noise extrapolation",
            Duration::from_secs(300),
            c10_zne,
        ),
        (11, "spectrum", Duration::from_secs(30), c11_spectrum),
        (
            12,
            "oracle equivalence",
            Duration::from_secs(300),
            c12_oracles,
        ),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut unexpected = 0;
    for (id, name, limit, run) in criteria {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || f == &id.to_string())
        {
            continue;
        }
        let mut check = Check::new();
        let t0 = Instant::now();
        run(&mut check);
        let took = t0.elapsed();
        check.require(took <= limit, format!("took {took:.2?}, limit {limit:?}"));
        let known = KNOWN_UNATTAINABLE.iter().find(|k| k.0 == id);
        let status = if check.ok { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{status} criterion {id:>2} ({name}) [{took:.2?}]: {}",
            check.detail
        );
        match (check.ok, known) {
            (false, Some((_, why))) => line.push_str(&format!(" [known: {why}]")),
            (false, None) => unexpected += 1,
            _ => {}
        }
        println!("{line}");
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
