use std::fmt::{Debug, Write as _};
use std::path::Path;

use nmrq::exact_diag::{eigen_decompose, EigenDecomposition};
use nmrq::simulator::{NoiseModel, StateVector};
use nmrq::spectrum::{
    compute_fid, fid_to_spectrum, peak_list, peaks_csv, DftMethod, FidOptions, Timing,
};
use nmrq::spin_system::{parse_spec, SpinSystemSpec};
use nmrq::trotter_qpe::{complete_by_trace, random_initial_states, run_qpe, Evolution, QpeConfig};
use nmrq::vqe::{
    default_sweep_states, deflation_vqe, folded_sweep, folded_vqe, group_terms, verify_levels,
    vqe_minimize, w_grid, CostMode, InitialState, OptimizerConfig, VqeOptions, XyAnsatz,
};
use nmrq::zne::{mitigated_expectation, Extrapolation, ZneConfig};
use nmrq::{DenseMatrix, PauliSum, DEFAULT_DENSE_CAP};

use crate::output::{csv, Header, OutputFile};
use crate::{
    Backend, DftArg, EigArgs, ExtrapolationArg, Failure, HamiltonianArgs, InitialKind,
    QpeEvolution, QpeStates, SamplingArgs, SpectrumArgs, SpectrumBackend, ZneArgs,
};

/// Largest register (ancillas plus spins) the QPE backend will simulate.
const QPE_QUBIT_CAP: usize = 24;

pub struct Run {
    pub report: String,
    pub files: Vec<OutputFile>,
}

type Outcome = Result<Run, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn load(path: &Path) -> Result<(SpinSystemSpec, String), Failure> {
    let bytes =
        std::fs::read(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let spec = parse_spec(&bytes).map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok((spec, String::from_utf8_lossy(&bytes).into_owned()))
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let nanos = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_nanos() as u64);
        nanos ^ (u64::from(std::process::id()) << 32)
    })
}

fn header(args: &impl Debug, text: &str, seed: Option<u64>) -> Header {
    Header::new(&format!("{args:?}\n{text}"), seed)
}

fn file(name: &str, contents: String) -> OutputFile {
    OutputFile {
        name: name.to_string(),
        contents,
    }
}

fn dense_or_fail(h: &PauliSum) -> Result<DenseMatrix, Failure> {
    Ok(h.to_dense()?)
}

fn eigenvector_rows(vectors: &[(usize, &[nmrq::C64])]) -> Vec<String> {
    let mut rows = Vec::new();
    for &(level, v) in vectors {
        for (b, a) in v.iter().enumerate() {
            rows.push(format!("{level},{b},{:.12e},{:.12e}", a.re, a.im));
        }
    }
    rows
}

pub fn hamiltonian(a: &HamiltonianArgs) -> Outcome {
    let (spec, text) = load(&a.input)?;
    let h = spec.build_hamiltonian();
    let mut report = format!("# {} spins, {} Pauli terms, rad/s\n", spec.len(), h.len());
    for t in h.terms() {
        let _ = writeln!(report, "{t}");
    }
    let mut files = Vec::new();
    if a.dense {
        let d = dense_or_fail(&h)?;
        if d.max_imag() != 0.0 {
            return Err(Failure::Numerical(
                "dense Hamiltonian has imaginary entries".into(),
            ));
        }
        let dim = d.dim();
        let columns: Vec<String> = (0..dim).map(|c| format!("c{c}")).collect();
        let rows = (0..dim).map(|r| {
            d.row(r)
                .iter()
                .map(|z| format!("{:.6}", z.re))
                .collect::<Vec<_>>()
                .join(",")
        });
        files.push(file(
            "hamiltonian.csv",
            csv(&header(a, &text, None), &columns.join(","), rows),
        ));
    }
    Ok(Run { report, files })
}

fn initial_state(kind: InitialKind, n: usize) -> Result<InitialState, Failure> {
    Ok(match kind {
        InitialKind::Default if n == 2 => InitialState::singlet(),
        InitialKind::Default | InitialKind::Odd => InitialState::parity_uniform(n, true)?,
        InitialKind::Even => InitialState::parity_uniform(n, false)?,
        InitialKind::Singlet if n == 2 => InitialState::singlet(),
        InitialKind::Singlet => return Err(input("--initial singlet needs exactly two spins")),
    })
}

fn extrapolation(e: ExtrapolationArg) -> Extrapolation {
    match e {
        ExtrapolationArg::Richardson => Extrapolation::Richardson,
        ExtrapolationArg::Linear => Extrapolation::Linear,
        ExtrapolationArg::Quadratic => Extrapolation::Quadratic,
    }
}

fn cost_mode(s: &SamplingArgs, seed: u64) -> Result<CostMode, Failure> {
    let noisy = s.p1.is_some() || s.p2.is_some();
    let Some(shots) = s.shots else {
        if noisy || s.zne {
            return Err(input("--p1, --p2 and --zne need --shots"));
        }
        return Ok(CostMode::Exact);
    };
    if shots == 0 {
        return Err(input("--shots must be at least 1"));
    }
    let noise = if noisy {
        Some(NoiseModel::depolarizing(
            s.p1.unwrap_or(0.0),
            s.p2.unwrap_or(0.0),
        )?)
    } else {
        None
    };
    let zne = if s.zne {
        if noise.is_none() {
            return Err(input("--zne needs a noise model (--p1/--p2)"));
        }
        let cfg = ZneConfig {
            fold_counts: s.fold_counts.clone(),
            extrapolation: extrapolation(s.extrapolation),
            shots,
            seed,
        };
        cfg.validate()?;
        Some(cfg)
    } else {
        None
    };
    Ok(CostMode::Sampled { shots, noise, zne })
}

pub fn eig(a: &EigArgs) -> Outcome {
    let (spec, text) = load(&a.input)?;
    let n = spec.len();
    let seed = resolve_seed(a.seed);
    let hdr = header(a, &text, Some(seed));
    let h = spec.build_hamiltonian();
    match a.backend {
        Backend::Exact => eig_exact(&h, &hdr),
        Backend::Qpe => eig_qpe(a, &h, n, seed, &hdr),
        Backend::Vqe | Backend::VqeFolded | Backend::VqeDeflation => {
            if n < 2 {
                return Err(input("variational backends need at least two spins"));
            }
            if a.max_evaluations == 0 {
                return Err(input("--max-evaluations must be at least 1"));
            }
            let opts = VqeOptions {
                mode: cost_mode(&a.sampling, seed)?,
                optimizer: OptimizerConfig {
                    max_evaluations: a.max_evaluations,
                    ..OptimizerConfig::default()
                },
                seed,
            };
            match a.backend {
                Backend::Vqe => eig_vqe(a, &h, n, &opts, &hdr),
                Backend::VqeFolded => eig_folded(a, &h, n, &opts, &hdr),
                _ => eig_deflation(a, &h, n, &opts, &hdr),
            }
        }
    }
}

fn eig_exact(h: &PauliSum, hdr: &Header) -> Outcome {
    let e = eigen_decompose(&dense_or_fail(h)?)?;
    let mut report = String::from("backend exact\n");
    for (k, l) in e.eigenvalues.iter().enumerate() {
        let _ = writeln!(report, "lambda{k} = {l:.6}");
    }
    let vecs: Vec<Vec<nmrq::C64>> = (0..e.dim()).map(|k| e.eigenvector(k)).collect();
    let refs: Vec<(usize, &[nmrq::C64])> = vecs
        .iter()
        .enumerate()
        .map(|(k, v)| (k, v.as_slice()))
        .collect();
    let files = vec![
        file(
            "eigenvalues.csv",
            csv(
                hdr,
                "index,eigenvalue",
                e.eigenvalues
                    .iter()
                    .enumerate()
                    .map(|(k, l)| format!("{k},{l:.9}")),
            ),
        ),
        file(
            "eigenvectors.csv",
            csv(hdr, "level,basis,re,im", eigenvector_rows(&refs)),
        ),
    ];
    Ok(Run { report, files })
}

fn eig_qpe(a: &EigArgs, h: &PauliSum, n: usize, seed: u64, hdr: &Header) -> Outcome {
    let cfg = QpeConfig {
        t_ancillas: a.ancillas,
        trotter_steps: a.trotter,
        shots: a.qpe_shots,
        max_attempts: a.qpe_attempts,
        seed,
        evolution: match a.evolution {
            QpeEvolution::Gates => Evolution::Gates,
            QpeEvolution::Compiled => Evolution::CompiledTrotter,
            QpeEvolution::Exact => Evolution::Exact,
        },
    };
    cfg.validate()?;
    if n + a.ancillas > QPE_QUBIT_CAP {
        return Err(Failure::Resource(format!(
            "{} ancillas plus {n} spins exceed the {QPE_QUBIT_CAP}-qubit simulation cap",
            a.ancillas
        )));
    }
    if n > DEFAULT_DENSE_CAP {
        return Err(nmrq::Error::ResourceLimit {
            qubits: n,
            cap: DEFAULT_DENSE_CAP,
        }
        .into());
    }
    let states: Vec<StateVector> = match a.qpe_states {
        QpeStates::Random => random_initial_states(n, a.qpe_count.unwrap_or(2 << n), seed),
        QpeStates::Oracle => {
            let e = eigen_decompose(&dense_or_fail(h)?)?;
            (0..e.dim())
                .map(|k| StateVector::from_amplitudes(e.eigenvector(k)))
                .collect::<Result<_, _>>()?
        }
    };
    if states.is_empty() {
        return Err(input("--qpe-count must be at least 1"));
    }
    let r = run_qpe(h, &cfg, &states)?;
    let found = r.distinct_verified();
    if found.is_empty() {
        return Err(Failure::Numerical(
            "no phase estimate passed verification".into(),
        ));
    }
    let mut values: Vec<(f64, f64, &str)> = found
        .iter()
        .map(|e| (e.eigenvalue, e.scaled_eigenvalue, "qpe"))
        .collect();
    let dim = 1usize << n;
    if values.len() + 1 == dim {
        let known: Vec<f64> = values.iter().map(|v| v.0).collect();
        let all = complete_by_trace(&known, h.trace(), dim)?;
        let last = all[dim - 1];
        values.push((last, last / r.c_scale, "trace"));
    }
    values.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut report = format!("backend qpe  C = {:.4}  t = {}\n", r.c_scale, r.t_ancillas);
    for e in &r.estimates {
        let _ = writeln!(
            report,
            "state {} attempt {}: x = {} phase {:.12} scaled {:+.12} eigenvalue {:.4} verified {}",
            e.initial,
            e.attempt,
            e.raw_index,
            e.phase,
            e.scaled_eigenvalue,
            e.eigenvalue,
            e.verified
        );
    }
    for (k, v) in values.iter().enumerate() {
        let _ = writeln!(report, "lambda{k} = {:.4} ({})", v.0, v.2);
    }
    if values.len() < dim {
        let _ = writeln!(report, "{} of {dim} eigenvalues found", values.len());
    }
    let attempts = r.estimates.iter().map(|e| {
        format!(
            "{},{},{},{:.12},{:.12},{:.9},{},{}",
            e.initial,
            e.attempt,
            e.raw_index,
            e.phase,
            e.scaled_eigenvalue,
            e.eigenvalue,
            e.verified,
            e.hits
        )
    });
    let files = vec![
        file(
            "qpe.csv",
            csv(
                hdr,
                "initial,attempt,raw_index,phase,scaled_eigenvalue,eigenvalue,verified,hits",
                attempts,
            ),
        ),
        file(
            "eigenvalues.csv",
            csv(
                hdr,
                "index,eigenvalue,scaled_eigenvalue,source",
                values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| format!("{k},{:.9},{:.12},{}", v.0, v.1, v.2)),
            ),
        ),
    ];
    Ok(Run { report, files })
}

fn eig_vqe(a: &EigArgs, h: &PauliSum, n: usize, opts: &VqeOptions, hdr: &Header) -> Outcome {
    let ansatz = XyAnsatz::new(n)?;
    let init = initial_state(a.initial, n)?;
    let r = vqe_minimize(h, ansatz, &init, &vec![0.0; ansatz.parameter_count()], opts)?;
    if !r.converged {
        return Err(Failure::Numerical(format!(
            "VQE did not converge within {} evaluations (best {:.6})",
            r.evaluations, r.eigenvalue
        )));
    }
    let report = format!(
        "backend vqe\nlambda0 = {:.6}\ntheta = {:?}\nevaluations {} converged {}\n",
        r.eigenvalue, r.theta_star, r.evaluations, r.converged
    );
    let files = vec![
        file(
            "eigenvalues.csv",
            csv(
                hdr,
                "index,eigenvalue,converged,evaluations",
                [format!(
                    "0,{:.9},{},{}",
                    r.eigenvalue, r.converged, r.evaluations
                )],
            ),
        ),
        file(
            "vqe_history.csv",
            csv(
                hdr,
                "evaluation,best_cost",
                r.cost_history
                    .iter()
                    .enumerate()
                    .map(|(k, c)| format!("{},{c:.9}", k + 1)),
            ),
        ),
        file(
            "eigenvectors.csv",
            csv(
                hdr,
                "level,basis,re,im",
                eigenvector_rows(&[(0, r.eigenvector.amplitudes())]),
            ),
        ),
    ];
    Ok(Run { report, files })
}

fn eig_folded(a: &EigArgs, h: &PauliSum, n: usize, opts: &VqeOptions, hdr: &Header) -> Outcome {
    let ansatz = XyAnsatz::new(n)?;
    let theta0 = vec![0.0; ansatz.parameter_count()];
    let states = match a.initial {
        InitialKind::Default => default_sweep_states(n)?,
        k => vec![initial_state(k, n)?],
    };
    let (lo, up) = h.eigen_range_bounds()?;
    let mut report = String::from("backend vqe-folded\n");
    let mut files = Vec::new();
    if a.w_sweep {
        let sweep = folded_sweep(h, ansatz, &states, &w_grid(h, 16)?, opts, 1e-4 * (up - lo))?;
        if sweep.eigenpairs.is_empty() {
            return Err(Failure::Numerical(
                "no consistent folded-spectrum candidate".into(),
            ));
        }
        for (k, p) in sweep.eigenpairs.iter().enumerate() {
            let _ = writeln!(
                report,
                "lambda{k} = {:.6} (w = {:.3}, cost {:.4e})",
                p.folded.result.eigenvalue, p.folded.w, p.folded.result.cost
            );
        }
        files.push(file(
            "eigenvalues.csv",
            csv(
                hdr,
                "index,eigenvalue,w,cost,expectation,initial",
                sweep.eigenpairs.iter().enumerate().map(|(k, p)| {
                    format!(
                        "{k},{:.9},{:.6},{:.9e},{:.9},{}",
                        p.folded.result.eigenvalue,
                        p.folded.w,
                        p.folded.result.cost,
                        p.folded.expectation.value,
                        p.initial
                    )
                }),
            ),
        ));
        files.push(file(
            "folded_candidates.csv",
            csv(
                hdr,
                "w,initial,eigenvalue,cost,expectation,consistent,converged",
                sweep.candidates.iter().map(|p| {
                    format!(
                        "{:.6},{},{:.9},{:.9e},{:.9},{},{}",
                        p.folded.w,
                        p.initial,
                        p.folded.result.eigenvalue,
                        p.folded.result.cost,
                        p.folded.expectation.value,
                        p.folded.consistent,
                        p.folded.result.converged
                    )
                }),
            ),
        ));
        let vecs: Vec<(usize, &[nmrq::C64])> = sweep
            .eigenpairs
            .iter()
            .enumerate()
            .map(|(k, p)| (k, p.folded.result.eigenvector.amplitudes()))
            .collect();
        files.push(file(
            "eigenvectors.csv",
            csv(hdr, "level,basis,re,im", eigenvector_rows(&vecs)),
        ));
    } else {
        let Some(w) = a.w else {
            return Err(input("vqe-folded needs --w or --w-sweep"));
        };
        let r = folded_vqe(h, w, ansatz, &states[0], &theta0, opts)?;
        let _ = writeln!(
            report,
            "w = {w}: eigenvalue {:.6}, <H> {:.6}, cost {:.4e}, consistent {}",
            r.result.eigenvalue, r.expectation.value, r.result.cost, r.consistent
        );
        files.push(file(
            "eigenvalues.csv",
            csv(
                hdr,
                "index,eigenvalue,w,cost,expectation,consistent",
                [format!(
                    "0,{:.9},{w},{:.9e},{:.9},{}",
                    r.result.eigenvalue, r.result.cost, r.expectation.value, r.consistent
                )],
            ),
        ));
        files.push(file(
            "eigenvectors.csv",
            csv(
                hdr,
                "level,basis,re,im",
                eigenvector_rows(&[(0, r.result.eigenvector.amplitudes())]),
            ),
        ));
    }
    Ok(Run { report, files })
}

fn eig_deflation(a: &EigArgs, h: &PauliSum, n: usize, opts: &VqeOptions, hdr: &Header) -> Outcome {
    if a.levels == 0 {
        return Err(input("--levels must be at least 1"));
    }
    let ansatz = XyAnsatz::new(n)?;
    let init = initial_state(a.initial, n)?;
    let betas = a.beta.map(|b| vec![b; a.levels.saturating_sub(1)]);
    let levels = deflation_vqe(
        h,
        a.levels,
        betas.as_deref(),
        ansatz,
        &init,
        &vec![0.0; ansatz.parameter_count()],
        opts,
    )?;
    let (lo, up) = h.eigen_range_bounds()?;
    let verified = if n <= DEFAULT_DENSE_CAP {
        let e = eigen_decompose(&dense_or_fail(h)?)?;
        verify_levels(&levels, &e.eigenvalues, 1e-4 * (up - lo))
    } else {
        vec![false; levels.len()]
    };
    let mut report = String::from("backend vqe-deflation\n");
    for (k, (l, v)) in levels.iter().zip(&verified).enumerate() {
        let _ = writeln!(
            report,
            "level {k}: <H> = {:.6}, penalty {:.3e}, converged {}, verified {v}",
            l.result.eigenvalue, l.penalty, l.result.converged
        );
    }
    let rows = levels.iter().zip(&verified).enumerate().map(|(k, (l, v))| {
        format!(
            "{k},{:.9},{:.9e},{},{v}",
            l.result.eigenvalue, l.penalty, l.result.converged
        )
    });
    let vecs: Vec<(usize, &[nmrq::C64])> = levels
        .iter()
        .enumerate()
        .map(|(k, l)| (k, l.result.eigenvector.amplitudes()))
        .collect();
    let files = vec![
        file(
            "eigenvalues.csv",
            csv(hdr, "level,eigenvalue,penalty,converged,verified", rows),
        ),
        file(
            "eigenvectors.csv",
            csv(hdr, "level,basis,re,im", eigenvector_rows(&vecs)),
        ),
    ];
    Ok(Run { report, files })
}

fn vqe_decomposition(h: &PauliSum, n: usize) -> Result<EigenDecomposition, Failure> {
    if n < 2 {
        return Err(input("the vqe backend needs at least two spins"));
    }
    let ansatz = XyAnsatz::new(n)?;
    let (lo, up) = h.eigen_range_bounds()?;
    let sweep = folded_sweep(
        h,
        ansatz,
        &default_sweep_states(n)?,
        &w_grid(h, 16)?,
        &VqeOptions::default(),
        1e-4 * (up - lo),
    )?;
    let dim = 1usize << n;
    if sweep.eigenpairs.len() != dim {
        return Err(Failure::Numerical(format!(
            "folded-spectrum sweep recovered {} of {dim} eigenpairs",
            sweep.eigenpairs.len()
        )));
    }
    let mut v = DenseMatrix::zeros(dim);
    for (col, p) in sweep.eigenpairs.iter().enumerate() {
        for (row, amp) in p.folded.result.eigenvector.amplitudes().iter().enumerate() {
            v[(row, col)] = *amp;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues: sweep.eigenvalues(),
        eigenvectors: v,
    })
}

pub fn spectrum(a: &SpectrumArgs) -> Outcome {
    let (spec, text) = load(&a.input)?;
    let n = spec.len();
    let sw = a.sw.unwrap_or(12.0 * spec.field_mhz);
    let fo = FidOptions {
        points: a.d,
        spectral_width: sw,
        t2: a.t2,
        timing: if a.literal_timing {
            Timing::LiteralProduct
        } else {
            Timing::Dwell
        },
    };
    if a.d < 2 {
        return Err(input("--d must be at least 2"));
    }
    if !(sw.is_finite() && sw > 0.0) {
        return Err(input("--sw must be positive"));
    }
    if a.t2.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
        return Err(input("--t2 must be positive"));
    }
    if !(a.threshold > 0.0 && a.threshold <= 1.0) {
        return Err(input("--threshold must lie in (0, 1]"));
    }
    let window = match a.ppm_window.as_deref() {
        None => None,
        Some(&[lo, hi]) if lo < hi => Some((lo, hi)),
        Some(_) => return Err(input("--ppm-window needs lo,hi with lo < hi")),
    };
    let method = match a.dft {
        DftArg::Auto => DftMethod::Auto,
        DftArg::Direct => DftMethod::Direct,
        DftArg::Fft if a.d.is_power_of_two() => DftMethod::Fft,
        DftArg::Fft => return Err(input("--dft fft needs a power-of-two --d")),
    };
    if n > DEFAULT_DENSE_CAP {
        return Err(nmrq::Error::ResourceLimit {
            qubits: n,
            cap: DEFAULT_DENSE_CAP,
        }
        .into());
    }

    let h = spec.build_hamiltonian();
    let decomp = match a.backend {
        SpectrumBackend::Exact => eigen_decompose(&dense_or_fail(&h)?)?,
        SpectrumBackend::Vqe => vqe_decomposition(&h, n)?,
    };
    let fid = compute_fid(&decomp, &fo)?;
    let full = fid_to_spectrum(&fid, &spec, method)?;
    let shown = match window {
        Some((lo, hi)) => full.crop_ppm(lo, hi),
        None => full,
    };
    let max = shown.intensity.iter().cloned().fold(0.0, f64::max);
    let peaks = if max > 0.0 {
        peak_list(&shown, a.threshold * max)?
    } else {
        Vec::new()
    };

    let hdr = header(a, &text, None);
    let mut report = format!(
        "spectrum: {} points, SW {sw} Hz, resolution {:.4} Hz, {} peaks\n",
        a.d,
        sw / a.d as f64,
        peaks.len()
    );
    for p in &peaks {
        let _ = writeln!(
            report,
            "  {:.4} ppm  {:+.3} Hz  {:.4e}",
            p.ppm, p.hz, p.intensity
        );
    }
    let files = vec![
        file("fid.csv", fid.to_csv(&hdr.line)),
        file("spectrum.csv", shown.to_csv(&hdr.line)),
        file("peaks.csv", peaks_csv(&peaks, &hdr.line)),
    ];
    Ok(Run { report, files })
}

pub fn zne_demo(a: &ZneArgs) -> Outcome {
    let (spec, text) = load(&a.input)?;
    let n = spec.len();
    if n < 2 {
        return Err(input("zne-demo needs at least two spins"));
    }
    if a.repetitions == 0 {
        return Err(input("--repetitions must be at least 1"));
    }
    let noise = NoiseModel::depolarizing(a.p1, a.p2)?;
    let seed = resolve_seed(a.seed);
    let base = ZneConfig {
        fold_counts: a.fold_counts.clone(),
        extrapolation: extrapolation(a.extrapolation),
        shots: a.shots,
        seed,
    };
    base.validate()?;
    let init = initial_state(a.initial, n)?;

    let h = spec.build_hamiltonian();
    let ansatz = XyAnsatz::new(n)?;
    let r = vqe_minimize(
        &h,
        ansatz,
        &init,
        &vec![0.0; ansatz.parameter_count()],
        &VqeOptions::default(),
    )?;
    let ideal = r.eigenvector.expectation(&h)?;
    let mut prep = init
        .prep()
        .expect("parity and singlet states carry circuits")
        .clone();
    prep.append(&ansatz.circuit(&r.theta_star)?)?;
    let g = group_terms(&h);

    let mut scale_rows = Vec::new();
    let mut summary = Vec::new();
    let mut improved = 0;
    for rep in 0..a.repetitions {
        let s = seed.wrapping_add(rep);
        let z = mitigated_expectation(
            &prep,
            &g,
            &noise,
            &ZneConfig {
                seed: s,
                ..base.clone()
            },
        )?;
        for ((lambda, est), folds) in z.scaled.iter().zip(&base.fold_counts) {
            scale_rows.push(format!(
                "{s},{folds},{lambda},{:.9},{:.9}",
                est.value, est.std_error
            ));
        }
        let better = (z.mitigated - ideal).abs() < (z.unmitigated() - ideal).abs();
        improved += usize::from(better);
        summary.push(format!(
            "{s},{ideal:.9},{:.9},{:.9},{better}",
            z.unmitigated(),
            z.mitigated
        ));
    }
    let hdr = header(a, &text, Some(seed));
    let mut report = format!(
        "zne-demo: ideal {ideal:.4}, p1 {} p2 {}, scales {:?}\n",
        a.p1,
        a.p2,
        base.scales()
    );
    for row in &summary {
        let _ = writeln!(report, "  {row}");
    }
    let _ = writeln!(
        report,
        "mitigation closer to ideal in {improved}/{} repetitions",
        a.repetitions
    );
    let files = vec![
        file(
            "zne.csv",
            csv(&hdr, "seed,fold_count,lambda,value,std_error", scale_rows),
        ),
        file(
            "zne_summary.csv",
            csv(&hdr, "seed,ideal,unmitigated,mitigated,improved", summary),
        ),
    ];
    Ok(Run { report, files })
}
