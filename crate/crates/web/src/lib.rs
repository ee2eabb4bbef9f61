//! Browser bindings: a spectrum explorer, the QPE readout distribution and a
//! zero-noise extrapolation curve. Every entry point takes the spin-system
//! TOML text and returns a JSON string.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use nmrq::exact_diag::eigen_decompose;
use nmrq::simulator::{NoiseModel, StateVector};
use nmrq::spectrum::{compute_fid, fid_to_spectrum, peak_list, DftMethod, FidOptions};
use nmrq::spin_system::{parse_spec, SpinSystemSpec};
use nmrq::trotter_qpe::{outcome_distribution, scale_hamiltonian, Evolution, QpeConfig};
use nmrq::vqe::{group_terms, vqe_minimize, InitialState, VqeOptions, XyAnsatz};
use nmrq::zne::{mitigated_expectation, ZneConfig};

fn fail(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn spec_of(toml_text: &str) -> Result<SpinSystemSpec, JsError> {
    parse_spec(toml_text.as_bytes()).map_err(fail)
}

fn json(v: &impl Serialize) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(fail)
}

#[derive(Serialize)]
struct PeakOut {
    ppm: f64,
    hz: f64,
    intensity: f64,
}

#[derive(Serialize)]
struct SpectrumOut {
    ppm: Vec<f64>,
    intensity: Vec<f64>,
    peaks: Vec<PeakOut>,
    eigenvalues: Vec<f64>,
}

/// Exact-diagonalization spectrum over `offset +- half_width_ppm`.
/// `t2 <= 0` disables line broadening.
#[wasm_bindgen]
pub fn spectrum(
    toml_text: &str,
    points: usize,
    half_width_ppm: f64,
    t2: f64,
    threshold: f64,
) -> Result<String, JsError> {
    let spec = spec_of(toml_text)?;
    let h = spec.build_hamiltonian();
    let e = eigen_decompose(&h.to_dense().map_err(fail)?).map_err(fail)?;
    let opts = FidOptions {
        t2: (t2 > 0.0).then_some(t2),
        ..FidOptions::covering(points, spec.field_mhz, half_width_ppm)
    };
    let s = fid_to_spectrum(
        &compute_fid(&e, &opts).map_err(fail)?,
        &spec,
        DftMethod::Auto,
    )
    .map_err(fail)?;
    let max = s.intensity.iter().cloned().fold(0.0, f64::max);
    let peaks = if max > 0.0 {
        peak_list(&s, threshold * max).map_err(fail)?
    } else {
        Vec::new()
    };
    json(&SpectrumOut {
        peaks: peaks
            .iter()
            .map(|p| PeakOut {
                ppm: p.ppm,
                hz: p.hz,
                intensity: p.intensity,
            })
            .collect(),
        ppm: s.ppm,
        intensity: s.intensity,
        eigenvalues: e.eigenvalues,
    })
}

#[derive(Serialize)]
struct QpeOut {
    c_scale: f64,
    /// Eigenvalue in rad/s implied by each readout index.
    eigenvalue: Vec<f64>,
    probability: Vec<f64>,
    exact: Vec<f64>,
}

/// Ancilla readout distribution for a seeded random initial state.
#[wasm_bindgen]
pub fn qpe_distribution(
    toml_text: &str,
    ancillas: usize,
    trotter_steps: usize,
    seed: u64,
) -> Result<String, JsError> {
    let spec = spec_of(toml_text)?;
    if ancillas > 14 {
        return Err(JsError::new("at most 14 ancillas in the browser"));
    }
    let h = spec.build_hamiltonian();
    let scaled = scale_hamiltonian(&h).map_err(fail)?;
    let cfg = QpeConfig {
        t_ancillas: ancillas,
        trotter_steps,
        evolution: Evolution::CompiledTrotter,
        ..QpeConfig::default()
    };
    cfg.validate().map_err(fail)?;
    let init = StateVector::random(spec.len(), seed);
    let probability = outcome_distribution(&scaled, &cfg, &init).map_err(fail)?;
    let grid = (1u64 << ancillas) as f64;
    let eigenvalue = (0..probability.len())
        .map(|x| scaled.c_scale * (x as f64 / grid - 0.25))
        .collect();
    let exact = eigen_decompose(&h.to_dense().map_err(fail)?)
        .map_err(fail)?
        .eigenvalues;
    json(&QpeOut {
        c_scale: scaled.c_scale,
        eigenvalue,
        probability,
        exact,
    })
}

#[derive(Serialize)]
struct ZneOut {
    ideal: f64,
    lambda: Vec<f64>,
    value: Vec<f64>,
    std_error: Vec<f64>,
    mitigated: f64,
}

/// Noisy ground-state energy at fold counts 0..=4 and its extrapolation.
#[wasm_bindgen]
pub fn zne_curve(
    toml_text: &str,
    p1: f64,
    p2: f64,
    shots: u64,
    seed: u64,
) -> Result<String, JsError> {
    let spec = spec_of(toml_text)?;
    let n = spec.len();
    let h = spec.build_hamiltonian();
    let init = if n == 2 {
        InitialState::singlet()
    } else {
        InitialState::parity_uniform(n, true).map_err(fail)?
    };
    let ansatz = XyAnsatz::new(n).map_err(fail)?;
    let r = vqe_minimize(
        &h,
        ansatz,
        &init,
        &vec![0.0; ansatz.parameter_count()],
        &VqeOptions::default(),
    )
    .map_err(fail)?;
    let mut prep = init
        .prep()
        .ok_or_else(|| JsError::new("initial state has no circuit"))?
        .clone();
    prep.append(&ansatz.circuit(&r.theta_star).map_err(fail)?)
        .map_err(fail)?;
    let noise = NoiseModel::depolarizing(p1, p2).map_err(fail)?;
    let cfg = ZneConfig {
        shots,
        seed,
        ..ZneConfig::default()
    };
    let z = mitigated_expectation(&prep, &group_terms(&h), &noise, &cfg).map_err(fail)?;
    json(&ZneOut {
        ideal: r.eigenvector.expectation(&h).map_err(fail)?,
        lambda: z.scaled.iter().map(|s| s.0).collect(),
        value: z.scaled.iter().map(|s| s.1.value).collect(),
        std_error: z.scaled.iter().map(|s| s.1.std_error).collect(),
        mitigated: z.mitigated,
    })
}
