//! Trotterized evolution circuits and quantum phase estimation.
//!
//! The Hamiltonian is scaled by `C` so its spectrum lies in `[-0.25, 0.25]`,
//! and every ancilla gets an extra phase `2 pi * 0.25 * 2^a`, which shifts all
//! phases into `[0, 0.5]`. A measured index `x` therefore maps back to the
//! eigenvalue `C * (x / 2^t - 0.25)`.
//!
//! Ancilla `a` (qubit `a`) controls `U^(2^a)`; the system register follows the
//! `t` ancillas. After the swap-free inverse QFT, qubit 0 carries the most
//! significant bit of `x`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::exact_diag::{eigen_decompose, newton_distance};
use crate::matrix::DenseMatrix;
use crate::pauli::{PauliAxis, PauliString, PauliSum};
use crate::rng::derive_seed;
use crate::simulator::{sample, Circuit, Gate, StateVector};
use crate::C64;

/// Appends `exp(i * alpha * P)` for the axes of `term` (its coefficient is
/// ignored), optionally controlled by `control`. System qubit `q` of the term
/// is circuit qubit `q + offset`.
pub fn append_pauli_exponential(
    circuit: &mut Circuit,
    term: &PauliString,
    alpha: f64,
    control: Option<usize>,
    offset: usize,
) -> Result<()> {
    let support: Vec<usize> = term.support().into_iter().map(|q| q + offset).collect();
    let Some(&last) = support.last() else {
        return circuit.push(match control {
            None => Gate::GlobalPhase(alpha),
            Some(c) => Gate::Phase(c, alpha),
        });
    };
    let mut before = Vec::new();
    let mut after = Vec::new();
    for &q in &support {
        match term.axes()[q - offset] {
            PauliAxis::X => {
                before.push(Gate::H(q));
                after.push(Gate::H(q));
            }
            PauliAxis::Y => {
                before.push(Gate::Rx(q, FRAC_PI_2));
                after.push(Gate::Rx(q, -FRAC_PI_2));
            }
            _ => {}
        }
    }
    let ladder: Vec<Gate> = support
        .windows(2)
        .map(|w| Gate::Cnot {
            control: w[0],
            target: w[1],
        })
        .collect();
    // exp(i alpha Z) = Rz(-2 alpha)
    let theta = -2.0 * alpha;
    let core = match control {
        None => vec![Gate::Rz(last, theta)],
        Some(c) => vec![
            Gate::CPhase {
                control: c,
                target: last,
                angle: theta,
            },
            Gate::Phase(c, -theta / 2.0),
        ],
    };
    for g in before
        .into_iter()
        .chain(ladder.iter().copied())
        .chain(core)
        .chain(ladder.iter().rev().copied())
        .chain(after)
    {
        circuit.push(g)?;
    }
    Ok(())
}

fn hermitian_terms(h: &PauliSum) -> Result<PauliSum> {
    if !h.is_hermitian() {
        return Err(Error::invalid(
            "Trotter circuits require a Hermitian Hamiltonian",
        ));
    }
    Ok(h.canonicalize())
}

fn append_trotter(
    circuit: &mut Circuit,
    h: &PauliSum,
    t: f64,
    r: usize,
    control: Option<usize>,
    offset: usize,
) -> Result<()> {
    let dt = t / r as f64;
    for _ in 0..r {
        for term in h.terms() {
            append_pauli_exponential(circuit, term, term.coefficient().re * dt, control, offset)?;
        }
    }
    Ok(())
}

/// One first-order step approximating `exp(i t H)`, terms in canonical order.
pub fn trotter_step_circuit(h: &PauliSum, t: f64) -> Result<Circuit> {
    trotterized_unitary(h, t, 1)
}

/// `r` repetitions of the step for `t / r`.
pub fn trotterized_unitary(h: &PauliSum, t: f64, r: usize) -> Result<Circuit> {
    if r == 0 {
        return Err(Error::invalid("Trotter number must be at least 1"));
    }
    let h = hermitian_terms(h)?;
    let mut c = Circuit::new(h.qubit_count());
    append_trotter(&mut c, &h, t, r, None, 0)?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledHamiltonian {
    pub scaled: PauliSum,
    pub c_scale: f64,
}

/// Divides by `C = 4 * max(|lower|, |upper|)` of the trace-based bounds.
pub fn scale_hamiltonian(h: &PauliSum) -> Result<ScaledHamiltonian> {
    let h = hermitian_terms(h)?;
    let (lo, up) = h.eigen_range_bounds()?;
    let c_scale = 4.0 * lo.abs().max(up.abs());
    if c_scale == 0.0 {
        return Err(Error::Degenerate(
            "zero Hamiltonian cannot be scaled".into(),
        ));
    }
    Ok(ScaledHamiltonian {
        scaled: h.scale_real(1.0 / c_scale),
        c_scale,
    })
}

/// `t = n + ceil(log2(2 + 1 / (2 eps)))`.
pub fn required_ancillas(n_bits: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(n_bits + (2.0 + 1.0 / (2.0 * epsilon)).log2().ceil() as usize)
}

/// How the controlled powers of `U = exp(i 2 pi H_scaled)` are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evolution {
    /// Gate-by-gate Trotter circuit, each gate controlled.
    Gates,
    /// Trotter circuit compiled to a dense unitary, powers by squaring.
    #[default]
    CompiledTrotter,
    /// Dense `exp(i 2 pi H_scaled)` from the eigendecomposition.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpeConfig {
    pub t_ancillas: usize,
    pub trotter_steps: usize,
    pub shots: u64,
    pub max_attempts: usize,
    pub seed: u64,
    pub evolution: Evolution,
}

impl Default for QpeConfig {
    fn default() -> Self {
        QpeConfig {
            t_ancillas: 12,
            trotter_steps: 10,
            shots: 100,
            max_attempts: 10,
            seed: 0,
            evolution: Evolution::CompiledTrotter,
        }
    }
}

impl QpeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_ancillas == 0 || self.t_ancillas > 24 {
            return Err(Error::invalid("t_ancillas must lie in 1..=24"));
        }
        if self.trotter_steps == 0 {
            return Err(Error::invalid("trotter_steps must be at least 1"));
        }
        if self.shots == 0 || self.max_attempts == 0 {
            return Err(Error::invalid("shots and max_attempts must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    /// Measured index `x` in `[0, 2^t)`.
    pub raw_index: usize,
    /// `x / 2^t`.
    pub phase: f64,
    /// `x / 2^t - 0.25`, the estimate of the scaled eigenvalue.
    pub scaled_eigenvalue: f64,
    /// `C * (x / 2^t - 0.25)` in rad/s.
    pub eigenvalue: f64,
    pub verified: bool,
    /// Index of the initial state this came from.
    pub initial: usize,
    pub attempt: usize,
    /// Shots landing in the reported cluster.
    pub hits: u64,
}

fn append_phase_shift(circuit: &mut Circuit, t: usize) -> Result<()> {
    for a in 0..t {
        circuit.push(Gate::Phase(a, 2.0 * PI * 0.25 * (1u64 << a) as f64))?;
    }
    Ok(())
}

fn append_inverse_qft(circuit: &mut Circuit, t: usize) -> Result<()> {
    for i in (0..t).rev() {
        for k in ((i + 1)..t).rev() {
            circuit.push(Gate::CPhase {
                control: k,
                target: i,
                angle: -2.0 * PI / (1u64 << (k - i + 1)) as f64,
            })?;
        }
        circuit.push(Gate::H(i))?;
    }
    Ok(())
}

/// Gate-level phase-estimation circuit over `t + m` qubits.
pub fn qpe_circuit(scaled: &ScaledHamiltonian, cfg: &QpeConfig) -> Result<Circuit> {
    cfg.validate()?;
    let t = cfg.t_ancillas;
    let h = hermitian_terms(&scaled.scaled)?;
    let mut c = Circuit::new(t + h.qubit_count());
    for a in 0..t {
        c.push(Gate::H(a))?;
    }
    for a in 0..t {
        for _ in 0..(1u64 << a) {
            append_trotter(&mut c, &h, 2.0 * PI, cfg.trotter_steps, Some(a), t)?;
        }
    }
    append_phase_shift(&mut c, t)?;
    append_inverse_qft(&mut c, t)?;
    Ok(c)
}

/// Dense `U = exp(i 2 pi H_scaled)` as selected by `cfg.evolution`.
pub fn evolution_unitary(scaled: &ScaledHamiltonian, cfg: &QpeConfig) -> Result<DenseMatrix> {
    let h = &scaled.scaled;
    match cfg.evolution {
        Evolution::Exact => {
            let e = eigen_decompose(&h.to_dense()?)?;
            let phases: Vec<C64> = e
                .eigenvalues
                .iter()
                .map(|l| C64::from_polar(1.0, 2.0 * PI * l))
                .collect();
            let v = &e.eigenvectors;
            let mut vd = v.clone();
            for r in 0..v.dim() {
                for c in 0..v.dim() {
                    vd[(r, c)] = v[(r, c)] * phases[c];
                }
            }
            Ok(&vd * &v.adjoint())
        }
        _ => trotterized_unitary(h, 2.0 * PI, cfg.trotter_steps)?.unitary(crate::DEFAULT_DENSE_CAP),
    }
}

/// State after the full phase-estimation circuit applied to `|0..0> (x) initial`.
pub fn qpe_final_state(
    scaled: &ScaledHamiltonian,
    cfg: &QpeConfig,
    initial: &StateVector,
) -> Result<StateVector> {
    cfg.validate()?;
    let t = cfg.t_ancillas;
    let m = scaled.scaled.qubit_count();
    if initial.n_qubits() != m {
        return Err(Error::invalid(format!(
            "initial state has {} qubits, Hamiltonian has {m}",
            initial.n_qubits()
        )));
    }
    let mut state = StateVector::zero(t).tensor(initial);
    if cfg.evolution == Evolution::Gates {
        state.apply_circuit(&qpe_circuit(scaled, cfg)?)?;
        return Ok(state);
    }
    let mut tail = Circuit::new(t + m);
    for a in 0..t {
        state.apply_gate(&Gate::H(a))?;
    }
    let targets: Vec<usize> = (t..t + m).collect();
    let mut power = evolution_unitary(scaled, cfg)?;
    for a in 0..t {
        state.apply_matrix(Some(a), &targets, &power)?;
        if a + 1 < t {
            power = &power * &power;
        }
    }
    append_phase_shift(&mut tail, t)?;
    append_inverse_qft(&mut tail, t)?;
    state.apply_circuit(&tail)?;
    Ok(state)
}

/// Exact distribution of the ancilla readout `x`.
pub fn outcome_distribution(
    scaled: &ScaledHamiltonian,
    cfg: &QpeConfig,
    initial: &StateVector,
) -> Result<Vec<f64>> {
    let state = qpe_final_state(scaled, cfg, initial)?;
    let ancillas: Vec<usize> = (0..cfg.t_ancillas).collect();
    state.marginal_probabilities(&ancillas)
}

fn estimate(index: usize, t: usize, c_scale: f64) -> (f64, f64, f64) {
    let phase = index as f64 / (1u64 << t) as f64;
    let scaled = phase - 0.25;
    (phase, scaled, c_scale * scaled)
}

/// Groups adjacent non-empty bins; each cluster is represented by its
/// most-hit bin. Returns `(bin, total hits)` sorted by hits, descending.
fn clusters(counts: &std::collections::BTreeMap<usize, u64>) -> Vec<(usize, u64)> {
    let mut out: Vec<(usize, u64, u64)> = Vec::new();
    let mut prev: Option<usize> = None;
    for (&bin, &n) in counts {
        match (prev, out.last_mut()) {
            (Some(p), Some(last)) if bin == p + 1 => {
                last.2 += n;
                if n > last.1 {
                    last.0 = bin;
                    last.1 = n;
                }
            }
            _ => out.push((bin, n, n)),
        }
        prev = Some(bin);
    }
    let mut out: Vec<(usize, u64)> = out.into_iter().map(|(b, _, total)| (b, total)).collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpeReport {
    pub c_scale: f64,
    pub t_ancillas: usize,
    /// Every attempt, in order.
    pub estimates: Vec<PhaseEstimate>,
}

impl QpeReport {
    /// Verified estimates with duplicates (within one grid cell) merged,
    /// ascending by eigenvalue.
    pub fn distinct_verified(&self) -> Vec<PhaseEstimate> {
        let mut v: Vec<PhaseEstimate> = self
            .estimates
            .iter()
            .filter(|e| e.verified)
            .copied()
            .collect();
        v.sort_by(|a, b| a.raw_index.cmp(&b.raw_index).then(b.hits.cmp(&a.hits)));
        let mut out: Vec<PhaseEstimate> = Vec::new();
        for e in v {
            match out.last_mut() {
                Some(last) if e.raw_index <= last.raw_index + 1 => {
                    if e.hits > last.hits {
                        *last = e;
                    }
                }
                _ => out.push(e),
            }
        }
        out
    }
}

/// Runs phase estimation from each initial state until a verified estimate
/// is found or `max_attempts` is exhausted.
///
/// Each attempt draws `cfg.shots` readouts and reports the heaviest cluster.
/// Verification checks the eigenvalue against the dense Hamiltonian with a
/// tolerance of one grid cell, `C / 2^t`.
pub fn run_qpe(h: &PauliSum, cfg: &QpeConfig, initial_states: &[StateVector]) -> Result<QpeReport> {
    cfg.validate()?;
    let scaled = scale_hamiltonian(h)?;
    let dense = h.to_dense()?;
    let t = cfg.t_ancillas;
    let cell = scaled.c_scale / (1u64 << t) as f64;
    let ancillas: Vec<usize> = (0..t).collect();
    let mut estimates = Vec::new();
    for (s, init) in initial_states.iter().enumerate() {
        let final_state = qpe_final_state(&scaled, cfg, init)?;
        let stream = derive_seed(cfg.seed, s as u64);
        for attempt in 0..cfg.max_attempts {
            let shots = sample(
                &final_state,
                &ancillas,
                cfg.shots,
                derive_seed(stream, attempt as u64),
            )?;
            let (bin, hits) = clusters(&shots.counts)[0];
            let (phase, scaled_eigenvalue, eigenvalue) = estimate(bin, t, scaled.c_scale);
            let verified = newton_distance(&dense, eigenvalue) <= cell;
            estimates.push(PhaseEstimate {
                raw_index: bin,
                phase,
                scaled_eigenvalue,
                eigenvalue,
                verified,
                initial: s,
                attempt,
                hits,
            });
            if verified {
                break;
            }
        }
    }
    Ok(QpeReport {
        c_scale: scaled.c_scale,
        t_ancillas: t,
        estimates,
    })
}

/// Seeded random initial states.
pub fn random_initial_states(n_qubits: usize, count: usize, seed: u64) -> Vec<StateVector> {
    (0..count)
        .map(|k| StateVector::random(n_qubits, derive_seed(seed, k as u64)))
        .collect()
}

/// Appends the one missing eigenvalue using `sum = trace`.
pub fn complete_by_trace(found: &[f64], trace: f64, total: usize) -> Result<Vec<f64>> {
    let missing = total.saturating_sub(found.len());
    match missing {
        0 => Ok(found.to_vec()),
        1 => {
            let mut out = found.to_vec();
            out.push(trace - found.iter().sum::<f64>());
            Ok(out)
        }
        _ => Err(Error::CannotComplete { missing }),
    }
}
