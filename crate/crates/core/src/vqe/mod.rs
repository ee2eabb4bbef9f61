//! Variational eigensolvers built on the XY ansatz.
//!
//! Costs are evaluated either exactly on the statevector or from shots
//! (optionally noisy, optionally zero-noise extrapolated). Sampled costs use
//! the same seed at every evaluation, so the optimizer sees a deterministic
//! function of the parameters.

mod ansatz;
mod grouping;
pub mod optimizer;

use std::cell::RefCell;

pub use ansatz::{build_xy_ansatz, XyAnsatz};
pub use grouping::{group_terms, PauliGroup, PauliGrouping};
pub use optimizer::{minimize, Method, OptimResult, OptimizerConfig};

use crate::error::{Error, Result};
use crate::exact_diag::newton_distance;
use crate::pauli::PauliSum;
use crate::rng::derive_seed;
use crate::simulator::sampling_internal::run_shots;
use crate::simulator::{
    estimate_expectation_sampled, Circuit, Estimate, Gate, NoiseModel, StateVector,
};
use crate::zne::{lagrange_weights_at_zero, mitigated_expectation, ZneConfig};

/// Starting state of the ansatz, with an optional preparation circuit from
/// `|0...0>` (required for sampled costs).
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    state: StateVector,
    prep: Option<Circuit>,
}

impl InitialState {
    pub fn from_state(state: StateVector) -> Self {
        InitialState { state, prep: None }
    }

    pub fn from_circuit(prep: Circuit) -> Self {
        let mut state = StateVector::zero(prep.n_qubits());
        state.apply_unchecked_circuit(&prep);
        InitialState {
            state,
            prep: Some(prep),
        }
    }

    /// `(0, 1, -1, 0) / sqrt(2)` via X(1), H(0), CNOT(0, 1), Z(0).
    pub fn singlet() -> Self {
        let prep = Circuit::from_gates(
            2,
            [
                Gate::X(1),
                Gate::H(0),
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
                Gate::Z(0),
            ],
        )
        .expect("fixed circuit");
        Self::from_circuit(prep)
    }

    /// Uniform superposition over basis states of the given Hamming parity.
    /// For two qubits the even case is `(1, 0, 0, 1) / sqrt(2)`.
    pub fn parity_uniform(n: usize, odd: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("parity states need at least two qubits"));
        }
        let mut gates = Vec::new();
        if odd {
            gates.push(Gate::X(n - 1));
        }
        gates.extend((0..n - 1).map(Gate::H));
        gates.extend((0..n - 1).map(|q| Gate::Cnot {
            control: q,
            target: n - 1,
        }));
        Ok(Self::from_circuit(Circuit::from_gates(n, gates)?))
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn prep(&self) -> Option<&Circuit> {
        self.prep.as_ref()
    }

    pub fn n_qubits(&self) -> usize {
        self.state.n_qubits()
    }
}

/// How each cost evaluation reads out expectation values.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CostMode {
    #[default]
    Exact,
    Sampled {
        shots: u64,
        noise: Option<NoiseModel>,
        zne: Option<ZneConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VqeOptions {
    pub mode: CostMode,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    /// Eigenvalue estimate in rad/s.
    pub eigenvalue: f64,
    /// Optimal value of the minimized cost.
    pub cost: f64,
    pub theta_star: Vec<f64>,
    /// Ansatz applied to the initial state at `theta_star`.
    pub eigenvector: StateVector,
    /// Best cost after each evaluation.
    pub cost_history: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

struct Problem<'a> {
    ansatz: XyAnsatz,
    initial: &'a InitialState,
    opts: &'a VqeOptions,
}

impl Problem<'_> {
    fn new<'a>(
        n: usize,
        ansatz: XyAnsatz,
        initial: &'a InitialState,
        opts: &'a VqeOptions,
    ) -> Result<Problem<'a>> {
        if ansatz.n_spins() != n || initial.n_qubits() != n {
            return Err(Error::invalid(
                "ansatz, initial state and Hamiltonian widths differ",
            ));
        }
        opts.optimizer.validate()?;
        if let CostMode::Sampled { shots, noise, zne } = &opts.mode {
            if *shots == 0 {
                return Err(Error::invalid("shots must be at least 1"));
            }
            if initial.prep.is_none() {
                return Err(Error::invalid(
                    "sampled costs need an initial-state preparation circuit",
                ));
            }
            if let Some(nm) = noise {
                nm.validate()?;
            }
            if let Some(z) = zne {
                z.validate()?;
                if noise.is_none() {
                    return Err(Error::invalid(
                        "zero-noise extrapolation needs a noise model",
                    ));
                }
            }
        }
        Ok(Problem {
            ansatz,
            initial,
            opts,
        })
    }

    fn state(&self, theta: &[f64]) -> Result<StateVector> {
        let mut s = self.initial.state.clone();
        s.apply_circuit(&self.ansatz.circuit(theta)?)?;
        Ok(s)
    }

    fn prep_circuit(&self, theta: &[f64]) -> Result<Circuit> {
        let mut c = self
            .initial
            .prep
            .clone()
            .ok_or_else(|| Error::invalid("no preparation circuit"))?;
        c.append(&self.ansatz.circuit(theta)?)?;
        Ok(c)
    }

    /// `<O>` at `theta`, with a standard error (zero in exact mode).
    fn observe(
        &self,
        obs: &PauliSum,
        grouping: &PauliGrouping,
        theta: &[f64],
        stream: u64,
    ) -> Result<Estimate> {
        match &self.opts.mode {
            CostMode::Exact => Ok(Estimate {
                value: self.state(theta)?.expectation(obs)?,
                std_error: 0.0,
            }),
            CostMode::Sampled { shots, noise, zne } => {
                let prep = self.prep_circuit(theta)?;
                let seed = derive_seed(self.opts.seed, stream);
                match (zne, noise) {
                    (Some(z), Some(nm)) => {
                        let cfg = ZneConfig {
                            shots: *shots,
                            seed,
                            ..z.clone()
                        };
                        let r = mitigated_expectation(&prep, grouping, nm, &cfg)?;
                        let lambdas: Vec<f64> = r.scaled.iter().map(|p| p.0).collect();
                        let var: f64 = lagrange_weights_at_zero(&lambdas)
                            .iter()
                            .zip(&r.scaled)
                            .map(|(w, p)| (w * p.1.std_error).powi(2))
                            .sum();
                        Ok(Estimate {
                            value: r.mitigated,
                            std_error: var.sqrt(),
                        })
                    }
                    _ => {
                        estimate_expectation_sampled(&prep, grouping, *shots, noise.as_ref(), seed)
                    }
                }
            }
        }
    }

    /// `|<psi(a)|psi(b)>|^2`, exact or from the all-zeros frequency.
    fn overlap(&self, a: &[f64], b: &[f64], stream: u64) -> Result<f64> {
        match &self.opts.mode {
            CostMode::Exact => Ok(self.state(a)?.inner(&self.state(b)?).norm_sqr()),
            CostMode::Sampled { shots, noise, .. } => {
                let prep = self.initial.prep.as_ref().expect("checked in new");
                overlap_sampled(
                    &self.ansatz,
                    prep,
                    a,
                    b,
                    *shots,
                    noise.as_ref(),
                    derive_seed(self.opts.seed, stream),
                )
            }
        }
    }

    fn minimize(
        &self,
        mut cost: impl FnMut(&[f64]) -> Result<f64>,
        theta0: &[f64],
    ) -> Result<OptimResult> {
        if theta0.len() != self.ansatz.parameter_count() {
            return Err(Error::invalid(format!(
                "theta0 has {} entries, ansatz takes {}",
                theta0.len(),
                self.ansatz.parameter_count()
            )));
        }
        let failure = RefCell::new(None);
        let mut f = |x: &[f64]| match cost(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::INFINITY
            }
        };
        let r = minimize(&mut f, theta0, &self.opts.optimizer)?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(r),
        }
    }

    fn result(&self, r: OptimResult, eigenvalue: f64) -> Result<VqeResult> {
        Ok(VqeResult {
            eigenvalue,
            cost: r.fx,
            eigenvector: self.state(&r.x)?,
            theta_star: r.x,
            cost_history: r.history,
            evaluations: r.evaluations,
            converged: r.converged,
        })
    }
}

const COST_STREAM: u64 = 0;
const CHECK_STREAM: u64 = 1;
const OVERLAP_STREAM: u64 = 1 << 32;

/// Minimizes `<psi(theta)|H|psi(theta)>`.
pub fn vqe_minimize(
    h: &PauliSum,
    ansatz: XyAnsatz,
    initial: &InitialState,
    theta0: &[f64],
    opts: &VqeOptions,
) -> Result<VqeResult> {
    let p = Problem::new(h.qubit_count(), ansatz, initial, opts)?;
    let g = group_terms(h);
    let r = p.minimize(|t| Ok(p.observe(h, &g, t, COST_STREAM)?.value), theta0)?;
    let e = r.fx;
    p.result(r, e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldedResult {
    pub w: f64,
    /// `eigenvalue = w + sign(w) sqrt(cost)`, positive root at `w = 0`.
    pub result: VqeResult,
    /// `<H>` at `theta_star`.
    pub expectation: Estimate,
    /// `<H>` and the recovered eigenvalue agree.
    pub consistent: bool,
}

/// Minimizes `<(H - wI)^2>` and recovers the eigenvalue nearest `w`.
pub fn folded_vqe(
    h: &PauliSum,
    w: f64,
    ansatz: XyAnsatz,
    initial: &InitialState,
    theta0: &[f64],
    opts: &VqeOptions,
) -> Result<FoldedResult> {
    let p = Problem::new(h.qubit_count(), ansatz, initial, opts)?;
    let sq = h.square_shifted(w)?;
    let gsq = group_terms(&sq);
    let gh = group_terms(h);
    let r = p.minimize(|t| Ok(p.observe(&sq, &gsq, t, COST_STREAM)?.value), theta0)?;
    let at_opt = p.observe(&sq, &gsq, &r.x, COST_STREAM)?;
    let tol = match opts.mode {
        CostMode::Exact => {
            1e-9 * sq
                .terms()
                .iter()
                .map(|t| t.coefficient().norm())
                .sum::<f64>()
        }
        _ => 5.0 * at_opt.std_error,
    };
    if r.fx < -tol {
        return Err(Error::Inconsistent(format!(
            "folded cost {} is negative beyond tolerance {tol}",
            r.fx
        )));
    }
    let root = r.fx.max(0.0).sqrt();
    let eigenvalue = if w < 0.0 { w - root } else { w + root };
    let expectation = p.observe(h, &gh, &r.x, CHECK_STREAM)?;
    let (lo, up) = h.eigen_range_bounds()?;
    let allowed = (1e-4 * (up - lo)).max(5.0 * expectation.std_error);
    let consistent = (eigenvalue - expectation.value).abs() <= allowed;
    Ok(FoldedResult {
        w,
        result: p.result(r, eigenvalue)?,
        expectation,
        consistent,
    })
}

/// Default sweep start states: the two parity sectors (singlet for the odd
/// sector of a two-spin system).
pub fn default_sweep_states(n: usize) -> Result<Vec<InitialState>> {
    if n == 2 {
        return Ok(vec![
            InitialState::singlet(),
            InitialState::parity_uniform(2, false)?,
        ]);
    }
    Ok(vec![
        InitialState::parity_uniform(n, true)?,
        InitialState::parity_uniform(n, false)?,
    ])
}

/// `w` grid between the eigenvalue bounds with spacing `range / divisions`.
pub fn w_grid(h: &PauliSum, divisions: usize) -> Result<Vec<f64>> {
    let (lo, up) = h.eigen_range_bounds()?;
    let d = divisions.max(1);
    Ok((0..=d)
        .map(|k| lo + (up - lo) * k as f64 / d as f64)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCandidate {
    pub initial: usize,
    pub folded: FoldedResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub candidates: Vec<SweepCandidate>,
    /// One consistent candidate per distinct eigenvalue (smallest folded
    /// cost wins), ascending.
    pub eigenpairs: Vec<SweepCandidate>,
}

impl SweepResult {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigenpairs
            .iter()
            .map(|c| c.folded.result.eigenvalue)
            .collect()
    }
}

/// Folded-spectrum runs over a `w` grid and several start states.
///
/// Consistent candidates within `merge_tol` rad/s are treated as one
/// eigenvalue.
pub fn folded_sweep(
    h: &PauliSum,
    ansatz: XyAnsatz,
    initials: &[InitialState],
    ws: &[f64],
    opts: &VqeOptions,
    merge_tol: f64,
) -> Result<SweepResult> {
    let theta0 = vec![0.0; ansatz.parameter_count()];
    let mut candidates = Vec::new();
    for &w in ws {
        for (i, init) in initials.iter().enumerate() {
            candidates.push(SweepCandidate {
                initial: i,
                folded: folded_vqe(h, w, ansatz, init, &theta0, opts)?,
            });
        }
    }
    let mut accepted: Vec<&SweepCandidate> =
        candidates.iter().filter(|c| c.folded.consistent).collect();
    accepted.sort_by(|a, b| {
        a.folded
            .result
            .eigenvalue
            .total_cmp(&b.folded.result.eigenvalue)
    });
    let mut eigenpairs: Vec<SweepCandidate> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for c in accepted {
        let e = c.folded.result.eigenvalue;
        match eigenpairs.last_mut() {
            Some(last) if e - anchor <= merge_tol => {
                if c.folded.result.cost < last.folded.result.cost {
                    *last = c.clone();
                }
            }
            _ => {
                anchor = e;
                eigenpairs.push(c.clone());
            }
        }
    }
    Ok(SweepResult {
        candidates,
        eigenpairs,
    })
}

fn overlap_sampled(
    ansatz: &XyAnsatz,
    prep: &Circuit,
    a: &[f64],
    b: &[f64],
    shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<f64> {
    let mut c = prep.clone();
    c.append(&ansatz.circuit(b)?)?;
    c.append(&ansatz.circuit(a)?.adjoint())?;
    c.append(&prep.adjoint())?;
    let outcomes = run_shots(&c, shots, noise, seed);
    Ok(outcomes.iter().filter(|&&o| o == 0).count() as f64 / shots as f64)
}

/// `|<psi(a)|psi(b)>|^2` with `psi(t) = A(t) prep |0>`: exact when `shots`
/// is `None`, otherwise the frequency of all zeros after `prep^dagger A(a)^dagger A(b) prep`.
pub fn overlap_estimate(
    theta_a: &[f64],
    theta_b: &[f64],
    ansatz: XyAnsatz,
    prep: &Circuit,
    shots: Option<u64>,
    seed: u64,
) -> Result<f64> {
    if theta_a.len() != theta_b.len() {
        return Err(Error::invalid("parameter vectors differ in length"));
    }
    match shots {
        Some(0) => Err(Error::invalid("shots must be at least 1")),
        Some(s) => overlap_sampled(&ansatz, prep, theta_a, theta_b, s, None, seed),
        None => {
            let init = InitialState::from_circuit(prep.clone());
            let mut x = init.state.clone();
            x.apply_circuit(&ansatz.circuit(theta_a)?)?;
            let mut y = init.state;
            y.apply_circuit(&ansatz.circuit(theta_b)?)?;
            Ok(x.inner(&y).norm_sqr())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeflationLevel {
    /// `eigenvalue` is `<H>` at the optimum; `cost` includes the penalties.
    pub result: VqeResult,
    /// Sum of the penalty terms at the optimum.
    pub penalty: f64,
}

/// Default penalty weight: the width of the trace-based eigenvalue bracket.
pub fn default_beta(h: &PauliSum) -> Result<f64> {
    let (lo, up) = h.eigen_range_bounds()?;
    Ok(up - lo)
}

/// Sequential orthogonality-penalty VQE for the lowest `k` levels.
///
/// Level `j` minimizes `<H> + sum_{i<j} beta_i |<psi|psi_i>|^2`; every level
/// starts from `theta0`.
pub fn deflation_vqe(
    h: &PauliSum,
    k: usize,
    betas: Option<&[f64]>,
    ansatz: XyAnsatz,
    initial: &InitialState,
    theta0: &[f64],
    opts: &VqeOptions,
) -> Result<Vec<DeflationLevel>> {
    let p = Problem::new(h.qubit_count(), ansatz, initial, opts)?;
    let betas: Vec<f64> = match betas {
        Some(b) => {
            if b.len() + 1 < k {
                return Err(Error::invalid(format!("{k} levels need {} betas", k - 1)));
            }
            if b.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::invalid("betas must be positive"));
            }
            b.to_vec()
        }
        None => vec![default_beta(h)?; k.saturating_sub(1)],
    };
    let g = group_terms(h);
    let mut levels: Vec<DeflationLevel> = Vec::with_capacity(k);
    for _ in 0..k {
        let previous: Vec<Vec<f64>> = levels.iter().map(|l| l.result.theta_star.clone()).collect();
        let penalty = |t: &[f64]| -> Result<f64> {
            let mut s = 0.0;
            for (i, prev) in previous.iter().enumerate() {
                s += betas[i] * p.overlap(t, prev, OVERLAP_STREAM + i as u64)?;
            }
            Ok(s)
        };
        let r = p.minimize(
            |t| Ok(p.observe(h, &g, t, COST_STREAM)?.value + penalty(t)?),
            theta0,
        )?;
        let pen = penalty(&r.x)?;
        let energy = p.observe(h, &g, &r.x, COST_STREAM)?.value;
        levels.push(DeflationLevel {
            result: p.result(r, energy)?,
            penalty: pen,
        });
    }
    Ok(levels)
}

/// Level `j` is verified when it lies within `tol` of the `j`-th smallest
/// reference eigenvalue.
pub fn verify_levels(
    levels: &[DeflationLevel],
    reference_ascending: &[f64],
    tol: f64,
) -> Vec<bool> {
    levels
        .iter()
        .zip(reference_ascending)
        .map(|(l, &r)| (l.result.eigenvalue - r).abs() <= tol)
        .collect()
}

/// Whether `value` is within `tol` of an eigenvalue of `h` (dense check).
pub fn is_eigenvalue(h: &PauliSum, value: f64, tol: f64) -> Result<bool> {
    Ok(newton_distance(&h.to_dense()?, value) <= tol)
}
