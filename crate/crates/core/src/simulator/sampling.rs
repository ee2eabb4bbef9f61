//! Computational-basis sampling and shot-based expectation estimates.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::Rng as _;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::noise::{draw_events, run_with_events};
use super::{Circuit, Gate, NoiseModel, StateVector};
use crate::error::{Error, Result};
use crate::pauli::PauliAxis;
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::vqe::PauliGrouping;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotResult {
    /// Outcome index (measured qubits, first one most significant) -> count.
    pub counts: BTreeMap<usize, u64>,
    pub shots: u64,
}

impl ShotResult {
    pub fn frequency(&self, outcome: usize) -> f64 {
        self.counts.get(&outcome).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Most frequent outcome, lowest index on ties.
    pub fn mode(&self) -> Option<usize> {
        self.counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&k, _)| k)
    }
}

/// Sampled value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], rng: &mut Rng) -> usize {
    let u = rng.random::<f64>() * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Multinomial draw of `shots` outcomes over the marginal of `qubits`.
pub fn sample(state: &StateVector, qubits: &[usize], shots: u64, seed: u64) -> Result<ShotResult> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let cdf = cumulative(&state.marginal_probabilities(qubits)?);
    let mut rng = rng_from_seed(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(draw(&cdf, &mut rng)).or_insert(0) += 1;
    }
    Ok(ShotResult { counts, shots })
}

/// Gates rotating `axis` on qubit `q` onto Z: H for X, S-dagger then H for Y.
pub fn measurement_basis_change(axis: PauliAxis, q: usize) -> Vec<Gate> {
    match axis {
        PauliAxis::X => vec![Gate::H(q)],
        PauliAxis::Y => vec![Gate::SDag(q), Gate::H(q)],
        _ => vec![],
    }
}

/// Alternative basis change using `Rx(pi/2)` for Y.
pub fn measurement_basis_change_rx(axis: PauliAxis, q: usize) -> Vec<Gate> {
    match axis {
        PauliAxis::X => vec![Gate::H(q)],
        PauliAxis::Y => vec![Gate::Rx(q, FRAC_PI_2)],
        _ => vec![],
    }
}

/// Estimates `<psi|O|psi>` for `psi = prep |0...0>` from shots.
///
/// The observable is the one `grouping` was built from. Each group gets
/// `shots` measurements of its own basis-changed circuit; the identity term is
/// added exactly. With a noise model, every shot is an independent trajectory.
pub fn estimate_expectation_sampled(
    prep: &Circuit,
    grouping: &PauliGrouping,
    shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<Estimate> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let n = prep.n_qubits();
    if grouping.qubit_count() != n {
        return Err(Error::invalid("observable and circuit widths differ"));
    }
    if let Some(nm) = noise {
        nm.validate()?;
    }
    let mut value = grouping.identity_coefficient();
    let mut variance = 0.0;
    for (g, group) in grouping.groups().iter().enumerate() {
        let mut circuit = prep.clone();
        for (q, axis) in group.basis().into_iter().enumerate() {
            for gate in measurement_basis_change(axis, q) {
                circuit.push(gate)?;
            }
        }
        let masks: Vec<(usize, f64)> = group
            .terms()
            .iter()
            .map(|t| {
                let m: usize = t.support().iter().map(|&q| 1 << (n - 1 - q)).sum();
                (m, t.coefficient().re)
            })
            .collect();
        let outcomes = run_shots(&circuit, shots, noise, derive_seed(seed, g as u64));
        let per_shot = outcomes.iter().map(|&b| {
            masks
                .iter()
                .map(|&(m, c)| if (b & m).count_ones() % 2 == 0 { c } else { -c })
                .sum::<f64>()
        });
        let (mean, var) = mean_var(per_shot, shots as f64);
        value += mean;
        variance += var / shots as f64;
    }
    Ok(Estimate {
        value,
        std_error: variance.sqrt(),
    })
}

fn mean_var(xs: impl Iterator<Item = f64>, n: f64) -> (f64, f64) {
    let xs: Vec<f64> = xs.collect();
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Full-register outcomes of `shots` runs of `c` from `|0...0>`.
pub(crate) fn run_shots(
    c: &Circuit,
    shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Vec<usize> {
    let mut ideal = StateVector::zero(c.n_qubits());
    ideal.apply_unchecked_circuit(c);
    let cdf = cumulative(&ideal.probabilities());
    match noise.filter(|nm| !nm.is_noiseless()) {
        None => {
            let mut rng = rng_from_seed(seed);
            (0..shots).map(|_| draw(&cdf, &mut rng)).collect()
        }
        Some(nm) => {
            let one = |shot: u64| {
                let mut rng = rng_from_seed(derive_seed(seed, shot));
                let events = draw_events(c, nm, &mut rng);
                if events.is_empty() {
                    return draw(&cdf, &mut rng);
                }
                let mut s = StateVector::zero(c.n_qubits());
                run_with_events(&mut s, c, &events);
                draw(&cumulative(&s.probabilities()), &mut rng)
            };
            #[cfg(feature = "parallel")]
            {
                (0..shots).into_par_iter().map(one).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..shots).map(one).collect()
            }
        }
    }
}

impl StateVector {
    pub(crate) fn apply_unchecked_circuit(&mut self, c: &Circuit) {
        for g in c.gates() {
            self.apply_unchecked(g);
        }
    }
}
