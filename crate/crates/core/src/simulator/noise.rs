//! Stochastic Pauli-trajectory noise.

use rand::Rng as _;

use super::{Circuit, Gate, StateVector};
use crate::error::{Error, Result};
use crate::pauli::PauliAxis;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseChannel {
    /// Uniform X, Y or Z.
    #[default]
    Depolarizing,
    BitFlip,
    PhaseFlip,
}

/// Per-gate error probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub channel: NoiseChannel,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            p1: 0.001,
            p2: 0.01,
            channel: NoiseChannel::Depolarizing,
        }
    }
}

impl NoiseModel {
    pub fn depolarizing(p1: f64, p2: f64) -> Result<Self> {
        let m = NoiseModel {
            p1,
            p2,
            channel: NoiseChannel::Depolarizing,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless() -> Self {
        NoiseModel {
            p1: 0.0,
            p2: 0.0,
            channel: NoiseChannel::Depolarizing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }

    fn probability(&self, g: &Gate) -> f64 {
        match g.qubits().len() {
            0 => 0.0,
            1 => self.p1,
            _ => self.p2,
        }
    }

    fn draw_axis(&self, rng: &mut Rng) -> PauliAxis {
        match self.channel {
            NoiseChannel::Depolarizing => {
                [PauliAxis::X, PauliAxis::Y, PauliAxis::Z][rng.random_range(0..3)]
            }
            NoiseChannel::BitFlip => PauliAxis::X,
            NoiseChannel::PhaseFlip => PauliAxis::Z,
        }
    }
}

/// An injected error: after gate `after`, apply `axis` to `qubit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ErrorEvent {
    pub after: usize,
    pub qubit: usize,
    pub axis: PauliAxis,
}

/// Draws the error events of one trajectory without touching a state.
pub(crate) fn draw_events(c: &Circuit, noise: &NoiseModel, rng: &mut Rng) -> Vec<ErrorEvent> {
    let mut events = Vec::new();
    if noise.is_noiseless() {
        return events;
    }
    for (k, g) in c.gates().iter().enumerate() {
        let p = noise.probability(g);
        if p > 0.0 && rng.random::<f64>() < p {
            let qs = g.qubits();
            let qubit = qs[rng.random_range(0..qs.len())];
            events.push(ErrorEvent {
                after: k,
                qubit,
                axis: noise.draw_axis(rng),
            });
        }
    }
    events
}

pub(crate) fn run_with_events(state: &mut StateVector, c: &Circuit, events: &[ErrorEvent]) {
    let mut next = events.iter().peekable();
    for (k, g) in c.gates().iter().enumerate() {
        state.apply_unchecked(g);
        while let Some(e) = next.next_if(|e| e.after == k) {
            state.apply_pauli_axis(e.qubit, e.axis);
        }
    }
}

/// One noisy trajectory of `c` applied to `state`.
pub fn apply_noisy_circuit(
    state: &mut StateVector,
    c: &Circuit,
    noise: &NoiseModel,
    rng: &mut Rng,
) -> Result<()> {
    noise.validate()?;
    if c.n_qubits() != state.n_qubits() {
        return Err(Error::invalid("circuit and state widths differ"));
    }
    let events = draw_events(c, noise, rng);
    run_with_events(state, c, &events);
    Ok(())
}
