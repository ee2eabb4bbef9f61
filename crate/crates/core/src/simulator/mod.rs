//! Statevector simulation of circuits over a small elementary gate set.

mod noise;
mod sampling;

pub(crate) mod sampling_internal {
    pub(crate) use super::sampling::run_shots;
}

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

pub use noise::{apply_noisy_circuit, NoiseChannel, NoiseModel};
pub use sampling::{
    estimate_expectation_sampled, measurement_basis_change, measurement_basis_change_rx, sample,
    Estimate, ShotResult,
};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::pauli::{PauliAxis, PauliSum};
use crate::rng::{random_amplitudes, rng_from_seed};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Elementary gates. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// `diag(1, -i)`.
    SDag(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    /// `diag(e^{-i theta/2}, e^{i theta/2})`.
    Rz(usize, f64),
    /// `diag(1, e^{i phi})`.
    Phase(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
    /// `diag(1, 1, 1, e^{i phi})` on (control, target).
    CPhase {
        control: usize,
        target: usize,
        angle: f64,
    },
    /// Multiplies the whole state by `e^{i phi}`.
    GlobalPhase(f64),
}

/// Up to two qubit indices, viewed as a slice.
#[derive(Debug, Clone, Copy)]
pub struct Qubits {
    q: [usize; 2],
    len: usize,
}

impl std::ops::Deref for Qubits {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.q[..self.len]
    }
}

impl Gate {
    pub fn qubits(&self) -> Qubits {
        use Gate::*;
        match *self {
            H(q) | X(q) | Y(q) | Z(q) | SDag(q) | Rx(q, _) | Ry(q, _) | Rz(q, _) | Phase(q, _) => {
                Qubits { q: [q, 0], len: 1 }
            }
            Cnot { control, target }
            | CPhase {
                control, target, ..
            } => Qubits {
                q: [control, target],
                len: 2,
            },
            GlobalPhase(_) => Qubits { q: [0, 0], len: 0 },
        }
    }

    pub fn angle(&self) -> Option<f64> {
        use Gate::*;
        match *self {
            Rx(_, a) | Ry(_, a) | Rz(_, a) | Phase(_, a) | GlobalPhase(a) => Some(a),
            CPhase { angle, .. } => Some(angle),
            _ => None,
        }
    }

    pub fn adjoint(&self) -> Gate {
        use Gate::*;
        match *self {
            SDag(q) => Phase(q, std::f64::consts::FRAC_PI_2),
            Rx(q, a) => Rx(q, -a),
            Ry(q, a) => Ry(q, -a),
            Rz(q, a) => Rz(q, -a),
            Phase(q, a) => Phase(q, -a),
            CPhase {
                control,
                target,
                angle,
            } => CPhase {
                control,
                target,
                angle: -angle,
            },
            GlobalPhase(a) => GlobalPhase(-a),
            g => g,
        }
    }

    /// 2x2 matrix of a single-qubit gate, row-major.
    pub fn matrix2(&self) -> Option<[C64; 4]> {
        use Gate::*;
        let i = C64::new(0.0, 1.0);
        Some(match *self {
            H(_) => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                [h, h, h, -h]
            }
            X(_) => [ZERO, ONE, ONE, ZERO],
            Y(_) => [ZERO, -i, i, ZERO],
            Z(_) => [ONE, ZERO, ZERO, -ONE],
            SDag(_) => [ONE, ZERO, ZERO, -i],
            Rx(_, a) => {
                let (s, c) = (a / 2.0).sin_cos();
                [
                    C64::new(c, 0.0),
                    C64::new(0.0, -s),
                    C64::new(0.0, -s),
                    C64::new(c, 0.0),
                ]
            }
            Ry(_, a) => {
                let (s, c) = (a / 2.0).sin_cos();
                [
                    C64::new(c, 0.0),
                    C64::new(-s, 0.0),
                    C64::new(s, 0.0),
                    C64::new(c, 0.0),
                ]
            }
            Rz(_, a) => [
                C64::from_polar(1.0, -a / 2.0),
                ZERO,
                ZERO,
                C64::from_polar(1.0, a / 2.0),
            ],
            Phase(_, a) => [ONE, ZERO, ZERO, C64::from_polar(1.0, a)],
            _ => return None,
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Gate::*;
        match *self {
            H(q) => write!(f, "h q{q}"),
            X(q) => write!(f, "x q{q}"),
            Y(q) => write!(f, "y q{q}"),
            Z(q) => write!(f, "z q{q}"),
            SDag(q) => write!(f, "sdg q{q}"),
            Rx(q, a) => write!(f, "rx({a:.12}) q{q}"),
            Ry(q, a) => write!(f, "ry({a:.12}) q{q}"),
            Rz(q, a) => write!(f, "rz({a:.12}) q{q}"),
            Phase(q, a) => write!(f, "p({a:.12}) q{q}"),
            Cnot { control, target } => write!(f, "cx q{control} q{target}"),
            CPhase {
                control,
                target,
                angle,
            } => write!(f, "cp({angle:.12}) q{control} q{target}"),
            GlobalPhase(a) => write!(f, "gphase({a:.12})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        let qs = g.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::invalid(format!(
                "gate `{g}` touches qubit {q} of a {}-qubit circuit",
                self.n_qubits
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::invalid(format!("gate `{g}` repeats a qubit")));
        }
        if g.angle().is_some_and(|a| !a.is_finite()) {
            return Err(Error::invalid(format!("gate `{g}` has a non-finite angle")));
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::invalid("appended circuit is wider than the target"));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Same gates relocated onto a wider register, qubit `q` -> `q + offset`.
    pub fn embed(&self, n_qubits: usize, offset: usize) -> Result<Circuit> {
        let shifted = self.gates.iter().map(|g| relabel(*g, |q| q + offset));
        Circuit::from_gates(n_qubits, shifted)
    }

    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// One gate per line, for debugging.
    pub fn listing(&self) -> String {
        let mut s = format!("qubits {}\n", self.n_qubits);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    /// Dense unitary by simulating every basis state.
    pub fn unitary(&self, cap: usize) -> Result<DenseMatrix> {
        if self.n_qubits > cap {
            return Err(Error::ResourceLimit {
                qubits: self.n_qubits,
                cap,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut u = DenseMatrix::zeros(dim);
        for col in 0..dim {
            let mut s = StateVector::basis(self.n_qubits, col)?;
            s.apply_circuit(self)?;
            for (row, a) in s.amplitudes().iter().enumerate() {
                u[(row, col)] = *a;
            }
        }
        Ok(u)
    }
}

pub(crate) fn relabel(g: Gate, f: impl Fn(usize) -> usize) -> Gate {
    use Gate::*;
    match g {
        H(q) => H(f(q)),
        X(q) => X(f(q)),
        Y(q) => Y(f(q)),
        Z(q) => Z(f(q)),
        SDag(q) => SDag(f(q)),
        Rx(q, a) => Rx(f(q), a),
        Ry(q, a) => Ry(f(q), a),
        Rz(q, a) => Rz(f(q), a),
        Phase(q, a) => Phase(f(q), a),
        Cnot { control, target } => Cnot {
            control: f(control),
            target: f(target),
        },
        CPhase {
            control,
            target,
            angle,
        } => CPhase {
            control: f(control),
            target: f(target),
            angle,
        },
        GlobalPhase(a) => GlobalPhase(a),
    }
}

/// `2^n` complex amplitudes; qubit 0 is the most significant index bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        StateVector { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if index >= 1 << n_qubits {
            return Err(Error::invalid(format!("basis index {index} out of range")));
        }
        let mut s = Self::zero(n_qubits);
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    /// Normalizes the given amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::invalid(format!(
                "{dim} amplitudes is not a power of two"
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("state has zero or non-finite norm"));
        }
        Ok(StateVector {
            n_qubits: dim.trailing_zeros() as usize,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Seeded random state, complex-normal amplitudes.
    pub fn random(n_qubits: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        StateVector {
            n_qubits,
            amps: random_amplitudes(1 << n_qubits, &mut rng),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `self (x) other`: `self` occupies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        }
    }

    /// Marginal distribution over `qubits`, indexed with `qubits[0]` as the
    /// most significant bit.
    pub fn marginal_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for &q in qubits {
            if q >= self.n_qubits {
                return Err(Error::invalid(format!("qubit {q} out of range")));
            }
        }
        let k = qubits.len();
        let mut out = vec![0.0; 1 << k];
        for (idx, a) in self.amps.iter().enumerate() {
            let mut key = 0;
            for &q in qubits {
                key = (key << 1) | ((idx >> (self.n_qubits - 1 - q)) & 1);
            }
            out[key] += a.norm_sqr();
        }
        Ok(out)
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::invalid(format!(
                "gate `{g}` touches qubit {q} of a {}-qubit state",
                self.n_qubits
            )));
        }
        self.apply_unchecked(g);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, g: &Gate) {
        match *g {
            Gate::Cnot { control, target } => {
                let (cb, tb) = (self.bit(control), self.bit(target));
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::CPhase {
                control,
                target,
                angle,
            } => {
                let mask = self.bit(control) | self.bit(target);
                let ph = C64::from_polar(1.0, angle);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a *= ph;
                    }
                }
            }
            Gate::GlobalPhase(angle) => {
                let ph = C64::from_polar(1.0, angle);
                for a in &mut self.amps {
                    *a *= ph;
                }
            }
            Gate::Rz(q, _) | Gate::Phase(q, _) | Gate::Z(q) | Gate::SDag(q) => {
                let m = g.matrix2().expect("single-qubit gate");
                let b = self.bit(q);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & b == 0 { m[0] } else { m[3] };
                }
            }
            _ => {
                let m = g.matrix2().expect("single-qubit gate");
                let b = self.bit(g.qubits()[0]);
                for i in 0..self.amps.len() {
                    if i & b == 0 {
                        let a0 = self.amps[i];
                        let a1 = self.amps[i | b];
                        self.amps[i] = m[0] * a0 + m[1] * a1;
                        self.amps[i | b] = m[2] * a0 + m[3] * a1;
                    }
                }
            }
        }
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.n_qubits() != self.n_qubits {
            return Err(Error::invalid(format!(
                "circuit has {} qubits, state has {}",
                c.n_qubits(),
                self.n_qubits
            )));
        }
        for g in c.gates() {
            self.apply_unchecked(g);
        }
        Ok(())
    }

    /// Applies `u` to `targets` (first target = most significant), only on
    /// the branch where `control` (if any) is set.
    pub fn apply_matrix(
        &mut self,
        control: Option<usize>,
        targets: &[usize],
        u: &DenseMatrix,
    ) -> Result<()> {
        let k = targets.len();
        if u.dim() != 1 << k {
            return Err(Error::invalid("matrix size does not match target count"));
        }
        let all: Vec<usize> = targets.iter().copied().chain(control).collect();
        for (i, &q) in all.iter().enumerate() {
            if q >= self.n_qubits || all[..i].contains(&q) {
                return Err(Error::invalid(format!(
                    "bad qubit {q} for matrix application"
                )));
            }
        }
        let tmask: usize = targets.iter().map(|&q| self.bit(q)).sum();
        let cmask = control.map_or(0, |c| self.bit(c));
        let offsets: Vec<usize> = (0..1usize << k)
            .map(|local| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| (local >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, &q)| self.bit(q))
                    .sum()
            })
            .collect();
        let mut buf = vec![ZERO; 1 << k];
        for base in 0..self.amps.len() {
            if base & tmask != 0 || base & cmask != cmask {
                continue;
            }
            for (slot, &off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amps[base | off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                self.amps[base | off] = u.row(r).iter().zip(&buf).map(|(x, y)| x * y).sum();
            }
        }
        Ok(())
    }

    /// Applies a Pauli string (ignoring its coefficient).
    pub(crate) fn apply_pauli_axis(&mut self, q: usize, axis: PauliAxis) {
        match axis {
            PauliAxis::I => {}
            PauliAxis::X => self.apply_unchecked(&Gate::X(q)),
            PauliAxis::Y => self.apply_unchecked(&Gate::Y(q)),
            PauliAxis::Z => self.apply_unchecked(&Gate::Z(q)),
        }
    }

    /// Exact `<psi|O|psi>` for a Hermitian observable.
    pub fn expectation(&self, obs: &PauliSum) -> Result<f64> {
        if obs.qubit_count() != self.n_qubits {
            return Err(Error::invalid(format!(
                "observable has {} qubits, state has {}",
                obs.qubit_count(),
                self.n_qubits
            )));
        }
        if !obs.is_hermitian() {
            return Err(Error::invalid(
                "expectation requires a Hermitian observable",
            ));
        }
        let mut total = ZERO;
        for t in obs.terms() {
            let m = t.masks();
            let x = m.x as usize;
            let v: C64 = self
                .amps
                .iter()
                .enumerate()
                .map(|(c, a)| self.amps[c ^ x].conj() * m.phase(c) * a)
                .sum();
            total += t.coefficient() * v;
        }
        Ok(total.re)
    }
}
