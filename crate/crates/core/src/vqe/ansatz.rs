//! The XY ansatz: products of `exp(-i theta Y_p X_q)` factors.

use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliString};
use crate::simulator::Circuit;
use crate::trotter_qpe::append_pauli_exponential;

/// Ansatz over `n_spins` qubits with `n (n - 1)` parameters.
///
/// Factor `U_pq = exp(-i theta Y_p X_q)` (1-based spins), with an extra
/// `Z_N` when neither `p` nor `q` is the last spin. Parameters follow
/// [`XyAnsatz::pairs`]: first every `(k, l)` with `k > l`, then every `(l, k)`,
/// `l` ascending and `k` ascending within each `l`. Factors are applied in
/// that order, so the first pair acts first on the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XyAnsatz {
    n_spins: usize,
}

impl XyAnsatz {
    pub fn new(n_spins: usize) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::invalid("the XY ansatz needs at least two spins"));
        }
        Ok(XyAnsatz { n_spins })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn parameter_count(&self) -> usize {
        self.n_spins * (self.n_spins - 1)
    }

    /// `(p, q)` per parameter, 1-based.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_spins;
        let lower = (1..n).flat_map(|l| ((l + 1)..=n).map(move |k| (k, l)));
        let upper = (1..n).flat_map(|l| ((l + 1)..=n).map(move |k| (l, k)));
        lower.chain(upper).collect()
    }

    /// Pauli string generating `U_pq` (unit coefficient).
    pub fn generator(&self, p: usize, q: usize) -> PauliString {
        let n = self.n_spins;
        let mut axes = vec![PauliAxis::I; n];
        axes[p - 1] = PauliAxis::Y;
        axes[q - 1] = PauliAxis::X;
        if p != n && q != n {
            axes[n - 1] = PauliAxis::Z;
        }
        PauliString::real(axes, 1.0)
    }

    pub fn circuit(&self, theta: &[f64]) -> Result<Circuit> {
        if theta.len() != self.parameter_count() {
            return Err(Error::invalid(format!(
                "XY ansatz on {} spins takes {} parameters, got {}",
                self.n_spins,
                self.parameter_count(),
                theta.len()
            )));
        }
        let mut c = Circuit::new(self.n_spins);
        for (&(p, q), &t) in self.pairs().iter().zip(theta) {
            append_pauli_exponential(&mut c, &self.generator(p, q), -t, None, 0)?;
        }
        Ok(c)
    }
}

pub fn build_xy_ansatz(n: usize, theta: &[f64]) -> Result<Circuit> {
    XyAnsatz::new(n)?.circuit(theta)
}
