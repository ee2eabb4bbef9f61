//! Spin-system NMR simulation on a statevector quantum simulator.
//!
//! The pipeline runs from a spin-system description (chemical shifts,
//! J-couplings, field, offset) to a Pauli-encoded Hamiltonian, through one of
//! three eigensolvers (dense Jacobi, Trotterized phase estimation, or the
//! variational eigensolver with folded-spectrum and deflation extensions), and
//! finally to the FID signal and its spectrum.
//!
//! # Qubit ordering
//!
//! Nucleus `k` lives on qubit `k`. Qubit 0 is the leftmost Kronecker factor
//! and the most significant bit of a basis index, so for two qubits the basis
//! order is `|00>, |01>, |10>, |11>` with the left digit being qubit 0. Every
//! module (dense realization, simulator, sampling, spectrum) uses this
//! convention.

pub mod error;
pub mod exact_diag;
pub mod matrix;
pub mod pauli;
pub mod rng;
pub mod simulator;
pub mod spectrum;
pub mod spin_system;
pub mod trotter_qpe;
pub mod vqe;
pub mod zne;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use pauli::{PauliAxis, PauliString, PauliSum};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Default qubit cap for dense realizations (2^12 x 2^12).
pub const DEFAULT_DENSE_CAP: usize = 12;
