//! Exact algebra over weighted sums of Pauli strings.
//!
//! A [`PauliSum`] is the universal operator representation in this crate:
//! Hamiltonians, squared-shifted Hamiltonians and measured observables are all
//! stored this way. Traces, squared traces and commutator norms are computed
//! symbolically, so none of them require a dense matrix.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::C64;

/// Default magnitude below which canonicalization drops a term.
pub const CANONICAL_TOLERANCE: f64 = 1e-12;

/// Powers of `i`, indexed by exponent mod 4.
const I_POW: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    /// Single-axis product `self * rhs = i^k * axis`; returns `(axis, k)`.
    pub fn mul(self, rhs: PauliAxis) -> (PauliAxis, u8) {
        use PauliAxis::*;
        match (self, rhs) {
            (I, p) | (p, I) => (p, 0),
            (a, b) if a == b => (I, 0),
            (X, Y) => (Z, 1),
            (Y, Z) => (X, 1),
            (Z, X) => (Y, 1),
            (Y, X) => (Z, 3),
            (Z, Y) => (X, 3),
            (X, Z) => (Y, 3),
            _ => unreachable!(),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    pub fn commutes_with(self, other: PauliAxis) -> bool {
        self == PauliAxis::I || other == PauliAxis::I || self == other
    }
}

impl TryFrom<char> for PauliAxis {
    type Error = Error;
    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(PauliAxis::I),
            'X' => Ok(PauliAxis::X),
            'Y' => Ok(PauliAxis::Y),
            'Z' => Ok(PauliAxis::Z),
            other => Err(Error::invalid(format!("unknown Pauli axis `{other}`"))),
        }
    }
}

/// A weighted Kronecker product of single-qubit Pauli axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    axes: Vec<PauliAxis>,
    coefficient: C64,
}

impl PauliString {
    pub fn new(axes: Vec<PauliAxis>, coefficient: C64) -> Self {
        PauliString { axes, coefficient }
    }

    pub fn real(axes: Vec<PauliAxis>, coefficient: f64) -> Self {
        Self::new(axes, C64::new(coefficient, 0.0))
    }

    pub fn identity(n: usize, coefficient: f64) -> Self {
        Self::real(vec![PauliAxis::I; n], coefficient)
    }

    /// Parses an axis word such as `"XZI"` with a real coefficient.
    pub fn parse(word: &str, coefficient: f64) -> Result<Self> {
        let axes = word
            .chars()
            .map(PauliAxis::try_from)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::real(axes, coefficient))
    }

    /// String with `axis` on each listed qubit and identity elsewhere.
    pub fn on_qubits(
        n: usize,
        placements: &[(usize, PauliAxis)],
        coefficient: f64,
    ) -> Result<Self> {
        let mut axes = vec![PauliAxis::I; n];
        for &(q, a) in placements {
            if q >= n {
                return Err(Error::invalid(format!(
                    "qubit {q} out of range for {n} qubits"
                )));
            }
            if axes[q] != PauliAxis::I {
                return Err(Error::invalid(format!("qubit {q} assigned twice")));
            }
            axes[q] = a;
        }
        Ok(Self::real(axes, coefficient))
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn coefficient(&self) -> C64 {
        self.coefficient
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|&a| a == PauliAxis::I)
    }

    pub fn with_coefficient(&self, coefficient: C64) -> Self {
        PauliString {
            axes: self.axes.clone(),
            coefficient,
        }
    }

    /// Qubits carrying a non-identity axis, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != PauliAxis::I)
            .map(|(q, _)| q)
            .collect()
    }

    /// Axis word, qubit 0 first.
    pub fn word(&self) -> String {
        self.axes.iter().map(|a| a.as_char()).collect()
    }

    /// Exact product; phases from single-axis products fold into the coefficient.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.len() != rhs.len() {
            return Err(Error::invalid(format!(
                "cannot multiply Pauli strings of lengths {} and {}",
                self.len(),
                rhs.len()
            )));
        }
        let mut phase = 0u8;
        let axes = self
            .axes
            .iter()
            .zip(&rhs.axes)
            .map(|(&a, &b)| {
                let (p, k) = a.mul(b);
                phase = (phase + k) % 4;
                p
            })
            .collect();
        Ok(PauliString {
            axes,
            coefficient: self.coefficient * rhs.coefficient * I_POW[phase as usize],
        })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .axes
            .iter()
            .zip(&other.axes)
            .filter(|(&a, &b)| !a.commutes_with(b))
            .count();
        anti % 2 == 0
    }

    /// True when every position agrees or one side is identity.
    pub fn qubit_wise_commutes(&self, other: &PauliString) -> bool {
        self.axes
            .iter()
            .zip(&other.axes)
            .all(|(&a, &b)| a.commutes_with(b))
    }

    /// Bit masks for the action `P|c> = i^ny (-1)^popcount(c & z) |c ^ x>`.
    pub(crate) fn masks(&self) -> PauliMasks {
        let n = self.axes.len();
        let mut x = 0u64;
        let mut z = 0u64;
        let mut ny = 0u8;
        for (q, &a) in self.axes.iter().enumerate() {
            let bit = 1u64 << (n - 1 - q);
            match a {
                PauliAxis::I => {}
                PauliAxis::X => x |= bit,
                PauliAxis::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
                PauliAxis::Z => z |= bit,
            }
        }
        PauliMasks {
            x,
            z,
            y_phase: I_POW[(ny % 4) as usize],
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coefficient;
        if c.im == 0.0 {
            write!(f, "{:+.6} {}", c.re, self.word())
        } else {
            write!(f, "({:+.6}{:+.6}i) {}", c.re, c.im, self.word())
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PauliMasks {
    pub x: u64,
    pub z: u64,
    pub y_phase: C64,
}

impl PauliMasks {
    /// Phase picked up by basis state `c` (before the bit flip).
    #[inline]
    pub fn phase(&self, c: usize) -> C64 {
        if (c as u64 & self.z).count_ones() % 2 == 1 {
            -self.y_phase
        } else {
            self.y_phase
        }
    }
}

/// Weighted sum of Pauli strings over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    qubit_count: usize,
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn new(qubit_count: usize) -> Self {
        PauliSum {
            qubit_count,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(qubit_count: usize, terms: Vec<PauliString>) -> Result<Self> {
        let mut s = Self::new(qubit_count);
        for t in terms {
            s.push(t)?;
        }
        Ok(s)
    }

    /// Convenience constructor from `(word, real coefficient)` pairs.
    pub fn from_words(words: &[(&str, f64)]) -> Result<Self> {
        let n = words.first().map_or(0, |(w, _)| w.len());
        let terms = words
            .iter()
            .map(|(w, c)| PauliString::parse(w, *c))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, terms)
    }

    pub fn push(&mut self, term: PauliString) -> Result<()> {
        if term.len() != self.qubit_count {
            return Err(Error::invalid(format!(
                "term {} has {} axes, sum has {} qubits",
                term.word(),
                term.len(),
                self.qubit_count
            )));
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn canonicalize(&self) -> PauliSum {
        self.canonicalize_with(CANONICAL_TOLERANCE)
    }

    /// Merges repeated axis words and drops terms with `|c| < tol`.
    /// Terms keep the order of their first occurrence.
    pub fn canonicalize_with(&self, tol: f64) -> PauliSum {
        let mut index: HashMap<&[PauliAxis], usize> = HashMap::new();
        let mut merged: Vec<PauliString> = Vec::new();
        for t in &self.terms {
            match index.get(t.axes()) {
                Some(&i) => merged[i].coefficient += t.coefficient,
                None => {
                    index.insert(t.axes(), merged.len());
                    merged.push(t.clone());
                }
            }
        }
        merged.retain(|t| t.coefficient.norm() >= tol);
        PauliSum {
            qubit_count: self.qubit_count,
            terms: merged,
        }
    }

    /// Hermitian iff every canonical coefficient is real (within `tol`, relative).
    pub fn is_hermitian(&self) -> bool {
        self.canonicalize()
            .terms
            .iter()
            .all(|t| t.coefficient.im.abs() <= 1e-10 * t.coefficient.norm().max(1.0))
    }

    fn require_hermitian(&self, what: &str) -> Result<PauliSum> {
        let c = self.canonicalize();
        if !c.is_hermitian() {
            return Err(Error::invalid(format!(
                "{what} requires a Hermitian Pauli sum"
            )));
        }
        Ok(c)
    }

    /// Coefficient of the all-identity string (after merging).
    pub fn identity_coefficient(&self) -> C64 {
        self.terms
            .iter()
            .filter(|t| t.is_identity())
            .map(|t| t.coefficient)
            .sum()
    }

    pub fn scale(&self, s: C64) -> PauliSum {
        PauliSum {
            qubit_count: self.qubit_count,
            terms: self
                .terms
                .iter()
                .map(|t| t.with_coefficient(t.coefficient * s))
                .collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> PauliSum {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, rhs: &PauliSum) -> Result<PauliSum> {
        self.check_width(rhs)?;
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        Ok(PauliSum {
            qubit_count: self.qubit_count,
            terms,
        }
        .canonicalize())
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> PauliSum {
        let mut out = self.clone();
        out.terms
            .push(PauliString::identity(self.qubit_count, shift));
        out.canonicalize()
    }

    /// Canonical product of two sums, term by term.
    pub fn product(&self, rhs: &PauliSum) -> Result<PauliSum> {
        self.check_width(rhs)?;
        let mut terms = Vec::with_capacity(self.len() * rhs.len());
        for a in &self.terms {
            for b in &rhs.terms {
                terms.push(a.multiply(b)?);
            }
        }
        Ok(PauliSum {
            qubit_count: self.qubit_count,
            terms,
        }
        .canonicalize())
    }

    /// `[self, rhs] = self*rhs - rhs*self`.
    pub fn commutator(&self, rhs: &PauliSum) -> Result<PauliSum> {
        let ab = self.product(rhs)?;
        let ba = rhs.product(self)?;
        ab.add(&ba.scale_real(-1.0))
    }

    fn check_width(&self, rhs: &PauliSum) -> Result<()> {
        if self.qubit_count != rhs.qubit_count {
            return Err(Error::invalid(format!(
                "qubit count mismatch: {} vs {}",
                self.qubit_count, rhs.qubit_count
            )));
        }
        Ok(())
    }

    /// Frobenius norm from Pauli orthogonality: `||sum c P||_F^2 = 2^n sum |c|^2`.
    pub fn frobenius_norm(&self) -> f64 {
        let c = self.canonicalize();
        let s: f64 = c.terms.iter().map(|t| t.coefficient.norm_sqr()).sum();
        (s * dim_f64(self.qubit_count)).sqrt()
    }

    /// Dense `2^n x 2^n` realization; refuses more than `cap` qubits.
    pub fn to_dense_capped(&self, cap: usize) -> Result<DenseMatrix> {
        if self.qubit_count > cap {
            return Err(Error::ResourceLimit {
                qubits: self.qubit_count,
                cap,
            });
        }
        let dim = 1usize << self.qubit_count;
        let mut m = DenseMatrix::zeros(dim);
        for t in &self.terms {
            let masks = t.masks();
            for c in 0..dim {
                let r = c ^ masks.x as usize;
                m[(r, c)] += t.coefficient * masks.phase(c);
            }
        }
        Ok(m)
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        self.to_dense_capped(crate::DEFAULT_DENSE_CAP)
    }

    /// Pauli decomposition of a dense matrix, `c_P = tr(P M) / 2^n`.
    pub fn from_dense(m: &DenseMatrix) -> Result<PauliSum> {
        let dim = m.dim();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::invalid(format!(
                "dimension {dim} is not a power of two"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        if n > 8 {
            return Err(Error::ResourceLimit { qubits: n, cap: 8 });
        }
        let axes_all = [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
        let mut terms = Vec::new();
        for code in 0..(1usize << (2 * n)) {
            let axes: Vec<PauliAxis> = (0..n)
                .map(|q| axes_all[(code >> (2 * (n - 1 - q))) & 3])
                .collect();
            let probe = PauliString::real(axes, 1.0);
            let masks = probe.masks();
            // tr(P M) = sum_r phase(r) M[r][r ^ x]
            let tr: C64 = (0..dim)
                .map(|r| masks.phase(r) * m[(r, r ^ masks.x as usize)])
                .sum();
            let c = tr / dim as f64;
            if c.norm() >= CANONICAL_TOLERANCE {
                terms.push(probe.with_coefficient(c));
            }
        }
        PauliSum::from_terms(n, terms)
    }

    /// `tr(H) = 2^n * (identity coefficient)`, real part.
    pub fn trace(&self) -> f64 {
        self.identity_coefficient().re * dim_f64(self.qubit_count)
    }

    /// `tr(H^2) = 2^n * sum c_k^2` for a canonical Hermitian sum.
    pub fn trace_of_square(&self) -> Result<f64> {
        let c = self.require_hermitian("trace_of_square")?;
        let s: f64 = c
            .terms
            .iter()
            .map(|t| t.coefficient.re * t.coefficient.re)
            .sum();
        Ok(s * dim_f64(self.qubit_count))
    }

    /// Mean/variance eigenvalue bracket `m +- sigma * sqrt(2^n - 1)`.
    ///
    /// With `m = tr(H)/N` and `sigma^2 = tr(H^2)/N - m^2`, no eigenvalue can lie
    /// further than `sigma * sqrt(N - 1)` from the mean (Samuelson's inequality).
    pub fn eigen_range_bounds(&self) -> Result<(f64, f64)> {
        let n = dim_f64(self.qubit_count);
        let mean = self.trace() / n;
        let var = (self.trace_of_square()? / n - mean * mean).max(0.0);
        let half = var.sqrt() * (n - 1.0).sqrt();
        Ok((mean - half, mean + half))
    }

    /// Canonical Pauli sum of `(H - w I)^2` by generic multiplication.
    pub fn square_shifted(&self, w: f64) -> Result<PauliSum> {
        let shifted = self.require_hermitian("square_shifted")?.shifted(-w);
        shifted.product(&shifted)
    }

    /// First-order Trotter error bound
    /// `t^2/(2r) * sum_j || sum_{k>j} [H_k, H_j] ||_F` over the canonical terms.
    pub fn trotter_error_bound(&self, t: f64, r: usize) -> Result<f64> {
        if r == 0 {
            return Err(Error::invalid("Trotter number must be at least 1"));
        }
        let c = self.canonicalize();
        let parts: Vec<PauliSum> = c
            .terms
            .iter()
            .map(|term| PauliSum {
                qubit_count: c.qubit_count,
                terms: vec![term.clone()],
            })
            .collect();
        let mut total = 0.0;
        for j in 0..parts.len() {
            let mut acc = PauliSum::new(c.qubit_count);
            for k in (j + 1)..parts.len() {
                acc = acc.add(&parts[k].commutator(&parts[j])?)?;
            }
            total += acc.frobenius_norm();
        }
        Ok(t * t / (2.0 * r as f64) * total)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PauliString::parse(s, 1.0)
    }
}

fn dim_f64(n: usize) -> f64 {
    (n as f64).exp2()
}
