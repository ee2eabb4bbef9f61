//! Independent oracles: Kronecker-built Pauli matrices, a Taylor
//! scaling-and-squaring matrix exponential, and small dense helpers.
#![allow(dead_code)]

use nmrq::{DenseMatrix, PauliSum, C64};

pub const PRINTED: [[f64; 4]; 4] = [
    [1062.215, 0.0, 0.0, 0.0],
    [0.0, -4970.921, 7.288, 0.0],
    [0.0, 7.288, 4963.633, 0.0],
    [0.0, 0.0, 0.0, -1054.927],
];

pub fn printed_matrix() -> DenseMatrix {
    let rows: Vec<&[f64]> = PRINTED.iter().map(|r| &r[..]).collect();
    DenseMatrix::from_real_rows(&rows).unwrap()
}

pub fn sulfanol_toml() -> &'static str {
    include_str!("../../fixtures/sulfanol.toml")
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_2x2(ch: char) -> DenseMatrix {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let data = match ch {
        'I' => vec![o, z, z, o],
        'X' => vec![z, o, o, z],
        'Y' => vec![z, -i, i, z],
        'Z' => vec![o, z, z, -o],
        _ => panic!("bad axis {ch}"),
    };
    DenseMatrix::from_rows(2, data).unwrap()
}

/// `coeff * P_0 (x) P_1 (x) ...` by explicit Kronecker products.
pub fn kron_word(word: &str, coeff: C64) -> DenseMatrix {
    let mut m = DenseMatrix::identity(1);
    for ch in word.chars() {
        m = m.kron(&pauli_2x2(ch));
    }
    m.scale(coeff)
}

pub fn dense_of(s: &PauliSum) -> DenseMatrix {
    let dim = 1usize << s.qubit_count();
    let mut m = DenseMatrix::zeros(dim);
    for t in s.terms() {
        m = &m + &kron_word(&t.word(), t.coefficient());
    }
    m
}

pub fn frobenius(m: &DenseMatrix) -> f64 {
    m.as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn diff_norm(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    frobenius(&(a - b))
}

fn one_norm(m: &DenseMatrix) -> f64 {
    (0..m.dim())
        .map(|col| (0..m.dim()).map(|r| m[(r, col)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^A` by Taylor series after scaling by `2^-s` so that `||A||_1 < 1/2`.
pub fn expm(a: &DenseMatrix) -> DenseMatrix {
    let norm = one_norm(a);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(c(0.5f64.powi(s), 0.0));
    let dim = a.dim();
    let mut sum = DenseMatrix::identity(dim);
    let mut term = DenseMatrix::identity(dim);
    for k in 1..40 {
        term = (&term * &scaled).scale(c(1.0 / k as f64, 0.0));
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `e^{i t H}`.
pub fn expm_i(h: &DenseMatrix, t: f64) -> DenseMatrix {
    expm(&h.scale(c(0.0, t)))
}

pub fn mat_vec(m: &DenseMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.dim())
        .map(|r| (0..m.dim()).map(|k| m[(r, k)] * v[k]).sum())
        .collect()
}

pub fn overlap_sq(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .norm_sqr()
}

/// Eigenvalues of a real symmetric 4x4 block-diagonal matrix like the
/// printed one: two diagonal entries plus a 2x2 block, closed form.
pub fn printed_eigenvalues() -> [f64; 4] {
    let m = PRINTED;
    let (a, d, b) = (m[1][1], m[2][2], m[1][2]);
    let mid = (a + d) / 2.0;
    let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    let mut v = [mid - r, mid + r, m[0][0], m[3][3]];
    v.sort_by(f64::total_cmp);
    v
}
