//! Zero-noise extrapolation by per-gate unitary folding.

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::simulator::{estimate_expectation_sampled, Circuit, Estimate, NoiseModel};
use crate::vqe::PauliGrouping;

/// Highest polynomial degree used by any fit.
pub const MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extrapolation {
    /// Interpolating polynomial through all points (degree capped at 4,
    /// least squares beyond five points).
    #[default]
    Richardson,
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZneConfig {
    /// Fold counts `n`; noise scale is `1 + 2n`.
    pub fold_counts: Vec<usize>,
    pub extrapolation: Extrapolation,
    pub shots: u64,
    pub seed: u64,
}

impl Default for ZneConfig {
    fn default() -> Self {
        ZneConfig {
            fold_counts: vec![0, 1, 2, 3, 4],
            extrapolation: Extrapolation::Richardson,
            shots: 10_000,
            seed: 0,
        }
    }
}

impl ZneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fold_counts.first() != Some(&0) {
            return Err(Error::invalid("fold_counts must start at 0"));
        }
        if self.fold_counts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("fold_counts must be strictly increasing"));
        }
        if self.fold_counts.len() < 2 {
            return Err(Error::invalid("at least two noise scales are needed"));
        }
        if self.shots == 0 {
            return Err(Error::invalid("shots must be at least 1"));
        }
        Ok(())
    }

    pub fn scales(&self) -> Vec<f64> {
        self.fold_counts
            .iter()
            .map(|&n| (1 + 2 * n) as f64)
            .collect()
    }
}

/// Replaces every gate `G` with `G (G^dagger G)^n`.
pub fn fold_circuit(c: &Circuit, n: usize) -> Circuit {
    let mut gates = Vec::with_capacity(c.len() * (1 + 2 * n));
    for g in c.gates() {
        gates.push(*g);
        for _ in 0..n {
            gates.push(g.adjoint());
            gates.push(*g);
        }
    }
    Circuit::from_gates(c.n_qubits(), gates).expect("folding keeps gates valid")
}

fn check_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::invalid("extrapolation needs at least two points"));
    }
    for (i, a) in points.iter().enumerate() {
        if !(a.0.is_finite() && a.1.is_finite()) {
            return Err(Error::invalid("extrapolation points must be finite"));
        }
        if points[..i].iter().any(|b| b.0 == a.0) {
            return Err(Error::invalid(format!("duplicate noise scale {}", a.0)));
        }
    }
    Ok(())
}

/// Lagrange weights `w_i` with `p(0) = sum w_i y_i`.
pub fn lagrange_weights_at_zero(lambdas: &[f64]) -> Vec<f64> {
    lambdas
        .iter()
        .enumerate()
        .map(|(i, &li)| {
            lambdas
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &lj)| lj / (lj - li))
                .product()
        })
        .collect()
}

/// Value at zero of the least-squares polynomial of the given degree.
fn least_squares_at_zero(points: &[(f64, f64)], degree: usize) -> Result<f64> {
    let k = degree + 1;
    let scale = points.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for &(x, y) in points {
        let xs = x / scale;
        let pows: Vec<f64> = (0..k).map(|p| xs.powi(p as i32)).collect();
        for r in 0..k {
            b[r] += pows[r] * y;
            for c in 0..k {
                a[r][c] += pows[r] * pows[c];
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        if a[piv][col].abs() < 1e-14 {
            return Err(Error::Degenerate(
                "polynomial fit is ill-conditioned".into(),
            ));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut coef = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = ((r + 1)..k).map(|c| a[r][c] * coef[c]).sum();
        coef[r] = (b[r] - s) / a[r][r];
    }
    Ok(coef[0])
}

/// Interpolating polynomial evaluated at `lambda = 0`.
///
/// More than five points fall back to a degree-4 least-squares fit.
pub fn richardson_extrapolate(points: &[(f64, f64)]) -> Result<f64> {
    check_points(points)?;
    if points.len() > MAX_DEGREE + 1 {
        return least_squares_at_zero(points, MAX_DEGREE);
    }
    let lambdas: Vec<f64> = points.iter().map(|p| p.0).collect();
    Ok(lagrange_weights_at_zero(&lambdas)
        .iter()
        .zip(points)
        .map(|(w, p)| w * p.1)
        .sum())
}

pub fn extrapolate(points: &[(f64, f64)], method: Extrapolation) -> Result<f64> {
    check_points(points)?;
    match method {
        Extrapolation::Richardson => richardson_extrapolate(points),
        Extrapolation::Linear => least_squares_at_zero(points, 1),
        Extrapolation::Quadratic if points.len() < 3 => least_squares_at_zero(points, 1),
        Extrapolation::Quadratic => least_squares_at_zero(points, 2),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZneResult {
    /// `(lambda, estimate)` per fold count.
    pub scaled: Vec<(f64, Estimate)>,
    pub mitigated: f64,
}

impl ZneResult {
    /// The `lambda = 1` (unfolded) estimate.
    pub fn unmitigated(&self) -> f64 {
        self.scaled[0].1.value
    }
}

/// Noisy sampled estimates at every fold count, extrapolated to zero noise.
pub fn mitigated_expectation(
    prep: &Circuit,
    grouping: &PauliGrouping,
    noise: &NoiseModel,
    cfg: &ZneConfig,
) -> Result<ZneResult> {
    cfg.validate()?;
    let mut scaled = Vec::with_capacity(cfg.fold_counts.len());
    for (&n, lambda) in cfg.fold_counts.iter().zip(cfg.scales()) {
        let folded = fold_circuit(prep, n);
        let est = estimate_expectation_sampled(
            &folded,
            grouping,
            cfg.shots,
            Some(noise),
            derive_seed(cfg.seed, n as u64),
        )?;
        scaled.push((lambda, est));
    }
    let points: Vec<(f64, f64)> = scaled.iter().map(|(l, e)| (*l, e.value)).collect();
    let mitigated = extrapolate(&points, cfg.extrapolation)?;
    Ok(ZneResult { scaled, mitigated })
}
