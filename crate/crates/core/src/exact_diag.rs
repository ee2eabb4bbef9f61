//! Dense Hermitian eigendecomposition (cyclic Jacobi) and LU determinants.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::C64;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector of `eigenvalues[k]`.
    pub eigenvectors: DenseMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let v = &self.eigenvectors;
        let d = DenseMatrix::from_diagonal(&self.eigenvalues);
        &(v * &d) * &v.adjoint()
    }
}

/// Full spectrum of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Real symmetric input stays real throughout. Each eigenvector is scaled so
/// its largest-magnitude component (first one on ties) is real and positive.
pub fn eigen_decompose(h: &DenseMatrix) -> Result<EigenDecomposition> {
    if !h.is_hermitian(1e-10) {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {:.3e})",
            h.hermitian_defect()
        )));
    }
    let n = h.dim();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = DenseMatrix::identity(n);
    let scale = h.frobenius_norm();
    let target = OFF_DIAGONAL_TOL * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }
    if off_diagonal_norm(&a) > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Inconsistent(
            "Jacobi iteration did not converge".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = DenseMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let mut best = 0;
        for r in 0..n {
            if v[(r, k)].norm() > v[(best, k)].norm() + 1e-12 {
                best = r;
            }
        }
        let pivot = v[(best, k)];
        let gauge = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for r in 0..n {
            vectors[(r, col)] = v[(r, k)] * gauge;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Hermitian Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, scale: f64) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= f64::EPSILON * 1e-3 * scale {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Unitary acting on (p, q): [[c, s], [-s conj(phase), c conj(phase)]].
    let vpp = C64::new(c, 0.0);
    let vpq = C64::new(s, 0.0);
    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl Lu {
    pub fn factor(m: &DenseMatrix) -> Lu {
        let n = m.dim();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let mut piv = k;
            for r in (k + 1)..n {
                if lu[(r, k)].norm() > lu[(piv, k)].norm() {
                    piv = r;
                }
            }
            if piv != k {
                for c in 0..n {
                    let tmp = lu[(k, c)];
                    lu[(k, c)] = lu[(piv, c)];
                    lu[(piv, c)] = tmp;
                }
                perm.swap(k, piv);
                swaps += 1;
            }
            let d = lu[(k, k)];
            if d.norm() == 0.0 {
                singular = true;
                continue;
            }
            for r in (k + 1)..n {
                let f = lu[(r, k)] / d;
                lu[(r, k)] = f;
                if f.norm() == 0.0 {
                    continue;
                }
                for c in (k + 1)..n {
                    let u = lu[(k, c)];
                    lu[(r, c)] -= f * u;
                }
            }
        }
        Lu {
            lu,
            perm,
            swaps,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> C64 {
        let mut det = if self.swaps % 2 == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        };
        for k in 0..self.lu.dim() {
            det *= self.lu[(k, k)];
        }
        det
    }

    /// Solves `A x = b`; `None` when singular.
    pub fn solve(&self, b: &[C64]) -> Option<Vec<C64>> {
        if self.singular {
            return None;
        }
        let n = self.lu.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                let l = self.lu[(r, c)];
                let xc = x[c];
                x[r] -= l * xc;
            }
        }
        for r in (0..n).rev() {
            for c in (r + 1)..n {
                let u = self.lu[(r, c)];
                let xc = x[c];
                x[r] -= u * xc;
            }
            x[r] /= self.lu[(r, r)];
        }
        Some(x)
    }

    /// `tr(A^{-1})`; `None` when singular.
    pub fn trace_of_inverse(&self) -> Option<C64> {
        let n = self.lu.dim();
        let mut tr = C64::new(0.0, 0.0);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            e[k] = C64::new(1.0, 0.0);
            tr += self.solve(&e)?[k];
            e[k] = C64::new(0.0, 0.0);
        }
        Some(tr)
    }
}

pub fn determinant(m: &DenseMatrix) -> C64 {
    Lu::factor(m).determinant()
}

/// Checks whether `lambda` is an eigenvalue of Hermitian `h`.
///
/// With `M = H - lambda I`, the Newton step for `det(M) = 0` has length
/// `|det / det'| = 1 / |tr(M^{-1})|`, read off the same LU factorization as
/// the determinant. `lambda` is accepted when `M` is exactly singular or the
/// step is within `tol * ||H||_F`. Since `|tr(M^{-1})| <= n / dist`, an
/// accepted `lambda` lies within `n * tol * ||H||_F` of the spectrum.
pub fn verify_eigenvalue(h: &DenseMatrix, lambda: f64, tol: f64) -> bool {
    newton_distance(h, lambda) <= tol * h.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// Newton-step estimate of the distance from `lambda` to the spectrum.
pub fn newton_distance(h: &DenseMatrix, lambda: f64) -> f64 {
    let n = h.dim();
    let mut m = h.clone();
    for i in 0..n {
        m[(i, i)] -= C64::new(lambda, 0.0);
    }
    let lu = Lu::factor(&m);
    match lu.trace_of_inverse() {
        None => 0.0,
        Some(tr) if tr.norm() == 0.0 => f64::INFINITY,
        Some(tr) => 1.0 / tr.norm(),
    }
}
