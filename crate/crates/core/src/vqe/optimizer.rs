//! Derivative-free local minimizers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Linear-approximation trust region on a simplex of `n + 1` points.
    #[default]
    LinearTrustRegion,
    NelderMead,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub max_evaluations: usize,
    /// Initial trust radius / simplex size.
    pub rho_begin: f64,
    /// Final trust radius; Nelder-Mead stops when the simplex is this small.
    pub rho_end: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: Method::LinearTrustRegion,
            max_evaluations: 500,
            rho_begin: 0.5,
            rho_end: 1e-7,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_evaluations == 0 {
            return Err(Error::invalid("max_evaluations must be positive"));
        }
        if !(self.rho_begin > 0.0 && self.rho_end > 0.0 && self.rho_end <= self.rho_begin) {
            return Err(Error::invalid("need 0 < rho_end <= rho_begin"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: usize,
    /// Best value seen after each evaluation.
    pub history: Vec<f64>,
    pub converged: bool,
}

struct Tracker<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> f64,
    best_x: Vec<f64>,
    best_f: f64,
    history: Vec<f64>,
    budget: usize,
}

impl Tracker<'_> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < self.best_f {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        self.history.push(self.best_f);
        v
    }

    fn exhausted(&self) -> bool {
        self.history.len() >= self.budget
    }

    fn finish(self, converged: bool) -> OptimResult {
        OptimResult {
            x: self.best_x,
            fx: self.best_f,
            evaluations: self.history.len(),
            history: self.history,
            converged,
        }
    }
}

pub fn minimize(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<OptimResult> {
    cfg.validate()?;
    let mut tr = Tracker {
        f,
        best_x: x0.to_vec(),
        best_f: f64::INFINITY,
        history: Vec::new(),
        budget: cfg.max_evaluations,
    };
    if x0.is_empty() {
        tr.eval(x0);
        return Ok(tr.finish(true));
    }
    let converged = match cfg.method {
        Method::LinearTrustRegion => linear_trust_region(&mut tr, x0, cfg),
        Method::NelderMead => nelder_mead(&mut tr, x0, cfg),
    };
    Ok(tr.finish(converged))
}

/// Solves `a x = b` for small dense real systems; `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[piv][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for r in (k + 1)..n {
            let f = a[r][k] / a[k][k];
            for c in k..n {
                a[r][c] -= f * a[k][c];
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

fn axis_simplex(tr: &mut Tracker, centre: &[f64], fc: f64, rho: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut pts = vec![centre.to_vec()];
    let mut vals = vec![fc];
    for k in 0..centre.len() {
        if tr.exhausted() {
            break;
        }
        let mut p = centre.to_vec();
        p[k] += rho;
        vals.push(tr.eval(&p));
        pts.push(p);
    }
    (pts, vals)
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len())
        .min_by(|&a, &b| v[a].total_cmp(&v[b]))
        .unwrap_or(0)
}

/// Unconstrained linear-approximation trust region.
///
/// The simplex interpolates a linear model; each step moves distance `delta`
/// down the model gradient from the best vertex. A successful trial replaces
/// the vertex whose removal keeps the simplex volume largest, and `delta`
/// grows when the model predicted the decrease well. After a failed trial
/// `delta` shrinks towards `rho`; once it reaches `rho`, `rho` halves and the
/// simplex is rebuilt around the best point.
fn linear_trust_region(tr: &mut Tracker, x0: &[f64], cfg: &OptimizerConfig) -> bool {
    let n = x0.len();
    let mut rho = cfg.rho_begin;
    let mut delta = rho;
    let f0 = tr.eval(x0);
    let (mut pts, mut vals) = axis_simplex(tr, x0, f0, rho);
    while !tr.exhausted() {
        if pts.len() < n + 1 {
            return false;
        }
        let b = argmin(&vals);
        let others: Vec<usize> = (0..=n).filter(|&j| j != b).collect();
        let rows: Vec<Vec<f64>> = others
            .iter()
            .map(|&j| pts[j].iter().zip(&pts[b]).map(|(x, y)| x - y).collect())
            .collect();
        let rhs: Vec<f64> = others.iter().map(|&j| vals[j] - vals[b]).collect();
        let grad = solve(rows.clone(), rhs);
        let gnorm = grad
            .as_ref()
            .map_or(0.0, |g| g.iter().map(|v| v * v).sum::<f64>().sqrt());
        let mut improved = false;
        if let (Some(g), true) = (grad, gnorm > 0.0 && gnorm.is_finite()) {
            let trial: Vec<f64> = pts[b]
                .iter()
                .zip(&g)
                .map(|(x, gi)| x - delta * gi / gnorm)
                .collect();
            let ft = tr.eval(&trial);
            if ft < vals[b] {
                improved = true;
                let ratio = (vals[b] - ft) / (delta * gnorm);
                // barycentric coordinates of the step in the edge basis
                let step: Vec<f64> = trial.iter().zip(&pts[b]).map(|(x, y)| x - y).collect();
                let mut cols = vec![vec![0.0; n]; n];
                for (c, row) in rows.iter().enumerate() {
                    for (r, v) in row.iter().enumerate() {
                        cols[r][c] = *v;
                    }
                }
                let replace = match solve(cols, step) {
                    Some(sigma) => {
                        let mut best = (b, (1.0 - sigma.iter().sum::<f64>()).abs());
                        for (k, &j) in others.iter().enumerate() {
                            if sigma[k].abs() > best.1 {
                                best = (j, sigma[k].abs());
                            }
                        }
                        best.0
                    }
                    None => others[argmin(&others.iter().map(|&j| -vals[j]).collect::<Vec<_>>())],
                };
                pts[replace] = trial;
                vals[replace] = ft;
                if ratio > 0.7 {
                    delta *= 2.0;
                } else if ratio < 0.1 {
                    delta = (delta * 0.5).max(rho);
                }
            }
        }
        if improved {
            // keep the interpolation points within reach of the model
            let b = argmin(&vals);
            let far = (0..=n)
                .filter(|&j| j != b)
                .max_by(|&i, &j| dist(&pts[i], &pts[b]).total_cmp(&dist(&pts[j], &pts[b])));
            if let Some(j) = far {
                if dist(&pts[j], &pts[b]) > 4.0 * delta.max(rho) {
                    let (p, v) = axis_simplex(tr, &pts[b].clone(), vals[b], delta.max(rho));
                    pts = p;
                    vals = v;
                }
            }
            continue;
        }
        if delta > rho {
            delta = (delta * 0.5).max(rho);
        } else if rho <= cfg.rho_end {
            return true;
        } else {
            rho = (rho * 0.5).max(cfg.rho_end);
            delta = rho;
        }
        let b = argmin(&vals);
        let centre = pts[b].clone();
        let fc = vals[b];
        let (p, v) = axis_simplex(tr, &centre, fc, delta);
        pts = p;
        vals = v;
    }
    false
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn nelder_mead(tr: &mut Tracker, x0: &[f64], cfg: &OptimizerConfig) -> bool {
    let n = x0.len();
    let f0 = tr.eval(x0);
    let (mut pts, mut vals) = axis_simplex(tr, x0, f0, cfg.rho_begin);
    if pts.len() < n + 1 {
        return false;
    }
    while !tr.exhausted() {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let size = pts[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if size <= cfg.rho_end {
            return true;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = tr.eval(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = tr.eval(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let x = along(-0.5);
            let f = tr.eval(&x);
            (x, f)
        } else {
            let x = along(0.5);
            let f = tr.eval(&x);
            (x, f)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            if tr.exhausted() {
                return false;
            }
            pts[i] = pts[i]
                .iter()
                .zip(&pts[0])
                .map(|(x, b)| b + 0.5 * (x - b))
                .collect();
            vals[i] = tr.eval(&pts[i]);
        }
    }
    false
}
