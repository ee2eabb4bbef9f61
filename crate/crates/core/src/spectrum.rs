//! FID synthesis from an eigendecomposition and its Fourier transform.
//!
//! The signal is `FID(t) = Tr(rho(t) S+)` with `rho(t) = e^{-iHt} Sx e^{iHt}`
//! and `S+ = Sx + i Sy` summed over all spins. In the eigenbasis this is
//! `sum_ab A_ab B_ba e^{-i (l_a - l_b) t}` with `A = V^dagger Sx V` and
//! `B = V^dagger S+ V`, so a spin precessing at `w` rad/s shows up as
//! `e^{i w t}` and lands at `+w / 2 pi` Hz after a forward DFT.

use std::fmt::Write as _;

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::exact_diag::EigenDecomposition;
use crate::matrix::DenseMatrix;
use crate::spin_system::SpinSystemSpec;
use crate::{C64, DEFAULT_DENSE_CAP};

/// Dense `sum_k S_kx` and `sum_k S_ky` (spin-1/2 operators, `sigma / 2`).
pub fn collective_spin_operators(n: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    if n == 0 {
        return Err(Error::invalid("at least one spin is needed"));
    }
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::ResourceLimit {
            qubits: n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let half = C64::new(0.5, 0.0);
    let z = C64::new(0.0, 0.0);
    let sx = DenseMatrix::from_rows(2, vec![z, half, half, z])?;
    let sy = DenseMatrix::from_rows(2, vec![z, C64::new(0.0, -0.5), C64::new(0.0, 0.5), z])?;
    let place = |op: &DenseMatrix, k: usize| {
        let mut m = DenseMatrix::identity(1);
        for q in 0..n {
            m = if q == k {
                m.kron(op)
            } else {
                m.kron(&DenseMatrix::identity(2))
            };
        }
        m
    };
    let dim = 1 << n;
    let (mut tx, mut ty) = (DenseMatrix::zeros(dim), DenseMatrix::zeros(dim));
    for k in 0..n {
        tx = &tx + &place(&sx, k);
        ty = &ty + &place(&sy, k);
    }
    Ok((tx, ty))
}

/// Sample times of the FID.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Timing {
    /// `t_j = j / SW` (dwell time).
    #[default]
    Dwell,
    /// `t_j = j * SW`, kept for comparison only; the resulting axis is
    /// aliased and not in Hz.
    LiteralProduct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidOptions {
    pub points: usize,
    /// Hz.
    pub spectral_width: f64,
    /// Exponential decay `e^{-t / T2}` in seconds; `None` for no decay.
    pub t2: Option<f64>,
    pub timing: Timing,
}

impl FidOptions {
    pub fn new(points: usize, spectral_width: f64) -> Self {
        FidOptions {
            points,
            spectral_width,
            t2: None,
            timing: Timing::Dwell,
        }
    }

    /// Covers `offset +- half_width_ppm` at the given field.
    pub fn covering(points: usize, field_mhz: f64, half_width_ppm: f64) -> Self {
        Self::new(points, 2.0 * half_width_ppm * field_mhz)
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::invalid("an FID needs at least 2 points"));
        }
        if !(self.spectral_width.is_finite() && self.spectral_width > 0.0) {
            return Err(Error::invalid("spectral width must be positive"));
        }
        if let Some(t2) = self.t2 {
            if !(t2.is_finite() && t2 > 0.0) {
                return Err(Error::invalid("T2 must be positive"));
            }
        }
        Ok(())
    }

    fn time(&self, j: usize) -> f64 {
        match self.timing {
            Timing::Dwell => j as f64 / self.spectral_width,
            Timing::LiteralProduct => j as f64 * self.spectral_width,
        }
    }
}

impl Default for FidOptions {
    fn default() -> Self {
        Self::covering(4096, 400.0, 6.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidSignal {
    pub points: Vec<C64>,
    pub spectral_width: f64,
    /// Sample times in seconds.
    pub times: Vec<f64>,
}

impl FidSignal {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_csv(&self, header: &str) -> String {
        let mut s = String::new();
        push_header(&mut s, header);
        s.push_str("t_seconds,re,im\n");
        for (t, p) in self.times.iter().zip(&self.points) {
            let _ = writeln!(s, "{t:.12e},{:.12e},{:.12e}", p.re, p.im);
        }
        s
    }
}

/// One transition: `weight e^{-i omega t}` contributes to the FID.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// `l_b - l_a` in rad/s, i.e. the sign of the observed frequency.
    pub omega: f64,
    pub weight: C64,
}

impl Transition {
    pub fn hz(&self) -> f64 {
        self.omega / (2.0 * std::f64::consts::PI)
    }
}

/// Nonzero `A_ab B_ba` products with their frequencies.
pub fn transitions(decomp: &EigenDecomposition) -> Result<Vec<Transition>> {
    let dim = decomp.dim();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::invalid(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    let (sx, sy) = collective_spin_operators(dim.trailing_zeros() as usize)?;
    let splus = &sx + &sy.scale(C64::new(0.0, 1.0));
    let v = &decomp.eigenvectors;
    let vd = v.adjoint();
    let a = &(&vd * &sx) * v;
    let b = &(&vd * &splus) * v;
    let mut out = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            let w = a[(i, j)] * b[(j, i)];
            if w.norm() > 1e-12 {
                out.push(Transition {
                    omega: decomp.eigenvalues[j] - decomp.eigenvalues[i],
                    weight: w,
                });
            }
        }
    }
    Ok(out)
}

pub fn compute_fid(decomp: &EigenDecomposition, opts: &FidOptions) -> Result<FidSignal> {
    opts.validate()?;
    let lines = transitions(decomp)?;
    let sample = |j: usize| {
        let t = opts.time(j);
        let decay = opts.t2.map_or(1.0, |t2| (-t / t2).exp());
        let s: C64 = lines
            .iter()
            .map(|l| l.weight * C64::from_polar(1.0, l.omega * t))
            .sum();
        s * decay
    };
    #[cfg(feature = "parallel")]
    let points: Vec<C64> = {
        use rayon::prelude::*;
        (0..opts.points).into_par_iter().map(sample).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let points: Vec<C64> = (0..opts.points).map(sample).collect();
    Ok(FidSignal {
        points,
        spectral_width: opts.spectral_width,
        times: (0..opts.points).map(|j| opts.time(j)).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DftMethod {
    /// Radix-2 FFT for power-of-two lengths, direct otherwise.
    #[default]
    Auto,
    Direct,
    Fft,
}

/// Forward DFT `X_k = sum_j x_j e^{-2 pi i jk / d}`.
pub fn dft(x: &[C64], method: DftMethod) -> Result<Vec<C64>> {
    let d = x.len();
    let fast = match method {
        DftMethod::Direct => false,
        DftMethod::Fft if !d.is_power_of_two() => {
            return Err(Error::invalid(format!(
                "radix-2 FFT needs a power-of-two length, got {d}"
            )))
        }
        DftMethod::Fft => true,
        DftMethod::Auto => d.is_power_of_two(),
    };
    if fast {
        let mut buf = x.to_vec();
        FftPlanner::new().plan_fft_forward(d).process(&mut buf);
        return Ok(buf);
    }
    let twiddle: Vec<C64> = (0..d)
        .map(|m| C64::from_polar(1.0, -2.0 * std::f64::consts::PI * m as f64 / d as f64))
        .collect();
    let bin = |k: usize| {
        x.iter()
            .enumerate()
            .map(|(j, v)| v * twiddle[(j * k) % d])
            .sum()
    };
    #[cfg(feature = "parallel")]
    let out = {
        use rayon::prelude::*;
        (0..d).into_par_iter().map(bin).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let out = (0..d).map(bin).collect();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending, `[-SW/2, SW/2)`.
    pub hz: Vec<f64>,
    pub ppm: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hz.is_empty()
    }

    /// Bin spacing in Hz.
    pub fn resolution(&self) -> f64 {
        if self.hz.len() < 2 {
            return 0.0;
        }
        self.hz[1] - self.hz[0]
    }

    /// Keeps points with `lo <= ppm <= hi`.
    pub fn crop_ppm(&self, lo: f64, hi: f64) -> Spectrum {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| (lo..=hi).contains(&self.ppm[i]))
            .collect();
        Spectrum {
            hz: keep.iter().map(|&i| self.hz[i]).collect(),
            ppm: keep.iter().map(|&i| self.ppm[i]).collect(),
            intensity: keep.iter().map(|&i| self.intensity[i]).collect(),
        }
    }

    pub fn to_csv(&self, header: &str) -> String {
        let mut s = String::new();
        push_header(&mut s, header);
        s.push_str("hz,ppm,intensity\n");
        for i in 0..self.len() {
            let _ = writeln!(
                s,
                "{:.9},{:.9},{:.12e}",
                self.hz[i], self.ppm[i], self.intensity[i]
            );
        }
        s
    }
}

fn push_header(s: &mut String, header: &str) {
    for line in header.lines() {
        let _ = writeln!(s, "# {line}");
    }
}

/// Fftshifted forward DFT; intensity is the real part.
pub fn fid_to_spectrum(
    fid: &FidSignal,
    spec: &SpinSystemSpec,
    method: DftMethod,
) -> Result<Spectrum> {
    let d = fid.len();
    if d < 2 {
        return Err(Error::invalid("an FID needs at least 2 points"));
    }
    let raw = dft(&fid.points, method)?;
    let half = d / 2;
    let step = fid.spectral_width / d as f64;
    let mut hz = Vec::with_capacity(d);
    let mut intensity = Vec::with_capacity(d);
    for k in 0..d {
        let src = (k + d - half) % d;
        hz.push((k as f64 - half as f64) * step);
        intensity.push(raw[src].re);
    }
    let ppm = hz
        .iter()
        .map(|h| h / spec.field_mhz + spec.offset_ppm)
        .collect();
    Ok(Spectrum { hz, ppm, intensity })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub ppm: f64,
    pub hz: f64,
    pub intensity: f64,
}

/// Local maxima above `threshold`, sorted by ppm descending.
pub fn peak_list(s: &Spectrum, threshold: f64) -> Result<Vec<Peak>> {
    if !(threshold > 0.0) {
        return Err(Error::invalid("threshold must be positive"));
    }
    let n = s.len();
    let y = &s.intensity;
    let mut peaks: Vec<Peak> = (0..n)
        .filter(|&i| {
            let left = i == 0 || y[i] > y[i - 1];
            let right = i + 1 == n || y[i] >= y[i + 1];
            y[i] > threshold && left && right
        })
        .map(|i| Peak {
            ppm: s.ppm[i],
            hz: s.hz[i],
            intensity: y[i],
        })
        .collect();
    peaks.sort_by(|a, b| b.ppm.total_cmp(&a.ppm));
    Ok(peaks)
}

pub fn peaks_csv(peaks: &[Peak], header: &str) -> String {
    let mut s = String::new();
    push_header(&mut s, header);
    s.push_str("ppm,hz,intensity\n");
    for p in peaks {
        let _ = writeln!(s, "{:.9},{:.9},{:.12e}", p.ppm, p.hz, p.intensity);
    }
    s
}
