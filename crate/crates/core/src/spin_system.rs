//! Spin-system descriptions and their Pauli-encoded Hamiltonians.
//!
//! Input files are TOML:
//!
//! ```toml
//! field_mhz = 400.0
//! offset_ppm = 5.0
//!
//! [[nuclei]]
//! label = "H1"
//! shift_ppm = 3.44
//!
//! [[nuclei]]
//! label = "H2"
//! shift_ppm = 7.40
//!
//! [[couplings]]
//! i = 1          # 1-based nucleus indices
//! j = 2
//! j_hz = 2.32
//! ```
//!
//! `label` is optional. Each unordered pair may appear at most once (a repeat
//! with the same value is tolerated, a conflicting one is an error).

use std::f64::consts::PI;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    /// 0-based nucleus indices with `i < j`.
    pub i: usize,
    pub j: usize,
    pub j_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystemSpec {
    pub labels: Vec<String>,
    pub shifts_ppm: Vec<f64>,
    pub couplings: Vec<Coupling>,
    pub field_mhz: f64,
    pub offset_ppm: f64,
}

impl SpinSystemSpec {
    /// Validated spec; couplings use 0-based indices in either order.
    pub fn new(
        shifts_ppm: Vec<f64>,
        couplings: Vec<Coupling>,
        field_mhz: f64,
        offset_ppm: f64,
    ) -> Result<Self> {
        let labels = (1..=shifts_ppm.len()).map(|k| format!("H{k}")).collect();
        let mut spec = SpinSystemSpec {
            labels,
            shifts_ppm,
            couplings: Vec::new(),
            field_mhz,
            offset_ppm,
        };
        spec.check_scalars()?;
        for c in couplings {
            spec.add_coupling(c.i, c.j, c.j_hz)?;
        }
        Ok(spec)
    }

    pub fn len(&self) -> usize {
        self.shifts_ppm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts_ppm.is_empty()
    }

    fn check_scalars(&self) -> Result<()> {
        if self.shifts_ppm.is_empty() {
            return Err(Error::invalid("spin system has no nuclei"));
        }
        if !(self.field_mhz.is_finite() && self.field_mhz > 0.0) {
            return Err(Error::invalid(format!(
                "field_mhz must be positive, got {}",
                self.field_mhz
            )));
        }
        if !self.offset_ppm.is_finite() {
            return Err(Error::invalid("offset_ppm must be finite"));
        }
        if let Some(k) = self.shifts_ppm.iter().position(|s| !s.is_finite()) {
            return Err(Error::invalid(format!(
                "shift of nucleus {} is not finite",
                k + 1
            )));
        }
        Ok(())
    }

    fn add_coupling(&mut self, a: usize, b: usize, j_hz: f64) -> Result<()> {
        let n = self.len();
        if a >= n || b >= n {
            return Err(Error::invalid(format!(
                "coupling ({}, {}) references a nucleus beyond {n}",
                a + 1,
                b + 1
            )));
        }
        if a == b {
            return Err(Error::invalid(format!(
                "self-coupling on nucleus {}",
                a + 1
            )));
        }
        if !j_hz.is_finite() {
            return Err(Error::invalid("coupling constant must be finite"));
        }
        let (i, j) = (a.min(b), a.max(b));
        if let Some(existing) = self.couplings.iter().find(|c| c.i == i && c.j == j) {
            if existing.j_hz != j_hz {
                return Err(Error::invalid(format!(
                    "conflicting couplings for pair ({}, {}): {} vs {} Hz",
                    i + 1,
                    j + 1,
                    existing.j_hz,
                    j_hz
                )));
            }
            return Ok(());
        }
        self.couplings.push(Coupling { i, j, j_hz });
        Ok(())
    }

    /// `w_k = 2 pi B (delta_k - offset)` in rad/s.
    pub fn angular_frequencies(&self) -> Vec<f64> {
        self.shifts_ppm
            .iter()
            .map(|d| 2.0 * PI * self.field_mhz * (d - self.offset_ppm))
            .collect()
    }

    /// `sum_k (w_k/2) Z_k + sum_{i<j} (2 pi J_ij / 4)(X_iX_j + Y_iY_j + Z_iZ_j)`.
    pub fn build_hamiltonian(&self) -> PauliSum {
        let n = self.len();
        let mut h = PauliSum::new(n);
        for (k, w) in self.angular_frequencies().into_iter().enumerate() {
            h.push(single(n, &[(k, PauliAxis::Z)], w / 2.0))
                .expect("width matches");
        }
        let mut pairs = self.couplings.clone();
        pairs.sort_by_key(|c| (c.i, c.j));
        for c in pairs {
            let coeff = 2.0 * PI * c.j_hz / 4.0;
            for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
                h.push(single(n, &[(c.i, axis), (c.j, axis)], coeff))
                    .expect("width matches");
            }
        }
        h.canonicalize()
    }

    /// Serialize back to the TOML input format.
    pub fn to_toml(&self) -> String {
        let mut s = format!(
            "field_mhz = {:?}\noffset_ppm = {:?}\n",
            self.field_mhz, self.offset_ppm
        );
        for (label, shift) in self.labels.iter().zip(&self.shifts_ppm) {
            s.push_str(&format!(
                "\n[[nuclei]]\nlabel = {label:?}\nshift_ppm = {shift:?}\n"
            ));
        }
        for c in &self.couplings {
            s.push_str(&format!(
                "\n[[couplings]]\ni = {}\nj = {}\nj_hz = {:?}\n",
                c.i + 1,
                c.j + 1,
                c.j_hz
            ));
        }
        s
    }
}

fn single(n: usize, placements: &[(usize, PauliAxis)], coeff: f64) -> PauliString {
    PauliString::on_qubits(n, placements, coeff).expect("indices validated")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    field_mhz: Spanned<f64>,
    offset_ppm: Spanned<f64>,
    #[serde(default)]
    nuclei: Vec<Spanned<RawNucleus>>,
    #[serde(default)]
    couplings: Vec<Spanned<RawCoupling>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNucleus {
    label: Option<String>,
    shift_ppm: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    i: i64,
    j: i64,
    j_hz: f64,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

fn parse_error(line: Option<usize>, field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

/// Parse and validate a spin-system file.
pub fn parse_spec(bytes: &[u8]) -> Result<SpinSystemSpec> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| parse_error(None, "", format!("input is not UTF-8: {e}")))?;
    let raw: RawSpec = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let line = e.span().map(|s| line_of(text, s.start));
        // Type errors carry only a span; recover the key from `key = value`.
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.contains("field"))
            .or_else(|| {
                let l = text.lines().nth(line? - 1)?;
                l.split_once('=').map(|(k, _)| k.trim())
            })
            .unwrap_or("")
            .to_string();
        parse_error(line, &field, msg)
    })?;

    let field_mhz = *raw.field_mhz.get_ref();
    if !(field_mhz.is_finite() && field_mhz > 0.0) {
        return Err(parse_error(
            Some(line_of(text, raw.field_mhz.span().start)),
            "field_mhz",
            "must be a positive number",
        ));
    }
    let offset_ppm = *raw.offset_ppm.get_ref();
    if !offset_ppm.is_finite() {
        return Err(parse_error(
            Some(line_of(text, raw.offset_ppm.span().start)),
            "offset_ppm",
            "must be finite",
        ));
    }
    if raw.nuclei.is_empty() {
        return Err(parse_error(
            None,
            "nuclei",
            "at least one nucleus is required",
        ));
    }

    let mut labels = Vec::new();
    let mut shifts = Vec::new();
    for (k, nuc) in raw.nuclei.iter().enumerate() {
        let line = line_of(text, nuc.span().start);
        let n = nuc.get_ref();
        if !n.shift_ppm.is_finite() {
            return Err(parse_error(Some(line), "shift_ppm", "must be finite"));
        }
        labels.push(n.label.clone().unwrap_or_else(|| format!("H{}", k + 1)));
        shifts.push(n.shift_ppm);
    }

    let mut spec = SpinSystemSpec {
        labels,
        shifts_ppm: shifts,
        couplings: Vec::new(),
        field_mhz,
        offset_ppm,
    };
    let count = spec.len() as i64;
    for c in &raw.couplings {
        let line = Some(line_of(text, c.span().start));
        let r = c.get_ref();
        for (name, idx) in [("i", r.i), ("j", r.j)] {
            if idx < 1 || idx > count {
                return Err(parse_error(
                    line,
                    name,
                    format!("nucleus {idx} out of range 1..={count}"),
                ));
            }
        }
        spec.add_coupling((r.i - 1) as usize, (r.j - 1) as usize, r.j_hz)
            .map_err(|e| match e {
                Error::InvalidInput(m) => parse_error(line, "couplings", m),
                other => other,
            })?;
    }
    Ok(spec)
}
