//! Truncated complex power series for functions on the unit disk.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Denominators smaller than this in magnitude are treated as zero.
pub const UNDERFLOW_FLOOR: f64 = 1e-14;
/// Relaxed class tolerance used for generated or round-tripped data.
pub const RELAXED_CLASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("|z| = {modulus} is not inside the unit disk")]
    OutsideDisk { modulus: f64 },
    #[error("|f(z)| = {modulus:e} is below the underflow floor near z = {z}")]
    ZeroDenominator { z: Complex64, modulus: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("series has no coefficients")]
    Empty,
}

/// Normalisation class of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    /// `z + a_{n+1} z^{n+1} + …`
    #[serde(rename = "A_n")]
    An,
    /// `1 + a_n z^n + …`
    #[serde(rename = "H_1_n")]
    H1n,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTag {
    pub kind: ClassKind,
    pub n: u32,
}

impl ClassTag {
    pub fn a(n: u32) -> Self {
        Self {
            kind: ClassKind::An,
            n,
        }
    }

    pub fn h1(n: u32) -> Self {
        Self {
            kind: ClassKind::H1n,
            n,
        }
    }
}

/// Polynomial `Σ c_k z^k` for `k = 0..=truncation_order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    coefficients: Vec<Complex64>,
}

impl PowerSeries {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self, SeriesError> {
        if coefficients.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Self { coefficients })
    }

    pub fn from_real(coefficients: &[f64]) -> Result<Self, SeriesError> {
        Self::new(
            coefficients
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
        )
    }

    /// The identity `z` with the given truncation order (at least 1).
    pub fn identity(order: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); order.max(1) + 1];
        c[1] = Complex64::new(1.0, 0.0);
        Self { coefficients: c }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> Complex64 {
        self.coefficients
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn truncation_order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Zero-pads to `order`; never truncates.
    pub fn with_order(mut self, order: usize) -> Self {
        if order > self.truncation_order() {
            self.coefficients
                .resize(order + 1, Complex64::new(0.0, 0.0));
        }
        self
    }

    /// `a·self + other`, truncated to the smaller order.
    pub fn axpy(&self, a: Complex64, other: &PowerSeries) -> PowerSeries {
        let order = self.truncation_order().min(other.truncation_order());
        PowerSeries {
            coefficients: (0..=order)
                .map(|k| a * self.coefficients[k] + other.coefficients[k])
                .collect(),
        }
    }

    /// True when the series is exactly `z` (all other coefficients zero).
    pub fn is_identity(&self) -> bool {
        self.coefficients.iter().enumerate().all(|(k, c)| {
            if k == 1 {
                *c == Complex64::new(1.0, 0.0)
            } else {
                *c == Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Checks the class normalisation, allowing `|deviation| ≤ tol`.
    pub fn validate_class(&self, tag: ClassTag, tol: f64) -> bool {
        if tag.n == 0 {
            return false;
        }
        let n = tag.n as usize;
        let near = |k: usize, target: f64| (self.coefficient(k) - target).norm() <= tol;
        match tag.kind {
            ClassKind::An => {
                self.truncation_order() >= 1
                    && near(0, 0.0)
                    && near(1, 1.0)
                    && (2..=n).all(|k| near(k, 0.0))
            }
            ClassKind::H1n => near(0, 1.0) && (1..n).all(|k| near(k, 0.0)),
        }
    }

    /// Termwise derivative; the order drops by one (a constant stays a constant 0).
    pub fn differentiate(&self) -> PowerSeries {
        if self.coefficients.len() == 1 {
            return PowerSeries {
                coefficients: vec![Complex64::new(0.0, 0.0)],
            };
        }
        PowerSeries {
            coefficients: self.coefficients[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * (k + 1) as f64)
                .collect(),
        }
    }

    /// `f′ + z·f″`, coefficient `k` being `(k+1)²·a_{k+1}`.
    ///
    /// The squared factor is applied in one multiplication, which keeps
    /// `hypothesis_expression(alexander_transform(f))` within one ulp of `f′`.
    pub fn hypothesis_expression(&self) -> PowerSeries {
        if self.coefficients.len() == 1 {
            return PowerSeries {
                coefficients: vec![Complex64::new(0.0, 0.0)],
            };
        }
        PowerSeries {
            coefficients: self.coefficients[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) * (k + 1)) as f64)
                .collect(),
        }
    }

    /// `F(z) = ∫₀^z f(t)/t dt`, i.e. `a_k ↦ a_k / k` for `k ≥ 1`.
    pub fn alexander_transform(&self) -> PowerSeries {
        PowerSeries {
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    if k == 0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        c / k as f64
                    }
                })
                .collect(),
        }
    }

    /// `f(z)/z` as a series (coefficients shifted down); requires `f(0) = 0`.
    pub fn divide_by_z(&self) -> PowerSeries {
        let tail = if self.coefficients.len() == 1 {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            self.coefficients[1..].to_vec()
        };
        PowerSeries { coefficients: tail }
    }

    /// Horner evaluation without the disk check.
    pub fn horner(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, SeriesError> {
        let modulus = z.norm();
        if modulus.is_nan() || modulus >= 1.0 {
            return Err(SeriesError::OutsideDisk { modulus });
        }
        Ok(self.horner(z))
    }

    /// `z·f′(z)/f(z)` as a quotient of pointwise evaluations; 1 at `z = 0`.
    pub fn starlike_quotient(&self, z: Complex64) -> Result<Complex64, SeriesError> {
        let modulus = z.norm();
        if modulus.is_nan() || modulus >= 1.0 {
            return Err(SeriesError::OutsideDisk { modulus });
        }
        if z == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let (value, derivative) = self.value_and_derivative(z);
        if value.norm() < UNDERFLOW_FLOOR {
            return Err(SeriesError::ZeroDenominator {
                z,
                modulus: value.norm(),
            });
        }
        Ok(z * derivative / value)
    }

    /// `(f(z), f′(z))` by a single Horner pass.
    pub fn value_and_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        self.coefficients
            .iter()
            .rev()
            .fold((zero, zero), |(v, d), c| (v * z + c, d * z + v))
    }

    /// SHA-256 over the little-endian bit patterns of every coefficient.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for c in &self.coefficients {
            hasher.update(c.re.to_bits().to_le_bytes());
            hasher.update(c.im.to_bits().to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .fold(String::with_capacity(64), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }

    /// Parses `k,re,im` lines; `#` starts a comment line, missing indices are zero.
    pub fn parse_coefficients(text: &str) -> Result<PowerSeries, SeriesError> {
        let mut entries: Vec<(usize, Complex64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| SeriesError::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(err(format!(
                    "expected `k,re,im`, found {} fields",
                    fields.len()
                )));
            }
            let k: usize = fields[0]
                .parse()
                .map_err(|_| err(format!("invalid index `{}`", fields[0])))?;
            let re: f64 = fields[1]
                .parse()
                .map_err(|_| err(format!("invalid real part `{}`", fields[1])))?;
            let im: f64 = fields[2]
                .parse()
                .map_err(|_| err(format!("invalid imaginary part `{}`", fields[2])))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(err("non-finite coefficient".into()));
            }
            if entries.iter().any(|(j, _)| *j == k) {
                return Err(err(format!("duplicate index {k}")));
            }
            entries.push((k, Complex64::new(re, im)));
        }
        let order = entries
            .iter()
            .map(|(k, _)| *k)
            .max()
            .ok_or(SeriesError::Parse {
                line: 0,
                message: "no coefficients".into(),
            })?;
        let mut coefficients = vec![Complex64::new(0.0, 0.0); order + 1];
        for (k, c) in entries {
            coefficients[k] = c;
        }
        PowerSeries::new(coefficients)
    }

    /// Inverse of [`PowerSeries::parse_coefficients`]; zero coefficients are
    /// omitted except the last, which pins the truncation order.
    pub fn to_coefficient_text(&self) -> String {
        let mut out = String::from("# k,re,im\n");
        let last = self.truncation_order();
        for (k, c) in self.coefficients.iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) || k == last {
                let _ = writeln!(out, "{k},{:?},{:?}", c.re, c.im);
            }
        }
        out
    }
}

/// Distance in units in the last place between two finite doubles.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    fn ordered(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    ordered(a).abs_diff(ordered(b))
}

/// Largest per-component ulp distance between two coefficient sequences of equal length.
pub fn max_ulp_distance(a: &PowerSeries, b: &PowerSeries) -> Option<u64> {
    if a.coefficients.len() != b.coefficients.len() {
        return None;
    }
    Some(
        a.coefficients
            .iter()
            .zip(&b.coefficients)
            .map(|(x, y)| ulp_distance(x.re, y.re).max(ulp_distance(x.im, y.im)))
            .max()
            .unwrap_or(0),
    )
}
