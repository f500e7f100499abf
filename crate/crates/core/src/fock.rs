//! Coefficient vectors for photon-number-correlated pair states.
//!
//! A pair state here is `sum_n c_n |n>|n>` with real amplitudes `c_n`.
//! This module provides the coefficient families used throughout the
//! crate (equal superposition, two-mode squeezed, circle states) plus
//! a verbatim custom loader, and a power-series `I_0` evaluator used
//! to cross-check the circle-state normalization.

use crate::error::{Error, Result};
use crate::kahan::{kahan_sum, KahanSum};

/// Tolerance on `|sum c_n^2 - 1|` for a vector to count as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Which generator produced a coefficient vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Equal,
    TwoModeSqueezed,
    Circle,
    Custom,
}

/// Real amplitudes `c_n`, indexed by photon number starting at 0.
#[derive(Clone, Debug)]
pub struct CoefficientVector {
    coeffs: Vec<f64>,
    source: Source,
    raw_norm_sq: f64,
}

impl CoefficientVector {
    fn build(coeffs: Vec<f64>, source: Source) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        for (index, &c) in coeffs.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFiniteCoefficient { index });
            }
        }
        let raw_norm_sq = kahan_sum(coeffs.iter().map(|c| c * c));
        Ok(Self {
            coeffs,
            source,
            raw_norm_sq,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Sum of squared coefficients before any renormalization.
    pub fn raw_norm_sq(&self) -> f64 {
        self.raw_norm_sq
    }

    /// True when the squared coefficients sum to 1 within [`NORM_TOL`].
    pub fn is_normalized(&self) -> bool {
        (self.raw_norm_sq - 1.0).abs() <= NORM_TOL
    }

    /// Amplitudes retained after projecting onto photon numbers `n <= s`.
    pub fn projected(&self, s: usize) -> &[f64] {
        &self.coeffs[..self.coeffs.len().min(s + 1)]
    }

    /// Retained mass `sum_{n<=s} c_n^2` of the projection onto `n <= s`.
    pub fn projected_mass(&self, s: usize) -> f64 {
        kahan_sum(self.projected(s).iter().map(|c| c * c))
    }
}

/// Equal superposition of the `s+1` pair states `|n>|n>`, `n = 0..=s`.
///
/// Every coefficient is `1/sqrt(s+1)`, so the vector is normalized.
pub fn equal_coeffs(s: usize) -> CoefficientVector {
    let amp = 1.0 / ((s as f64) + 1.0).sqrt();
    CoefficientVector::build(vec![amp; s + 1], Source::Equal)
        .expect("equal superposition is nonempty and finite")
}

/// First `count` coefficients of the two-mode squeezed family,
/// `c_n = sqrt(1 - lambda^2) * lambda^n` with `0 <= lambda < 1`.
///
/// `lambda = 0` is the vacuum pair `|0>|0>`; as `lambda -> 1` the
/// weights approach an equal superposition. The full series has unit
/// norm; a finite `count` keeps the truncated geometric head verbatim.
pub fn tms_coeffs(lambda: f64, count: usize) -> Result<CoefficientVector> {
    if !lambda.is_finite() || !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidLambda(lambda));
    }
    if count == 0 {
        return Err(Error::EmptyCoefficients);
    }
    let mut coeffs = Vec::with_capacity(count);
    let mut c = (1.0 - lambda * lambda).sqrt();
    for _ in 0..count {
        coeffs.push(c);
        c *= lambda;
    }
    CoefficientVector::build(coeffs, Source::TwoModeSqueezed)
}

/// First `count` coefficients of the circle state of radius `r`.
///
/// The relative weights are `r^(2n) / n!`; the truncated vector is
/// renormalized numerically so its squared coefficients sum to 1.
/// Only relative weights enter any probability, so the truncation
/// length never changes a prediction for `n <= s` measurements.
pub fn circle_coeffs(r: f64, count: usize) -> Result<CoefficientVector> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidRadius(r));
    }
    if count == 0 {
        return Err(Error::EmptyCoefficients);
    }
    let r2 = r * r;
    let mut shape = Vec::with_capacity(count);
    let mut u = 1.0_f64;
    for n in 0..count {
        if n > 0 {
            u *= r2 / n as f64;
        }
        shape.push(u);
    }
    let norm_sq = kahan_sum(shape.iter().map(|u| u * u));
    if !norm_sq.is_finite() {
        return Err(Error::CoefficientOverflow);
    }
    let inv = norm_sq.sqrt().recip();
    for u in &mut shape {
        *u *= inv;
    }
    CoefficientVector::build(shape, Source::Circle)
}

/// Store arbitrary real coefficients verbatim.
///
/// A non-unit norm is recorded, not repaired; check
/// [`CoefficientVector::is_normalized`] when it matters.
pub fn custom_coeffs(values: &[f64]) -> Result<CoefficientVector> {
    CoefficientVector::build(values.to_vec(), Source::Custom)
}

/// Modified Bessel function `I_0(x)` by its power series
/// `sum_k (x/2)^(2k) / (k!)^2`, summed until the next term drops below
/// `tol` times the running partial sum.
pub fn bessel_i0(x: f64, tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    let q = x * x / 4.0;
    let mut term = 1.0_f64;
    let mut sum = KahanSum::new();
    sum.add(term);
    let mut k = 1.0_f64;
    while term > tol * sum.value() {
        term *= q / (k * k);
        sum.add(term);
        k += 1.0;
    }
    sum.value()
}

/// Parse the plain-text coefficient format: one decimal value per line,
/// line index = photon number. Blank lines and lines starting with `#`
/// are ignored.
pub fn parse_coeff_lines(text: &str) -> Result<CoefficientVector> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::CoeffFileParse {
            line: idx + 1,
            msg: format!("expected a decimal number, got {line:?}"),
        })?;
        values.push(v);
    }
    custom_coeffs(&values)
}
