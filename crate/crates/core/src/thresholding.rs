//! Pointwise thresholding operators.
//!
//! Hard thresholding splits into a soft-threshold part and a piecewise
//! constant jump part, `HT = ST + D`. The soft part is Lipschitz and its
//! degrees of freedom are the survivor count; the jump part is what the
//! smoothed estimator in [`crate::estimators`] handles.
//!
//! Boundary conventions: hard thresholding keeps an entry with `|y| == λ`,
//! while [`count_above`] counts `|y| > λ` strictly. Soft and jump parts use
//! the branches `y < -λ`, `-λ <= y < λ`, otherwise.

use crate::error::{Error, Result};

/// A non-empty vector of finite amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector(Vec<f64>);

impl SignalVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput(
                "signal vector must be non-empty".into(),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "entry {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn squared_norm(&self) -> f64 {
        crate::sum::compensated_sum(self.0.iter().map(|v| v * v))
    }

    /// Squared Euclidean distance to `other`.
    pub fn squared_distance(&self, other: &SignalVector) -> Result<f64> {
        check_same_len(self, other)?;
        Ok(crate::sum::compensated_sum(
            self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)),
        ))
    }

    // Entrywise map of a finite-preserving function; skips revalidation.
    fn map(&self, f: impl Fn(f64) -> f64) -> SignalVector {
        SignalVector(self.0.iter().map(|&v| f(v)).collect())
    }
}

impl TryFrom<Vec<f64>> for SignalVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl AsRef<[f64]> for SignalVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn check_same_len(a: &SignalVector, b: &SignalVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// A threshold `λ >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::param(
                "lambda",
                format!("must be finite and >= 0, got {lambda}"),
            ));
        }
        Ok(Self(lambda))
    }

    pub const ZERO: Threshold = Threshold(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

#[inline]
pub(crate) fn hard_scalar(v: f64, lambda: f64) -> f64 {
    if v.abs() < lambda {
        0.0
    } else {
        v
    }
}

#[inline]
fn soft_scalar(v: f64, lambda: f64) -> f64 {
    if v < -lambda {
        v + lambda
    } else if v < lambda {
        0.0
    } else {
        v - lambda
    }
}

#[inline]
fn jump_scalar(v: f64, lambda: f64) -> f64 {
    if v < -lambda {
        -lambda
    } else if v < lambda {
        0.0
    } else {
        lambda
    }
}

/// Zeroes entries with `|y_i| < λ` and keeps the rest.
pub fn hard_threshold(y: &SignalVector, t: Threshold) -> SignalVector {
    y.map(|v| hard_scalar(v, t.0))
}

/// Shrinks every entry toward zero by `λ`.
pub fn soft_threshold(y: &SignalVector, t: Threshold) -> SignalVector {
    y.map(|v| soft_scalar(v, t.0))
}

/// The piecewise-constant part `D = HT - ST`, entries in `{-λ, 0, +λ}`.
pub fn jump_part(y: &SignalVector, t: Threshold) -> SignalVector {
    y.map(|v| jump_scalar(v, t.0))
}

/// Number of entries with `|y_i| > λ`.
pub fn count_above(y: &SignalVector, t: Threshold) -> usize {
    y.iter().filter(|v| v.abs() > t.0).count()
}
