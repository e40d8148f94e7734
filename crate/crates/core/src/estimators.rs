//! Risk and degrees-of-freedom estimators for hard thresholding.
//!
//! Hard thresholding is discontinuous, so the divergence of the estimator
//! does not give an unbiased DOF estimate. [`edof_ht`] instead counts
//! survivors (the exact DOF estimate of the soft part) and adds the
//! divergence of the jump part convolved with a Gaussian of bandwidth `h`,
//! rescaled by `sqrt(σ² + h²) / σ`. With `h = h(P) → 0` and `P h(P) → ∞`
//! the normalized estimate is consistent, and so is [`score`].
//!
//! [`dof_ht_closed_form`] is the exact DOF given the clean signal, used as
//! an oracle; [`kernel_mean`] and [`kernel_variance`] are the first two
//! moments of the smoothing kernel under the noise model.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sum::{compensated_sum, CompensatedSum};
use crate::thresholding::{check_same_len, count_above, soft_threshold, SignalVector, Threshold};

/// i.i.d. zero-mean Gaussian noise with known standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::param(
                "sigma",
                format!("must be finite and > 0, got {sigma}"),
            ));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// Bandwidth rule `h(P) = c · σ / P^alpha`.
///
/// Any `alpha` in `(0, 1)` gives `h(P) → 0` and `P · h(P) → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSchedule {
    multiplier: f64,
    exponent: f64,
}

impl BandwidthSchedule {
    pub fn new(multiplier: f64, exponent: f64) -> Result<Self> {
        if !multiplier.is_finite() || multiplier <= 0.0 {
            return Err(Error::param(
                "bandwidth-c",
                format!("must be finite and > 0, got {multiplier}"),
            ));
        }
        if !(exponent > 0.0 && exponent < 1.0) {
            return Err(Error::param(
                "bandwidth-alpha",
                format!("must lie in (0, 1), got {exponent}"),
            ));
        }
        Ok(Self {
            multiplier,
            exponent,
        })
    }

    pub fn multiplier(&self) -> f64 {
        self.multiplier
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn bandwidth(&self, p: usize, noise: NoiseModel) -> f64 {
        self.multiplier * noise.sigma / (p.max(1) as f64).powf(self.exponent)
    }
}

impl Default for BandwidthSchedule {
    /// `h(P) = 6σ / P^(1/3)`.
    fn default() -> Self {
        Self {
            multiplier: 6.0,
            exponent: 1.0 / 3.0,
        }
    }
}

fn check_bandwidth(h: f64) -> Result<()> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::param(
            "h",
            format!("must be finite and > 0, got {h}"),
        ));
    }
    Ok(())
}

/// The smoothing kernel `A(t, a) = sqrt(σ² + h²)/h · exp(-(t - a)² / (2h²))`
/// for a fixed noise level and bandwidth.
#[derive(Debug, Clone, Copy)]
pub struct GaussianKernel {
    noise: NoiseModel,
    h: f64,
}

impl GaussianKernel {
    pub fn new(noise: NoiseModel, h: f64) -> Result<Self> {
        check_bandwidth(h)?;
        Ok(Self { noise, h })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn value(&self, t: f64, a: f64) -> f64 {
        let h2 = self.h * self.h;
        let d = t - a;
        (self.noise.variance() + h2).sqrt() / self.h * (-d * d / (2.0 * h2)).exp()
    }

    /// `E[A(Y, a)]` for `Y ~ N(x0, σ²)`.
    pub fn mean(&self, x0: f64, a: f64) -> f64 {
        let d = x0 - a;
        (-d * d / (2.0 * (self.noise.variance() + self.h * self.h))).exp()
    }

    /// `Var[A(Y, a)]` for `Y ~ N(x0, σ²)`.
    pub fn variance(&self, x0: f64, a: f64) -> f64 {
        let s2 = self.noise.variance();
        let h2 = self.h * self.h;
        let d2 = (x0 - a) * (x0 - a);
        let second = (s2 + h2) / (self.h * (2.0 * s2 + h2).sqrt()) * (-d2 / (2.0 * s2 + h2)).exp();
        let mean_sq = (-d2 / (s2 + h2)).exp();
        // Exact value is >= 0 by Jensen; clamp roundoff.
        (second - mean_sq).max(0.0)
    }
}

pub fn kernel_mean(x0: f64, a: f64, noise: NoiseModel, h: f64) -> Result<f64> {
    Ok(GaussianKernel::new(noise, h)?.mean(x0, a))
}

pub fn kernel_variance(x0: f64, a: f64, noise: NoiseModel, h: f64) -> Result<f64> {
    Ok(GaussianKernel::new(noise, h)?.variance(x0, a))
}

// Σ_i [exp(-(y_i + λ)² / (2s²)) + exp(-(y_i - λ)² / (2s²))]
fn gaussian_bumps(values: &[f64], lambda: f64, scale: f64) -> f64 {
    let denom = 2.0 * scale * scale;
    let mut acc = CompensatedSum::new();
    for &v in values {
        let plus = v + lambda;
        let minus = v - lambda;
        acc.add((-plus * plus / denom).exp() + (-minus * minus / denom).exp());
    }
    acc.value()
}

/// Smoothed DOF estimate of hard thresholding at observation `y`.
pub fn edof_ht(y: &SignalVector, t: Threshold, noise: NoiseModel, h: f64) -> Result<f64> {
    check_bandwidth(h)?;
    let lambda = t.value();
    let count = count_above(y, t) as f64;
    if lambda == 0.0 {
        return Ok(count);
    }
    let sigma = noise.sigma();
    let weight = lambda * (noise.variance() + h * h).sqrt() / ((2.0 * PI).sqrt() * sigma * h);
    Ok(count + weight * gaussian_bumps(y.as_slice(), lambda, h))
}

/// `‖y - x‖² - Pσ² + 2σ² · dof`.
pub fn risk_criterion(
    y: &SignalVector,
    x: &SignalVector,
    dof_estimate: f64,
    noise: NoiseModel,
) -> Result<f64> {
    check_same_len(y, x)?;
    let residual = y.squared_distance(x)?;
    let s2 = noise.variance();
    Ok(residual - y.len() as f64 * s2 + 2.0 * s2 * dof_estimate)
}

/// SCORE of hard thresholding at `λ`, evaluated as one closed-form sum.
///
/// Equal to `risk_criterion(y, hard_threshold(y, t), edof_ht(y, t, noise, h), noise)`
/// up to roundoff (and up to entries with `|y_i| == λ` exactly).
pub fn score(y: &SignalVector, t: Threshold, noise: NoiseModel, h: f64) -> Result<f64> {
    check_bandwidth(h)?;
    let lambda = t.value();
    let s2 = noise.variance();
    let weight = 2.0 * noise.sigma() * lambda * (s2 + h * h).sqrt() / ((2.0 * PI).sqrt() * h);
    let denom = 2.0 * h * h;
    let mut acc = CompensatedSum::new();
    for &v in y.iter() {
        let v2 = v * v;
        let mut term = v2 - s2;
        if v.abs() > lambda {
            term += 2.0 * s2 - v2;
        }
        if lambda > 0.0 {
            let plus = v + lambda;
            let minus = v - lambda;
            term += weight * ((-plus * plus / denom).exp() + (-minus * minus / denom).exp());
        }
        acc.add(term);
    }
    Ok(acc.value())
}

/// SURE for soft thresholding: the criterion with the survivor count as DOF.
pub fn sure_soft(y: &SignalVector, t: Threshold, noise: NoiseModel) -> Result<f64> {
    let x = soft_threshold(y, t);
    risk_criterion(y, &x, count_above(y, t) as f64, noise)
}

/// Exact DOF of hard thresholding for a known clean signal, split into the
/// expected survivor count and the jump contribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DofDecomposition {
    /// `E[#{|Y| > λ}] = Σ (1 - p_i)`.
    pub count_term: f64,
    pub jump_term: f64,
    /// Per-coordinate probability that the entry is killed, `P(|Y_i| <= λ)`.
    pub kill_probability: Vec<f64>,
    pub total: f64,
}

pub fn dof_ht_closed_form(
    x0: &SignalVector,
    t: Threshold,
    noise: NoiseModel,
) -> Result<DofDecomposition> {
    let lambda = t.value();
    let sigma = noise.sigma();
    let scale = std::f64::consts::SQRT_2 * sigma;

    // p is even in x0; erfc of |x0| avoids cancellation for large amplitudes.
    let kill_probability: Vec<f64> = x0
        .iter()
        .map(|&x| {
            let a = x.abs();
            let p = 0.5 * (libm::erfc((a - lambda) / scale) - libm::erfc((a + lambda) / scale));
            p.clamp(0.0, 1.0)
        })
        .collect();
    let count_term = compensated_sum(kill_probability.iter().map(|p| 1.0 - p));
    let jump_term = if lambda == 0.0 {
        0.0
    } else {
        lambda / ((2.0 * PI).sqrt() * sigma) * gaussian_bumps(x0.as_slice(), lambda, sigma)
    };
    Ok(DofDecomposition {
        count_term,
        jump_term,
        kill_probability,
        total: count_term + jump_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thresholding::hard_threshold;
    use proptest::prelude::*;

    fn sv(v: &[f64]) -> SignalVector {
        SignalVector::new(v.to_vec()).unwrap()
    }

    fn th(l: f64) -> Threshold {
        Threshold::new(l).unwrap()
    }

    fn unit() -> NoiseModel {
        NoiseModel::new(1.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // Reference values below were evaluated with 30-digit arithmetic.

    #[test]
    fn edof_at_origin() {
        let v = edof_ht(&sv(&[0.0]), th(1.0), unit(), 1.0).unwrap();
        assert!(close(v, 0.684_396_560_624_433_1, 1e-14), "{v}");
    }

    #[test]
    fn edof_zero_threshold_counts_nonzero() {
        let y = sv(&[0.0, 1.0, -2.0, 0.0, 3.0]);
        assert_eq!(edof_ht(&y, Threshold::ZERO, unit(), 0.3).unwrap(), 3.0);
    }

    #[test]
    fn edof_far_from_boundary_saturates() {
        let v = edof_ht(&sv(&[1e6]), th(1.0), unit(), 0.1).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn edof_rejects_bad_bandwidth() {
        assert!(edof_ht(&sv(&[0.0]), th(1.0), unit(), 0.0).is_err());
        assert!(edof_ht(&sv(&[0.0]), th(1.0), unit(), -1.0).is_err());
        assert!(score(&sv(&[0.0]), th(1.0), unit(), f64::NAN).is_err());
    }

    #[test]
    fn noise_model_rejects_nonpositive() {
        assert!(NoiseModel::new(0.0).is_err());
        assert!(NoiseModel::new(-1.0).is_err());
        assert!(NoiseModel::new(f64::INFINITY).is_err());
    }

    #[test]
    fn risk_criterion_arithmetic() {
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y = sv(&y);
        assert_eq!(risk_criterion(&y, &y, 10.0, unit()).unwrap(), 10.0);
        let v = risk_criterion(&sv(&[1.0, 2.0]), &sv(&[1.0, 0.0]), 1.0, unit()).unwrap();
        assert_eq!(v, 4.0);
        let y = sv(&[1.0, -2.0, 0.5]);
        let zero = SignalVector::zeros(3).unwrap();
        let v = risk_criterion(&y, &zero, 0.0, NoiseModel::new(0.5).unwrap()).unwrap();
        assert!(close(v, 5.25 - 0.75, 1e-15));
    }

    #[test]
    fn risk_criterion_length_mismatch() {
        let err = risk_criterion(&sv(&[1.0]), &sv(&[1.0, 2.0]), 0.0, unit());
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn score_zero_threshold() {
        let y = sv(&[0.3, -1.2, 4.0, 0.1]);
        let noise = NoiseModel::new(0.7).unwrap();
        let v = score(&y, Threshold::ZERO, noise, 0.2).unwrap();
        assert!(close(v, 4.0 * 0.49, 1e-14), "{v}");
        // An exact zero is not counted as a survivor and contributes -σ².
        let y = sv(&[0.3, -1.2, 4.0, 0.0]);
        let v = score(&y, Threshold::ZERO, noise, 0.2).unwrap();
        assert!(close(v, 2.0 * 0.49, 1e-14), "{v}");
    }

    #[test]
    fn score_huge_threshold() {
        let v = score(&sv(&[1e6, -1e6]), th(1e9), unit(), 0.1).unwrap();
        assert_eq!(v, 2e12 - 2.0);
    }

    #[test]
    fn score_at_origin() {
        let v = score(&sv(&[0.0]), th(1.0), unit(), 1.0).unwrap();
        assert!(close(v, 0.368_793_121_248_866_1, 1e-14), "{v}");
    }

    #[test]
    fn sure_soft_cases() {
        let y = sv(&[0.5, -1.5, 2.0]);
        let noise = NoiseModel::new(0.8).unwrap();
        assert!(close(
            sure_soft(&y, Threshold::ZERO, noise).unwrap(),
            3.0 * 0.64,
            1e-14
        ));
        assert_eq!(sure_soft(&sv(&[2.0]), th(1.0), unit()).unwrap(), 2.0);
        let far = sure_soft(&y, th(1e6), noise).unwrap();
        assert!(close(far, y.squared_norm() - 3.0 * 0.64, 1e-14));
    }

    #[test]
    fn closed_form_at_origin() {
        let d = dof_ht_closed_form(&sv(&[0.0]), th(1.0), unit()).unwrap();
        assert!(close(d.kill_probability[0], 0.682_689_492_137_085_9, 1e-15));
        assert!(close(d.count_term, 0.317_310_507_862_914_1, 1e-15));
        assert!(close(d.jump_term, 0.483_941_449_038_286_7, 1e-15));
        assert!(close(d.total, 0.801_251_956_901_200_8, 1e-15));
    }

    #[test]
    fn closed_form_zero_threshold() {
        let x0 = sv(&[0.0, 1.0, -3.0, 1e3]);
        let d = dof_ht_closed_form(&x0, Threshold::ZERO, unit()).unwrap();
        assert_eq!(d.count_term, 4.0);
        assert_eq!(d.jump_term, 0.0);
        assert_eq!(d.total, 4.0);
    }

    #[test]
    fn closed_form_large_amplitude() {
        for x in [1e6, -1e6] {
            let d = dof_ht_closed_form(&sv(&[x]), th(1.0), unit()).unwrap();
            assert_eq!(d.kill_probability[0], 0.0);
            assert_eq!(d.count_term, 1.0);
            assert_eq!(d.jump_term, 0.0);
        }
    }

    #[test]
    fn kernel_moments() {
        let noise = unit();
        assert_eq!(kernel_mean(0.7, 0.7, noise, 0.3).unwrap(), 1.0);
        assert!(close(
            kernel_mean(1.0, 0.0, noise, 1.0).unwrap(),
            0.778_800_783_071_404_9,
            1e-15
        ));
        assert!(kernel_mean(1e4, 0.0, noise, 1.0).unwrap() == 0.0);
        assert!(close(
            kernel_variance(0.0, 0.0, noise, 1.0).unwrap(),
            0.154_700_538_379_251_5,
            1e-15
        ));
        assert!(close(
            kernel_variance(2.0, 2.0, noise, 10.0).unwrap(),
            4.901_840_644_105_224e-5,
            1e-14
        ));
        assert_eq!(kernel_variance(1e4, 0.0, noise, 1.0).unwrap(), 0.0);
        assert!(kernel_mean(0.0, 0.0, noise, 0.0).is_err());
    }

    #[test]
    fn default_schedule() {
        let s = BandwidthSchedule::default();
        let h = s.bandwidth(1000, NoiseModel::new(2.0).unwrap());
        assert!(close(h, 1.2, 1e-12));
        assert!(BandwidthSchedule::new(6.0, 1.0).is_err());
        assert!(BandwidthSchedule::new(0.0, 0.5).is_err());
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, f64, f64, f64)> {
        (
            prop::collection::vec(-5.0f64..5.0, 1..128),
            0.0f64..4.0,
            0.05f64..3.0,
            0.01f64..2.0,
        )
    }

    proptest! {
        #[test]
        fn score_matches_composed_criterion((values, lambda, sigma, h) in instance()) {
            let y = SignalVector::new(values).unwrap();
            let t = th(lambda);
            let noise = NoiseModel::new(sigma).unwrap();
            let closed = score(&y, t, noise, h).unwrap();
            let dof = edof_ht(&y, t, noise, h).unwrap();
            let composed = risk_criterion(&y, &hard_threshold(&y, t), dof, noise).unwrap();
            let scale = 1.0 + y.squared_norm() + y.len() as f64 * noise.variance()
                + 2.0 * noise.variance() * dof;
            prop_assert!((closed - composed).abs() <= 1e-13 * scale, "{} vs {}", closed, composed);
        }

        #[test]
        fn edof_bounds((values, lambda, sigma, h) in instance()) {
            let y = SignalVector::new(values).unwrap();
            let noise = NoiseModel::new(sigma).unwrap();
            let v = edof_ht(&y, th(lambda), noise, h).unwrap();
            let p = y.len() as f64;
            let upper = p + 2.0 * p * lambda * (sigma * sigma + h * h).sqrt()
                / ((2.0 * PI).sqrt() * sigma * h);
            prop_assert!(v >= 0.0 && v <= upper * (1.0 + 1e-12));
        }

        #[test]
        fn closed_form_bounds((values, lambda, sigma, _h) in instance()) {
            let x0 = SignalVector::new(values).unwrap();
            let d = dof_ht_closed_form(&x0, th(lambda), NoiseModel::new(sigma).unwrap()).unwrap();
            prop_assert!(d.count_term >= 0.0 && d.count_term <= x0.len() as f64);
            prop_assert!(d.kill_probability.iter().all(|p| (0.0..=1.0).contains(p)));
            prop_assert_eq!(d.total, d.count_term + d.jump_term);
        }

        #[test]
        fn kernel_variance_nonnegative(d in -20.0f64..20.0, sigma in 0.01f64..5.0, h in 0.001f64..50.0) {
            let v = kernel_variance(d, 0.0, NoiseModel::new(sigma).unwrap(), h).unwrap();
            prop_assert!(v >= 0.0);
        }
    }
}
