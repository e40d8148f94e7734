//! Ground truth for validating the estimators: synthetic signals, seeded
//! noise, and Monte Carlo estimates of the true risk and true DOF.
//!
//! # Random streams
//!
//! Replicate `k` of a [`ReplicateConfig`] with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `k`. Standard normals
//! come from `rand_distr::StandardNormal` (ziggurat). A replicate's draws
//! depend only on `(s, k)`, never on scheduling, so results are identical
//! for any number of worker threads. Per-replicate statistics are collected
//! in replicate order and reduced sequentially.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::NoiseModel;
use crate::sum::compensated_sum;
use crate::thresholding::{hard_scalar, SignalVector, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPattern {
    /// `+, -, +, -, ...`
    Alternating,
    /// Independent fair signs from a seeded stream.
    Random { seed: u64 },
}

/// Power-law signal: entry `i` (1-based) has magnitude `amplitude / i^gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressibleSignalSpec {
    pub len: usize,
    pub gamma: f64,
    pub amplitude: f64,
    pub signs: SignPattern,
}

impl CompressibleSignalSpec {
    pub fn new(len: usize, gamma: f64) -> Self {
        Self {
            len,
            gamma,
            amplitude: 1.0,
            signs: SignPattern::Alternating,
        }
    }
}

pub fn generate_compressible(spec: &CompressibleSignalSpec) -> Result<SignalVector> {
    if spec.len == 0 {
        return Err(Error::param("p", "signal length must be >= 1"));
    }
    if !spec.gamma.is_finite() || spec.gamma <= 0.0 {
        return Err(Error::param(
            "gamma",
            format!("must be > 0, got {}", spec.gamma),
        ));
    }
    if !spec.amplitude.is_finite() || spec.amplitude <= 0.0 {
        return Err(Error::param(
            "amplitude",
            format!("must be > 0, got {}", spec.amplitude),
        ));
    }
    let magnitudes = (1..=spec.len).map(|i| spec.amplitude / (i as f64).powf(spec.gamma));
    let values = match spec.signs {
        SignPattern::Alternating => magnitudes
            .enumerate()
            .map(|(i, m)| if i % 2 == 0 { m } else { -m })
            .collect(),
        SignPattern::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            magnitudes
                .map(|m| if rng.random::<bool>() { m } else { -m })
                .collect()
        }
    };
    SignalVector::new(values)
}

/// Noise level giving `10·log10(‖x0‖² / (P σ²)) = target_snr_db`.
pub fn sigma_for_snr(x0: &SignalVector, target_snr_db: f64) -> Result<NoiseModel> {
    if !target_snr_db.is_finite() {
        return Err(Error::param("snr-db", "must be finite"));
    }
    let energy = x0.squared_norm();
    if energy <= 0.0 {
        return Err(Error::InvalidInput(
            "cannot calibrate SNR against an all-zero signal".into(),
        ));
    }
    let mean_square = energy / x0.len() as f64;
    NoiseModel::new((mean_square / 10f64.powf(target_snr_db / 10.0)).sqrt())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicateConfig {
    pub n_replicates: usize,
    pub seed: u64,
}

impl ReplicateConfig {
    pub fn new(n_replicates: usize, seed: u64) -> Result<Self> {
        if n_replicates == 0 {
            return Err(Error::param("replicates", "must be >= 1"));
        }
        Ok(Self { n_replicates, seed })
    }

    /// An independent configuration for a labelled sub-experiment.
    pub fn derive(&self, tag: u64, n_replicates: usize) -> Result<Self> {
        Self::new(n_replicates, splitmix64(self.seed ^ splitmix64(tag)))
    }

    pub fn stream(&self, k: usize) -> Result<ChaCha8Rng> {
        if k >= self.n_replicates {
            return Err(Error::param(
                "replicate",
                format!(
                    "index {k} out of range (n_replicates = {})",
                    self.n_replicates
                ),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        Ok(rng)
    }
}

/// `len` standard normal draws of replicate `k`.
pub fn standard_normals(len: usize, rep: &ReplicateConfig, k: usize) -> Result<Vec<f64>> {
    let rng = rep.stream(k)?;
    Ok(rng.sample_iter(StandardNormal).take(len).collect())
}

/// `y = x0 + σ z` with `z` from replicate `k`.
pub fn sample_observation(
    x0: &SignalVector,
    noise: NoiseModel,
    rep: &ReplicateConfig,
    k: usize,
) -> Result<SignalVector> {
    let sigma = noise.sigma();
    let z = standard_normals(x0.len(), rep, k)?;
    SignalVector::new(x0.iter().zip(z).map(|(x, z)| x + sigma * z).collect())
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MonteCarloEstimate {
    /// Panics on an empty sample.
    pub fn from_samples(samples: &[f64]) -> Self {
        assert!(
            !samples.is_empty(),
            "Monte Carlo estimate needs at least one sample"
        );
        let n = samples.len();
        let mean = compensated_sum(samples.iter().copied()) / n as f64;
        let std_error = if n > 1 {
            let ss = compensated_sum(samples.iter().map(|s| (s - mean) * (s - mean)));
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std_error, n }
    }

    /// Unbiased sample variance of the underlying draws.
    pub fn sample_variance(&self) -> f64 {
        self.std_error * self.std_error * self.n as f64
    }

    /// `|a - b| / sqrt(se_a² + se_b²)`, treating the two as independent.
    pub fn z_score(&self, other: &MonteCarloEstimate) -> f64 {
        let se = self.std_error.hypot(other.std_error);
        (self.mean - other.mean).abs() / se
    }
}

fn per_replicate<T, F>(rep: &ReplicateConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..rep.n_replicates).into_par_iter().map(f).collect()
}

/// Monte Carlo risk `E‖HT(Y, λ) - x0‖²`.
pub fn mc_risk(
    x0: &SignalVector,
    t: Threshold,
    noise: NoiseModel,
    rep: &ReplicateConfig,
) -> Result<MonteCarloEstimate> {
    Ok(mc_risk_curve(x0, &[t], noise, rep)?.remove(0))
}

/// Monte Carlo risk at every threshold, sharing noise draws across thresholds.
pub fn mc_risk_curve(
    x0: &SignalVector,
    thresholds: &[Threshold],
    noise: NoiseModel,
    rep: &ReplicateConfig,
) -> Result<Vec<MonteCarloEstimate>> {
    if thresholds.is_empty() {
        return Ok(Vec::new());
    }
    let sigma = noise.sigma();
    let losses = per_replicate(rep, |k| {
        let z = standard_normals(x0.len(), rep, k)?;
        let mut out = Vec::with_capacity(thresholds.len());
        for t in thresholds {
            let lambda = t.value();
            out.push(compensated_sum(x0.iter().zip(&z).map(|(&x, &z)| {
                let y = x + sigma * z;
                let e = hard_scalar(y, lambda) - x;
                e * e
            })));
        }
        Ok(out)
    })?;
    Ok((0..thresholds.len())
        .map(|j| {
            let column: Vec<f64> = losses.iter().map(|row| row[j]).collect();
            MonteCarloEstimate::from_samples(&column)
        })
        .collect())
}

/// Monte Carlo routes to the DOF of hard thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofForm {
    /// `Σ_i cov(Y_i, HT(Y)_i) / σ²`, using the known mean `E[Y] = x0`, so
    /// each replicate contributes `Σ_i W_i HT(Y)_i / σ²`.
    Covariance,
    /// `#{|Y| > λ} + (λ/σ²) Σ_i sign(Y_i) W_i I(|Y_i| > λ)`.
    Sign,
}

/// Both DOF routes evaluated on the same draws: `(covariance, sign)`.
pub fn mc_dof_forms(
    x0: &SignalVector,
    t: Threshold,
    noise: NoiseModel,
    rep: &ReplicateConfig,
) -> Result<(MonteCarloEstimate, MonteCarloEstimate)> {
    let sigma = noise.sigma();
    let s2 = noise.variance();
    let lambda = t.value();
    let pairs = per_replicate(rep, |k| {
        let z = standard_normals(x0.len(), rep, k)?;
        let mut cov = Vec::with_capacity(x0.len());
        let mut sign = Vec::with_capacity(x0.len());
        for (&x, &z) in x0.iter().zip(&z) {
            let w = sigma * z;
            let y = x + w;
            cov.push(w * hard_scalar(y, lambda));
            if y.abs() > lambda {
                sign.push(1.0 + lambda / s2 * y.signum() * w);
            }
        }
        Ok((compensated_sum(cov) / s2, compensated_sum(sign)))
    })?;
    let (cov, sign): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok((
        MonteCarloEstimate::from_samples(&cov),
        MonteCarloEstimate::from_samples(&sign),
    ))
}

pub fn mc_dof(
    x0: &SignalVector,
    t: Threshold,
    noise: NoiseModel,
    rep: &ReplicateConfig,
    form: DofForm,
) -> Result<MonteCarloEstimate> {
    let (cov, sign) = mc_dof_forms(x0, t, noise, rep)?;
    Ok(match form {
        DofForm::Covariance => cov,
        DofForm::Sign => sign,
    })
}

/// Per-replicate values of `f(y_k)` for `y_k = x0 + σ z_k`.
pub fn map_observations<T, F>(
    x0: &SignalVector,
    noise: NoiseModel,
    rep: &ReplicateConfig,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&SignalVector) -> Result<T> + Sync + Send,
{
    per_replicate(rep, |k| f(&sample_observation(x0, noise, rep, k)?))
}
