//! Hard-threshold denoising of Gaussian-noise vectors with automatic
//! threshold selection by SCORE, a consistent Stein-type risk estimate.
//!
//! - [`thresholding`]: hard/soft thresholding and the jump decomposition.
//! - [`estimators`]: smoothed DOF, SCORE, SURE for soft thresholding, the
//!   exact DOF of hard thresholding, and kernel moments.
//! - [`oracle`]: synthetic signals, seeded noise, Monte Carlo risk and DOF.
//! - [`selection`]: grid search over thresholds.
//! - [`config`] and [`cli`]: the `score` command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod estimators;
pub mod oracle;
pub mod selection;
pub mod sum;
pub mod thresholding;

pub use error::{Error, Result};
pub use estimators::{
    dof_ht_closed_form, edof_ht, kernel_mean, kernel_variance, risk_criterion, score, sure_soft,
    BandwidthSchedule, DofDecomposition, GaussianKernel, NoiseModel,
};
pub use oracle::{
    generate_compressible, mc_dof, mc_dof_forms, mc_risk, mc_risk_curve, sample_observation,
    sigma_for_snr, CompressibleSignalSpec, DofForm, MonteCarloEstimate, ReplicateConfig,
    SignPattern,
};
pub use selection::{
    build_grid, evaluate_curve, select_threshold, CurveMetadata, CurveRow, OracleColumns,
    RiskCurve, SelectionResult, Spacing, ThresholdGrid,
};
pub use thresholding::{
    count_above, hard_threshold, jump_part, soft_threshold, SignalVector, Threshold,
};
