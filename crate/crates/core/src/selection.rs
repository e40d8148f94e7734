//! Threshold selection by grid search on SCORE.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{dof_ht_closed_form, edof_ht, score, BandwidthSchedule, NoiseModel};
use crate::oracle::{mc_risk_curve, MonteCarloEstimate, ReplicateConfig};
use crate::thresholding::{check_same_len, hard_threshold, SignalVector, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl std::str::FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" | "logarithmic" => Ok(Spacing::Log),
            other => Err(Error::param(
                "grid-spacing",
                format!("expected `linear` or `log`, got `{other}`"),
            )),
        }
    }
}

/// Non-empty, strictly increasing list of thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid(Vec<Threshold>);

impl ThresholdGrid {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("grid", "must contain at least one threshold"));
        }
        let thresholds = values
            .into_iter()
            .map(Threshold::new)
            .collect::<Result<Vec<_>>>()?;
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("grid", "values must be strictly increasing"));
        }
        Ok(Self(thresholds))
    }

    pub fn thresholds(&self) -> &[Threshold] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Grid over `[lambda_min, lambda_max]` including both endpoints.
pub fn build_grid(
    lambda_min: f64,
    lambda_max: f64,
    n_points: usize,
    spacing: Spacing,
) -> Result<ThresholdGrid> {
    if n_points == 0 {
        return Err(Error::param("grid-points", "must be >= 1"));
    }
    if !lambda_min.is_finite() || !lambda_max.is_finite() || lambda_min < 0.0 {
        return Err(Error::param(
            "lambda-min",
            format!("range [{lambda_min}, {lambda_max}] must be finite with lambda-min >= 0"),
        ));
    }
    if n_points == 1 {
        if lambda_min != lambda_max {
            return Err(Error::param(
                "grid-points",
                "a single-point grid needs lambda-min == lambda-max",
            ));
        }
        return ThresholdGrid::from_values(vec![lambda_min]);
    }
    if lambda_min >= lambda_max {
        return Err(Error::param(
            "lambda-max",
            format!("must exceed lambda-min ({lambda_max} <= {lambda_min})"),
        ));
    }
    let last = (n_points - 1) as f64;
    let values = match spacing {
        Spacing::Linear => (0..n_points)
            .map(|i| lambda_min + (lambda_max - lambda_min) * (i as f64 / last))
            .collect::<Vec<_>>(),
        Spacing::Log => {
            if lambda_min <= 0.0 {
                return Err(Error::param(
                    "lambda-min",
                    "log spacing requires lambda-min > 0",
                ));
            }
            let ratio = lambda_max / lambda_min;
            (0..n_points)
                .map(|i| lambda_min * ratio.powf(i as f64 / last))
                .collect()
        }
    };
    let mut values = values;
    values[n_points - 1] = lambda_max;
    ThresholdGrid::from_values(values)
}

/// Oracle columns, available when the clean signal is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleColumns {
    pub mc_risk: MonteCarloEstimate,
    pub dof_closed_form: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub lambda: f64,
    pub score: f64,
    pub edof: f64,
    pub oracle: Option<OracleColumns>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveMetadata {
    pub p: usize,
    pub sigma: f64,
    pub h: f64,
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
    pub snr_db: Option<f64>,
    pub n_replicates: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskCurve {
    /// One row per grid point, in grid order.
    pub rows: Vec<CurveRow>,
    pub metadata: CurveMetadata,
}

impl RiskCurve {
    pub fn has_oracle(&self) -> bool {
        self.rows.iter().all(|r| r.oracle.is_some())
    }

    /// Index of the smallest SCORE; ties go to the earliest (smallest λ) row.
    pub fn argmin_score(&self) -> usize {
        let mut best = 0;
        for (i, row) in self.rows.iter().enumerate().skip(1) {
            if row.score < self.rows[best].score {
                best = i;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub lambda_star: f64,
    pub x_star: SignalVector,
    pub score_star: f64,
    pub curve: RiskCurve,
}

/// SCORE and EDOF at every grid point, plus oracle columns when both `x0`
/// and `rep` are given.
pub fn evaluate_curve(
    x0: Option<&SignalVector>,
    y: &SignalVector,
    grid: &ThresholdGrid,
    noise: NoiseModel,
    schedule: &BandwidthSchedule,
    rep: Option<&ReplicateConfig>,
) -> Result<RiskCurve> {
    let oracle = match (x0, rep) {
        (None, None) => None,
        (Some(x0), Some(rep)) => {
            check_same_len(x0, y)?;
            Some((x0, rep))
        }
        (None, Some(_)) => {
            return Err(Error::InvalidConfiguration(
                "oracle columns require the clean signal".into(),
            ))
        }
        (Some(_), None) => {
            return Err(Error::InvalidConfiguration(
                "oracle columns require a replicate configuration".into(),
            ))
        }
    };

    let h = schedule.bandwidth(y.len(), noise);
    let base: Vec<(f64, f64)> = grid
        .thresholds()
        .par_iter()
        .map(|&t| Ok((score(y, t, noise, h)?, edof_ht(y, t, noise, h)?)))
        .collect::<Result<_>>()?;

    let oracle_columns = match oracle {
        None => None,
        Some((x0, rep)) => {
            let risks = mc_risk_curve(x0, grid.thresholds(), noise, rep)?;
            let dofs = grid
                .thresholds()
                .par_iter()
                .map(|&t| Ok(dof_ht_closed_form(x0, t, noise)?.total))
                .collect::<Result<Vec<_>>>()?;
            Some(
                risks
                    .into_iter()
                    .zip(dofs)
                    .map(|(mc_risk, dof_closed_form)| OracleColumns {
                        mc_risk,
                        dof_closed_form,
                    })
                    .collect::<Vec<_>>(),
            )
        }
    };

    let rows = grid
        .thresholds()
        .iter()
        .zip(base)
        .enumerate()
        .map(|(i, (t, (score, edof)))| CurveRow {
            lambda: t.value(),
            score,
            edof,
            oracle: oracle_columns.as_ref().map(|cols| cols[i]),
        })
        .collect();

    Ok(RiskCurve {
        rows,
        metadata: CurveMetadata {
            p: y.len(),
            sigma: noise.sigma(),
            h,
            seed: rep.map(|r| r.seed),
            n_replicates: rep.map(|r| r.n_replicates),
            ..CurveMetadata::default()
        },
    })
}

/// Sweeps the grid and returns the SCORE minimizer with its denoised vector.
pub fn select_threshold(
    y: &SignalVector,
    grid: &ThresholdGrid,
    noise: NoiseModel,
    schedule: &BandwidthSchedule,
) -> Result<SelectionResult> {
    let curve = evaluate_curve(None, y, grid, noise, schedule, None)?;
    Ok(selection_from_curve(y, curve))
}

pub(crate) fn selection_from_curve(y: &SignalVector, curve: RiskCurve) -> SelectionResult {
    let best = curve.rows[curve.argmin_score()];
    // Grid values were validated as thresholds.
    let t = Threshold::new(best.lambda).expect("grid threshold");
    SelectionResult {
        lambda_star: best.lambda,
        x_star: hard_threshold(y, t),
        score_star: best.score,
        curve,
    }
}
