//! Experiment runners behind the `score` binary.
//!
//! Each runner returns the file body and a short `key=value` summary; [`run`]
//! writes the body to the configured output (stdout when unset). Floats are
//! written with Rust's shortest round-trip decimal formatting.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::config::{
    ExperimentConfig, Mode, NoiseLevel, Source, DEFAULT_CONSISTENCY_REPLICATES,
    DEFAULT_LAMBDA_MAX_SIGMAS,
};
use crate::error::{Error, Result};
use crate::estimators::{dof_ht_closed_form, edof_ht, NoiseModel};
use crate::oracle::{
    generate_compressible, map_observations, sample_observation, sigma_for_snr, MonteCarloEstimate,
    ReplicateConfig,
};
use crate::selection::{
    build_grid, evaluate_curve, selection_from_curve, RiskCurve, ThresholdGrid,
};
use crate::thresholding::{SignalVector, Threshold};

pub const CURVE_HEADER: &str = "lambda,score,edof";
pub const CURVE_ORACLE_HEADER: &str = "lambda,score,edof,mc_risk,mc_risk_se,dof_closed_form";
pub const CONSISTENCY_HEADER: &str = "P,h,bias_per_P,variance_per_P,dof_closed_form_per_P";
pub const SNR_DEFINITION: &str = "10*log10(sum(x0^2)/(P*sigma^2))";

// Stream labels for ReplicateConfig::derive.
const OBSERVATION_STREAM: u64 = 0x6f62_7365_7276_6564;
const RISK_STREAM: u64 = 0x6d63_5f72_6973_6b00;
const CONSISTENCY_STREAM: u64 = 0x636f_6e73_6973_7400;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Contents of the output file.
    pub body: String,
    /// `key=value` lines for the terminal.
    pub summary: String,
}

/// Reads one number per line; blank lines and `#` comments are skipped.
pub fn read_vector_file(path: &Path) -> Result<SignalVector> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    text: line.to_string(),
                })
            }
        }
    }
    if values.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: no values found",
            path.display()
        )));
    }
    SignalVector::new(values)
}

fn format_vector(x: &SignalVector) -> String {
    let mut out = String::with_capacity(x.len() * 12);
    for v in x.iter() {
        let _ = writeln!(out, "{v}");
    }
    out
}

struct Problem {
    x0: Option<SignalVector>,
    y: SignalVector,
    noise: NoiseModel,
}

fn base_replicates(cfg: &ExperimentConfig) -> ReplicateConfig {
    ReplicateConfig {
        n_replicates: 1,
        seed: cfg.seed,
    }
}

fn synthetic_noise(x0: &SignalVector, level: NoiseLevel) -> Result<NoiseModel> {
    match level {
        NoiseLevel::Sigma(s) => NoiseModel::new(s),
        NoiseLevel::SnrDb(db) => sigma_for_snr(x0, db),
    }
}

fn load_problem(cfg: &ExperimentConfig) -> Result<Problem> {
    match &cfg.source {
        Source::File(path) => {
            let y = read_vector_file(path)?;
            let NoiseLevel::Sigma(s) = cfg.noise else {
                return Err(Error::InvalidConfiguration(
                    "file input requires `sigma`".into(),
                ));
            };
            Ok(Problem {
                x0: None,
                y,
                noise: NoiseModel::new(s)?,
            })
        }
        Source::Synthetic(spec) => {
            let x0 = generate_compressible(spec)?;
            let noise = synthetic_noise(&x0, cfg.noise)?;
            let rep = base_replicates(cfg).derive(OBSERVATION_STREAM, 1)?;
            let y = sample_observation(&x0, noise, &rep, 0)?;
            Ok(Problem {
                x0: Some(x0),
                y,
                noise,
            })
        }
    }
}

fn grid_for(cfg: &ExperimentConfig, noise: NoiseModel) -> Result<ThresholdGrid> {
    let lambda_max = cfg
        .lambda_max
        .unwrap_or(DEFAULT_LAMBDA_MAX_SIGMAS * noise.sigma());
    build_grid(
        cfg.lambda_min,
        lambda_max,
        cfg.grid_points,
        cfg.grid_spacing,
    )
}

fn curve_for(cfg: &ExperimentConfig, problem: &Problem, oracle: bool) -> Result<RiskCurve> {
    let grid = grid_for(cfg, problem.noise)?;
    let rep = match (oracle, cfg.replicates) {
        (true, Some(n)) => Some(base_replicates(cfg).derive(RISK_STREAM, n)?),
        _ => None,
    };
    let x0 = rep.as_ref().and(problem.x0.as_ref());
    let mut curve = evaluate_curve(
        x0,
        &problem.y,
        &grid,
        problem.noise,
        &cfg.schedule,
        rep.as_ref(),
    )?;
    curve.metadata.seed = Some(cfg.seed);
    if let Source::Synthetic(spec) = &cfg.source {
        curve.metadata.gamma = Some(spec.gamma);
    }
    if let NoiseLevel::SnrDb(db) = cfg.noise {
        curve.metadata.snr_db = Some(db);
    }
    Ok(curve)
}

/// Selects λ⋆ on the configured grid; the body is `x⋆`, one value per line.
pub fn run_denoise(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let problem = load_problem(cfg)?;
    let curve = curve_for(cfg, &problem, false)?;
    let h = curve.metadata.h;
    let result = selection_from_curve(&problem.y, curve);
    let mut summary = String::new();
    let _ = writeln!(summary, "lambda_star={}", result.lambda_star);
    let _ = writeln!(summary, "score_star={}", result.score_star);
    let _ = writeln!(summary, "h={h}");
    let _ = writeln!(summary, "P={}", problem.y.len());
    let _ = writeln!(summary, "sigma={}", problem.noise.sigma());
    Ok(RunOutput {
        body: format_vector(&result.x_star),
        summary,
    })
}

pub fn format_curve_csv(curve: &RiskCurve) -> String {
    let m = &curve.metadata;
    let mut out = String::new();
    let _ = writeln!(out, "# P={}", m.p);
    let _ = writeln!(out, "# sigma={}", m.sigma);
    let _ = writeln!(out, "# h={}", m.h);
    if let Some(seed) = m.seed {
        let _ = writeln!(out, "# seed={seed}");
    }
    if let Some(gamma) = m.gamma {
        let _ = writeln!(out, "# gamma={gamma}");
    }
    if let Some(db) = m.snr_db {
        let _ = writeln!(out, "# snr_db={db}");
        let _ = writeln!(out, "# snr_definition={SNR_DEFINITION}");
    }
    if let Some(n) = m.n_replicates {
        let _ = writeln!(out, "# n_replicates={n}");
    }
    let oracle = curve.has_oracle();
    out.push_str(if oracle {
        CURVE_ORACLE_HEADER
    } else {
        CURVE_HEADER
    });
    out.push('\n');
    for row in &curve.rows {
        let _ = write!(out, "{},{},{}", row.lambda, row.score, row.edof);
        if let (true, Some(o)) = (oracle, row.oracle) {
            let _ = write!(
                out,
                ",{},{},{}",
                o.mc_risk.mean, o.mc_risk.std_error, o.dof_closed_form
            );
        }
        out.push('\n');
    }
    out
}

/// SCORE curve over the grid, with oracle columns when `replicates` is set.
pub fn run_curve(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let problem = load_problem(cfg)?;
    let curve = curve_for(cfg, &problem, true)?;
    let best = curve.rows[curve.argmin_score()];
    let mut summary = String::new();
    let _ = writeln!(summary, "lambda_star={}", best.lambda);
    let _ = writeln!(summary, "score_star={}", best.score);
    let _ = writeln!(summary, "rows={}", curve.rows.len());
    Ok(RunOutput {
        body: format_curve_csv(&curve),
        summary,
    })
}

/// One row of the consistency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyRow {
    pub p: usize,
    pub h: f64,
    pub bias_per_p: f64,
    pub variance_per_p: f64,
    pub dof_closed_form_per_p: f64,
    /// Monte Carlo estimate of `E[edof / P]`.
    pub edof_per_p: MonteCarloEstimate,
}

/// Bias and variance of `edof / P` against the exact DOF, for each P.
pub fn consistency_sweep(cfg: &ExperimentConfig) -> Result<Vec<ConsistencyRow>> {
    let Source::Synthetic(spec) = &cfg.source else {
        return Err(Error::InvalidConfiguration(
            "consistency mode requires a synthetic signal".into(),
        ));
    };
    let n = cfg.replicates.unwrap_or(DEFAULT_CONSISTENCY_REPLICATES);
    let base = base_replicates(cfg).derive(CONSISTENCY_STREAM, 1)?;
    let mut rows = Vec::with_capacity(cfg.p_sweep.len());
    for &p in &cfg.p_sweep {
        let spec = crate::oracle::CompressibleSignalSpec { len: p, ..*spec };
        let x0 = generate_compressible(&spec)?;
        let noise = synthetic_noise(&x0, cfg.noise)?;
        let h = cfg.schedule.bandwidth(p, noise);
        let t = Threshold::new(cfg.lambda_sigmas * noise.sigma())?;
        let exact = dof_ht_closed_form(&x0, t, noise)?.total / p as f64;
        let rep = base.derive(p as u64, n)?;
        let samples =
            map_observations(
                &x0,
                noise,
                &rep,
                |y| Ok(edof_ht(y, t, noise, h)? / p as f64),
            )?;
        let est = MonteCarloEstimate::from_samples(&samples);
        rows.push(ConsistencyRow {
            p,
            h,
            bias_per_p: (est.mean - exact).abs(),
            variance_per_p: if n > 1 { est.sample_variance() } else { 0.0 },
            dof_closed_form_per_p: exact,
            edof_per_p: est,
        });
    }
    Ok(rows)
}

pub fn run_consistency(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let rows = consistency_sweep(cfg)?;
    let mut out = String::new();
    if let Source::Synthetic(spec) = &cfg.source {
        let _ = writeln!(out, "# gamma={}", spec.gamma);
        let _ = writeln!(out, "# amplitude={}", spec.amplitude);
    }
    match cfg.noise {
        NoiseLevel::Sigma(s) => {
            let _ = writeln!(out, "# sigma={s}");
        }
        NoiseLevel::SnrDb(db) => {
            let _ = writeln!(out, "# snr_db={db}");
            let _ = writeln!(out, "# snr_definition={SNR_DEFINITION}");
        }
    }
    let _ = writeln!(out, "# lambda_sigma={}", cfg.lambda_sigmas);
    let _ = writeln!(out, "# bandwidth_c={}", cfg.schedule.multiplier());
    let _ = writeln!(out, "# bandwidth_alpha={}", cfg.schedule.exponent());
    let _ = writeln!(out, "# seed={}", cfg.seed);
    let _ = writeln!(
        out,
        "# n_replicates={}",
        cfg.replicates.unwrap_or(DEFAULT_CONSISTENCY_REPLICATES)
    );
    out.push_str(CONSISTENCY_HEADER);
    out.push('\n');
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.p, r.h, r.bias_per_p, r.variance_per_p, r.dof_closed_form_per_p
        );
    }
    Ok(RunOutput {
        body: out,
        summary: format!("rows={}\n", rows.len()),
    })
}

pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cfg.mode {
        Mode::Denoise => run_denoise(cfg),
        Mode::Curve => run_curve(cfg),
        Mode::Consistency => run_consistency(cfg),
    }
}

/// Runs the configured experiment and writes its outputs.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let output = execute(cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, &output.body).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(output.body.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[(&str, &str)]) -> ExperimentConfig {
        ExperimentConfig::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn reads_vectors_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.txt");
        std::fs::write(&path, "# header\n1.5\n\n-2\n 3e-1 \n").unwrap();
        let y = read_vector_file(&path).unwrap();
        assert_eq!(y.as_slice(), &[1.5, -2.0, 0.3]);
    }

    #[test]
    fn parse_error_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.txt");
        std::fs::write(&path, "1\n2\nabc\n4\n").unwrap();
        let err = read_vector_file(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(err.to_string().contains(":3:"));
        std::fs::write(&path, "1\nNaN\n").unwrap();
        assert!(matches!(
            read_vector_file(&path),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_vector_file(Path::new("/nonexistent/y.txt")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn curve_header_and_rows() {
        let c = cfg(&[
            ("mode", "curve"),
            ("p", "64"),
            ("sigma", "0.1"),
            ("grid-points", "5"),
        ]);
        let out = run_curve(&c).unwrap();
        let data: Vec<&str> = out.body.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], CURVE_HEADER);
        assert_eq!(data.len(), 6);
        let first: Vec<f64> = data[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first[0], 0.0);
        assert!((first[1] - 64.0 * 0.01).abs() < 1e-12);
    }

    #[test]
    fn oracle_curve_header() {
        let c = cfg(&[
            ("mode", "curve"),
            ("p", "32"),
            ("snr-db", "3"),
            ("grid-points", "3"),
            ("replicates", "20"),
        ]);
        let out = run_curve(&c).unwrap();
        assert!(out.body.contains("# snr_db=3\n"));
        assert!(out.body.contains("# n_replicates=20\n"));
        let data: Vec<&str> = out.body.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], CURVE_ORACLE_HEADER);
        assert!(data[1..].iter().all(|r| r.split(',').count() == 6));
    }

    #[test]
    fn single_p_consistency() {
        let c = cfg(&[
            ("mode", "consistency"),
            ("p-sweep", "500"),
            ("snr-db", "5.65"),
            ("replicates", "10"),
        ]);
        let out = run_consistency(&c).unwrap();
        let data: Vec<&str> = out.body.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data, vec![CONSISTENCY_HEADER, data[1]]);
        assert!(data[1].starts_with("500,"));
    }
}
