//! Flat `key=value` experiment configuration.
//!
//! The same keys are accepted in a config file (one `key=value` per line,
//! `#` comments) and as `--key value` flags; flags override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::BandwidthSchedule;
use crate::oracle::{CompressibleSignalSpec, SignPattern};
use crate::selection::Spacing;

pub const KEYS: &[&str] = &[
    "mode",
    "input",
    "p",
    "gamma",
    "amplitude",
    "signs",
    "sigma",
    "snr-db",
    "lambda-min",
    "lambda-max",
    "grid-points",
    "grid-spacing",
    "bandwidth-c",
    "bandwidth-alpha",
    "seed",
    "replicates",
    "p-sweep",
    "lambda-sigma",
    "output",
];

pub const DEFAULT_P: usize = 20_000;
pub const DEFAULT_GRID_POINTS: usize = 100;
pub const DEFAULT_LAMBDA_MAX_SIGMAS: f64 = 5.0;
pub const DEFAULT_CONSISTENCY_REPLICATES: usize = 200;
pub const DEFAULT_LAMBDA_SIGMAS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Denoise,
    Curve,
    Consistency,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "denoise" => Ok(Mode::Denoise),
            "curve" => Ok(Mode::Curve),
            "consistency" => Ok(Mode::Consistency),
            other => Err(Error::param(
                "mode",
                format!("expected denoise, curve or consistency, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Synthetic(CompressibleSignalSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    Sigma(f64),
    SnrDb(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub source: Source,
    pub noise: NoiseLevel,
    pub lambda_min: f64,
    /// Defaults to `5σ`.
    pub lambda_max: Option<f64>,
    pub grid_points: usize,
    pub grid_spacing: Spacing,
    pub schedule: BandwidthSchedule,
    pub seed: u64,
    /// Monte Carlo replicates; enables oracle columns in curve mode.
    pub replicates: Option<usize>,
    /// Signal lengths for consistency mode.
    pub p_sweep: Vec<usize>,
    /// Consistency-mode threshold, in units of σ.
    pub lambda_sigmas: f64,
    pub output: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &'static str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::param(key, format!("cannot parse `{value}`")))
}

fn parse_real(key: &'static str, value: &str) -> Result<f64> {
    let v: f64 = parse(key, value)?;
    if !v.is_finite() {
        return Err(Error::param(key, format!("must be finite, got `{value}`")));
    }
    Ok(v)
}

/// Accepts plain integers and exact scientific forms such as `1e5` or `2E4`.
fn parse_count(key: &'static str, value: &str) -> Result<usize> {
    if let Ok(v) = value.trim().parse::<usize>() {
        return Ok(v);
    }
    let v = parse_real(key, value)?;
    if v < 0.0 || v.fract() != 0.0 || v > usize::MAX as f64 {
        return Err(Error::param(
            key,
            format!("expected a non-negative integer, got `{value}`"),
        ));
    }
    Ok(v as usize)
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfiguration(format!(
                "{}:{}: expected `key=value`, got `{line}`",
                path.display(),
                i + 1
            ))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_pairs(read_pairs(path)?)
    }

    /// Builds a config from `(key, value)` pairs; later pairs win.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut map: BTreeMap<&'static str, String> = BTreeMap::new();
        for (k, v) in pairs {
            let k = k.as_ref().trim();
            let key = KEYS
                .iter()
                .copied()
                .find(|known| *known == k)
                .ok_or_else(|| Error::InvalidConfiguration(format!("unknown key `{k}`")))?;
            map.insert(key, v.as_ref().trim().to_string());
        }
        let get = |k: &str| map.get(k).map(String::as_str);

        let mode: Mode = parse(
            "mode",
            get("mode")
                .ok_or_else(|| Error::InvalidConfiguration("missing required key `mode`".into()))?,
        )?;

        let seed: u64 = get("seed")
            .map(|v| parse("seed", v))
            .transpose()?
            .unwrap_or(0);

        let source = match get("input") {
            Some(path) => {
                for k in ["p", "gamma", "amplitude", "signs", "p-sweep"] {
                    if map.contains_key(k) {
                        return Err(Error::InvalidConfiguration(format!(
                            "`{k}` describes a synthetic signal and conflicts with `input`"
                        )));
                    }
                }
                Source::File(PathBuf::from(path))
            }
            None => {
                let len = get("p")
                    .map(|v| parse_count("p", v))
                    .transpose()?
                    .unwrap_or(DEFAULT_P);
                let gamma = get("gamma")
                    .map(|v| parse_real("gamma", v))
                    .transpose()?
                    .unwrap_or(1.0);
                let amplitude = get("amplitude")
                    .map(|v| parse_real("amplitude", v))
                    .transpose()?
                    .unwrap_or(1.0);
                let signs = match get("signs").unwrap_or("alternating") {
                    "alternating" => SignPattern::Alternating,
                    "random" => SignPattern::Random { seed },
                    other => {
                        return Err(Error::param(
                            "signs",
                            format!("expected alternating or random, got `{other}`"),
                        ))
                    }
                };
                Source::Synthetic(CompressibleSignalSpec {
                    len,
                    gamma,
                    amplitude,
                    signs,
                })
            }
        };

        let noise = match (get("sigma"), get("snr-db")) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfiguration(
                    "`sigma` and `snr-db` are mutually exclusive".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidConfiguration(
                    "one of `sigma` or `snr-db` is required".into(),
                ))
            }
            (Some(s), None) => {
                let s = parse_real("sigma", s)?;
                if s <= 0.0 {
                    return Err(Error::param("sigma", format!("must be > 0, got {s}")));
                }
                NoiseLevel::Sigma(s)
            }
            (None, Some(db)) => NoiseLevel::SnrDb(parse_real("snr-db", db)?),
        };
        let synthetic = matches!(source, Source::Synthetic(_));
        if matches!(noise, NoiseLevel::SnrDb(_)) && !synthetic {
            return Err(Error::InvalidConfiguration(
                "`snr-db` requires a synthetic signal (no `input`)".into(),
            ));
        }

        let replicates = get("replicates")
            .map(|v| parse_count("replicates", v))
            .transpose()?;
        if replicates == Some(0) {
            return Err(Error::param("replicates", "must be >= 1"));
        }
        if replicates.is_some() && !synthetic {
            return Err(Error::InvalidConfiguration(
                "Monte Carlo oracle columns (`replicates`) require a synthetic signal".into(),
            ));
        }
        if mode == Mode::Consistency && !synthetic {
            return Err(Error::InvalidConfiguration(
                "consistency mode requires a synthetic signal".into(),
            ));
        }

        let p_sweep = match get("p-sweep") {
            Some(list) => list
                .split(',')
                .map(|v| parse_count("p-sweep", v))
                .collect::<Result<Vec<_>>>()?,
            None => match &source {
                Source::Synthetic(spec) => vec![spec.len],
                Source::File(_) => Vec::new(),
            },
        };
        if mode == Mode::Consistency {
            if p_sweep.contains(&0) {
                return Err(Error::param("p-sweep", "every P must be >= 1"));
            }
        } else if map.contains_key("p-sweep") {
            return Err(Error::InvalidConfiguration(
                "`p-sweep` is only used in consistency mode".into(),
            ));
        }

        let schedule = BandwidthSchedule::new(
            get("bandwidth-c")
                .map(|v| parse_real("bandwidth-c", v))
                .transpose()?
                .unwrap_or(6.0),
            get("bandwidth-alpha")
                .map(|v| parse_real("bandwidth-alpha", v))
                .transpose()?
                .unwrap_or(1.0 / 3.0),
        )?;

        let lambda_sigmas = get("lambda-sigma")
            .map(|v| parse_real("lambda-sigma", v))
            .transpose()?
            .unwrap_or(DEFAULT_LAMBDA_SIGMAS);
        if lambda_sigmas < 0.0 {
            return Err(Error::param("lambda-sigma", "must be >= 0"));
        }

        Ok(Self {
            mode,
            source,
            noise,
            lambda_min: get("lambda-min")
                .map(|v| parse_real("lambda-min", v))
                .transpose()?
                .unwrap_or(0.0),
            lambda_max: get("lambda-max")
                .map(|v| parse_real("lambda-max", v))
                .transpose()?,
            grid_points: get("grid-points")
                .map(|v| parse_count("grid-points", v))
                .transpose()?
                .unwrap_or(DEFAULT_GRID_POINTS),
            grid_spacing: get("grid-spacing")
                .map(str::parse)
                .transpose()?
                .unwrap_or(Spacing::Linear),
            schedule,
            seed,
            replicates,
            p_sweep,
            lambda_sigmas,
            output: get("output").map(PathBuf::from),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[(&str, &str)]) -> Result<ExperimentConfig> {
        ExperimentConfig::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn defaults() {
        let c = cfg(&[("mode", "curve"), ("snr-db", "5.65")]).unwrap();
        assert_eq!(c.grid_points, 100);
        assert_eq!(c.lambda_min, 0.0);
        assert_eq!(c.lambda_max, None);
        assert_eq!(c.schedule, BandwidthSchedule::default());
        match c.source {
            Source::Synthetic(spec) => {
                assert_eq!(spec.len, DEFAULT_P);
                assert_eq!(spec.gamma, 1.0);
            }
            _ => panic!("expected synthetic"),
        }
    }

    #[test]
    fn sigma_and_snr_are_exclusive() {
        let err = cfg(&[("mode", "curve"), ("sigma", "1"), ("snr-db", "3")]).unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"));
        assert!(cfg(&[("mode", "curve")]).is_err());
    }

    #[test]
    fn snr_needs_synthetic() {
        let err = cfg(&[("mode", "denoise"), ("input", "y.txt"), ("snr-db", "3")]).unwrap_err();
        assert!(err.to_string().contains("synthetic"));
        assert!(cfg(&[("mode", "consistency"), ("input", "y.txt"), ("sigma", "1")]).is_err());
        assert!(cfg(&[
            ("mode", "curve"),
            ("input", "y.txt"),
            ("sigma", "1"),
            ("replicates", "10")
        ])
        .is_err());
    }

    #[test]
    fn sweep_and_scientific_counts() {
        let c = cfg(&[
            ("mode", "consistency"),
            ("snr-db", "5.65"),
            ("p-sweep", "1e3, 1e4,100000"),
            ("replicates", "200"),
        ])
        .unwrap();
        assert_eq!(c.p_sweep, vec![1000, 10_000, 100_000]);
        assert!(cfg(&[("mode", "curve"), ("sigma", "1"), ("p", "1.5")]).is_err());
    }

    #[test]
    fn unknown_and_bad_values() {
        assert!(cfg(&[("mode", "curve"), ("sigma", "1"), ("colour", "red")]).is_err());
        let err = cfg(&[("mode", "curve"), ("sigma", "abc")]).unwrap_err();
        assert!(err.to_string().contains("sigma"));
        assert!(cfg(&[("mode", "curve"), ("sigma", "-1")]).is_err());
        assert!(cfg(&[("mode", "walk"), ("sigma", "1")]).is_err());
        assert!(cfg(&[
            ("mode", "curve"),
            ("sigma", "1"),
            ("bandwidth-alpha", "1.5")
        ])
        .is_err());
    }

    #[test]
    fn later_pairs_override() {
        let c = cfg(&[
            ("mode", "curve"),
            ("sigma", "1"),
            ("seed", "3"),
            ("seed", "9"),
        ])
        .unwrap();
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn reads_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.cfg");
        std::fs::write(&path, "# fig\nmode = curve\n\nsnr-db=5.65\np=2e4\n").unwrap();
        let c = ExperimentConfig::from_file(&path).unwrap();
        assert_eq!(c.mode, Mode::Curve);
        assert_eq!(c.noise, NoiseLevel::SnrDb(5.65));
        std::fs::write(&path, "mode curve\n").unwrap();
        assert!(ExperimentConfig::from_file(&path).is_err());
    }
}
