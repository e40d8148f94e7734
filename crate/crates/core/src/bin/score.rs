use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use score_core::cli;
use score_core::config::{read_pairs, ExperimentConfig};

/// Hard-threshold denoising with SCORE-based threshold selection.
///
/// Every option may also be given as `key=value` in a file passed with
/// `--config`; command-line flags take precedence.
#[derive(Debug, Parser)]
#[command(name = "score", version)]
struct Args {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// denoise | curve | consistency
    #[arg(long)]
    mode: Option<String>,
    /// Observation file, one number per line (`#` comments allowed).
    #[arg(long)]
    input: Option<String>,
    /// Length of the synthetic signal.
    #[arg(long)]
    p: Option<String>,
    /// Power-law decay exponent of the synthetic signal.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
    /// alternating | random
    #[arg(long)]
    signs: Option<String>,
    /// Noise standard deviation.
    #[arg(long)]
    sigma: Option<String>,
    /// Target SNR in dB, 10*log10(|x0|^2 / (P sigma^2)).
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long = "lambda-min")]
    lambda_min: Option<String>,
    /// Defaults to 5 sigma.
    #[arg(long = "lambda-max")]
    lambda_max: Option<String>,
    #[arg(long = "grid-points")]
    grid_points: Option<String>,
    /// linear | log
    #[arg(long = "grid-spacing")]
    grid_spacing: Option<String>,
    /// Bandwidth multiplier c in h = c sigma / P^alpha.
    #[arg(long = "bandwidth-c")]
    bandwidth_c: Option<String>,
    /// Bandwidth exponent alpha in (0, 1).
    #[arg(long = "bandwidth-alpha")]
    bandwidth_alpha: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Monte Carlo replicates (oracle columns / consistency sweep).
    #[arg(long)]
    replicates: Option<String>,
    /// Comma-separated signal lengths for consistency mode.
    #[arg(long = "p-sweep")]
    p_sweep: Option<String>,
    /// Consistency-mode threshold in units of sigma.
    #[arg(long = "lambda-sigma")]
    lambda_sigma: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<String>,
}

impl Args {
    fn flag_pairs(&self) -> Vec<(&'static str, String)> {
        [
            ("mode", &self.mode),
            ("input", &self.input),
            ("p", &self.p),
            ("gamma", &self.gamma),
            ("amplitude", &self.amplitude),
            ("signs", &self.signs),
            ("sigma", &self.sigma),
            ("snr-db", &self.snr_db),
            ("lambda-min", &self.lambda_min),
            ("lambda-max", &self.lambda_max),
            ("grid-points", &self.grid_points),
            ("grid-spacing", &self.grid_spacing),
            ("bandwidth-c", &self.bandwidth_c),
            ("bandwidth-alpha", &self.bandwidth_alpha),
            ("seed", &self.seed),
            ("replicates", &self.replicates),
            ("p-sweep", &self.p_sweep),
            ("lambda-sigma", &self.lambda_sigma),
            ("output", &self.output),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect()
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| {
        let mut pairs: Vec<(String, String)> = match &args.config {
            Some(path) => read_pairs(path)?,
            None => Vec::new(),
        };
        pairs.extend(
            args.flag_pairs()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v)),
        );
        let cfg = ExperimentConfig::from_pairs(pairs)?;
        cli::run(&cfg)
    })();
    match result {
        Ok(out) => {
            eprint!("{}", out.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
