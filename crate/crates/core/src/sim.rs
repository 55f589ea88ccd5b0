//! Monte Carlo decoding campaigns: all-zero transmission over CD(m, ε), SPA
//! decoding, per-trial records and block-error summaries.
//!
//! Trial `t` at grid point `i` draws from stream `(i << 32) | t` of the master
//! seed (see [`crate::mc::trial_rng`]).

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelSpec;
use crate::code::ParityCheckCode;
use crate::decoder::{decode_observed, DecodeStatus, DecoderConfig};
use crate::error::{Error, Result};
use crate::mc::trial_rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub eps_index: usize,
    pub trial: usize,
    pub epsilon: f64,
    pub status: DecodeStatus,
    pub iterations: usize,
    pub max_final_dim: usize,
    /// Messages at any iteration that did not contain the transmitted zero symbol.
    pub truth_violations: usize,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl TrialRecord {
    pub fn is_error(&self) -> bool {
        self.status != DecodeStatus::Decoded
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointSummary {
    pub epsilon: f64,
    pub noise_dim: usize,
    pub trials: usize,
    pub errors: usize,
    pub block_error_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

pub fn stream_index(eps_index: usize, trial: usize) -> u64 {
    ((eps_index as u64) << 32) | trial as u64
}

/// Wilson score interval at `z` standard deviations. With no trials the interval is `[0, 1]`.
pub fn wilson_interval(errors: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

pub const WILSON_Z95: f64 = 1.959_963_984_540_054;

/// Summarizes the records for one grid point.
pub fn summarize(epsilon: f64, noise_dim: usize, records: &[TrialRecord]) -> PointSummary {
    let trials = records.len();
    let errors = records.iter().filter(|r| r.is_error()).count();
    let (wilson_low, wilson_high) = wilson_interval(errors, trials, WILSON_Z95);
    PointSummary {
        epsilon,
        noise_dim,
        trials,
        errors,
        block_error_rate: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
        wilson_low,
        wilson_high,
    }
}

/// One decoding trial of the all-zero codeword.
pub fn run_trial(
    code: &ParityCheckCode,
    channel: &ChannelSpec,
    cfg: &DecoderConfig,
    seed: u64,
    eps_index: usize,
    trial: usize,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let mut rng = trial_rng(seed, stream_index(eps_index, trial));
    let zero = vec![0; code.m()];
    let word = vec![zero.clone(); code.n_vars()];
    let outputs = channel.transmit_word(&word, &mut rng)?;
    let mut violations = 0;
    let result = decode_observed(code, &outputs, cfg, |sweep| {
        let all = sweep
            .var_to_check
            .iter()
            .chain(sweep.check_to_var)
            .chain(sweep.posteriors);
        violations += all.filter(|a| !a.contains(&zero).unwrap_or(false)).count();
    })?;
    Ok(TrialRecord {
        eps_index,
        trial,
        epsilon: channel.epsilon(),
        status: result.status,
        iterations: result.iterations,
        max_final_dim: result.max_final_dim(),
        truth_violations: violations,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug)]
pub struct Campaign {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<PointSummary>,
}

/// Runs `trials` decoding trials at every noise rate of `grid`, in parallel over trials.
pub fn simulate(
    code: &ParityCheckCode,
    grid: &[f64],
    trials: usize,
    cfg: &DecoderConfig,
    seed: u64,
) -> Result<Campaign> {
    cfg.validate()?;
    if trials > u32::MAX as usize || grid.len() > u32::MAX as usize {
        return Err(Error::Parameter("too many trials or grid points".into()));
    }
    let channels = grid
        .iter()
        .map(|&eps| ChannelSpec::new(code.field(), code.m(), eps))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::with_capacity(grid.len() * trials);
    let mut summaries = Vec::with_capacity(grid.len());
    for (i, channel) in channels.iter().enumerate() {
        let point: Vec<TrialRecord> = (0..trials)
            .into_par_iter()
            .map(|t| run_trial(code, channel, cfg, seed, i, t))
            .collect::<Result<_>>()?;
        summaries.push(summarize(channel.epsilon(), channel.noise_dim(), &point));
        records.extend(point);
    }
    Ok(Campaign { records, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_regular;
    use crate::field::Field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_code() -> ParityCheckCode {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        build_regular(3, 6, 4, 6, Field::new(2).unwrap(), &mut rng).unwrap()
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 0, WILSON_Z95);
        assert_eq!((lo, hi), (0.0, 1.0));
        let (lo, hi) = wilson_interval(0, 100, WILSON_Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_995).abs() < 1e-5, "{hi}");
        let (lo, hi) = wilson_interval(50, 100, WILSON_Z95);
        assert!((lo - 0.403_831).abs() < 1e-5 && (hi - 0.596_169).abs() < 1e-5);
    }

    #[test]
    fn zero_trials_give_empty_campaign() {
        let c = simulate(&small_code(), &[0.1, 0.3], 0, &DecoderConfig::default(), 1).unwrap();
        assert!(c.records.is_empty());
        assert_eq!(c.summaries.len(), 2);
        assert_eq!(c.summaries[0].trials, 0);
        assert_eq!(c.summaries[0].block_error_rate, 0.0);
    }

    #[test]
    fn campaign_is_reproducible() {
        let code = small_code();
        let cfg = DecoderConfig::default();
        let strip = |c: Campaign| {
            c.records
                .into_iter()
                .map(|mut r| {
                    r.wall_time_s = 0.0;
                    r
                })
                .collect::<Vec<_>>()
        };
        let a = strip(simulate(&code, &[0.2, 0.5], 20, &cfg, 9).unwrap());
        let b = strip(simulate(&code, &[0.2, 0.5], 20, &cfg, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn summary_matches_records() {
        let code = small_code();
        let c = simulate(&code, &[0.0, 0.34, 0.67], 30, &DecoderConfig::default(), 3).unwrap();
        for (i, s) in c.summaries.iter().enumerate() {
            let errors = c.records.iter().filter(|r| r.eps_index == i && r.is_error()).count();
            assert_eq!(s.errors, errors);
            assert_eq!(s.block_error_rate, errors as f64 / 30.0);
        }
        assert_eq!(c.summaries[0].errors, 0);
        assert!(c.records.iter().all(|r| r.truth_violations == 0));
        assert!(c.records.iter().all(|r| r.status != DecodeStatus::Inconsistent));
    }

    #[test]
    fn bad_rate_rejected() {
        assert!(simulate(&small_code(), &[1.2], 1, &DecoderConfig::default(), 0).is_err());
    }
}
