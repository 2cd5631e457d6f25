//! Counting-statistics simulation of the six-measurement protocol.
//!
//! Each trial draws Poisson counts `N ~ Poisson(rate · σ_true)` for the six
//! required channels, estimates `σ = N / rate`, and evaluates `F`. The rate is
//! either common to all channels or chosen per channel so that every channel
//! expects the same number of counts. Trial `t` uses its own ChaCha20 stream
//! (`seed`, stream `t`), so results do not depend on the number of worker
//! threads.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interference::{cosine_triple, f_statistic, Channel, CrossSectionSet};

/// Quantile levels reported in [`McSummary::quantiles`].
pub const QUANTILE_LEVELS: [f64; 5] = [0.025, 0.16, 0.5, 0.84, 0.975];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Exposure {
    /// Expected counts per barn, the same for every channel.
    CountsPerBarn(f64),
    /// Expected counts in each channel; channels with `σ_true = 0` record none.
    CountsPerChannel(f64),
}

impl Exposure {
    fn value(self) -> f64 {
        match self {
            Exposure::CountsPerBarn(v) | Exposure::CountsPerChannel(v) => v,
        }
    }

    /// Counts per barn for a channel with true cross section `sigma`.
    fn rate(self, sigma: f64) -> f64 {
        match self {
            Exposure::CountsPerBarn(r) => r,
            Exposure::CountsPerChannel(n) => n / sigma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McParams {
    pub exposure: Exposure,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub true_f: f64,
    pub trials: usize,
    pub used: usize,
    /// Trials with a zero-count single channel, for which `F` is undefined.
    pub excluded: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
    /// `(level, value)` at [`QUANTILE_LEVELS`].
    pub quantiles: Vec<(f64, f64)>,
    pub fraction_above_one: f64,
}

fn draw(lambda: f64, rng: &mut ChaCha20Rng) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let dist = Poisson::new(lambda)
        .map_err(|e| Error::InvalidInput(format!("Poisson mean {lambda}: {e}")))?;
    Ok(dist.sample(rng))
}

/// `F` for one trial, or `None` when a single channel recorded no counts.
pub fn simulate_trial(
    truth: &CrossSectionSet,
    params: &McParams,
    trial: u64,
) -> Result<Option<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    rng.set_stream(trial);
    let mut est = CrossSectionSet::default();
    for ch in Channel::REQUIRED {
        let sigma = truth.get(ch).expect("required channel");
        if sigma == 0.0 {
            continue;
        }
        let rate = params.exposure.rate(sigma);
        est.set(ch, draw(rate * sigma, &mut rng)? / rate);
    }
    if est.sigma1 == 0.0 || est.sigma2 == 0.0 || est.sigma3 == 0.0 {
        return Ok(None);
    }
    Ok(Some(f_statistic(&cosine_triple(&est)?)))
}

/// Linear interpolation between order statistics of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn run_monte_carlo(truth: &CrossSectionSet, params: &McParams) -> Result<McSummary> {
    truth.validate()?;
    let exposure = params.exposure.value();
    if !(exposure.is_finite() && exposure > 0.0) {
        return Err(Error::InvalidInput(format!(
            "expected counts must be positive, got {exposure}"
        )));
    }
    if params.trials == 0 {
        return Err(Error::InvalidInput("at least one trial is required".into()));
    }
    let true_f = f_statistic(&cosine_triple(truth)?);

    let outcomes: Vec<Option<f64>> = (0..params.trials as u64)
        .into_par_iter()
        .map(|t| simulate_trial(truth, params, t))
        .collect::<Result<_>>()?;

    let mut values: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let used = values.len();
    let excluded = params.trials - used;
    if used == 0 {
        return Err(Error::DegenerateScatterer(format!(
            "all {} trials recorded zero counts in a single channel",
            params.trials
        )));
    }
    let n = used as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if used > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std_dev = var.sqrt();
    let above = values.iter().filter(|v| **v > 1.0).count();
    values.sort_by(f64::total_cmp);
    Ok(McSummary {
        true_f,
        trials: params.trials,
        used,
        excluded,
        mean,
        std_dev,
        std_error: std_dev / n.sqrt(),
        quantiles: QUANTILE_LEVELS
            .iter()
            .map(|p| (*p, quantile(&values, *p)))
            .collect(),
        fraction_above_one: above as f64 / n,
    })
}
