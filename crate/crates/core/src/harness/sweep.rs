use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fading::{draw_gains, FadingConfig};
use crate::error::{Error, Result};
use crate::joint::{baseline, Strategy, StrategySettings};
use crate::model::{ChannelGains, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    GammaF,
    GammaH,
    GammaG,
    PMax,
}

impl SweepVar {
    pub fn tag(self) -> &'static str {
        match self {
            SweepVar::GammaF => "gamma_f",
            SweepVar::GammaH => "gamma_h",
            SweepVar::GammaG => "gamma_g",
            SweepVar::PMax => "p_max",
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [SweepVar::GammaF, SweepVar::GammaH, SweepVar::GammaG, SweepVar::PMax]
            .into_iter()
            .find(|v| v.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep variable `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub var: SweepVar,
    pub values: Vec<f64>,
}

impl Sweep {
    /// Fading and system parameters at one sweep value.
    pub fn apply(&self, fading: &FadingConfig, params: &SystemParams, value: f64) -> (FadingConfig, SystemParams) {
        let (mut fading, mut params) = (*fading, *params);
        match self.var {
            SweepVar::GammaF => fading.gamma_f_db = value,
            SweepVar::GammaH => fading.gamma_h_db = [value; 2],
            SweepVar::GammaG => fading.gamma_g_db = [value; 2],
            SweepVar::PMax => params.p_max = value,
        }
        (fading, params)
    }
}

/// Outcome of one strategy on one channel realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub strategy: Strategy,
    pub p_r: f64,
    pub c_x: f64,
    pub r_total: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub gains: ChannelGains,
    /// One entry per strategy, in the requested order.
    pub outcomes: Vec<StrategyOutcome>,
}

/// Per-strategy aggregate at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub strategy: Strategy,
    pub sweep_var: SweepVar,
    pub sweep_value: f64,
    pub mean_rate: f64,
    pub std_err: f64,
    pub mean_pr_frac: f64,
    pub mean_cx: f64,
    /// Only reported for coordinate descent.
    pub mean_iters: Option<f64>,
    pub realizations: usize,
    pub seed: u64,
}

/// Runs every strategy on the same `realizations` channel draws.
///
/// Trials may run on any number of workers; results come back in trial order
/// and each trial's gains depend only on `(seed, trial)`.
pub fn simulate_point(
    fading: &FadingConfig,
    params: &SystemParams,
    strategies: &[Strategy],
    settings: &StrategySettings,
) -> Result<Vec<TrialRecord>> {
    fading.validate()?;
    params.validate()?;
    (0..fading.realizations as u64)
        .into_par_iter()
        .map(|trial| {
            let gains = draw_gains(fading, trial, params.sigma_n2);
            let outcomes = strategies
                .iter()
                .map(|&strategy| {
                    let r = baseline(params, &gains, strategy, settings)?;
                    Ok(StrategyOutcome {
                        strategy,
                        p_r: r.design.p_r,
                        c_x: r.design.c_x,
                        r_total: r.rates.r_total,
                        iterations: r.iterations,
                        converged: r.converged,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TrialRecord { trial, gains, outcomes })
        })
        .collect()
}

/// Recursive pairwise sum; fixed association order for a given length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Mean and standard error (`sample std / √n`, zero for a single sample).
pub fn mean_and_std_err(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn aggregate(
    records: &[TrialRecord],
    strategies: &[Strategy],
    params: &SystemParams,
    sweep_var: SweepVar,
    sweep_value: f64,
    seed: u64,
) -> Vec<ScenarioResult> {
    strategies
        .iter()
        .enumerate()
        .map(|(k, &strategy)| {
            let column = |f: &dyn Fn(&StrategyOutcome) -> f64| -> Vec<f64> {
                records.iter().map(|r| f(&r.outcomes[k])).collect()
            };
            let (mean_rate, std_err) = mean_and_std_err(&column(&|o| o.r_total));
            let n = records.len() as f64;
            ScenarioResult {
                strategy,
                sweep_var,
                sweep_value,
                mean_rate,
                std_err,
                mean_pr_frac: pairwise_sum(&column(&|o| o.p_r / params.p_max)) / n,
                mean_cx: pairwise_sum(&column(&|o| o.c_x)) / n,
                mean_iters: strategy
                    .is_coordinate_descent()
                    .then(|| pairwise_sum(&column(&|o| o.iterations as f64)) / n),
                realizations: records.len(),
                seed,
            }
        })
        .collect()
}

pub fn run_sweep(
    fading: &FadingConfig,
    params: &SystemParams,
    strategies: &[Strategy],
    sweep: &Sweep,
    settings: &StrategySettings,
) -> Result<Vec<ScenarioResult>> {
    if strategies.is_empty() {
        return Err(Error::Config("at least one strategy is required".into()));
    }
    if sweep.values.is_empty() {
        return Err(Error::Config("the sweep needs at least one value".into()));
    }
    let mut out = Vec::with_capacity(strategies.len() * sweep.values.len());
    for &value in &sweep.values {
        let (fading_at, params_at) = sweep.apply(fading, params, value);
        let records = simulate_point(&fading_at, &params_at, strategies, settings)?;
        out.extend(aggregate(&records, strategies, &params_at, sweep.var, value, fading.seed));
    }
    Ok(out)
}
