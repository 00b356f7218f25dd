//! Joint power/circularity design: alternating optimization, exhaustive grid
//! search, and the reference strategies used for comparison.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::copt;
use crate::error::{Error, Result};
use crate::model::{self, ChannelGains, RateBreakdown, SignalDesign, SystemParams};
use crate::popt::{self, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdConfig {
    /// Stop once the largest parameter change of an iteration is at most this.
    pub eps_max: f64,
    pub max_iters: usize,
    pub init_p_r: f64,
    pub init_c_x: f64,
    /// Compare `|Δp_r|` as-is instead of `|Δp_r| / p_max`.
    pub raw_power_error: bool,
    pub solver: SolverOptions,
}

impl CdConfig {
    pub const DEFAULT_EPS_MAX: f64 = 1e-4;
    pub const DEFAULT_MAX_ITERS: usize = 100;

    /// Start from the full budget and the given circularity coefficient.
    pub fn from_budget(p_max: f64, init_c_x: f64) -> Self {
        Self {
            eps_max: Self::DEFAULT_EPS_MAX,
            max_iters: Self::DEFAULT_MAX_ITERS,
            init_p_r: p_max,
            init_c_x,
            raw_power_error: false,
            solver: SolverOptions::default(),
        }
    }

    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        if !(self.eps_max.is_finite() && self.eps_max > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps_max",
                value: self.eps_max,
                reason: "must be finite and strictly positive",
            });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iters",
                value: 0.0,
                reason: "at least one iteration is required",
            });
        }
        SignalDesign::new(self.init_p_r, self.init_c_x).validate(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// 0 for the starting point.
    pub iteration: usize,
    pub p_r: f64,
    pub c_x: f64,
    pub r_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerResult {
    pub design: SignalDesign,
    pub rates: RateBreakdown,
    pub iterations: usize,
    /// Start point, then one entry after each half-step.
    pub trajectory: Vec<TrajectoryPoint>,
    pub converged: bool,
}

impl OptimizerResult {
    fn fixed(params: &SystemParams, gains: &ChannelGains, design: SignalDesign) -> Self {
        Self {
            design,
            rates: model::total_rate(params, gains, design),
            iterations: 0,
            trajectory: Vec::new(),
            converged: true,
        }
    }
}

/// Alternates the power solver at the current circularity with the
/// circularity solver at the fresh power until neither moves by more than
/// `eps_max`.
pub fn coordinate_descent(params: &SystemParams, gains: &ChannelGains, config: &CdConfig) -> Result<OptimizerResult> {
    config.validate(params)?;
    let rate = |p: f64, c: f64| model::total_rate_value(params, gains, SignalDesign::new(p, c));
    let scale = if config.raw_power_error { 1.0 } else { params.p_max };

    let (mut p, mut c) = (config.init_p_r, config.init_c_x);
    let mut trajectory = vec![TrajectoryPoint {
        iteration: 0,
        p_r: p,
        c_x: c,
        r_total: rate(p, c),
    }];
    let mut eps = f64::INFINITY;
    let mut iterations = 0;
    while eps > config.eps_max && iterations < config.max_iters {
        iterations += 1;
        let p_hat = popt::optimize_power_with(params, gains, c, &config.solver).p_r;
        trajectory.push(TrajectoryPoint {
            iteration: iterations,
            p_r: p_hat,
            c_x: c,
            r_total: rate(p_hat, c),
        });
        let c_hat = copt::optimize_circularity_with(params, gains, p_hat, &config.solver).c_x;
        trajectory.push(TrajectoryPoint {
            iteration: iterations,
            p_r: p_hat,
            c_x: c_hat,
            r_total: rate(p_hat, c_hat),
        });
        eps = (c_hat - c).abs().max((p_hat - p).abs() / scale);
        p = p_hat;
        c = c_hat;
    }
    let converged = eps <= config.eps_max;
    if !converged {
        let best = trajectory
            .iter()
            .fold(trajectory[0], |b, t| if t.r_total > b.r_total { *t } else { b });
        p = best.p_r;
        c = best.c_x;
    }
    let design = SignalDesign::new(p, c);
    Ok(OptimizerResult {
        design,
        rates: model::total_rate(params, gains, design),
        iterations,
        trajectory,
        converged,
    })
}

/// Exhaustive search over `{p_max k / n_p}_{k=1..n_p} × {m / n_c}_{m=0..n_c}`.
/// Ties go to the smaller power, then the smaller circularity.
pub fn grid_search(params: &SystemParams, gains: &ChannelGains, n_p: usize, n_c: usize) -> Result<OptimizerResult> {
    if n_p < 2 || n_c < 2 {
        return Err(Error::InvalidParameter {
            name: "grid",
            value: n_p.min(n_c) as f64,
            reason: "grid search needs at least two points per axis",
        });
    }
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for k in 1..=n_p {
        let p = params.p_max * k as f64 / n_p as f64;
        for m in 0..=n_c {
            let c = m as f64 / n_c as f64;
            let r = model::total_rate_value(params, gains, SignalDesign::new(p, c));
            if r > best.0 {
                best = (r, p, c);
            }
        }
    }
    Ok(OptimizerResult::fixed(params, gains, SignalDesign::new(best.1, best.2)))
}

/// Reference strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Proper signal at full power.
    ProperMpa,
    /// Proper signal at the optimal power.
    ProperOpa,
    /// Full power with the optimal circularity coefficient.
    ImproperMpa,
    /// Coordinate descent from `(p_max, 0)`.
    CdInit0,
    /// Coordinate descent from `(p_max, 1)`.
    CdInit1,
    /// Exhaustive grid search.
    Gs,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::ProperMpa,
        Strategy::ProperOpa,
        Strategy::ImproperMpa,
        Strategy::CdInit0,
        Strategy::CdInit1,
        Strategy::Gs,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Strategy::ProperMpa => "proper_mpa",
            Strategy::ProperOpa => "proper_opa",
            Strategy::ImproperMpa => "improper_mpa",
            Strategy::CdInit0 => "cd_init0",
            Strategy::CdInit1 => "cd_init1",
            Strategy::Gs => "gs",
        }
    }

    pub fn is_coordinate_descent(self) -> bool {
        matches!(self, Strategy::CdInit0 | Strategy::CdInit1)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.tag() == s.trim())
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}

/// Settings shared by all strategies of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategySettings {
    pub eps_max: f64,
    pub max_iters: usize,
    pub raw_power_error: bool,
    pub grid_p: usize,
    pub grid_c: usize,
    pub solver: SolverOptions,
}

impl Default for StrategySettings {
    fn default() -> Self {
        Self {
            eps_max: CdConfig::DEFAULT_EPS_MAX,
            max_iters: CdConfig::DEFAULT_MAX_ITERS,
            raw_power_error: false,
            grid_p: 1000,
            grid_c: 1000,
            solver: SolverOptions::default(),
        }
    }
}

impl StrategySettings {
    fn cd_config(&self, p_max: f64, init_c_x: f64) -> CdConfig {
        CdConfig {
            eps_max: self.eps_max,
            max_iters: self.max_iters,
            init_p_r: p_max,
            init_c_x,
            raw_power_error: self.raw_power_error,
            solver: self.solver,
        }
    }
}

pub fn baseline(
    params: &SystemParams,
    gains: &ChannelGains,
    strategy: Strategy,
    settings: &StrategySettings,
) -> Result<OptimizerResult> {
    let p_max = params.p_max;
    match strategy {
        Strategy::ProperMpa => Ok(OptimizerResult::fixed(params, gains, SignalDesign::proper(p_max))),
        Strategy::ProperOpa => {
            let p = popt::optimize_power_with(params, gains, 0.0, &settings.solver).p_r;
            Ok(OptimizerResult::fixed(params, gains, SignalDesign::proper(p)))
        }
        Strategy::ImproperMpa => {
            let c = copt::optimize_circularity_with(params, gains, p_max, &settings.solver).c_x;
            Ok(OptimizerResult::fixed(params, gains, SignalDesign::new(p_max, c)))
        }
        Strategy::CdInit0 => coordinate_descent(params, gains, &settings.cd_config(p_max, 0.0)),
        Strategy::CdInit1 => coordinate_descent(params, gains, &settings.cd_config(p_max, 1.0)),
        Strategy::Gs => grid_search(params, gains, settings.grid_p, settings.grid_c),
    }
}

/// [`baseline`] keyed by its text tag.
pub fn baseline_by_tag(
    params: &SystemParams,
    gains: &ChannelGains,
    tag: &str,
    settings: &StrategySettings,
) -> Result<OptimizerResult> {
    baseline(params, gains, tag.parse()?, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(p_max: f64) -> SystemParams {
        SystemParams::new(1.0, p_max, 1.0).unwrap()
    }

    #[test]
    fn no_interference_converges_to_full_power_proper() {
        let params = unit(1.0);
        let gains = ChannelGains::new([4.0, 5.0], [1.0, 2.0], 0.0).unwrap();
        let res = coordinate_descent(&params, &gains, &CdConfig::from_budget(1.0, 1.0)).unwrap();
        assert!(res.converged);
        assert!(res.iterations <= 2);
        assert_eq!((res.design.p_r, res.design.c_x), (1.0, 0.0));
    }

    #[test]
    fn grid_search_without_interference() {
        let params = unit(1.0);
        let gains = ChannelGains::new([4.0, 5.0], [1.0, 2.0], 0.0).unwrap();
        let res = grid_search(&params, &gains, 100, 100).unwrap();
        assert_eq!((res.design.p_r, res.design.c_x), (1.0, 0.0));
        assert!(grid_search(&params, &gains, 1, 10).is_err());
    }

    #[test]
    fn grid_search_weak_interference_gains_little_over_proper() {
        let params = unit(1.0);
        let gains = ChannelGains::symmetric(10.0, 30.0, 1e-3).unwrap();
        let res = grid_search(&params, &gains, 100, 100).unwrap();
        let proper = model::total_rate_value(&params, &gains, SignalDesign::proper(1.0));
        assert!(res.rates.r_total >= proper);
        assert!(res.rates.r_total - proper < 1e-3);
    }

    #[test]
    fn strategy_tags_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.tag().parse::<Strategy>().unwrap(), s);
        }
        assert!(matches!("foo".parse::<Strategy>(), Err(Error::UnknownStrategy(_))));
        let params = unit(1.0);
        let gains = ChannelGains::symmetric(1.0, 1.0, 1.0).unwrap();
        assert!(baseline_by_tag(&params, &gains, "mpa", &StrategySettings::default()).is_err());
    }

    #[test]
    fn fixed_baselines() {
        let params = unit(2.0);
        let gains = ChannelGains::symmetric(3.0, 2.0, 5.0).unwrap();
        let s = StrategySettings::default();
        let mpa = baseline(&params, &gains, Strategy::ProperMpa, &s).unwrap();
        assert_eq!((mpa.design.p_r, mpa.design.c_x), (2.0, 0.0));
        let no_iri = ChannelGains::symmetric(3.0, 2.0, 0.0).unwrap();
        let imp = baseline(&params, &no_iri, Strategy::ImproperMpa, &s).unwrap();
        assert_eq!((imp.design.p_r, imp.design.c_x), (2.0, 0.0));
    }

    #[test]
    fn first_step_from_proper_start_is_proper_opa() {
        let params = unit(1.0);
        let gains = ChannelGains::new([10.0, 7.0], [30.0, 20.0], 100.0).unwrap();
        let s = StrategySettings::default();
        let cd = baseline(&params, &gains, Strategy::CdInit0, &s).unwrap();
        let opa = baseline(&params, &gains, Strategy::ProperOpa, &s).unwrap();
        assert_eq!(cd.trajectory[1].p_r, opa.design.p_r);
        assert_eq!(cd.trajectory[1].c_x, 0.0);
        assert!(cd.rates.r_total >= opa.rates.r_total);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let params = unit(1.0);
        let gains = ChannelGains::symmetric(1.0, 1.0, 1.0).unwrap();
        let mut cfg = CdConfig::from_budget(1.0, 0.0);
        cfg.eps_max = 0.0;
        assert!(coordinate_descent(&params, &gains, &cfg).is_err());
        let mut cfg = CdConfig::from_budget(1.0, 0.0);
        cfg.init_p_r = 2.0;
        assert!(coordinate_descent(&params, &gains, &cfg).is_err());
    }

    #[test]
    fn deterministic() {
        let params = unit(1.0);
        let gains = ChannelGains::new([10.0, 7.0], [30.0, 20.0], 100.0).unwrap();
        let cfg = CdConfig::from_budget(1.0, 1.0);
        let a = coordinate_descent(&params, &gains, &cfg).unwrap();
        let b = coordinate_descent(&params, &gains, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
