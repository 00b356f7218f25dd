//! Run configuration: a flat TOML file whose keys mirror the CLI flags, with
//! flags taking precedence.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::fading::FadingConfig;
use super::report::ReportFormat;
use super::sweep::{Sweep, SweepVar};
use crate::error::{Error, Result};
use crate::joint::{CdConfig, Strategy, StrategySettings};
use crate::model::SystemParams;
use crate::popt::SolverOptions;

/// A number, a list of numbers, or a comma-separated string of numbers.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NumberList {
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

impl NumberList {
    pub fn values(&self, key: &str) -> Result<Vec<f64>> {
        let v = match self {
            NumberList::One(x) => vec![*x],
            NumberList::Many(xs) => xs.clone(),
            NumberList::Text(s) => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{t}` as a number")))
                })
                .collect::<Result<_>>()?,
        };
        if v.is_empty() {
            return Err(Error::Config(format!("`{key}` is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!("`{key}` must be finite")));
        }
        Ok(v)
    }
}

/// A list of words or a comma-separated string.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TextList {
    Many(Vec<String>),
    Text(String),
}

impl TextList {
    pub fn items(&self) -> Vec<String> {
        match self {
            TextList::Many(xs) => xs.iter().map(|s| s.trim().to_string()).collect(),
            TextList::Text(s) => s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect(),
        }
    }
}

/// Partially specified settings, from a file or from command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverlay {
    pub gamma_h: Option<NumberList>,
    pub gamma_g: Option<NumberList>,
    pub gamma_f: Option<NumberList>,
    pub p_s: Option<f64>,
    pub p_max: Option<NumberList>,
    pub noise_var: Option<f64>,
    pub realizations: Option<usize>,
    pub seed: Option<u64>,
    pub strategies: Option<TextList>,
    pub eps_max: Option<f64>,
    pub max_iters: Option<usize>,
    pub raw_power_error: Option<bool>,
    /// `<n_p>x<n_c>`
    pub grid: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<TextList>,
    pub threads: Option<usize>,
}

impl ConfigOverlay {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        Self::from_toml_str(&text)
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: ConfigOverlay) -> ConfigOverlay {
        ConfigOverlay {
            gamma_h: self.gamma_h.or(base.gamma_h),
            gamma_g: self.gamma_g.or(base.gamma_g),
            gamma_f: self.gamma_f.or(base.gamma_f),
            p_s: self.p_s.or(base.p_s),
            p_max: self.p_max.or(base.p_max),
            noise_var: self.noise_var.or(base.noise_var),
            realizations: self.realizations.or(base.realizations),
            seed: self.seed.or(base.seed),
            strategies: self.strategies.or(base.strategies),
            eps_max: self.eps_max.or(base.eps_max),
            max_iters: self.max_iters.or(base.max_iters),
            raw_power_error: self.raw_power_error.or(base.raw_power_error),
            grid: self.grid.or(base.grid),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            threads: self.threads.or(base.threads),
        }
    }
}

/// Fully resolved run settings; embedded verbatim in the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub gamma_h_db: f64,
    pub gamma_g_db: f64,
    pub gamma_f_db: f64,
    pub p_s: f64,
    pub p_max: f64,
    pub noise_var: f64,
    pub realizations: usize,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    pub eps_max: f64,
    pub max_iters: usize,
    pub raw_power_error: bool,
    pub grid_p: usize,
    pub grid_c: usize,
    pub sweep: Sweep,
    pub out: PathBuf,
    pub formats: Vec<ReportFormat>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub const DEFAULT_SEED: u64 = 1;

    /// 10 / 15 / 20 dB symmetric links, `p_s = p_max = σ² = 1`, 10 000
    /// realizations, `eps_max = 1e-4`, all six strategies.
    pub fn reference() -> Self {
        Self {
            gamma_h_db: 10.0,
            gamma_g_db: 15.0,
            gamma_f_db: 20.0,
            p_s: 1.0,
            p_max: 1.0,
            noise_var: 1.0,
            realizations: 10_000,
            seed: Self::DEFAULT_SEED,
            strategies: Strategy::ALL.to_vec(),
            eps_max: CdConfig::DEFAULT_EPS_MAX,
            max_iters: CdConfig::DEFAULT_MAX_ITERS,
            raw_power_error: false,
            grid_p: 1000,
            grid_c: 1000,
            sweep: Sweep {
                var: SweepVar::GammaF,
                values: vec![20.0],
            },
            out: PathBuf::from("results"),
            formats: vec![ReportFormat::Csv, ReportFormat::Json],
            threads: None,
        }
    }

    /// Applies `overlay` on top of [`RunConfig::reference`]. At most one of
    /// `gamma_h`, `gamma_g`, `gamma_f`, `p_max` may list several values; that
    /// key becomes the sweep variable (`gamma_f` otherwise).
    pub fn resolve(overlay: ConfigOverlay) -> Result<Self> {
        let mut cfg = Self::reference();
        let mut sweep: Option<Sweep> = None;
        let mut take = |key: &str, var: SweepVar, list: &Option<NumberList>, slot: &mut f64| -> Result<()> {
            if let Some(list) = list {
                let values = list.values(key)?;
                *slot = values[0];
                if values.len() > 1 {
                    if let Some(prev) = &sweep {
                        return Err(Error::Config(format!(
                            "only one sweep variable is allowed, got `{}` and `{key}`",
                            prev.var
                        )));
                    }
                    sweep = Some(Sweep { var, values });
                }
            }
            Ok(())
        };
        take("gamma_h", SweepVar::GammaH, &overlay.gamma_h, &mut cfg.gamma_h_db)?;
        take("gamma_g", SweepVar::GammaG, &overlay.gamma_g, &mut cfg.gamma_g_db)?;
        take("gamma_f", SweepVar::GammaF, &overlay.gamma_f, &mut cfg.gamma_f_db)?;
        take("p_max", SweepVar::PMax, &overlay.p_max, &mut cfg.p_max)?;
        cfg.sweep = sweep.unwrap_or(Sweep {
            var: SweepVar::GammaF,
            values: vec![cfg.gamma_f_db],
        });

        if let Some(v) = overlay.p_s {
            cfg.p_s = v;
        }
        if let Some(v) = overlay.noise_var {
            cfg.noise_var = v;
        }
        if let Some(v) = overlay.realizations {
            cfg.realizations = v;
        }
        if let Some(v) = overlay.seed {
            cfg.seed = v;
        }
        if let Some(list) = &overlay.strategies {
            cfg.strategies = list
                .items()
                .iter()
                .map(|s| s.parse::<Strategy>().map_err(|e| Error::Config(e.to_string())))
                .collect::<Result<_>>()?;
        }
        if let Some(v) = overlay.eps_max {
            cfg.eps_max = v;
        }
        if let Some(v) = overlay.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = overlay.raw_power_error {
            cfg.raw_power_error = v;
        }
        if let Some(g) = &overlay.grid {
            (cfg.grid_p, cfg.grid_c) = parse_grid(g)?;
        }
        if let Some(v) = overlay.out {
            cfg.out = v;
        }
        if let Some(list) = &overlay.format {
            cfg.formats = list.items().iter().map(|s| s.parse()).collect::<Result<_>>()?;
        }
        cfg.threads = overlay.threads.or(cfg.threads);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        self.params().validate().map_err(cfg_err)?;
        for v in &self.sweep.values {
            let (_, params) = self.sweep.apply(&self.fading(), &self.params(), *v);
            params.validate().map_err(cfg_err)?;
        }
        self.fading().validate()?;
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        if !(self.eps_max.is_finite() && self.eps_max > 0.0) {
            return Err(Error::Config("eps_max must be strictly positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.grid_p < 2 || self.grid_c < 2 {
            return Err(Error::Config("grid needs at least 2 points per axis".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn fading(&self) -> FadingConfig {
        FadingConfig {
            gamma_h_db: [self.gamma_h_db; 2],
            gamma_g_db: [self.gamma_g_db; 2],
            gamma_f_db: self.gamma_f_db,
            seed: self.seed,
            realizations: self.realizations,
        }
    }

    pub fn params(&self) -> SystemParams {
        SystemParams {
            p_s: self.p_s,
            p_max: self.p_max,
            sigma_n2: self.noise_var,
        }
    }

    pub fn settings(&self) -> StrategySettings {
        StrategySettings {
            eps_max: self.eps_max,
            max_iters: self.max_iters,
            raw_power_error: self.raw_power_error,
            grid_p: self.grid_p,
            grid_c: self.grid_c,
            solver: SolverOptions::default(),
        }
    }
}

/// Parses `<n_p>x<n_c>`.
pub fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("grid must look like `200x200`, got `{text}`"));
    let (a, b) = text.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}
