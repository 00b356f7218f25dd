use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ChannelGains;

/// Average channel SNRs (channel variance over noise variance, in dB) and the
/// Monte Carlo budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingConfig {
    pub gamma_h_db: [f64; 2],
    pub gamma_g_db: [f64; 2],
    pub gamma_f_db: f64,
    pub seed: u64,
    pub realizations: usize,
}

impl FadingConfig {
    /// Symmetric links at 10 / 15 / 20 dB, 10 000 realizations.
    pub fn reference(seed: u64) -> Self {
        Self {
            gamma_h_db: [10.0; 2],
            gamma_g_db: [15.0; 2],
            gamma_f_db: 20.0,
            seed,
            realizations: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be at least 1".into()));
        }
        let all = [
            self.gamma_h_db[0],
            self.gamma_h_db[1],
            self.gamma_g_db[0],
            self.gamma_g_db[1],
            self.gamma_f_db,
        ];
        if all.iter().any(|g| !g.is_finite()) {
            return Err(Error::Config("average SNRs must be finite".into()));
        }
        Ok(())
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Unit-mean exponential draws `[h1, h2, g1, g2, f]` of one trial. The stream
/// depends only on `(seed, trial_index)`.
pub fn unit_draws(seed: u64, trial_index: u64) -> [f64; 5] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    std::array::from_fn(|_| Exp1.sample(&mut rng))
}

/// Squared magnitudes of zero-mean circularly-symmetric complex Gaussian
/// channels, i.e. exponential with mean `σ²·10^(γ/10)`.
pub fn draw_gains(fading: &FadingConfig, trial_index: u64, sigma_n2: f64) -> ChannelGains {
    let [h1, h2, g1, g2, f] = unit_draws(fading.seed, trial_index);
    let scale = |x: f64, db: f64| x * sigma_n2 * db_to_linear(db);
    ChannelGains {
        h2: [scale(h1, fading.gamma_h_db[0]), scale(h2, fading.gamma_h_db[1])],
        g2: [scale(g1, fading.gamma_g_db[0]), scale(g2, fading.gamma_g_db[1])],
        f2: scale(f, fading.gamma_f_db),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_of(n: u64, cfg: &FadingConfig, pick: impl Fn(&ChannelGains) -> f64) -> f64 {
        (0..n).map(|t| pick(&draw_gains(cfg, t, 1.0))).sum::<f64>() / n as f64
    }

    #[test]
    fn zero_db_has_unit_mean() {
        let mut cfg = FadingConfig::reference(7);
        cfg.gamma_h_db = [0.0; 2];
        let m = mean_of(100_000, &cfg, |g| g.h2[0]);
        assert!((0.99..=1.01).contains(&m), "{m}");
    }

    #[test]
    fn reference_interference_mean() {
        let cfg = FadingConfig::reference(11);
        let m = mean_of(100_000, &cfg, |g| g.f2);
        assert!((m / 100.0 - 1.0).abs() < 0.01, "{m}");
    }

    #[test]
    fn same_trial_same_gains() {
        let cfg = FadingConfig::reference(3);
        assert_eq!(draw_gains(&cfg, 42, 1.0), draw_gains(&cfg, 42, 1.0));
        assert_ne!(draw_gains(&cfg, 42, 1.0), draw_gains(&cfg, 43, 1.0));
    }

    #[test]
    fn noise_variance_scales_gains() {
        let cfg = FadingConfig::reference(3);
        let a = draw_gains(&cfg, 5, 1.0);
        let b = draw_gains(&cfg, 5, 2.0);
        assert!((b.f2 - 2.0 * a.f2).abs() < 1e-12 * b.f2);
    }

    #[test]
    fn rejects_zero_realizations() {
        let mut cfg = FadingConfig::reference(0);
        cfg.realizations = 0;
        assert!(cfg.validate().is_err());
    }
}
