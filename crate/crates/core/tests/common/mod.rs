#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relay_core::{ChannelGains, SystemParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `10^U(lo_exp, hi_exp)`.
pub fn log_uniform(rng: &mut impl Rng, lo_exp: f64, hi_exp: f64) -> f64 {
    10f64.powf(rng.random_range(lo_exp..hi_exp))
}

pub fn random_params(rng: &mut impl Rng) -> SystemParams {
    SystemParams::new(
        log_uniform(rng, -1.0, 1.0),
        log_uniform(rng, -1.0, 1.0),
        log_uniform(rng, -1.0, 1.0),
    )
    .unwrap()
}

/// Independent gains, log-uniform over `[10^lo_exp, 10^hi_exp]`.
pub fn random_gains(rng: &mut impl Rng, lo_exp: f64, hi_exp: f64) -> ChannelGains {
    let mut d = || log_uniform(rng, lo_exp, hi_exp);
    ChannelGains::new([d(), d()], [d(), d()], d()).unwrap()
}

pub fn random_instance(rng: &mut impl Rng) -> (SystemParams, ChannelGains) {
    let params = random_params(rng);
    let gains = random_gains(rng, -2.0, 2.0);
    (params, gains)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
