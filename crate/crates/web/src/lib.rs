//! WebAssembly bindings for the interactive demo page in `www/`.
//!
//! Every export takes the channel instance as a JSON object
//! `{h1, h2, g1, g2, f, p_s, p_max, noise_var}` (squared gains) and returns a
//! JSON string for the page to draw.

use relay_core::copt::optimize_circularity;
use relay_core::joint::{coordinate_descent, grid_search, CdConfig, TrajectoryPoint};
use relay_core::model::{total_rate, SignalDesign};
use relay_core::popt::optimize_power;
use relay_core::{ChannelGains, SystemParams};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct Instance {
    pub h1: f64,
    pub h2: f64,
    pub g1: f64,
    pub g2: f64,
    pub f: f64,
    pub p_s: f64,
    pub p_max: f64,
    pub noise_var: f64,
}

impl Instance {
    fn parse(json: &str) -> Result<(SystemParams, ChannelGains), String> {
        let i: Instance = serde_json::from_str(json).map_err(|e| e.to_string())?;
        let params = SystemParams::new(i.p_s, i.p_max, i.noise_var).map_err(|e| e.to_string())?;
        let gains = ChannelGains::new([i.h1, i.h2], [i.g1, i.g2], i.f).map_err(|e| e.to_string())?;
        Ok((params, gains))
    }
}

/// Rates along one axis with the other fixed.
#[derive(Debug, Serialize)]
pub struct Curve {
    pub x: Vec<f64>,
    pub r_total: Vec<f64>,
    /// `hops[path][hop][k]`
    pub hops: [[Vec<f64>; 2]; 2],
    pub best_x: f64,
    pub best_rate: f64,
    /// Every point the solver compared, `(x, R_T)`.
    pub candidates: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize)]
pub struct Surface {
    pub n_p: usize,
    pub n_c: usize,
    pub p_max: f64,
    /// Row-major, `rates[m * n_p + k]` at `p = p_max (k + 1) / n_p`, `C = m / (n_c - 1)`.
    pub rates: Vec<f64>,
    pub grid_best: (f64, f64, f64),
    pub descent: [Vec<TrajectoryPoint>; 2],
}

fn clamp_samples(n: usize) -> usize {
    n.clamp(2, 4096)
}

fn curve(xs: Vec<f64>, design: impl Fn(f64) -> SignalDesign, params: &SystemParams, gains: &ChannelGains) -> Curve {
    let mut r_total = Vec::with_capacity(xs.len());
    let mut hops: [[Vec<f64>; 2]; 2] = Default::default();
    for &x in &xs {
        let r = total_rate(params, gains, design(x));
        r_total.push(r.r_total);
        for (path, rates) in hops.iter_mut().zip(r.r_hop) {
            for (hop, rate) in path.iter_mut().zip(rates) {
                hop.push(rate);
            }
        }
    }
    Curve {
        x: xs,
        r_total,
        hops,
        best_x: f64::NAN,
        best_rate: f64::NAN,
        candidates: Vec::new(),
    }
}

/// Rates over `p_r ∈ (0, p_max]` at fixed `c_x`, plus the optimal power.
pub fn power_curve_json(instance: &str, c_x: f64, samples: usize) -> Result<String, String> {
    let (params, gains) = Instance::parse(instance)?;
    if !(0.0..=1.0).contains(&c_x) {
        return Err("c_x must lie in [0, 1]".into());
    }
    let n = clamp_samples(samples);
    let xs = (1..=n).map(|k| params.p_max * k as f64 / n as f64).collect();
    let mut c = curve(xs, |p| SignalDesign::new(p, c_x), &params, &gains);
    let sol = optimize_power(&params, &gains, c_x);
    c.best_x = sol.p_r;
    c.best_rate = sol.rates.r_total;
    c.candidates = sol.candidates.evaluations;
    serde_json::to_string(&c).map_err(|e| e.to_string())
}

/// Rates over `c_x ∈ [0, 1]` at fixed `p_r`, plus the optimal coefficient.
pub fn circularity_curve_json(instance: &str, p_r: f64, samples: usize) -> Result<String, String> {
    let (params, gains) = Instance::parse(instance)?;
    SignalDesign::new(p_r, 0.0).validate(&params).map_err(|e| e.to_string())?;
    let n = clamp_samples(samples);
    let xs = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let mut c = curve(xs, |cx| SignalDesign::new(p_r, cx), &params, &gains);
    let sol = optimize_circularity(&params, &gains, p_r);
    c.best_x = sol.c_x;
    c.best_rate = sol.rates.r_total;
    c.candidates = sol.candidates.evaluations;
    serde_json::to_string(&c).map_err(|e| e.to_string())
}

/// Total rate over the `(p_r, c_x)` box with both descent paths and the grid optimum.
pub fn rate_surface_json(instance: &str, n_p: usize, n_c: usize) -> Result<String, String> {
    let (params, gains) = Instance::parse(instance)?;
    let (n_p, n_c) = (clamp_samples(n_p).min(400), clamp_samples(n_c).min(400));
    let mut rates = Vec::with_capacity(n_p * n_c);
    for m in 0..n_c {
        let c = m as f64 / (n_c - 1) as f64;
        for k in 1..=n_p {
            let p = params.p_max * k as f64 / n_p as f64;
            rates.push(total_rate(&params, &gains, SignalDesign::new(p, c)).r_total);
        }
    }
    let gs = grid_search(&params, &gains, n_p, n_c - 1).map_err(|e| e.to_string())?;
    let descend = |c0: f64| {
        coordinate_descent(&params, &gains, &CdConfig::from_budget(params.p_max, c0))
            .map(|r| r.trajectory)
            .map_err(|e| e.to_string())
    };
    let s = Surface {
        n_p,
        n_c,
        p_max: params.p_max,
        rates,
        grid_best: (gs.design.p_r, gs.design.c_x, gs.rates.r_total),
        descent: [descend(0.0)?, descend(1.0)?],
    };
    serde_json::to_string(&s).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = powerCurve)]
pub fn power_curve(instance: &str, c_x: f64, samples: usize) -> Result<String, JsError> {
    power_curve_json(instance, c_x, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = circularityCurve)]
pub fn circularity_curve(instance: &str, p_r: f64, samples: usize) -> Result<String, JsError> {
    circularity_curve_json(instance, p_r, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = rateSurface)]
pub fn rate_surface(instance: &str, n_p: usize, n_c: usize) -> Result<String, JsError> {
    rate_surface_json(instance, n_p, n_c).map_err(|e| JsError::new(&e))
}
