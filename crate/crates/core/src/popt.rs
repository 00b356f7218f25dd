//! Optimal relay power at a fixed circularity coefficient.
//!
//! Along `p_r` each path is second-hop-limited up to the power where its two
//! hop rates cross and first-hop-limited beyond it. Sorting the two crossing
//! powers splits `(0, ∞)` into three pieces: the total rate increases on the
//! first, decreases on the last, and in between equals half of the cross pair
//! `R_{π1,1} + R_{π2,2}`. The maximizer over `(0, p_max]` is therefore one of
//! the feasible crossings, a stationary point of the cross pair inside the
//! middle piece, or the budget itself.

use serde::{Deserialize, Serialize};

use crate::model::{self, ChannelGains, Path, RateBreakdown, SignalDesign, SystemParams};
use crate::rootfind::{self, RealPolynomial, DEFAULT_STATIONARY_GRID};

/// Knobs shared by the power and circularity solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Samples used to bracket derivative sign changes.
    pub stationary_grid: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            stationary_grid: DEFAULT_STATIONARY_GRID,
        }
    }
}

/// Where the two hop rates of one path meet along `p_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIntersection {
    /// Positive crossing power, ignoring the budget.
    pub root: Option<f64>,
    /// `root` when it lies in `(0, p_max]`.
    pub feasible: Option<f64>,
    /// Power beyond which the path is first-hop-limited: `0` if it is
    /// first-hop-limited everywhere, `+inf` if never.
    pub switch_point: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCandidates {
    pub intersections: [PowerIntersection; 2],
    pub stationaries: Vec<f64>,
    pub budget: f64,
    /// Paths ordered by ascending switch point.
    pub pi_order: [Path; 2],
    /// `(p_r, R_T)` for every evaluated candidate, ascending in `p_r`.
    pub evaluations: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSolution {
    pub p_r: f64,
    pub rates: RateBreakdown,
    pub candidates: PowerCandidates,
}

/// Quartic in `p` whose positive root equates the two hop rates of `path`,
/// coefficients ascending.
pub fn crossing_quartic(params: &SystemParams, gains: &ChannelGains, c_x: f64, path: Path) -> [f64; 5] {
    let s2 = params.sigma_n2;
    let sh = params.p_s * gains.h(path);
    let g = gains.g(path);
    let f = gains.f2;
    let a = 1.0 - c_x * c_x;
    [
        -(sh * sh + 2.0 * sh * s2),
        2.0 * (s2 * g - sh * f),
        g * (4.0 * f + g * a),
        2.0 * g * f * (g + f) * a / s2,
        g * g * f * f * a * a / (s2 * s2),
    ]
}

/// Crossing power of the two hop rates of `path` at circularity `c_x`.
pub fn hop_intersection_power(
    params: &SystemParams,
    gains: &ChannelGains,
    c_x: f64,
    path: Path,
) -> PowerIntersection {
    let h = gains.h(path);
    let g = gains.g(path);
    let root = if h == 0.0 || g == 0.0 {
        None
    } else if c_x == 0.0 {
        // closed form of the proper-signal quadratic g f p² + g σ² p − p_s h σ² = 0,
        // written without the cancelling difference
        let s2 = params.sigma_n2;
        let b = g * s2;
        Some(2.0 * params.p_s * h * s2 / (b + (b * b + 4.0 * g * gains.f2 * params.p_s * h * s2).sqrt()))
    } else {
        RealPolynomial::new(crossing_quartic(params, gains, c_x, path).to_vec())
            .ok()
            .and_then(|p| rootfind::positive_roots(&p).ok())
            .and_then(|r| r.first().copied())
    };
    let switch_point = match root {
        Some(p) => p,
        // no crossing: the sign of R_{i,1} − R_{i,2} as p → 0⁺ holds throughout,
        // and that limit is log2(1 + p_s|h|²/σ²) − 0
        None if h > 0.0 => f64::INFINITY,
        None => 0.0,
    };
    PowerIntersection {
        root,
        feasible: root.filter(|&p| p > 0.0 && p <= params.p_max),
        switch_point,
    }
}

/// Stationary points of `R_{first,1} + R_{second,2}` along `p_r` on `(0, p_max]`.
pub fn power_stationary_points(
    params: &SystemParams,
    gains: &ChannelGains,
    c_x: f64,
    first: Path,
    second: Path,
) -> Vec<f64> {
    stationary_powers_in(
        params,
        gains,
        c_x,
        first,
        second,
        0.0,
        params.p_max,
        &SolverOptions::default(),
    )
}

/// Closed-form stationary power of the proper cross pair; `None` unless
/// `|f|² − |g_j|² > σ²|g_j|² / (p_s|h_i|²)`.
pub fn proper_stationary_power(params: &SystemParams, gains: &ChannelGains, first: Path, second: Path) -> Option<f64> {
    let s2 = params.sigma_n2;
    let sh = params.p_s * gains.h(first);
    let g = gains.g(second);
    let f = gains.f2;
    if f <= 0.0 || g <= 0.0 || sh <= 0.0 || f - g <= s2 * g / sh {
        return None;
    }
    let p = (s2 * sh * (f - g) / (g * f * f)).sqrt() - s2 / f;
    (p > 0.0).then_some(p)
}

/// Stationary points of the cross pair restricted to `(lo, hi]`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn stationary_powers_in(
    params: &SystemParams,
    gains: &ChannelGains,
    c_x: f64,
    first: Path,
    second: Path,
    lo: f64,
    hi: f64,
    opts: &SolverOptions,
) -> Vec<f64> {
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Vec::new();
    }
    if c_x == 0.0 {
        return proper_stationary_power(params, gains, first, second)
            .filter(|&p| p > lo && p <= hi)
            .into_iter()
            .collect();
    }
    let pair = |p: f64| model::cross_pair_rate(params, gains, SignalDesign::new(p, c_x), first, second);
    let found = if lo > 0.0 {
        // uniform in log-power so that pieces close to zero keep their resolution
        rootfind::derivative_stationary_roots(|t: f64| pair(t.exp()), lo.ln(), hi.ln(), opts.stationary_grid)
            .into_iter()
            .map(f64::exp)
            .collect::<Vec<_>>()
    } else {
        rootfind::derivative_stationary_roots(pair, lo, hi, opts.stationary_grid)
    };
    found.into_iter().filter(|&p| p > lo && p <= hi).collect()
}

pub fn optimize_power(params: &SystemParams, gains: &ChannelGains, c_x: f64) -> PowerSolution {
    optimize_power_with(params, gains, c_x, &SolverOptions::default())
}

pub fn optimize_power_with(
    params: &SystemParams,
    gains: &ChannelGains,
    c_x: f64,
    opts: &SolverOptions,
) -> PowerSolution {
    let p_max = params.p_max;
    let intersections = Path::BOTH.map(|path| hop_intersection_power(params, gains, c_x, path));
    let pi_order = if intersections[0].switch_point <= intersections[1].switch_point {
        [Path::One, Path::Two]
    } else {
        [Path::Two, Path::One]
    };
    let lo = intersections[pi_order[0].index()].switch_point;
    let hi = intersections[pi_order[1].index()].switch_point.min(p_max);

    let stationaries = if lo < hi {
        stationary_powers_in(params, gains, c_x, pi_order[0], pi_order[1], lo, hi, opts)
    } else {
        Vec::new()
    };

    let mut points: Vec<f64> = intersections
        .iter()
        .filter_map(|i| i.feasible)
        .chain(stationaries.iter().copied())
        .chain(std::iter::once(p_max))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let evaluations: Vec<(f64, f64)> = points
        .iter()
        .map(|&p| (p, model::total_rate_value(params, gains, SignalDesign::new(p, c_x))))
        .collect();
    let (p_r, _) = argmax_first(&evaluations);

    PowerSolution {
        p_r,
        rates: model::total_rate(params, gains, SignalDesign::new(p_r, c_x)),
        candidates: PowerCandidates {
            intersections,
            stationaries,
            budget: p_max,
            pi_order,
            evaluations,
        },
    }
}

/// Largest value; the earliest entry wins ties.
pub(crate) fn argmax_first(evals: &[(f64, f64)]) -> (f64, f64) {
    let mut best = evals[0];
    for &e in &evals[1..] {
        if e.1 > best.1 {
            best = e;
        }
    }
    best
}
