//! Optimal circularity coefficient at a fixed relay power.
//!
//! Raising `C_x` helps every first hop (the interference becomes more
//! improper and easier to live with) and hurts every second hop. Each path
//! therefore crosses over at most once, from first-hop-limited to
//! second-hop-limited, and the instance falls into one of three cases by the
//! number of crossings in `(0, 1]`. In every case the optimum is a crossing,
//! an endpoint, or a stationary point of a cross pair `R_{i,1} + R_{j,2}`.
//!
//! Both searches run in `u = 1 − C²`: the rates are rational-log in `u`, the
//! crossing condition is a quadratic, and the square-root cusp at `C = 1`
//! disappears.

use serde::{Deserialize, Serialize};

use crate::model::{self, ChannelGains, Hop, Path, RateBreakdown, SignalDesign, SystemParams};
use crate::popt::{argmax_first, SolverOptions};
use crate::rootfind::{self, RealPolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    NoIntersection,
    OneIntersection,
    TwoIntersections,
}

/// Limiting hops of both paths on one piece `[lo, hi]` of the circularity range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalBottleneck {
    pub lo: f64,
    pub hi: f64,
    pub hops: [Hop; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularityCandidates {
    pub intersections: [Option<f64>; 2],
    pub stationaries: Vec<f64>,
    pub case_tag: CaseTag,
    pub bottleneck: Vec<IntervalBottleneck>,
    /// Ascending order of the crossings when both paths cross.
    pub pi_order: Option<[Path; 2]>,
    /// `(c_x, R_T)` for every evaluated candidate, ascending in `c_x`.
    pub evaluations: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularitySolution {
    pub c_x: f64,
    pub rates: RateBreakdown,
    pub candidates: CircularityCandidates,
}

/// Quadratic in `u = 1 − C²` whose roots equate the hop rates of `path`,
/// coefficients ascending.
pub fn crossing_quadratic(params: &SystemParams, gains: &ChannelGains, p_r: f64, path: Path) -> [f64; 3] {
    let s2 = params.sigma_n2;
    let sh = params.p_s * gains.h(path);
    let pf = p_r * gains.f2;
    let snr_g = p_r * gains.g(path) / s2;
    // first hop: 1 + N / (A u + B); second hop: 1 + α + β u
    let n = (2.0 * sh * (pf + s2) + sh * sh) / (s2 * s2);
    let a = pf * pf / (s2 * s2);
    let b = 2.0 * pf / s2 + 1.0;
    let alpha = 2.0 * snr_g;
    let beta = snr_g * snr_g;
    [alpha * b - n, alpha * a + beta * b, beta * a]
}

/// Circularity coefficients in `(0, 1]` where the two hop rates of `path` meet.
pub fn hop_intersection_circularity(
    params: &SystemParams,
    gains: &ChannelGains,
    p_r: f64,
    path: Path,
) -> Vec<f64> {
    let Ok(poly) = RealPolynomial::new(crossing_quadratic(params, gains, p_r, path).to_vec()) else {
        return Vec::new();
    };
    let mut out: Vec<f64> = rootfind::real_roots_in(&poly, 0.0, 1.0, false)
        .unwrap_or_default()
        .into_iter()
        .filter(|&u| u < 1.0)
        .map(|u| (1.0 - u).sqrt())
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// All stationary points of `R_{first,1} + R_{second,2}` in `C` strictly inside `(lo, hi)`.
#[allow(clippy::too_many_arguments)]
pub fn circularity_stationary_points(
    params: &SystemParams,
    gains: &ChannelGains,
    p_r: f64,
    first: Path,
    second: Path,
    lo: f64,
    hi: f64,
    opts: &SolverOptions,
) -> Vec<f64> {
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Vec::new();
    }
    let pair_u = |u: f64| {
        let c = (1.0 - u).max(0.0).sqrt();
        model::cross_pair_rate(params, gains, SignalDesign::new(p_r, c), first, second)
    };
    let mut out: Vec<f64> = rootfind::derivative_stationary_roots(pair_u, 1.0 - hi * hi, 1.0 - lo * lo, opts.stationary_grid)
        .into_iter()
        .map(|u| (1.0 - u).max(0.0).sqrt())
        .filter(|&c| c > lo && c < hi)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Stationary point of the cross pair in `(lo, hi)`; the one with the larger
/// pair rate if several are found.
pub fn circularity_stationary_point(
    params: &SystemParams,
    gains: &ChannelGains,
    p_r: f64,
    pair: (Path, Path),
    interval: (f64, f64),
) -> Option<f64> {
    let (first, second) = pair;
    let pts = circularity_stationary_points(
        params,
        gains,
        p_r,
        first,
        second,
        interval.0,
        interval.1,
        &SolverOptions::default(),
    );
    pts.into_iter()
        .map(|c| (c, model::cross_pair_rate(params, gains, SignalDesign::new(p_r, c), first, second)))
        .fold(None, |best: Option<(f64, f64)>, e| match best {
            Some(b) if b.1 >= e.1 => Some(b),
            _ => Some(e),
        })
        .map(|(c, _)| c)
}

pub fn optimize_circularity(params: &SystemParams, gains: &ChannelGains, p_r: f64) -> CircularitySolution {
    optimize_circularity_with(params, gains, p_r, &SolverOptions::default())
}

pub fn optimize_circularity_with(
    params: &SystemParams,
    gains: &ChannelGains,
    p_r: f64,
    opts: &SolverOptions,
) -> CircularitySolution {
    let crossings = Path::BOTH.map(|path| hop_intersection_circularity(params, gains, p_r, path).first().copied());

    let mut breaks = vec![0.0];
    breaks.extend(crossings.iter().flatten().copied());
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let bottleneck: Vec<IntervalBottleneck> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let mid = SignalDesign::new(p_r, 0.5 * (w[0] + w[1]));
            IntervalBottleneck {
                lo: w[0],
                hi: w[1],
                hops: Path::BOTH.map(|path| model::bottleneck(params, gains, mid, path)),
            }
        })
        .collect();
    let hop_at = |path: Path, c: f64| {
        bottleneck
            .iter()
            .find(|b| c >= b.lo && c <= b.hi)
            .map_or(Hop::First, |b| b.hops[path.index()])
    };
    let stationary = |first: Path, second: Path, lo: f64, hi: f64| {
        circularity_stationary_points(params, gains, p_r, first, second, lo, hi, opts)
    };

    let mut pi_order = None;
    let (case_tag, mut points, stationaries) = match crossings {
        [None, None] => {
            let hops = [hop_at(Path::One, 0.5), hop_at(Path::Two, 0.5)];
            match hops {
                [Hop::Second, Hop::Second] => (CaseTag::NoIntersection, vec![0.0], Vec::new()),
                [Hop::First, Hop::First] => (CaseTag::NoIntersection, vec![1.0], Vec::new()),
                [Hop::First, Hop::Second] | [Hop::Second, Hop::First] => {
                    let i = if hops[0] == Hop::First { Path::One } else { Path::Two };
                    let st = stationary(i, i.other(), 0.0, 1.0);
                    (CaseTag::NoIntersection, vec![0.0, 1.0], st)
                }
            }
        }
        [Some(c_i), None] | [None, Some(c_i)] => {
            let i = if crossings[0].is_some() { Path::One } else { Path::Two };
            let j = i.other();
            // j never crosses, so its limiting hop is the same on both sides of c_i
            if hop_at(j, 0.5 * (c_i + 1.0)) == Hop::First {
                let st = stationary(j, i, c_i, 1.0);
                (CaseTag::OneIntersection, vec![c_i, 1.0], st)
            } else {
                let st = stationary(i, j, 0.0, c_i);
                (CaseTag::OneIntersection, vec![0.0, c_i], st)
            }
        }
        [Some(c1), Some(c2)] => {
            let order = if c1 <= c2 { [Path::One, Path::Two] } else { [Path::Two, Path::One] };
            pi_order = Some(order);
            let (lo, hi) = (c1.min(c2), c1.max(c2));
            let st = if hi > lo {
                stationary(order[1], order[0], lo, hi)
            } else {
                Vec::new()
            };
            (CaseTag::TwoIntersections, vec![lo, hi], st)
        }
    };

    points.extend(stationaries.iter().copied());
    points.push(0.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let evaluations: Vec<(f64, f64)> = points
        .iter()
        .map(|&c| (c, model::total_rate_value(params, gains, SignalDesign::new(p_r, c))))
        .collect();
    let (c_x, _) = argmax_first(&evaluations);

    CircularitySolution {
        c_x,
        rates: model::total_rate(params, gains, SignalDesign::new(p_r, c_x)),
        candidates: CircularityCandidates {
            intersections: crossings,
            stationaries,
            case_tag,
            bottleneck,
            pi_order,
            evaluations,
        },
    }
}
