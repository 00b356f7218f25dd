//! Domain types and closed-form achievable rates of the two-path relay network.
//!
//! Two half-duplex decode-and-forward relays alternate between receiving from
//! the source and forwarding to the destination. While relay `i` receives, the
//! other relay's transmission leaks into it through the reciprocal inter-relay
//! channel `f`. Both relays use the same power `p_r` and circularity
//! coefficient `C_x`; the source always transmits a proper signal and every
//! receiver treats interference as Gaussian noise.
//!
//! Every formula here only depends on squared channel magnitudes, so
//! [`ChannelGains`] stores `|h_i|²`, `|g_i|²` and `|f|²` directly. Rates are in
//! bits/s/Hz.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, Error, Result};

/// Source power, relay power budget and per-receiver noise variance (linear units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub p_s: f64,
    pub p_max: f64,
    pub sigma_n2: f64,
}

impl SystemParams {
    pub fn new(p_s: f64, p_max: f64, sigma_n2: f64) -> Result<Self> {
        let params = Self {
            p_s,
            p_max,
            sigma_n2,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("p_s", self.p_s)?;
        check_positive("p_max", self.p_max)?;
        check_positive("sigma_n2", self.sigma_n2)
    }
}

/// Squared channel magnitudes of one block-fading realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGains {
    /// Source to relay `i`.
    pub h2: [f64; 2],
    /// Relay `i` to destination.
    pub g2: [f64; 2],
    /// Between the relays (reciprocal).
    pub f2: f64,
}

impl ChannelGains {
    pub fn new(h2: [f64; 2], g2: [f64; 2], f2: f64) -> Result<Self> {
        let gains = Self { h2, g2, f2 };
        gains.validate()?;
        Ok(gains)
    }

    /// Identical links on both paths.
    pub fn symmetric(h2: f64, g2: f64, f2: f64) -> Result<Self> {
        Self::new([h2; 2], [g2; 2], f2)
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("h2[0]", self.h2[0])?;
        check_non_negative("h2[1]", self.h2[1])?;
        check_non_negative("g2[0]", self.g2[0])?;
        check_non_negative("g2[1]", self.g2[1])?;
        check_non_negative("f2", self.f2)
    }

    pub fn h(&self, path: Path) -> f64 {
        self.h2[path.index()]
    }

    pub fn g(&self, path: Path) -> f64 {
        self.g2[path.index()]
    }
}

/// Relay transmit power and circularity coefficient shared by both relays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalDesign {
    pub p_r: f64,
    pub c_x: f64,
}

impl SignalDesign {
    pub fn new(p_r: f64, c_x: f64) -> Self {
        Self { p_r, c_x }
    }

    pub fn proper(p_r: f64) -> Self {
        Self { p_r, c_x: 0.0 }
    }

    /// Checks `0 < p_r <= p_max` and `0 <= c_x <= 1`.
    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        check_positive("p_r", self.p_r)?;
        if self.p_r > params.p_max {
            return Err(Error::InvalidParameter {
                name: "p_r",
                value: self.p_r,
                reason: "exceeds the relay power budget",
            });
        }
        if !(0.0..=1.0).contains(&self.c_x) {
            return Err(Error::InvalidParameter {
                name: "c_x",
                value: self.c_x,
                reason: "circularity coefficient must lie in [0, 1]",
            });
        }
        Ok(())
    }
}

/// One of the two relaying paths `S -> R_i -> D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Path {
    One,
    Two,
}

impl Path {
    pub const BOTH: [Path; 2] = [Path::One, Path::Two];

    pub fn index(self) -> usize {
        match self {
            Path::One => 0,
            Path::Two => 1,
        }
    }

    pub fn other(self) -> Path {
        match self {
            Path::One => Path::Two,
            Path::Two => Path::One,
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

/// Which hop of a path limits its end-to-end rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hop {
    /// Source to relay.
    First,
    /// Relay to destination.
    Second,
}

/// Received node for [`received_circularity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Relay(Path),
    /// Destination while it listens to the given relay.
    Destination(Path),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    /// `r_hop[i][0]` is the first hop and `r_hop[i][1]` the second hop of path `i`.
    pub r_hop: [[f64; 2]; 2],
    pub r_path: [f64; 2],
    pub r_total: f64,
}

#[inline]
fn half_log2_1p(x: f64) -> f64 {
    0.5 * x.ln_1p() / LN_2
}

/// Rate of the source to relay `path` hop under inter-relay interference.
pub fn first_hop_rate(
    params: &SystemParams,
    gains: &ChannelGains,
    design: SignalDesign,
    path: Path,
) -> f64 {
    let s2 = params.sigma_n2;
    let sh = params.p_s * gains.h(path);
    let pf = design.p_r * gains.f2;
    let num = 2.0 * sh * (pf + s2) + sh * sh;
    let den = (1.0 - design.c_x * design.c_x) * pf * pf + 2.0 * pf * s2 + s2 * s2;
    half_log2_1p(num / den)
}

/// Rate of the relay `path` to destination hop.
pub fn second_hop_rate(
    params: &SystemParams,
    gains: &ChannelGains,
    design: SignalDesign,
    path: Path,
) -> f64 {
    let snr = design.p_r * gains.g(path) / params.sigma_n2;
    half_log2_1p(2.0 * snr + snr * snr * (1.0 - design.c_x * design.c_x))
}

pub fn hop_rate(
    params: &SystemParams,
    gains: &ChannelGains,
    design: SignalDesign,
    path: Path,
    hop: Hop,
) -> f64 {
    match hop {
        Hop::First => first_hop_rate(params, gains, design, path),
        Hop::Second => second_hop_rate(params, gains, design, path),
    }
}

/// End-to-end rate of one path: the weaker of its two hops.
pub fn path_rate(
    params: &SystemParams,
    gains: &ChannelGains,
    design: SignalDesign,
    path: Path,
) -> f64 {
    first_hop_rate(params, gains, design, path).min(second_hop_rate(params, gains, design, path))
}

/// Limiting hop of `path`; ties resolve to the first hop.
pub fn bottleneck(
    params: &SystemParams,
    gains: &ChannelGains,
    design: SignalDesign,
    path: Path,
) -> Hop {
    if first_hop_rate(params, gains, design, path) <= second_hop_rate(params, gains, design, path) {
        Hop::First
    } else {
        Hop::Second
    }
}

/// First hop of `first` plus second hop of `second`: the objective on every
/// interval where `first` is first-hop-limited and `second` is second-hop-limited.
pub fn cross_pair_rate(
    params: &SystemParams,
    gains: &ChannelGains,
    design: SignalDesign,
    first: Path,
    second: Path,
) -> f64 {
    first_hop_rate(params, gains, design, first) + second_hop_rate(params, gains, design, second)
}

pub fn total_rate(params: &SystemParams, gains: &ChannelGains, design: SignalDesign) -> RateBreakdown {
    let mut r_hop = [[0.0; 2]; 2];
    let mut r_path = [0.0; 2];
    for path in Path::BOTH {
        let i = path.index();
        r_hop[i] = [
            first_hop_rate(params, gains, design, path),
            second_hop_rate(params, gains, design, path),
        ];
        r_path[i] = r_hop[i][0].min(r_hop[i][1]);
    }
    RateBreakdown {
        r_hop,
        r_path,
        r_total: 0.5 * (r_path[0] + r_path[1]),
    }
}

/// Shorthand for `total_rate(..).r_total`.
pub fn total_rate_value(params: &SystemParams, gains: &ChannelGains, design: SignalDesign) -> f64 {
    0.5 * (path_rate(params, gains, design, Path::One) + path_rate(params, gains, design, Path::Two))
}

/// Circularity coefficients `(c_y, c_I)` of the received signal and of the
/// interference-plus-noise at `node`.
pub fn received_circularity(
    params: &SystemParams,
    gains: &ChannelGains,
    design: SignalDesign,
    node: Node,
) -> (f64, f64) {
    let s2 = params.sigma_n2;
    match node {
        Node::Relay(path) => {
            let pf = design.p_r * gains.f2;
            let c_y = pf * design.c_x / (params.p_s * gains.h(path) + pf + s2);
            let c_i = pf * design.c_x / (pf + s2);
            (c_y, c_i)
        }
        Node::Destination(path) => {
            let pg = design.p_r * gains.g(path);
            (pg * design.c_x / (pg + s2), 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> SystemParams {
        SystemParams::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn first_hop_without_interference() {
        let gains = ChannelGains::symmetric(3.0, 1.0, 0.0).unwrap();
        let r = first_hop_rate(&unit(), &gains, SignalDesign::new(1.0, 0.0), Path::One);
        assert!((r - 2.0).abs() < 1e-15);
    }

    #[test]
    fn first_hop_maximally_improper() {
        let gains = ChannelGains::symmetric(1.0, 1.0, 1.0).unwrap();
        let r = first_hop_rate(&unit(), &gains, SignalDesign::new(1.0, 1.0), Path::Two);
        assert!((r - 0.5 * (8.0f64 / 3.0).log2()).abs() < 1e-15);
        assert!((r - 0.707_518_749_639_422).abs() < 1e-12);
    }

    #[test]
    fn first_hop_proper_matches_interference_as_noise() {
        let gains = ChannelGains::symmetric(1.0, 1.0, 1.0).unwrap();
        let r = first_hop_rate(&unit(), &gains, SignalDesign::new(1.0, 0.0), Path::One);
        assert!((r - 1.5f64.log2()).abs() < 1e-15);
        assert!((r - 0.5 * 2.25f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn second_hop_examples() {
        let p = unit();
        let g3 = ChannelGains::symmetric(1.0, 3.0, 1.0).unwrap();
        assert!((second_hop_rate(&p, &g3, SignalDesign::new(1.0, 0.0), Path::One) - 2.0).abs() < 1e-15);
        let g15 = ChannelGains::symmetric(1.0, 1.5, 1.0).unwrap();
        assert!((second_hop_rate(&p, &g15, SignalDesign::new(1.0, 1.0), Path::One) - 1.0).abs() < 1e-15);
        let g1 = ChannelGains::symmetric(1.0, 1.0, 1.0).unwrap();
        let r = second_hop_rate(&p, &g1, SignalDesign::new(1.0, 0.5), Path::One);
        assert!((r - 0.5 * 3.75f64.log2()).abs() < 1e-15);
        assert!((r - 0.953_445_297_804_259_3).abs() < 1e-12);
    }

    #[test]
    fn total_rate_symmetric_no_interference() {
        let gains = ChannelGains::symmetric(3.0, 3.0, 0.0).unwrap();
        let b = total_rate(&unit(), &gains, SignalDesign::new(1.0, 0.0));
        assert!((b.r_total - 2.0).abs() < 1e-15);
        assert_eq!(b.r_path, [b.r_hop[0][0].min(b.r_hop[0][1]), b.r_hop[1][0].min(b.r_hop[1][1])]);
    }

    #[test]
    fn total_rate_maximally_improper_unit_instance() {
        let gains = ChannelGains::symmetric(1.0, 1.0, 1.0).unwrap();
        let b = total_rate(&unit(), &gains, SignalDesign::new(1.0, 1.0));
        assert!((b.r_hop[0][1] - 0.5 * 3f64.log2()).abs() < 1e-15);
        assert!((b.r_total - 0.5 * (8.0f64 / 3.0).log2()).abs() < 1e-15);
        assert_eq!(bottleneck(&unit(), &gains, SignalDesign::new(1.0, 1.0), Path::One), Hop::First);
    }

    #[test]
    fn circularity_at_nodes() {
        let p = unit();
        let gains = ChannelGains::symmetric(1.0, 1.0, 1.0).unwrap();
        let d = SignalDesign::new(1.0, 1.0);
        let (cy, ci) = received_circularity(&p, &gains, d, Node::Relay(Path::One));
        assert!((cy - 1.0 / 3.0).abs() < 1e-15 && (ci - 0.5).abs() < 1e-15);
        let (_, ci_d) = received_circularity(&p, &gains, d, Node::Destination(Path::Two));
        assert_eq!(ci_d, 0.0);
        for node in [Node::Relay(Path::One), Node::Destination(Path::One)] {
            assert_eq!(received_circularity(&p, &gains, SignalDesign::new(1.0, 0.0), node), (0.0, 0.0));
        }
    }

    #[test]
    fn full_circularity_with_interference_stays_finite() {
        let gains = ChannelGains::symmetric(0.5, 2.0, 1e6).unwrap();
        let b = total_rate(&unit(), &gains, SignalDesign::new(1.0, 1.0));
        assert!(b.r_total.is_finite() && b.r_total > 0.0);
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        assert!(SystemParams::new(0.0, 1.0, 1.0).is_err());
        assert!(SystemParams::new(1.0, f64::NAN, 1.0).is_err());
        assert!(ChannelGains::new([1.0, -1.0], [1.0, 1.0], 0.0).is_err());
        let p = unit();
        assert!(SignalDesign::new(1.5, 0.0).validate(&p).is_err());
        assert!(SignalDesign::new(1.0, 1.01).validate(&p).is_err());
        assert!(SignalDesign::new(0.0, 0.5).validate(&p).is_err());
        assert!(SignalDesign::new(1.0, 1.0).validate(&p).is_ok());
    }
}
