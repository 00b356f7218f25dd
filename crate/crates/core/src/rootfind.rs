//! Real-root isolation for the low-degree polynomials of the power and
//! circularity sub-problems, plus stationary-point search for smooth scalar
//! objectives.
//!
//! Roots are isolated on an interval by recursing on derivatives: between two
//! consecutive real critical points a polynomial is monotone, so each such
//! piece holds at most one root and a sign change brackets it exactly. Brackets
//! are then closed by bisection down to adjacent floating-point numbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 5;

/// Residual bound for accepted roots, relative to `max(1, max|coeff|)`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Roots closer than this are reported once.
pub const DEDUP_TOL: f64 = 1e-9;
/// Default sample count for [`derivative_stationary_roots`].
pub const DEFAULT_STATIONARY_GRID: usize = 512;

/// Real polynomial of degree at most five, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Trims exact trailing zeros. Fails on non-finite coefficients, an
    /// all-zero sequence, or a degree above five.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "coefficient",
                value: *bad,
                reason: "polynomial coefficients must be finite",
            });
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::DegenerateInput);
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::DegreeTooHigh(coeffs.len() - 1));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// A nonzero constant has no roots at all.
    pub fn is_degenerate_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    fn derivative(&self) -> Option<RealPolynomial> {
        if self.coeffs.len() < 2 {
            return None;
        }
        let d: Vec<f64> = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(k, &c)| c * (k + 1) as f64)
            .collect();
        RealPolynomial::new(d).ok()
    }

    /// Cauchy bound: every root satisfies `|x| < bound`.
    pub fn root_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap();
        let n = self.coeffs.len() - 1;
        1.0 + self.coeffs[..n]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / lead).abs()))
    }
}

/// All real roots in `(lo, hi]` (or `[lo, hi]` when `open_lo` is false), sorted.
pub fn real_roots_in(poly: &RealPolynomial, lo: f64, hi: f64, open_lo: bool) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter {
            name: "interval",
            value: hi - lo,
            reason: "requires finite lo < hi",
        });
    }
    if poly.is_degenerate_constant() {
        return Ok(Vec::new());
    }
    let tol = RESIDUAL_TOL * poly.max_abs_coeff().max(1.0);
    let mut roots = isolate(poly, lo, hi, tol);
    roots.retain(|&r| if open_lo { r > lo } else { r >= lo } && r <= hi);
    Ok(roots)
}

/// Real roots on `(0, ∞)`.
pub fn positive_roots(poly: &RealPolynomial) -> Result<Vec<f64>> {
    if poly.is_degenerate_constant() {
        return Ok(Vec::new());
    }
    real_roots_in(poly, 0.0, poly.root_bound(), true)
}

fn isolate(poly: &RealPolynomial, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let mut breaks = vec![lo];
    if let Some(d) = poly.derivative() {
        if !d.is_degenerate_constant() {
            breaks.extend(isolate(&d, lo, hi, f64::INFINITY).into_iter().filter(|&c| c > lo && c < hi));
        }
    }
    breaks.push(hi);

    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&last| (r - last).abs() > DEDUP_TOL) {
            roots.push(r);
        }
    };
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (poly.eval(a), poly.eval(b));
        if fa == 0.0 {
            push(a, &mut roots);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            push(bisect(|x| poly.eval(x), a, b, fa), &mut roots);
        } else if fa.abs() <= tol && fb.signum() == fa.signum() && a > lo {
            // tangency at an interior critical point (even multiplicity)
            push(a, &mut roots);
        }
    }
    if poly.eval(hi) == 0.0 {
        push(hi, &mut roots);
    }
    roots
}

/// Bisection on a bracket with `f(a) = fa` and a sign change inside `[a, b]`.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..2100 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Sign changes in the coefficient sequence, zeros skipped. Upper bound (with
/// matching parity) on the number of positive roots.
pub fn descartes_positive_bound(poly: &RealPolynomial) -> usize {
    let mut changes = 0;
    let mut last = 0.0f64;
    for &c in poly.coeffs() {
        if c == 0.0 {
            continue;
        }
        if last != 0.0 && last.signum() != c.signum() {
            changes += 1;
        }
        last = c;
    }
    changes
}

/// Stationary points of a smooth `f` on `[lo, hi]`.
///
/// The derivative is estimated by central differences on `grid + 1` uniform
/// samples; every strict sign change is refined by bisection to a bracket no
/// wider than `1e-10 * (hi - lo)`. Samples where the estimate is exactly zero
/// are skipped.
pub fn derivative_stationary_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Vec::new();
    }
    let width = hi - lo;
    let delta = 1e-6 * width;
    let deriv = |x: f64| {
        let a = (x - delta).max(lo);
        let b = (x + delta).min(hi);
        (f(b) - f(a)) / (b - a)
    };
    stationary_from_derivative(deriv, lo, hi, grid)
}

/// Sign-change search over a supplied derivative, as in
/// [`derivative_stationary_roots`].
pub fn stationary_from_derivative(deriv: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    let grid = grid.max(2);
    let width = hi - lo;
    let min_width = 1e-10 * width;
    let mut out: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=grid {
        let x = if k == grid { hi } else { lo + width * k as f64 / grid as f64 };
        let d = deriv(x);
        // An exact zero carries no sign; a sign change across it is still
        // caught between its neighbours, and flat stretches report nothing.
        if !d.is_finite() || d == 0.0 {
            continue;
        }
        if let Some((xp, dp)) = prev {
            if dp.signum() != d.signum() {
                let (mut a, mut b, mut da) = (xp, x, dp);
                while b - a > min_width {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    let dm = deriv(mid);
                    if dm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if dm.signum() == da.signum() {
                        a = mid;
                        da = dm;
                    } else {
                        b = mid;
                    }
                }
                let r = 0.5 * (a + b);
                if out.last().is_none_or(|&l| (r - l).abs() > DEDUP_TOL) {
                    out.push(r);
                }
            }
        }
        prev = Some((x, d));
    }
    out
}
