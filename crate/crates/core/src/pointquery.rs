//! Point queries: recover `f(i₀)` from the sketch alone.
//!
//! With `g_j = E_j(f) / Z_j(i₀)`, every `g_j ≥ f(i₀)`, with equality exactly
//! on the rows where `i₀` attains the maximum. The estimate is the smallest
//! `g_j`; when the two smallest agree, recovery is certified.
//!
//! Float division does not cancel bit-exactly, so "agree" means agreement to
//! a relative tolerance (default [`DEFAULT_TOLERANCE`]). Finer tolerances
//! lower the false-certification rate; this crate does not rescale the
//! tolerance with `K`.

use crate::error::{Error, Result};
use crate::estimators::check_open_unit;
use crate::frechet::check_alpha;
use crate::oracle::exact_norm_pow;
use crate::sketch::{MaxStableSketch, Signal};

pub const DEFAULT_TOLERANCE: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointQueryResult {
    /// `f̂(i₀) = g_(1)`.
    pub estimate: f64,
    pub criterion_met: bool,
    /// `(g_(1), g_(2))`; `g_(2)` is `None` when `K < 2`.
    pub g_head: (f64, Option<f64>),
    /// The tolerance the criterion was evaluated with.
    pub tolerance: f64,
}

impl PointQueryResult {
    /// The criterion needs two order statistics.
    pub fn criterion_available(&self) -> bool {
        self.g_head.1.is_some()
    }
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance.is_finite() && tolerance >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "tolerance",
            reason: format!("must be finite and non-negative, got {tolerance}"),
        })
    }
}

/// The two smallest `g_j`, ties resolved by the lower row index.
fn two_smallest(sketch: &MaxStableSketch, index: u64) -> (f64, Option<f64>) {
    let mut first = f64::INFINITY;
    let mut second: Option<f64> = None;
    for (&e, z) in sketch.values().iter().zip(sketch.variates(index)) {
        let g = e / z;
        if g < first {
            if first.is_finite() {
                second = Some(first);
            }
            first = g;
        } else if second.is_none_or(|s| g < s) {
            second = Some(g);
        }
    }
    (first, second)
}

pub fn point_query(sketch: &MaxStableSketch, index: u64, tolerance: f64) -> Result<PointQueryResult> {
    check_tolerance(tolerance)?;
    let (g1, g2) = two_smallest(sketch, index);
    let criterion_met = g2.is_some_and(|g2| g2 - g1 <= tolerance * g2);
    Ok(PointQueryResult {
        estimate: g1,
        criterion_met,
        g_head: (g1, g2),
        tolerance,
    })
}

/// Point query with [`DEFAULT_TOLERANCE`].
pub fn point_estimate(sketch: &MaxStableSketch, index: u64) -> PointQueryResult {
    point_query(sketch, index, DEFAULT_TOLERANCE).expect("default tolerance is valid")
}

/// `|g_(2) - g_(1)| ≤ tolerance · g_(2)`. Always false for `K < 2`.
pub fn criterion(sketch: &MaxStableSketch, index: u64, tolerance: f64) -> Result<bool> {
    Ok(point_query(sketch, index, tolerance)?.criterion_met)
}

/// Exact probability that the point query recovers `f(i₀)`:
/// `1 - (1 - f(i₀)^α / ‖f‖_α^α)^K`.
///
/// A zero signal yields 1: the estimate is 0, which is exact.
pub fn success_probability(signal: &Signal, index: u64, alpha: f64, k: usize) -> Result<f64> {
    check_alpha(alpha)?;
    let total = exact_norm_pow(signal, alpha);
    if total == 0.0 {
        return Ok(1.0);
    }
    let share = (signal.get(index).powf(alpha) / total).min(1.0);
    Ok(-(k as f64 * (-share).ln_1p()).exp_m1())
}

/// `ceil(ln(1/δ) / ε^α)`, at least 1.
pub fn k_for_point(epsilon: f64, delta: f64, alpha: f64) -> Result<usize> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    check_alpha(alpha)?;
    let k = ((1.0 / delta).ln() / epsilon.powf(alpha)).ceil();
    Ok((k as usize).max(1))
}

/// `C_θ = 2^{θ/α} e^{-(1+θ/α)} (1 + α/θ)^{1+θ/α} + 1`.
pub fn c_theta(theta: f64, alpha: f64) -> Result<f64> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("must be finite and positive, got {theta}"),
        });
    }
    check_alpha(alpha)?;
    let t = theta / alpha;
    Ok(2f64.powf(t) * (-(1.0 + t)).exp() * (1.0 + alpha / theta).powf(1.0 + t) + 1.0)
}

/// `max(3, ceil(2 C_θ ln(2/δ) / ε^{α+θ}))`: width at which the criterion
/// fires with probability at least `1 - δ` whenever `f(i₀) > ε‖f‖_α`.
pub fn k_for_criterion(epsilon: f64, delta: f64, theta: f64, alpha: f64) -> Result<usize> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    let c = c_theta(theta, alpha)?;
    let k = (2.0 * c * (2.0 / delta).ln() / epsilon.powf(alpha + theta)).ceil();
    Ok((k as usize).max(3))
}
