//! Norm, distance and dominance-norm estimation from sketches.
//!
//! Each row `E_j(f)` is α-Fréchet with scale `‖f‖_α`, so the norm can be read
//! off either from the sample r-th moment (`E Z^r = Γ(1 - r/α)`) or from the
//! sample median (`med Z = (ln 2)^{-1/α}`).

use std::f64::consts::LN_2;
use std::fmt;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::sketch::MaxStableSketch;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EstimatorKind {
    /// Sample r-th moment, valid (with guarantees) for `0 < r < α/2`.
    Moment { r: f64 },
    Median,
}

impl EstimatorKind {
    /// Moment estimator with `r = α/4`, the midpoint of the guaranteed range.
    pub fn default_moment(alpha: f64) -> Self {
        EstimatorKind::Moment { r: alpha / 4.0 }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorKind::Moment { r } => write!(f, "moment(r={r})"),
            EstimatorKind::Median => f.write_str("median"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: EstimatorKind,
    pub k_used: usize,
}

/// Raw and clamped distance estimates. The raw value can dip below zero from
/// sampling noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceEstimate {
    pub raw: f64,
    pub kind: EstimatorKind,
}

impl DistanceEstimate {
    pub fn clamped(&self) -> f64 {
        self.raw.max(0.0)
    }
}

/// Whether a moment order in `[α/2, α)` is accepted. Outside `(0, α/2)` the
/// estimator has infinite-variance terms and no accuracy guarantee.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MomentRange {
    #[default]
    Guaranteed,
    Extended,
}

fn check_moment_order(r: f64, alpha: f64, range: MomentRange) -> Result<()> {
    let upper = match range {
        MomentRange::Guaranteed => alpha / 2.0,
        MomentRange::Extended => alpha,
    };
    if r > 0.0 && r < upper {
        return Ok(());
    }
    let reason = if r >= alpha {
        format!("r = {r} must be below alpha = {alpha} (moment is infinite)")
    } else if r >= upper {
        format!("r = {r} is outside (0, alpha/2 = {upper}); pass the extended range to allow it")
    } else {
        format!("r must be positive, got {r}")
    };
    Err(Error::InvalidParameter { name: "r", reason })
}

/// `((1 / (Γ(1 - r/α) K)) Σ_j E_j^r)^{1/r}`.
pub fn norm_moment(sketch: &MaxStableSketch, r: f64) -> Result<NormEstimate> {
    norm_moment_with(sketch, r, MomentRange::Guaranteed)
}

pub fn norm_moment_with(
    sketch: &MaxStableSketch,
    r: f64,
    range: MomentRange,
) -> Result<NormEstimate> {
    let alpha = sketch.alpha();
    check_moment_order(r, alpha, range)?;
    Ok(NormEstimate {
        value: moment_estimate(sketch.values(), r, alpha),
        kind: EstimatorKind::Moment { r },
        k_used: sketch.k(),
    })
}

pub(crate) fn moment_estimate(values: &[f64], r: f64, alpha: f64) -> f64 {
    let sum: f64 = values.iter().map(|v| v.powf(r)).sum();
    if sum == 0.0 {
        return 0.0;
    }
    (sum / (gamma(1.0 - r / alpha) * values.len() as f64)).powf(r.recip())
}

/// `(ln 2)^{1/α} · median_j E_j`.
pub fn norm_median(sketch: &MaxStableSketch) -> NormEstimate {
    NormEstimate {
        value: median_estimate(sketch.values(), sketch.alpha()),
        kind: EstimatorKind::Median,
        k_used: sketch.k(),
    }
}

pub(crate) fn median_estimate(values: &[f64], alpha: f64) -> f64 {
    LN_2.powf(alpha.recip()) * median_of(values)
}

/// Sample median; the midpoint of the two central order statistics for even
/// lengths. Returns 0 for an empty slice.
pub fn median_of(values: &[f64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let mut buf = values.to_vec();
    let mid = n / 2;
    let (lower, upper, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower_max = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower_max + upper)
    }
}

pub fn estimate_norm(sketch: &MaxStableSketch, kind: EstimatorKind) -> Result<NormEstimate> {
    match kind {
        EstimatorKind::Moment { r } => norm_moment(sketch, r),
        EstimatorKind::Median => Ok(norm_median(sketch)),
    }
}

/// Estimates `ρ_α(f, g) = Σ |f(i)^α - g(i)^α|` through the identity
/// `ρ_α = 2‖f∨g‖^α - ‖f‖^α - ‖g‖^α`.
pub fn distance(
    sf: &MaxStableSketch,
    sg: &MaxStableSketch,
    kind: EstimatorKind,
) -> Result<DistanceEstimate> {
    let joint = sf.merge(sg)?;
    let alpha = sf.alpha();
    let nf = estimate_norm(sf, kind)?.value.powf(alpha);
    let ng = estimate_norm(sg, kind)?.value.powf(alpha);
    let nj = estimate_norm(&joint, kind)?.value.powf(alpha);
    Ok(DistanceEstimate {
        raw: 2.0 * nj - nf - ng,
        kind,
    })
}

/// Norm of the pointwise maximum of the sketched signals.
pub fn dominance_norm(sketches: &[MaxStableSketch], kind: EstimatorKind) -> Result<NormEstimate> {
    let (first, rest) = sketches
        .split_first()
        .ok_or(Error::Empty("dominance norm needs at least one sketch"))?;
    let mut acc = first.clone();
    for s in rest {
        acc.merge_from(s)?;
    }
    estimate_norm(&acc, kind)
}

/// Accuracy target for norm estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizingParams {
    epsilon: f64,
    delta: f64,
    c_constant: f64,
}

pub(crate) fn check_open_unit(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must lie strictly inside (0, 1), got {x}"),
        })
    }
}

impl SizingParams {
    pub const DEFAULT_C: f64 = 1.0;

    pub fn new(epsilon: f64, delta: f64, c_constant: f64) -> Result<Self> {
        check_open_unit("epsilon", epsilon)?;
        check_open_unit("delta", delta)?;
        if !(c_constant.is_finite() && c_constant > 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("must be finite and positive, got {c_constant}"),
            });
        }
        Ok(Self {
            epsilon,
            delta,
            c_constant,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c_constant(&self) -> f64 {
        self.c_constant
    }
}

/// `ceil(C ln(1/δ) / ε²)`, at least 1.
pub fn k_for_norm(p: &SizingParams) -> usize {
    let k = (p.c_constant * (1.0 / p.delta).ln() / (p.epsilon * p.epsilon)).ceil();
    (k as usize).max(1)
}
