//! Empirical calibration of the norm-sizing constant `C` in
//! `K ≥ C ln(1/δ) / ε²`.
//!
//! The constant depends on α and the estimator and has no closed form. We
//! draw synthetic signals and master seeds once, then search for the
//! smallest width `K` whose empirical coverage
//! `P{|est/‖f‖ - 1| ≤ ε}` reaches `1 - δ`. Every candidate width reuses the
//! same signals and seeds, so coverage is close to monotone in `K` and a
//! doubling-then-bisection search is sound in practice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimators::{check_open_unit, median_estimate, moment_estimate, EstimatorKind};
use crate::frechet::check_alpha;
use crate::oracle::{exact_norm, random_signal};
use crate::sketch::{MaxStableSketch, Signal, SketchConfig};

/// Below this many trials the coverage estimate is too coarse to trust.
pub const MIN_RECOMMENDED_TRIALS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationParams {
    pub alpha: f64,
    pub kind: EstimatorKind,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    /// Entries per synthetic signal.
    pub signal_len: usize,
    /// Seeds the RNG stream that draws signals and master seeds.
    pub rng_seed: u64,
    /// Search ceiling for `K`.
    pub k_max: usize,
}

impl CalibrationParams {
    pub fn new(alpha: f64, kind: EstimatorKind, epsilon: f64, delta: f64, trials: usize) -> Self {
        Self {
            alpha,
            kind,
            epsilon,
            delta,
            trials,
            signal_len: 64,
            rng_seed: 0x5EED,
            k_max: 1 << 16,
        }
    }

    fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_open_unit("epsilon", self.epsilon)?;
        check_open_unit("delta", self.delta)?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter {
                name: "trials",
                reason: "at least one trial is required".into(),
            });
        }
        if self.signal_len == 0 || self.k_max == 0 {
            return Err(Error::InvalidParameter {
                name: "signal_len",
                reason: "signal length and k_max must be positive".into(),
            });
        }
        if let EstimatorKind::Moment { r } = self.kind {
            if !(r > 0.0 && r < self.alpha / 2.0) {
                return Err(Error::InvalidParameter {
                    name: "r",
                    reason: format!("calibration needs 0 < r < alpha/2, got {r}"),
                });
            }
        }
        Ok(())
    }

    /// `C` implied by a width `k`: `k ε² / ln(1/δ)`.
    pub fn c_for_k(&self, k: usize) -> f64 {
        k as f64 * self.epsilon * self.epsilon / (1.0 / self.delta).ln()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    /// Smallest width reaching the target coverage; `None` if `k_max` was not enough.
    pub k: Option<usize>,
    pub c: Option<f64>,
    /// Coverage observed at `k` (or at `k_max` when the target was missed).
    pub coverage: f64,
    /// 95% band on `C`: widths where the Wilson upper / lower coverage bound
    /// first reaches `1 - δ`.
    pub c_band: (Option<f64>, Option<f64>),
    pub trials: usize,
    pub warnings: Vec<String>,
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054;
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

struct Trial {
    signal: Signal,
    norm: f64,
    seed: u64,
}

struct Harness<'a> {
    params: &'a CalibrationParams,
    trials: Vec<Trial>,
}

impl Harness<'_> {
    fn successes(&self, k: usize) -> usize {
        let p = self.params;
        self.trials
            .iter()
            .filter(|t| {
                let config = SketchConfig::new(p.alpha, k, t.seed).expect("validated config");
                let s = MaxStableSketch::from_signal(&t.signal, config);
                let est = match p.kind {
                    EstimatorKind::Median => median_estimate(s.values(), p.alpha),
                    EstimatorKind::Moment { r } => moment_estimate(s.values(), r, p.alpha),
                };
                (est / t.norm - 1.0).abs() <= p.epsilon
            })
            .count()
    }

    /// Smallest `k ≤ k_max` with `accept(successes(k))`, assuming monotonicity.
    fn smallest_k(&self, accept: impl Fn(usize) -> bool) -> Option<usize> {
        let k_max = self.params.k_max;
        let mut hi = 1;
        while !accept(self.successes(hi)) {
            if hi >= k_max {
                return None;
            }
            hi = (hi * 2).min(k_max);
        }
        let mut lo = hi / 2; // fails, or 0
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if accept(self.successes(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

pub fn calibrate(params: &CalibrationParams) -> Result<Calibration> {
    params.validate()?;
    let mut warnings = Vec::new();
    if params.trials < MIN_RECOMMENDED_TRIALS {
        warnings.push(format!(
            "only {} trials; coverage estimates below {MIN_RECOMMENDED_TRIALS} trials are coarse",
            params.trials
        ));
    }
    if (params.trials as f64) * params.delta < 5.0 {
        warnings.push(format!(
            "trials * delta = {:.2} < 5: too few expected failures to resolve the 1 - delta quantile",
            params.trials as f64 * params.delta
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let universe = (params.signal_len as u64).saturating_mul(16);
    let trials = (0..params.trials)
        .map(|_| {
            let signal = random_signal(&mut rng, params.signal_len, universe, 0.01, 100.0);
            let norm = exact_norm(&signal, params.alpha);
            Trial {
                signal,
                norm,
                seed: rng.random(),
            }
        })
        .collect();
    let harness = Harness { params, trials };

    let target = 1.0 - params.delta;
    let n = params.trials;
    let k = harness.smallest_k(|s| s as f64 / n as f64 >= target);
    let coverage = harness.successes(k.unwrap_or(params.k_max)) as f64 / n as f64;
    if k.is_none() {
        warnings.push(format!(
            "target coverage {target} not reached by k_max = {}",
            params.k_max
        ));
    }
    let k_lo = harness.smallest_k(|s| wilson_interval(s, n).1 >= target);
    let k_hi = harness.smallest_k(|s| wilson_interval(s, n).0 >= target);

    Ok(Calibration {
        k,
        c: k.map(|k| params.c_for_k(k)),
        coverage,
        c_band: (k_lo.map(|k| params.c_for_k(k)), k_hi.map(|k| params.c_for_k(k))),
        trials: n,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
        let (lo, hi) = wilson_interval(100, 100);
        assert!(lo > 0.96 && hi == 1.0);
    }

    #[test]
    fn rejects_zero_trials() {
        let p = CalibrationParams::new(1.0, EstimatorKind::Median, 0.1, 0.05, 0);
        assert!(matches!(
            calibrate(&p),
            Err(Error::InvalidParameter { name: "trials", .. })
        ));
    }

    #[test]
    fn rejects_moment_order_outside_guarantee() {
        let p = CalibrationParams::new(1.0, EstimatorKind::Moment { r: 0.6 }, 0.1, 0.05, 10);
        assert!(calibrate(&p).is_err());
    }

    #[test]
    fn warns_on_few_trials() {
        let mut p = CalibrationParams::new(1.0, EstimatorKind::Median, 0.5, 0.2, 20);
        p.signal_len = 8;
        let cal = calibrate(&p).unwrap();
        assert!(!cal.warnings.is_empty());
        assert!(cal.k.is_some());
    }

    #[test]
    fn c_for_k_inverts_sizing() {
        let p = CalibrationParams::new(1.0, EstimatorKind::Median, 0.1, 0.01, 10);
        assert!((p.c_for_k(461) - 461.0 * 0.01 / 100f64.ln()).abs() < 1e-12);
    }
}
