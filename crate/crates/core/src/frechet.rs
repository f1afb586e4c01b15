//! Closed-form mathematics of the α-Fréchet law.
//!
//! An α-Fréchet variable with scale σ has CDF `exp(-σ^α x^{-α})` on `x > 0`.
//! Every row of a max-stable sketch is such a variable with σ equal to the
//! ℓ_α norm of the sketched signal, so the estimators lean on the moments and
//! the median computed here.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Parameters of an α-Fréchet law: tail index `alpha` and scale `scale`.
///
/// A zero scale is the degenerate point mass at 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrechetParams {
    alpha: f64,
    scale: f64,
}

impl FrechetParams {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "scale",
                reason: format!("must be finite and non-negative, got {scale}"),
            });
        }
        Ok(Self { alpha, scale })
    }

    /// The standard law, σ = 1.
    pub fn standard(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("must be finite and positive, got {alpha}"),
        })
    }
}

/// `P{Z <= x}`.
pub fn cdf(x: f64, params: &FrechetParams) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if params.scale == 0.0 {
        return 1.0;
    }
    (-(params.scale / x).powf(params.alpha)).exp()
}

/// Inverse CDF of the standard law: `(ln(1/u))^{-1/α}`.
///
/// The caller guarantees `0 < u < 1`; outside that interval the result is
/// `0`, `+inf` or NaN. [`inverse_cdf_checked`] validates first.
#[inline]
pub fn inverse_cdf(u: f64, alpha: f64) -> f64 {
    let t = -u.ln();
    if alpha == 1.0 {
        t.recip()
    } else if alpha == 2.0 {
        t.sqrt().recip()
    } else {
        t.powf(-alpha.recip())
    }
}

pub fn inverse_cdf_checked(u: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter {
            name: "u",
            reason: format!("must lie strictly inside (0, 1), got {u}"),
        });
    }
    Ok(inverse_cdf(u, alpha))
}

/// `E Z^p = σ^p Γ(1 - p/α)`, finite only for `0 < p < α`.
pub fn moment(p: f64, params: &FrechetParams) -> Result<f64> {
    if !(p > 0.0 && p < params.alpha) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!(
                "moment order must satisfy 0 < p < alpha = {}, got {p}",
                params.alpha
            ),
        });
    }
    Ok(params.scale.powf(p) * gamma(1.0 - p / params.alpha))
}

/// `σ (ln 2)^{-1/α}`; zero for the degenerate law.
pub fn median(params: &FrechetParams) -> f64 {
    if params.scale == 0.0 {
        return 0.0;
    }
    params.scale * std::f64::consts::LN_2.powf(-params.alpha.recip())
}

/// CDF of the ratio of two iid α-Fréchet variables: `1 / (x^{-α} + 1)`.
///
/// Non-positive `x` maps to 0.
pub fn ratio_cdf(x: f64, alpha: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x.powf(-alpha) + 1.0).recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2, PI};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn cdf_values() {
        let p11 = FrechetParams::new(1.0, 1.0).unwrap();
        assert!(close(cdf(1.0, &p11), E.recip(), 1e-15));
        assert_eq!(cdf(-3.0, &p11), 0.0);
        assert_eq!(cdf(0.0, &p11), 0.0);
        let p21 = FrechetParams::new(2.0, 1.0).unwrap();
        assert!(close(cdf(2.0, &p21), (-0.25f64).exp(), 1e-15));
        assert!((cdf(2.0, &p21) - 0.7788008).abs() < 1e-7);
    }

    #[test]
    fn degenerate_scale_is_point_mass() {
        let p = FrechetParams::new(1.5, 0.0).unwrap();
        assert_eq!(cdf(1e-300, &p), 1.0);
        assert_eq!(cdf(0.0, &p), 0.0);
        assert_eq!(median(&p), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(FrechetParams::new(0.0, 1.0).is_err());
        assert!(FrechetParams::new(-1.0, 1.0).is_err());
        assert!(FrechetParams::new(f64::INFINITY, 1.0).is_err());
        assert!(FrechetParams::new(f64::NAN, 1.0).is_err());
        assert!(FrechetParams::new(1.0, -0.5).is_err());
        assert!(FrechetParams::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn inverse_cdf_values() {
        assert!(close(inverse_cdf(0.5, 1.0), 1.0 / LN_2, 1e-15));
        assert!((inverse_cdf(0.5, 1.0) - 1.4426950).abs() < 1e-7);
        for alpha in [0.3, 1.0, 2.0, 7.5] {
            assert!(close(inverse_cdf(E.recip(), alpha), 1.0, 1e-15));
        }
        assert!(close(inverse_cdf(0.5, 2.0), LN_2.powf(-0.5), 1e-15));
        assert!((inverse_cdf(0.5, 2.0) - 1.2011224).abs() < 1e-7);
    }

    #[test]
    fn inverse_cdf_fast_paths_match_powf() {
        for u in [1e-12, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-12] {
            let t: f64 = -(u as f64).ln();
            assert!(close(inverse_cdf(u, 1.0), t.powf(-1.0), 1e-15));
            assert!(close(inverse_cdf(u, 2.0), t.powf(-0.5), 1e-15));
        }
    }

    #[test]
    fn inverse_cdf_rejects_closed_endpoints() {
        assert!(inverse_cdf_checked(0.0, 1.0).is_err());
        assert!(inverse_cdf_checked(1.0, 1.0).is_err());
        assert!(inverse_cdf_checked(-0.1, 1.0).is_err());
        assert!(inverse_cdf_checked(f64::NAN, 1.0).is_err());
        assert!(inverse_cdf_checked(0.5, 0.0).is_err());
        assert_eq!(inverse_cdf_checked(0.5, 1.0).unwrap(), inverse_cdf(0.5, 1.0));
    }

    #[test]
    fn inverse_cdf_strictly_increasing() {
        for alpha in [0.5, 1.0, 2.0, 4.0] {
            let mut prev = 0.0;
            for k in 1..1000 {
                let z = inverse_cdf(k as f64 / 1000.0, alpha);
                assert!(z > prev);
                prev = z;
            }
        }
    }

    #[test]
    fn round_trip_grid() {
        for alpha in [0.5, 1.0, 2.0, 4.0] {
            let p = FrechetParams::standard(alpha).unwrap();
            for k in 1..=999 {
                let u = k as f64 / 1000.0;
                let back = cdf(inverse_cdf(u, alpha), &p);
                assert!((back - u).abs() <= 1e-12, "alpha={alpha} u={u} back={back}");
            }
        }
    }

    #[test]
    fn scale_action() {
        for alpha in [0.5, 1.0, 3.0] {
            for sigma in [0.1, 1.0, 4.5] {
                let p = FrechetParams::new(alpha, sigma).unwrap();
                let p1 = FrechetParams::standard(alpha).unwrap();
                for x in [0.05, 0.7, 1.0, 2.5, 40.0] {
                    assert!(close(cdf(x, &p), cdf(x / sigma, &p1), 1e-13));
                }
            }
        }
    }

    #[test]
    fn moment_values() {
        let sqrt_pi = PI.sqrt();
        let p = FrechetParams::new(2.0, 1.0).unwrap();
        assert!(close(moment(1.0, &p).unwrap(), sqrt_pi, 1e-13));
        let p = FrechetParams::new(2.0, 3.0).unwrap();
        assert!(close(moment(1.0, &p).unwrap(), 3.0 * sqrt_pi, 1e-13));
        assert!((moment(1.0, &p).unwrap() - 5.3173616).abs() < 1e-6);
        let p = FrechetParams::new(1.0, 1.0).unwrap();
        assert!(close(moment(0.5, &p).unwrap(), sqrt_pi, 1e-13));
    }

    #[test]
    fn moment_domain() {
        let p = FrechetParams::new(2.0, 1.0).unwrap();
        assert!(moment(2.0, &p).is_err());
        assert!(moment(3.0, &p).is_err());
        assert!(moment(0.0, &p).is_err());
        assert!(moment(-1.0, &p).is_err());
    }

    #[test]
    fn gamma_accuracy_on_needed_domain() {
        // Γ(1 - p/α) with p/α in (0, 1): spot values with closed forms.
        assert!(close(gamma(0.5), PI.sqrt(), 1e-13));
        assert!(close(gamma(1.0), 1.0, 1e-13));
        assert!(close(gamma(0.25), 3.625_609_908_221_908_3, 1e-13));
        assert!(close(gamma(0.75), 1.225_416_702_465_177_6, 1e-13));
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        for k in 1..50 {
            let x = k as f64 / 50.0;
            assert!(close(gamma(x) * gamma(1.0 - x), PI / (PI * x).sin(), 1e-13));
        }
    }

    #[test]
    fn median_values() {
        let m = median(&FrechetParams::new(1.0, 1.0).unwrap());
        assert!(close(m, 1.0 / LN_2, 1e-15));
        let m = median(&FrechetParams::new(2.0, 1.0).unwrap());
        assert!((m - 1.2011224).abs() < 1e-7);
        let m = median(&FrechetParams::new(1.0, 5.0).unwrap());
        assert!((m - 7.2134752).abs() < 1e-6);
        for (alpha, sigma) in [(0.5, 2.0), (1.0, 1.0), (3.0, 0.2)] {
            let p = FrechetParams::new(alpha, sigma).unwrap();
            assert!((cdf(median(&p), &p) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn ratio_cdf_values() {
        for alpha in [0.5, 1.0, 2.0] {
            assert_eq!(ratio_cdf(1.0, alpha), 0.5);
        }
        assert!(close(ratio_cdf(2.0, 1.0), 2.0 / 3.0, 1e-15));
        assert!(close(ratio_cdf(1.0 / 3.0, 2.0), 0.1, 1e-14));
        assert_eq!(ratio_cdf(0.0, 1.0), 0.0);
        assert_eq!(ratio_cdf(-2.0, 1.0), 0.0);
        assert!(ratio_cdf(1e-9, 1.0) < 1e-8);
        assert!(ratio_cdf(1e9, 1.0) > 1.0 - 1e-8);
    }
}
