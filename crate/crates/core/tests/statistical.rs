//! Monte Carlo checks of the distributional facts the estimators rely on.

use maxsketch::calibrate::{calibrate, CalibrationParams};
use maxsketch::frechet::{self, cdf, inverse_cdf, ratio_cdf, FrechetParams};
use maxsketch::oracle::{
    exact_dominance, exact_norm, exact_rho, ks_critical_99, ks_statistic, random_signal,
};
use maxsketch::variate::{frechet_variate, SeedSpec};
use maxsketch::{
    distance, dominance_norm, k_for_point, norm_median, point_estimate, success_probability,
    EstimatorKind, MaxStableSketch, Signal, SketchConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

fn cfg(alpha: f64, k: usize, seed: u64) -> SketchConfig {
    SketchConfig::new(alpha, k, seed).unwrap()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn inverse_cdf_sample_moments() {
    let n = 1_000_000u64;
    for (r, alpha) in [(0.5, 2.0), (1.0, 4.0)] {
        let spec = SeedSpec::new(123, alpha);
        let xs: Vec<f64> = (0..n)
            .map(|i| frechet_variate(&spec, 0, i).powf(r))
            .collect();
        let (mean, se) = mean_and_se(&xs);
        let truth = gamma(1.0 - r / alpha);
        assert!(
            (mean - truth).abs() <= 4.0 * se,
            "r={r} alpha={alpha}: mean {mean} vs {truth} (se {se})"
        );
    }
}

#[test]
fn ratio_of_variates_follows_ratio_law() {
    let n = 100_000u64;
    for alpha in [0.5, 1.0, 2.0] {
        let spec = SeedSpec::new(808, alpha);
        let xs: Vec<f64> = (0..n)
            .map(|i| frechet_variate(&spec, 0, i) / frechet_variate(&spec, 1, i))
            .collect();
        let d = ks_statistic(&xs, |x| ratio_cdf(x, alpha));
        assert!(d < ks_critical_99(n as usize), "alpha {alpha}: D = {d}");
    }
}

#[test]
fn sketch_row_is_frechet_with_norm_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for alpha in [0.7, 1.0, 2.0] {
        let f = random_signal(&mut rng, 25, 1000, 0.1, 10.0);
        let norm = exact_norm(&f, alpha);
        let n = 10_000;
        let xs: Vec<f64> = (0..n)
            .map(|seed| MaxStableSketch::from_signal(&f, cfg(alpha, 1, seed)).values()[0] / norm)
            .collect();
        let p = FrechetParams::standard(alpha).unwrap();
        let d = ks_statistic(&xs, |x| cdf(x, &p));
        assert!(d < ks_critical_99(n as usize), "alpha {alpha}: D = {d}");
    }
}

#[test]
fn normalised_row_moments_are_unbiased() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (alpha, r) = (2.0, 0.5);
    let f = random_signal(&mut rng, 40, 10_000, 0.5, 5.0);
    let norm = exact_norm(&f, alpha);
    let mut xs = Vec::new();
    for seed in 0..500 {
        let s = MaxStableSketch::from_signal(&f, cfg(alpha, 100, seed));
        xs.extend(s.values().iter().map(|e| (e / norm).powf(r)));
    }
    let (mean, se) = mean_and_se(&xs);
    let truth = gamma(1.0 - r / alpha);
    assert!((mean - truth).abs() <= 4.0 * se, "{mean} vs {truth} ± {se}");
}

#[test]
fn median_estimator_spread_shrinks_with_width() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let alpha = 1.0;
    let f = random_signal(&mut rng, 20, 1000, 0.1, 10.0);
    let norm = exact_norm(&f, alpha);
    let mut spreads = Vec::new();
    for k in [100, 1000, 10_000] {
        let ratios: Vec<f64> = (0..60)
            .map(|seed| norm_median(&MaxStableSketch::from_signal(&f, cfg(alpha, k, seed))).value / norm)
            .collect();
        let (mean, se) = mean_and_se(&ratios);
        spreads.push(se);
        assert!((mean - 1.0).abs() < 0.1, "k {k}: mean ratio {mean}");
    }
    assert!(spreads[0] > spreads[1] && spreads[1] > spreads[2], "{spreads:?}");
}

#[test]
fn distance_disjoint_supports() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alpha = 1.0;
    let f = random_signal(&mut rng, 30, 1000, 0.5, 5.0);
    let g_raw = random_signal(&mut rng, 30, 1000, 0.5, 5.0);
    let g = Signal::try_from(g_raw.iter().map(|(i, v)| (i + 1_000_000, v)).collect::<Vec<_>>())
        .unwrap();
    let truth = exact_rho(&f, &g, alpha);
    let truth_sum = exact_norm(&f, alpha) + exact_norm(&g, alpha);
    assert!((truth - truth_sum).abs() < 1e-12 * truth);
    let mut ok = 0;
    for seed in 0..100 {
        let c = cfg(alpha, 4000, seed);
        let d = distance(
            &MaxStableSketch::from_signal(&f, c),
            &MaxStableSketch::from_signal(&g, c),
            EstimatorKind::Median,
        )
        .unwrap();
        ok += usize::from((d.raw / truth - 1.0).abs() <= 0.3);
    }
    assert!(ok >= 90, "{ok}/100");
}

#[test]
fn dominance_norm_of_three_signals() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let alpha = 1.0;
    let fs: Vec<Signal> = (0..3)
        .map(|_| random_signal(&mut rng, 50, 120, 0.1, 10.0))
        .collect();
    let truth = exact_dominance(&fs, alpha).unwrap();
    let mut ok = 0;
    for seed in 0..100 {
        let sketches: Vec<_> = fs
            .iter()
            .map(|f| MaxStableSketch::from_signal(f, cfg(alpha, 2000, seed)))
            .collect();
        let est = dominance_norm(&sketches, EstimatorKind::Median).unwrap().value;
        ok += usize::from((est / truth - 1.0).abs() <= 0.1);
    }
    assert!(ok >= 95, "{ok}/100");
}

#[test]
fn point_recovery_rate_matches_closed_form() {
    // f(i₀) = 10 plus 50 entries of 1, α = 2.
    let alpha = 2.0;
    let mut pairs: Vec<(u64, f64)> = (1..=50).map(|i| (i, 1.0)).collect();
    pairs.push((0, 10.0));
    let f = Signal::try_from(pairs).unwrap();
    let k = k_for_point(0.9, 0.3, alpha).unwrap();
    let p = success_probability(&f, 0, alpha, k).unwrap();
    let trials = 10_000;
    let hits = (0..trials)
        .filter(|&seed| {
            let s = MaxStableSketch::from_signal(&f, cfg(alpha, k, seed));
            (point_estimate(&s, 0).estimate - 10.0).abs() <= 1e-9 * 10.0
        })
        .count();
    let rate = hits as f64 / trials as f64;
    assert!((rate - p).abs() <= 0.02, "k {k}: rate {rate} vs {p}");
}

#[test]
fn calibration_is_reproducible_and_finite() {
    let p = CalibrationParams {
        signal_len: 16,
        ..CalibrationParams::new(1.0, EstimatorKind::Median, 0.1, 0.05, 300)
    };
    let a = calibrate(&p).unwrap();
    let b = calibrate(&p).unwrap();
    assert_eq!(a, b);
    let c = a.c.expect("target reached");
    assert!(c.is_finite() && c > 0.0);
    let (lo, hi) = a.c_band;
    assert!(lo.unwrap() <= c);
    if let Some(hi) = hi {
        assert!(hi >= c);
    }
}

#[test]
fn calibrated_constant_does_not_grow_with_epsilon() {
    let mut prev = f64::INFINITY;
    for eps in [0.1, 0.2, 0.3] {
        let mut p = CalibrationParams::new(1.0, EstimatorKind::Median, eps, 0.05, 400);
        p.signal_len = 16;
        let c = calibrate(&p).unwrap().c.unwrap();
        assert!(c <= prev * 1.1, "eps {eps}: C {c} after {prev}");
        prev = c;
    }
}

#[test]
fn median_formula_hits_half() {
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let p = FrechetParams::standard(alpha).unwrap();
        let m = frechet::median(&p);
        assert!((cdf(m, &p) - 0.5).abs() < 1e-15);
        assert!((inverse_cdf(0.5, alpha) / m - 1.0).abs() < 1e-15);
    }
}
