//! Brute-force ground truth on in-memory signals.
//!
//! These are test and calibration tools: they need the whole signal, and are
//! meant for signals of at most ~10^7 entries.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sketch::Signal;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `Σ f(i)^α`.
pub fn exact_norm_pow(signal: &Signal, alpha: f64) -> f64 {
    signal
        .iter()
        .map(|(_, v)| v.powf(alpha))
        .collect::<CompensatedSum>()
        .value()
}

/// `‖f‖_α = (Σ f(i)^α)^{1/α}`.
pub fn exact_norm(signal: &Signal, alpha: f64) -> f64 {
    exact_norm_pow(signal, alpha).powf(alpha.recip())
}

/// `ρ_α(f, g) = Σ |f(i)^α - g(i)^α|` over the union of supports.
pub fn exact_rho(f: &Signal, g: &Signal, alpha: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for (i, v) in f.iter() {
        acc.add((v.powf(alpha) - g.get(i).powf(alpha)).abs());
    }
    for (i, v) in g.iter() {
        if f.get(i) == 0.0 {
            acc.add(v.powf(alpha));
        }
    }
    acc.value()
}

/// `f ∨ g`.
pub fn pointwise_max(f: &Signal, g: &Signal) -> Signal {
    let mut out = f.clone();
    for (i, v) in g.iter() {
        out.raise(i, v).expect("signal values are valid");
    }
    out
}

/// `‖max_r f_r‖_α`.
pub fn exact_dominance(signals: &[Signal], alpha: f64) -> Result<f64> {
    let (first, rest) = signals
        .split_first()
        .ok_or(Error::Empty("dominance norm needs at least one signal"))?;
    let joint = rest.iter().fold(first.clone(), |acc, s| pointwise_max(&acc, s));
    Ok(exact_norm(&joint, alpha))
}

/// Random signal on `len` distinct indices drawn from `[0, universe)`, with
/// values log-uniform on `[lo, hi]`.
pub fn random_signal<R: Rng + ?Sized>(
    rng: &mut R,
    len: usize,
    universe: u64,
    lo: f64,
    hi: f64,
) -> Signal {
    assert!(universe >= len as u64, "universe too small for {len} indices");
    assert!(lo > 0.0 && hi >= lo);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut s = Signal::new();
    while s.len() < len {
        let i = rng.random_range(0..universe);
        if s.get(i) == 0.0 {
            let v = (llo + (lhi - llo) * rng.random::<f64>()).exp();
            s.set(i, v).expect("positive finite value");
        }
    }
    s
}

/// One-sample Kolmogorov–Smirnov statistic `sup_x |F_n(x) - F(x)|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(k, &x)| {
            let c = cdf(x);
            (c - k as f64 / n).max((k + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}

/// Approximate 99% critical value of the one-sample KS statistic.
pub fn ks_critical_99(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}
