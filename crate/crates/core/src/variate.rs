//! Deterministic regeneration of the Fréchet variates `Z_j(i)`.
//!
//! Every variate is a pure function of `(master_seed, alpha, j, i)`, so any
//! holder of the seed can recompute any `Z_j(i)` in O(1) without storing
//! per-index state. The mapping is part of the sketch file format (version
//! 1) and must never change without bumping the format version.
//!
//! Mapping, version 1 (all arithmetic is wrapping on `u64`, so results do
//! not depend on host byte order):
//!
//! ```text
//! mix(x)        = splitmix64 output function applied to x + 0x9E3779B97F4A7C15
//! seed_key      = mix(master_seed ^ 0x4D53534B_00000001)
//! row_key(j)    = mix(seed_key ^ mix(j ^ 0xA0761D6478BD642F))
//! item_key(i)   = mix(i ^ 0xE7037ED1A0B428DB)
//! word(j, i)    = mix(row_key(j) ^ item_key(i))
//! u(j, i)       = ((word >> 12) + 0.5) * 2^-52        in (0, 1)
//! Z_j(i)        = (ln(1/u))^(-1/alpha)
//! ```

use crate::frechet::inverse_cdf;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_TWEAK: u64 = 0x4D53_534B_0000_0001;
const ROW_TWEAK: u64 = 0xA076_1D64_78BD_642F;
const ITEM_TWEAK: u64 = 0xE703_7ED1_A0B4_28DB;

/// Smallest uniform the mapping can produce, `2^-53`.
pub const U_MIN: f64 = 0.5 / (1u64 << 52) as f64;
/// Largest uniform the mapping can produce, `1 - 2^-53`. Both ends are
/// exactly representable, so `u` never rounds to 0 or 1.
pub const U_MAX: f64 = 1.0 - U_MIN;

/// Identity of a variate family: master seed plus tail index.
///
/// Two specs generate the same variates iff both fields are bit-equal.
#[derive(Clone, Copy, Debug)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub alpha: f64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, alpha: f64) -> Self {
        Self { master_seed, alpha }
    }

    pub fn row_key(&self, j: u64) -> u64 {
        row_key(self.master_seed, j)
    }
}

impl PartialEq for SeedSpec {
    fn eq(&self, other: &Self) -> bool {
        self.master_seed == other.master_seed && self.alpha.to_bits() == other.alpha.to_bits()
    }
}

impl Eq for SeedSpec {}

#[inline]
pub(crate) fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub(crate) fn row_key(master_seed: u64, j: u64) -> u64 {
    mix(mix(master_seed ^ SEED_TWEAK) ^ mix(j ^ ROW_TWEAK))
}

#[inline]
pub(crate) fn item_key(i: u64) -> u64 {
    mix(i ^ ITEM_TWEAK)
}

#[inline]
pub(crate) fn word_to_unit(word: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((word >> 12) as f64 + 0.5) * SCALE
}

#[inline]
pub(crate) fn keyed_uniform(row_key: u64, item_key: u64) -> f64 {
    word_to_unit(mix(row_key ^ item_key))
}

/// Uniform in `[U_MIN, U_MAX]` for row `j` and signal index `i`.
pub fn uniform01(spec: &SeedSpec, j: u64, i: u64) -> f64 {
    keyed_uniform(spec.row_key(j), item_key(i))
}

/// Standard α-Fréchet variate `Z_j(i)`.
pub fn frechet_variate(spec: &SeedSpec, j: u64, i: u64) -> f64 {
    inverse_cdf(uniform01(spec, j, i), spec.alpha)
}

/// Smallest and largest variate the generator can emit for `alpha`.
pub fn variate_bounds(alpha: f64) -> (f64, f64) {
    (inverse_cdf(U_MIN, alpha), inverse_cdf(U_MAX, alpha))
}

/// Precomputed row keys for a fixed spec and width, for the hot update path.
#[derive(Clone, Debug)]
pub struct RowKeys {
    alpha: f64,
    keys: Vec<u64>,
}

impl RowKeys {
    pub fn new(spec: &SeedSpec, k: usize) -> Self {
        let keys = (0..k as u64).map(|j| spec.row_key(j)).collect();
        Self {
            alpha: spec.alpha,
            keys,
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// `Z_j(i)` for every row `j`, in row order.
    pub fn variates(&self, i: u64) -> impl Iterator<Item = f64> + '_ {
        let ik = item_key(i);
        let alpha = self.alpha;
        self.keys
            .iter()
            .map(move |&rk| inverse_cdf(keyed_uniform(rk, ik), alpha))
    }
}
