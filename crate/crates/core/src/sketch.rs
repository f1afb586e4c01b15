//! The max-stable sketch `E_j(f) = max_i f(i) Z_j(i)`, `j = 0..K`.
//!
//! Updates follow max-cash-register semantics (`f(i) := max(f(i), v)`), so
//! the sketch is insensitive to arrival order and to re-delivery. Two
//! sketches of the same family merge by component-wise maximum, which is
//! exactly the sketch of the pointwise maximum of the two signals.

use std::collections::BTreeMap;

use crate::error::{Error, FormatError, Result};
use crate::frechet::check_alpha;
use crate::variate::{RowKeys, SeedSpec};

/// Current binary format version. Pins the variate mapping in [`crate::variate`].
pub const FORMAT_VERSION: u8 = 1;
pub const MAGIC: &[u8; 4] = b"MSSK";
/// magic + version + alpha + k + seed
pub const HEADER_LEN: usize = 4 + 1 + 8 + 4 + 8;

/// Identity of a sketch family. Sketches combine only under equal configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SketchConfig {
    seed: SeedSpec,
    k: usize,
    format_version: u8,
}

impl SketchConfig {
    pub fn new(alpha: f64, k: usize, master_seed: u64) -> Result<Self> {
        check_alpha(alpha)?;
        if k == 0 {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "sketch width must be at least 1".into(),
            });
        }
        if k > u32::MAX as usize {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("sketch width {k} exceeds the format limit"),
            });
        }
        Ok(Self {
            seed: SeedSpec::new(master_seed, alpha),
            k,
            format_version: FORMAT_VERSION,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.seed.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn master_seed(&self) -> u64 {
        self.seed.master_seed
    }

    pub fn seed_spec(&self) -> &SeedSpec {
        &self.seed
    }

    pub fn format_version(&self) -> u8 {
        self.format_version
    }

    /// Same family with a different master seed.
    pub fn with_seed(&self, master_seed: u64) -> Self {
        Self {
            seed: SeedSpec::new(master_seed, self.seed.alpha),
            ..*self
        }
    }

    pub fn ensure_compatible(&self, other: &SketchConfig) -> Result<()> {
        if self == other {
            return Ok(());
        }
        Err(Error::Incompatible(format!(
            "alpha {} / k {} / seed {} / v{} vs alpha {} / k {} / seed {} / v{}",
            self.alpha(),
            self.k,
            self.master_seed(),
            self.format_version,
            other.alpha(),
            other.k,
            other.master_seed(),
            other.format_version,
        )))
    }
}

/// One stream arrival `(i, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamItem {
    pub index: u64,
    pub value: f64,
}

impl StreamItem {
    pub fn new(index: u64, value: f64) -> Result<Self> {
        check_value(index, value)?;
        Ok(Self { index, value })
    }
}

fn check_value(index: u64, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidValue { index, value })
    }
}

/// Sparse non-negative signal; zero entries are not stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Signal {
    entries: BTreeMap<u64, f64>,
}

impl Signal {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `f(index) = value`, replacing any previous value.
    pub fn set(&mut self, index: u64, value: f64) -> Result<()> {
        check_value(index, value)?;
        if value == 0.0 {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
        Ok(())
    }

    /// Max-cash-register update, `f(index) := max(f(index), value)`.
    pub fn raise(&mut self, index: u64, value: f64) -> Result<()> {
        check_value(index, value)?;
        if value > self.get(index) {
            self.entries.insert(index, value);
        }
        Ok(())
    }

    pub fn get(&self, index: u64) -> f64 {
        self.entries.get(&index).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().map(|(&i, &v)| (i, v))
    }

    pub fn items(&self) -> impl Iterator<Item = StreamItem> + '_ {
        self.iter().map(|(index, value)| StreamItem { index, value })
    }

    /// `a · f`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("scale factor must be finite and non-negative, got {a}"),
            });
        }
        let mut out = Signal::new();
        for (i, v) in self.iter() {
            out.set(i, a * v)?;
        }
        Ok(out)
    }
}

impl TryFrom<Vec<(u64, f64)>> for Signal {
    type Error = Error;

    fn try_from(pairs: Vec<(u64, f64)>) -> Result<Self> {
        let mut s = Signal::new();
        for (i, v) in pairs {
            s.raise(i, v)?;
        }
        Ok(s)
    }
}

/// K weighted maxima of a non-negative signal under one variate family.
#[derive(Clone, Debug)]
pub struct MaxStableSketch {
    config: SketchConfig,
    values: Vec<f64>,
    rows: RowKeys,
}

impl PartialEq for MaxStableSketch {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl MaxStableSketch {
    /// Sketch of the identically-zero signal.
    pub fn new(config: SketchConfig) -> Self {
        Self {
            config,
            values: vec![0.0; config.k],
            rows: RowKeys::new(&config.seed, config.k),
        }
    }

    pub fn from_signal(signal: &Signal, config: SketchConfig) -> Self {
        let mut s = Self::new(config);
        for (i, v) in signal.iter() {
            s.update_unchecked(i, v);
        }
        s
    }

    pub fn from_items<I>(items: I, config: SketchConfig) -> Result<Self>
    where
        I: IntoIterator<Item = StreamItem>,
    {
        let mut s = Self::new(config);
        for item in items {
            s.update(item)?;
        }
        Ok(s)
    }

    pub fn config(&self) -> &SketchConfig {
        &self.config
    }

    pub fn alpha(&self) -> f64 {
        self.config.alpha()
    }

    pub fn k(&self) -> usize {
        self.config.k
    }

    /// The row maxima `E_j(f)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `Z_j(i)` for all rows of this sketch's family.
    pub fn variates(&self, index: u64) -> impl Iterator<Item = f64> + '_ {
        self.rows.variates(index)
    }

    pub fn update(&mut self, item: StreamItem) -> Result<()> {
        check_value(item.index, item.value)?;
        self.update_unchecked(item.index, item.value);
        Ok(())
    }

    fn update_unchecked(&mut self, index: u64, value: f64) {
        if value == 0.0 {
            return;
        }
        for (slot, z) in self.values.iter_mut().zip(self.rows.variates(index)) {
            let x = value * z;
            if x > *slot {
                *slot = x;
            }
        }
    }

    /// Folds `other` into `self` by component-wise maximum.
    pub fn merge_from(&mut self, other: &MaxStableSketch) -> Result<()> {
        self.config.ensure_compatible(&other.config)?;
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            if b > *a {
                *a = b;
            }
        }
        Ok(())
    }

    pub fn merge(&self, other: &MaxStableSketch) -> Result<MaxStableSketch> {
        let mut out = self.clone();
        out.merge_from(other)?;
        Ok(out)
    }

    /// Sketch of `a · f`.
    pub fn scale(&self, a: f64) -> Result<MaxStableSketch> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("scale factor must be finite and non-negative, got {a}"),
            });
        }
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= a;
        }
        Ok(out)
    }

    /// Encodes the sketch. Layout, all integers little-endian:
    ///
    /// ```text
    /// "MSSK" | version: u8 | alpha: f64 bits u64 | k: u32 | master_seed: u64 | k x f64 bits u64
    /// ```
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.push(self.config.format_version);
        out.extend_from_slice(&self.alpha().to_bits().to_le_bytes());
        out.extend_from_slice(&(self.k() as u32).to_le_bytes());
        out.extend_from_slice(&self.config.master_seed().to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_bits().to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        if bytes.len() < MAGIC.len() || &bytes[..4] != MAGIC {
            return Err(FormatError::BadMagic);
        }
        if bytes.len() < 5 {
            return Err(FormatError::Truncated {
                expected: HEADER_LEN,
                actual: bytes.len(),
            });
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(FormatError::UnsupportedVersion(bytes[4]));
        }
        if bytes.len() < HEADER_LEN {
            return Err(FormatError::Truncated {
                expected: HEADER_LEN,
                actual: bytes.len(),
            });
        }
        let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let alpha = f64::from_bits(u64_at(5));
        let k = u32::from_le_bytes(bytes[13..17].try_into().unwrap()) as usize;
        let seed = u64_at(17);
        let config =
            SketchConfig::new(alpha, k, seed).map_err(|_| FormatError::InvalidHeader(
                if k == 0 { "k must be positive" } else { "alpha must be finite and positive" },
            ))?;
        let expected = HEADER_LEN + 8 * k;
        if bytes.len() < expected {
            return Err(FormatError::Truncated {
                expected,
                actual: bytes.len(),
            });
        }
        if bytes.len() > expected {
            return Err(FormatError::TrailingBytes(bytes.len() - expected));
        }
        let mut values = Vec::with_capacity(k);
        for j in 0..k {
            let v = f64::from_bits(u64_at(HEADER_LEN + 8 * j));
            if !(v.is_finite() && v >= 0.0) {
                return Err(FormatError::InvalidValue(j));
            }
            // -0.0 passes the check above; normalise so equality stays bitwise.
            values.push(v + 0.0);
        }
        let mut s = Self::new(config);
        s.values = values;
        Ok(s)
    }
}
