//! Dithered uniform quantization onto the midpoint alphabet `Z`.
//!
//! A link at SNR `gamma` carrying `K` channel uses supports
//! `L = floor((1 + gamma)^K)` symbols. `Z` holds the midpoints
//! `(i + 1/2) / L` of `L` equal bins of `[0, 1)`; symbols are addressed by
//! their bin index so that index arithmetic stays exact.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Alphabets needing more than this many bits are treated as exact.
pub const EXACT_MODE_BITS: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphabetSize {
    Finite(u64),
    /// `L > 2^60`: quantization is the identity.
    EffectivelyExact,
}

pub fn alphabet_size(k: u32, gamma: f64) -> Result<AlphabetSize> {
    if k == 0 {
        return invalid("block length K must be at least 1");
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return invalid(format!("SNR must be positive, got {gamma}"));
    }
    let base = 1.0 + gamma;
    if k as f64 * base.log2() > EXACT_MODE_BITS {
        return Ok(AlphabetSize::EffectivelyExact);
    }
    if base.fract() == 0.0 {
        let b = base as u128;
        let l = (0..k).fold(1u128, |acc, _| acc * b);
        return Ok(AlphabetSize::Finite(l as u64));
    }
    Ok(AlphabetSize::Finite(base.powi(k as i32).floor().max(1.0) as u64))
}

/// How a receiver turns a dithered symbol back into a real value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DitherMode {
    /// The receiver removes the (shared pseudo-random) dither: the
    /// reconstruction error is uniform on `[-D/2, D/2)` for every input.
    #[default]
    Subtractive,
    /// The receiver keeps the alphabet point.
    NonSubtractive,
}

impl std::str::FromStr for DitherMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subtractive" => Ok(DitherMode::Subtractive),
            "nonsubtractive" | "non-subtractive" => Ok(DitherMode::NonSubtractive),
            other => invalid(format!("unknown dither mode '{other}'")),
        }
    }
}

/// One quantizer call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dithered {
    /// Bin index of the transmitted symbol; `None` in exact mode.
    pub index: Option<u64>,
    /// The alphabet point sent over the link.
    pub symbol: f64,
    pub dither: f64,
    /// `symbol - z`.
    pub error: f64,
}

impl Dithered {
    pub fn reconstruct(&self, mode: DitherMode) -> f64 {
        match (mode, self.index) {
            (DitherMode::Subtractive, Some(_)) => self.symbol - self.dither,
            _ => self.symbol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSpec {
    k: u32,
    gamma: f64,
    size: AlphabetSize,
}

impl QuantizerSpec {
    pub fn new(k: u32, gamma: f64) -> Result<Self> {
        Ok(Self { k, gamma, size: alphabet_size(k, gamma)? })
    }

    /// A spec with exactly `levels` symbols.
    pub fn from_levels(levels: u64) -> Result<Self> {
        if levels == 0 {
            return invalid("alphabet needs at least one symbol");
        }
        Ok(Self { k: 1, gamma: levels as f64 - 1.0, size: AlphabetSize::Finite(levels) })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn size(&self) -> AlphabetSize {
        self.size
    }

    pub fn levels(&self) -> Option<u64> {
        match self.size {
            AlphabetSize::Finite(l) => Some(l),
            AlphabetSize::EffectivelyExact => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.size == AlphabetSize::EffectivelyExact
    }

    /// Bin width; zero in exact mode.
    pub fn delta(&self) -> f64 {
        self.levels().map_or(0.0, |l| 1.0 / l as f64)
    }

    /// Value of symbol `index`.
    pub fn point(&self, index: u64) -> f64 {
        let l = self.levels().expect("exact mode has no discrete alphabet");
        (index as f64 + 0.5) / l as f64
    }

    /// Every alphabet point, smallest first.
    pub fn alphabet(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.levels().unwrap_or(0)).map(move |i| self.point(i))
    }

    /// Nearest symbol to `x`; a tie between two symbols goes to the upper one.
    pub fn nearest_index(&self, x: f64) -> u64 {
        let l = self.levels().expect("exact mode has no discrete alphabet");
        let scaled = (x * l as f64).floor();
        if scaled <= 0.0 {
            0
        } else {
            (scaled as u64).min(l - 1)
        }
    }

    /// Quantizes `z` (clamped to `[0, 1)`) after adding the dither `u`.
    pub fn quantize_with_dither(&self, z: f64, u: f64) -> Dithered {
        if self.is_exact() {
            return Dithered { index: None, symbol: z, dither: 0.0, error: 0.0 };
        }
        let clamped = z.clamp(0.0, 1.0 - f64::EPSILON);
        let index = self.nearest_index(clamped + u);
        let symbol = self.point(index);
        Dithered { index: Some(index), symbol, dither: u, error: symbol - z }
    }

    /// Draws `u` uniformly from `[-D/2, D/2)` and quantizes.
    pub fn dithered_quantize<R: Rng + ?Sized>(&self, z: f64, rng: &mut R) -> Dithered {
        if self.is_exact() {
            return self.quantize_with_dither(z, 0.0);
        }
        let delta = self.delta();
        let u = rng.gen::<f64>() * delta - delta / 2.0;
        self.quantize_with_dither(z, u)
    }

    fn span_index(&self, x: f64) -> Result<f64> {
        let l = match self.levels() {
            Some(l) => l as f64,
            None => return invalid("directed rounding needs a finite alphabet"),
        };
        let t = x * l - 0.5;
        let snapped = t.round();
        let t = if (t - snapped).abs() <= 1e-9 { snapped } else { t };
        if !(t >= 0.0 && t <= l - 1.0) {
            return invalid(format!("{x} lies outside the alphabet span"));
        }
        Ok(t)
    }

    /// Index of the smallest symbol `>= x`.
    pub fn round_up_index(&self, x: f64) -> Result<u64> {
        Ok(self.span_index(x)?.ceil() as u64)
    }

    /// Index of the largest symbol `<= x`.
    pub fn round_down_index(&self, x: f64) -> Result<u64> {
        Ok(self.span_index(x)?.floor() as u64)
    }

    pub fn round_up_in_z(&self, x: f64) -> Result<f64> {
        Ok(self.point(self.round_up_index(x)?))
    }

    pub fn round_down_in_z(&self, x: f64) -> Result<f64> {
        Ok(self.point(self.round_down_index(x)?))
    }
}
