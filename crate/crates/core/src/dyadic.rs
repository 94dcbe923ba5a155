//! Finite-resolution model of the Walsh group.
//!
//! A point of the group is truncated to its first `N` coordinates and stored
//! as an integer index whose bit `i` is the coordinate `x_i` (LSB first).
//! With this layout the group operation is XOR, the dyadic interval `I_n` is
//! the set of indices divisible by `2^n`, and functions constant on rank-`N`
//! intervals are plain arrays of `2^N` samples.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of retained coordinates.
pub const DEFAULT_MAX_BITS: u32 = 24;

/// Absolute ceiling, whatever `WALSHVP_MAX_N` says.
pub const HARD_MAX_BITS: u32 = 30;

/// Environment variable overriding [`DEFAULT_MAX_BITS`].
pub const MAX_BITS_ENV: &str = "WALSHVP_MAX_N";

/// Cap in effect for this process. Read once.
pub fn max_bits() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_BITS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .map(|n| n.clamp(1, HARD_MAX_BITS))
            .unwrap_or(DEFAULT_MAX_BITS)
    })
}

/// Number of retained coordinates `N`; functions carry `2^N` samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Resolution(u32);

impl Resolution {
    pub fn new(bits: u32) -> Result<Self> {
        let cap = max_bits();
        if bits == 0 || bits > cap {
            return Err(Error::ResolutionOutOfRange { bits, cap });
        }
        Ok(Resolution(bits))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    /// Sample count `2^N`.
    #[inline]
    pub fn len(self) -> usize {
        1usize << self.0
    }

    pub(crate) fn check_same(self, other: Resolution) -> Result<()> {
        if self != other {
            return Err(Error::ResolutionMismatch {
                left: self.0,
                right: other.0,
            });
        }
        Ok(())
    }

    pub(crate) fn check_level(self, n: u32) -> Result<()> {
        if n > self.0 {
            return Err(Error::OutOfRange {
                what: "dyadic level",
                value: n as u64,
                limit: self.0 as u64,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={}", self.0)
    }
}

/// A point `x = (x_0, ..., x_{N-1})` encoded LSB-first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupPoint {
    resolution: Resolution,
    index: usize,
}

impl GroupPoint {
    pub fn new(resolution: Resolution, index: usize) -> Result<Self> {
        if index >= resolution.len() {
            return Err(Error::OutOfRange {
                what: "point index",
                value: index as u64,
                limit: resolution.len() as u64 - 1,
            });
        }
        Ok(GroupPoint { resolution, index })
    }

    pub fn zero(resolution: Resolution) -> Self {
        GroupPoint {
            resolution,
            index: 0,
        }
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Coordinate `x_i`.
    pub fn coordinate(&self, i: u32) -> u8 {
        ((self.index >> i) & 1) as u8
    }

    /// Coordinate-wise addition mod 2.
    pub fn add(&self, other: &GroupPoint) -> Result<GroupPoint> {
        self.resolution.check_same(other.resolution)?;
        Ok(GroupPoint {
            resolution: self.resolution,
            index: self.index ^ other.index,
        })
    }

    /// `|x| = sum_i x_i 2^{-(i+1)}`.
    pub fn abs(&self) -> f64 {
        abs_value(self.index, self.resolution)
    }
}

/// `|x|` for the point with the given index.
///
/// Exact in `f64` for every resolution up to the hard cap.
pub fn abs_value(index: usize, resolution: Resolution) -> f64 {
    let bits = resolution.bits();
    let rev = index.reverse_bits() >> (usize::BITS - bits);
    rev as f64 / resolution.len() as f64
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        let mut s = 0.0;
        for &v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Exponent of an `L_p` norm, `1 <= p <= inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    pub const ONE: LpExponent = LpExponent::Finite(1.0);
    pub const TWO: LpExponent = LpExponent::Finite(2.0);

    pub fn finite(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidExponent(p.to_string()));
        }
        Ok(LpExponent::Finite(p))
    }

    /// The three exponents every sweep covers by default.
    pub fn standard() -> [LpExponent; 3] {
        [LpExponent::ONE, LpExponent::TWO, LpExponent::Infinity]
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpExponent::Finite(p) => write!(f, "{p}"),
            LpExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(LpExponent::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidExponent(s.to_string()))
                .and_then(LpExponent::finite),
        }
    }
}

impl Serialize for LpExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A function on the group, constant on rank-`N` dyadic intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    resolution: Resolution,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(resolution: Resolution, values: Vec<f64>) -> Result<Self> {
        if values.len() != resolution.len() {
            return Err(Error::LengthMismatch {
                expected: resolution.len(),
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(SampledFunction { resolution, values })
    }

    /// Caller guarantees length and finiteness.
    pub(crate) fn from_vec_unchecked(resolution: Resolution, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), resolution.len());
        SampledFunction { resolution, values }
    }

    pub fn from_fn(resolution: Resolution, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new(resolution, (0..resolution.len()).map(f).collect())
    }

    pub fn constant(resolution: Resolution, c: f64) -> Self {
        SampledFunction {
            resolution,
            values: vec![c; resolution.len()],
        }
    }

    pub fn zero(resolution: Resolution) -> Self {
        Self::constant(resolution, 0.0)
    }

    /// `x -> |x|`.
    pub fn abs_coordinate(resolution: Resolution) -> Self {
        let values = (0..resolution.len())
            .map(|j| abs_value(j, resolution))
            .collect();
        SampledFunction { resolution, values }
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value_at(&self, x: &GroupPoint) -> Result<f64> {
        self.resolution.check_same(x.resolution())?;
        Ok(self.values[x.index()])
    }

    /// Haar integral: `2^{-N} sum_j f_j`.
    pub fn integrate(&self) -> f64 {
        pairwise_sum(&self.values) / self.resolution.len() as f64
    }

    pub fn lp_norm(&self, p: LpExponent) -> f64 {
        lp_norm_of(&self.values, p)
    }

    /// `x -> f(x + t)`.
    pub fn translate(&self, t: &GroupPoint) -> Result<SampledFunction> {
        self.resolution.check_same(t.resolution())?;
        let shift = t.index();
        let values = (0..self.values.len())
            .map(|j| self.values[j ^ shift])
            .collect();
        Ok(SampledFunction::from_vec_unchecked(self.resolution, values))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<SampledFunction> {
        SampledFunction::new(self.resolution, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: f64, other: &SampledFunction, b: f64) -> Result<Self> {
        self.resolution.check_same(other.resolution)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        SampledFunction::new(self.resolution, values)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn mul(&self, other: &SampledFunction) -> Result<Self> {
        self.resolution.check_same(other.resolution)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x * y)
            .collect();
        SampledFunction::new(self.resolution, values)
    }

    pub fn scale(&self, a: f64) -> Result<Self> {
        self.map(|v| a * v)
    }

    /// `max_j |f_j - g_j|`.
    pub fn max_abs_diff(&self, other: &SampledFunction) -> Result<f64> {
        self.resolution.check_same(other.resolution)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

fn lp_norm_of(values: &[f64], p: LpExponent) -> f64 {
    let n = values.len() as f64;
    match p {
        LpExponent::Infinity => values.iter().map(|v| v.abs()).fold(0.0, f64::max),
        LpExponent::Finite(q) if q == 1.0 => {
            let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
            pairwise_sum(&abs) / n
        }
        LpExponent::Finite(q) if q == 2.0 => {
            let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
            (pairwise_sum(&sq) / n).sqrt()
        }
        LpExponent::Finite(q) => {
            let pw: Vec<f64> = values.iter().map(|v| v.abs().powf(q)).collect();
            (pairwise_sum(&pw) / n).powf(1.0 / q)
        }
    }
}

/// `‖f(· + t) - f‖_p` without materializing the translate.
pub(crate) fn translation_distance(values: &[f64], shift: usize, p: LpExponent) -> f64 {
    if shift == 0 {
        return 0.0;
    }
    let diff: Vec<f64> = (0..values.len())
        .map(|j| values[j ^ shift] - values[j])
        .collect();
    lp_norm_of(&diff, p)
}

/// Indicator of the dyadic interval `I_n = I_n(0)`.
pub fn interval_indicator(n: u32, resolution: Resolution) -> Result<SampledFunction> {
    resolution.check_level(n)?;
    let mask = (1usize << n) - 1;
    SampledFunction::from_fn(resolution, |j| if j & mask == 0 { 1.0 } else { 0.0 })
}

/// `ω_p(f, 2^{-n})`, straight from the definition.
///
/// At resolution `N` the ball `{t : |t| < 2^{-n}}` is exactly `I_n`, i.e.
/// the indices divisible by `2^n`; `t = 0` is included and contributes 0.
pub fn modulus_of_continuity(f: &SampledFunction, n: u32, p: LpExponent) -> Result<f64> {
    let res = f.resolution();
    res.check_level(n)?;
    let step = 1usize << n;
    let values = f.values();
    Ok((0..res.len())
        .into_par_iter()
        .step_by(step)
        .map(|t| translation_distance(values, t, p))
        .reduce(|| 0.0, f64::max))
}

/// Result of evaluating the modulus at an arbitrary `δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicModulus {
    /// Level `n` such that `2^{-n}` is the largest grid value `<= δ`,
    /// clamped to `[0, N]`.
    pub level: u32,
    pub delta: f64,
    pub value: f64,
}

/// `ω_p(f, δ)` with `δ` rounded down to the grid `{2^{-n}}`.
pub fn modulus_at(f: &SampledFunction, delta: f64, p: LpExponent) -> Result<DyadicModulus> {
    if !(delta > 0.0) {
        return Err(Error::OutOfRange {
            what: "delta",
            value: 0,
            limit: 0,
        });
    }
    let bits = f.resolution().bits();
    let level = if delta >= 1.0 {
        0
    } else {
        ((-delta.log2()).ceil() as u32).min(bits)
    };
    let value = modulus_of_continuity(f, level, p)?;
    Ok(DyadicModulus {
        level,
        delta: (-(level as f64)).exp2(),
        value,
    })
}
