//! Block weight sequences `t_{k, 2^{n+1}-1}` for `2^n <= k <= 2^{n+1}-1`.
//!
//! A [`WeightScheme`] stores one dyadic block of a lower-triangular
//! summation matrix. Weights can carry an exact rational form, which the
//! kernel module uses to check identities with zero error.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{parse_rational, rational_to_f64, Rational};

/// Default cap on `t_last * (2^{n+1} - 1)` for the non-decreasing case.
pub const DEFAULT_C2_CAP: f64 = 4.0;

/// Tolerance on `|sum - 1|` for schemes without an exact form.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    /// All weights equal; belongs to both classes.
    Constant,
    NonDecreasing,
    NonIncreasing,
    Neither,
}

impl Monotonicity {
    pub fn is_non_decreasing(self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::NonDecreasing)
    }

    pub fn is_non_increasing(self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::NonIncreasing)
    }
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Constant => "constant",
            Monotonicity::NonDecreasing => "non_decreasing",
            Monotonicity::NonIncreasing => "non_increasing",
            Monotonicity::Neither => "neither",
        })
    }
}

/// Which hypothesis of the approximation theorem a scheme is declared under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclaredCase {
    /// Case a: non-decreasing weights with a bounded last weight.
    NonDecreasing,
    /// Case b: non-increasing weights.
    NonIncreasing,
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightScheme {
    block: u32,
    weights: Vec<f64>,
    exact: Option<Vec<Rational>>,
    declared: DeclaredCase,
}

impl WeightScheme {
    /// Weights for `k = 2^n, ..., 2^{n+1}-1`, in that order.
    pub fn new(block: u32, weights: Vec<f64>) -> Result<Self> {
        check_block(block, weights.len())?;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight {
                    k: (1usize << block) + i,
                    value: w,
                });
            }
        }
        Ok(WeightScheme {
            block,
            weights,
            exact: None,
            declared: DeclaredCase::None,
        })
    }

    pub fn from_rationals(block: u32, exact: Vec<Rational>) -> Result<Self> {
        check_block(block, exact.len())?;
        for (i, r) in exact.iter().enumerate() {
            if *r < Rational::zero() {
                return Err(Error::NegativeWeight {
                    k: (1usize << block) + i,
                    value: rational_to_f64(r),
                });
            }
        }
        let weights = exact.iter().map(rational_to_f64).collect();
        Ok(WeightScheme {
            block,
            weights,
            exact: Some(exact),
            declared: DeclaredCase::None,
        })
    }

    /// Attach a declared case; fails if the sequence contradicts it.
    pub fn declare(mut self, case: DeclaredCase) -> Result<Self> {
        let m = self.monotonicity();
        let ok = match case {
            DeclaredCase::NonDecreasing => m.is_non_decreasing(),
            DeclaredCase::NonIncreasing => m.is_non_increasing(),
            DeclaredCase::None => true,
        };
        if !ok {
            return Err(Error::CaseMismatch {
                declared: format!("{case:?}"),
                detected: m.to_string(),
            });
        }
        self.declared = case;
        Ok(self)
    }

    pub fn block(&self) -> u32 {
        self.block
    }

    /// Block size `2^n`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// First summation index `m = 2^n`.
    pub fn first_index(&self) -> usize {
        1usize << self.block
    }

    /// Last summation index `2^{n+1} - 1`, the column of the matrix row.
    pub fn last_index(&self) -> usize {
        (2usize << self.block) - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn declared_case(&self) -> DeclaredCase {
        self.declared
    }

    /// `t_k` for `k` in the block.
    pub fn weight(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        Ok(self.weights[k - self.first_index()])
    }

    pub fn last_weight(&self) -> f64 {
        *self.weights.last().expect("block is never empty")
    }

    pub fn sum(&self) -> f64 {
        match &self.exact {
            Some(e) => rational_to_f64(&e.iter().sum()),
            None => crate::dyadic::pairwise_sum(&self.weights),
        }
    }

    pub fn exact_sum(&self) -> Option<Rational> {
        self.exact.as_ref().map(|e| e.iter().sum())
    }

    /// Rescaled to sum to one; exact when the scheme is.
    pub fn normalized(&self) -> Result<WeightScheme> {
        let out = match &self.exact {
            Some(e) => {
                let s: Rational = e.iter().sum();
                if s.is_zero() {
                    return Err(Error::ZeroWeightSum);
                }
                WeightScheme::from_rationals(self.block, e.iter().map(|r| r / s).collect())?
            }
            None => {
                let s = self.sum();
                if s == 0.0 {
                    return Err(Error::ZeroWeightSum);
                }
                WeightScheme::new(self.block, self.weights.iter().map(|w| w / s).collect())?
            }
        };
        Ok(WeightScheme {
            declared: self.declared,
            ..out
        })
    }

    /// Detected class, ties counted in both directions.
    pub fn monotonicity(&self) -> Monotonicity {
        let (up, down) = match &self.exact {
            Some(e) => (
                e.windows(2).all(|p| p[0] <= p[1]),
                e.windows(2).all(|p| p[0] >= p[1]),
            ),
            None => (
                self.weights.windows(2).all(|p| p[0] <= p[1]),
                self.weights.windows(2).all(|p| p[0] >= p[1]),
            ),
        };
        match (up, down) {
            (true, true) => Monotonicity::Constant,
            (true, false) => Monotonicity::NonDecreasing,
            (false, true) => Monotonicity::NonIncreasing,
            (false, false) => Monotonicity::Neither,
        }
    }

    /// `Δt_k = t_k - t_{k+1}` with `t_{2^{n+1}} := 0`.
    pub fn delta(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        let i = k - self.first_index();
        let next = self.weights.get(i + 1).copied().unwrap_or(0.0);
        Ok(self.weights[i] - next)
    }

    pub fn exact_delta(&self, k: usize) -> Result<Rational> {
        self.check_index(k)?;
        let e = self
            .exact
            .as_ref()
            .ok_or(Error::Inexact("scheme has no rational form"))?;
        let i = k - self.first_index();
        let next = e.get(i + 1).copied().unwrap_or_else(Rational::zero);
        Ok(e[i] - next)
    }

    /// `sum_{k=1}^{2^n-2} |Δt_{2^n+k}| k`, the mass the Fejér-kernel terms
    /// of the decomposition carry.
    pub fn delta_mass(&self) -> f64 {
        let m = self.first_index();
        (1..m.saturating_sub(1))
            .map(|k| self.delta(m + k).expect("in block").abs() * k as f64)
            .sum()
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k < self.first_index() || k > self.last_index() {
            return Err(Error::OutOfRange {
                what: "weight index",
                value: k as u64,
                limit: self.last_index() as u64,
            });
        }
        Ok(())
    }
}

fn check_block(block: u32, len: usize) -> Result<()> {
    if block >= usize::BITS - 2 {
        return Err(Error::OutOfRange {
            what: "block exponent",
            value: block as u64,
            limit: (usize::BITS - 3) as u64,
        });
    }
    let expected = 1usize << block;
    if len != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: len,
        });
    }
    Ok(())
}

/// Built-in weight families and custom files.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFamily {
    /// `t ≡ 2^{-n}`.
    Uniform,
    /// `t_k ∝ k - 2^n + 1`.
    LinearUp,
    /// `t_k ∝ 2^{n+1} - k`.
    LinearDown,
    /// `t_k ∝ A^{α-1}_{2^{n+1}-1-k}` with `A^β_m = binom(m+β, m)`.
    Cesaro(f64),
    Custom {
        path: PathBuf,
        normalize: bool,
    },
}

impl WeightFamily {
    pub fn name(&self) -> String {
        match self {
            WeightFamily::Uniform => "uniform".into(),
            WeightFamily::LinearUp => "linear_up".into(),
            WeightFamily::LinearDown => "linear_down".into(),
            WeightFamily::Cesaro(a) => format!("cesaro:{a}"),
            WeightFamily::Custom { path, .. } => path.display().to_string(),
        }
    }

    pub fn builtins() -> Vec<WeightFamily> {
        vec![
            WeightFamily::Uniform,
            WeightFamily::LinearUp,
            WeightFamily::LinearDown,
            WeightFamily::Cesaro(2.0),
            WeightFamily::Cesaro(0.5),
        ]
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    /// Family name, `cesaro:<alpha>`, or a path to a `k,t` CSV file.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase().replace('-', "_");
        match lower.as_str() {
            "uniform" => return Ok(WeightFamily::Uniform),
            "linear_up" => return Ok(WeightFamily::LinearUp),
            "linear_down" => return Ok(WeightFamily::LinearDown),
            _ => {}
        }
        if let Some(alpha) = lower.strip_prefix("cesaro:") {
            let a: f64 = alpha.parse().map_err(|_| Error::UnknownSpec {
                what: "Cesàro order",
                value: alpha.to_string(),
            })?;
            return Ok(WeightFamily::Cesaro(a));
        }
        if s.is_empty() {
            return Err(Error::UnknownSpec {
                what: "weight family",
                value: String::new(),
            });
        }
        Ok(WeightFamily::Custom {
            path: PathBuf::from(s),
            normalize: false,
        })
    }
}

/// Build the block-`n` scheme of a family.
pub fn build_scheme(family: &WeightFamily, n: u32) -> Result<WeightScheme> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "block exponent",
            value: 0,
            limit: 1,
        });
    }
    let size = 1i128 << n;
    let scheme = match family {
        WeightFamily::Uniform => {
            let w = vec![Rational::new(1, size); size as usize];
            WeightScheme::from_rationals(n, w)?.declare(DeclaredCase::NonIncreasing)?
        }
        WeightFamily::LinearUp => {
            let raw = (1..=size).map(Rational::from_integer).collect();
            WeightScheme::from_rationals(n, raw)?
                .normalized()?
                .declare(DeclaredCase::NonDecreasing)?
        }
        WeightFamily::LinearDown => {
            let raw = (1..=size).rev().map(Rational::from_integer).collect();
            WeightScheme::from_rationals(n, raw)?
                .normalized()?
                .declare(DeclaredCase::NonIncreasing)?
        }
        WeightFamily::Cesaro(alpha) => {
            let s = cesaro_scheme(*alpha, n)?;
            let case = match s.monotonicity() {
                m if m.is_non_increasing() => DeclaredCase::NonIncreasing,
                m if m.is_non_decreasing() => DeclaredCase::NonDecreasing,
                _ => DeclaredCase::None,
            };
            s.declare(case)?
        }
        WeightFamily::Custom { path, normalize } => {
            let s = read_weight_file(path)?;
            if s.block() != n {
                return Err(Error::LengthMismatch {
                    expected: 1usize << n,
                    found: s.len(),
                });
            }
            if *normalize {
                s.normalized()?
            } else {
                s
            }
        }
    };
    Ok(scheme)
}

fn cesaro_scheme(alpha: f64, n: u32) -> Result<WeightScheme> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::InvalidCesaroOrder(alpha));
    }
    let size = 1usize << n;
    // Integer order: binomials are integers, keep the exact form.
    if alpha.fract() == 0.0 && (1.0..=64.0).contains(&alpha) {
        let beta = alpha as i128 - 1;
        let binom = |m: i128| -> Option<i128> {
            let mut c: i128 = 1;
            for i in 1..=beta {
                c = c.checked_mul(m + i)? / i;
            }
            Some(c)
        };
        let raw: Option<Vec<Rational>> = (0..size)
            .map(|i| binom((size - 1 - i) as i128).map(Rational::from_integer))
            .collect();
        if let Some(raw) = raw {
            return WeightScheme::from_rationals(n, raw)?.normalized();
        }
    }
    let beta = alpha - 1.0;
    // A^β_m = A^β_{m-1} (β + m) / m
    let mut a = Vec::with_capacity(size);
    let mut c = 1.0f64;
    a.push(c);
    for m in 1..size {
        c *= (beta + m as f64) / m as f64;
        a.push(c);
    }
    let raw: Vec<f64> = (0..size).map(|i| a[size - 1 - i]).collect();
    WeightScheme::new(n, raw)?.normalized()
}

/// Outcome of checking a scheme against the theorem's hypotheses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub block: u32,
    pub sum: f64,
    pub sum_ok: bool,
    pub monotonicity: Monotonicity,
    /// `t_last * (2^{n+1} - 1)`.
    pub c2_constant: f64,
    pub c2_cap: f64,
    pub case_a_ok: bool,
    pub case_b_ok: bool,
}

impl ValidationReport {
    /// Sum condition plus at least one of the two cases.
    pub fn theorem_applies(&self) -> bool {
        self.sum_ok && (self.case_a_ok || self.case_b_ok)
    }
}

pub fn validate(w: &WeightScheme) -> ValidationReport {
    validate_with_cap(w, DEFAULT_C2_CAP)
}

pub fn validate_with_cap(w: &WeightScheme, c2_cap: f64) -> ValidationReport {
    let sum_ok = match w.exact_sum() {
        Some(s) => s == Rational::one(),
        None => (w.sum() - 1.0).abs() <= SUM_TOLERANCE,
    };
    let c2_constant = match w.exact() {
        Some(e) => {
            rational_to_f64(&(e[e.len() - 1] * Rational::from_integer(w.last_index() as i128)))
        }
        None => w.last_weight() * w.last_index() as f64,
    };
    let monotonicity = w.monotonicity();
    ValidationReport {
        block: w.block(),
        sum: w.sum(),
        sum_ok,
        monotonicity,
        c2_constant,
        c2_cap,
        case_a_ok: monotonicity.is_non_decreasing() && c2_constant <= c2_cap,
        case_b_ok: monotonicity.is_non_increasing(),
    }
}

/// Parse a `k,t` CSV. Tokens are `p/q`, integers, or decimals; all-exact
/// tokens give an exact scheme.
pub fn parse_weight_csv(text: &str) -> Result<WeightScheme> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.len() != 2 || &headers[0] != "k" || &headers[1] != "t" {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `k,t`".into(),
        });
    }
    let mut rows: Vec<(usize, Option<Rational>, f64)> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                message: "expected two fields".into(),
            });
        }
        let k: usize = rec[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad index `{}`", &rec[0]),
        })?;
        let token = &rec[1];
        let exact = parse_rational(token).or_else(|| parse_decimal(token));
        let value = match &exact {
            Some(r) => rational_to_f64(r),
            None => token.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("bad weight `{token}`"),
            })?,
        };
        rows.push((k, exact, value));
    }
    if rows.is_empty() || !rows.len().is_power_of_two() {
        return Err(Error::Parse {
            line: rows.len() + 1,
            message: format!("{} rows is not a power of two", rows.len()),
        });
    }
    rows.sort_by_key(|r| r.0);
    let block = rows.len().trailing_zeros();
    let first = 1usize << block;
    for (i, (k, _, _)) in rows.iter().enumerate() {
        if *k != first + i {
            return Err(Error::Parse {
                line: 0,
                message: format!("indices must cover {first}..={} exactly", 2 * first - 1),
            });
        }
    }
    if rows.iter().all(|r| r.1.is_some()) {
        WeightScheme::from_rationals(block, rows.into_iter().map(|r| r.1.unwrap()).collect())
    } else {
        WeightScheme::new(block, rows.into_iter().map(|r| r.2).collect())
    }
}

pub fn read_weight_file(path: &Path) -> Result<WeightScheme> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_weight_csv(&text)
}

/// Serialize as a `k,t` CSV with exact `p/q` tokens when available.
pub fn weight_csv(w: &WeightScheme) -> String {
    let mut out = String::from("k,t\n");
    for i in 0..w.len() {
        let k = w.first_index() + i;
        match w.exact() {
            Some(e) => out.push_str(&format!("{k},{}/{}\n", e[i].numer(), e[i].denom())),
            None => out.push_str(&format!("{k},{}\n", w.weights()[i])),
        }
    }
    out
}

/// Plain decimal literal (`0.125`, `-3.5`) as an exact fraction.
fn parse_decimal(token: &str) -> Option<Rational> {
    let token = token.trim();
    let (neg, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token.strip_prefix('+').unwrap_or(token)),
    };
    let (int, frac) = body.split_once('.')?;
    if frac.len() > 18 || int.len() > 18 {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: i128 = if digits.is_empty() {
        return None;
    } else {
        digits.parse().ok()?
    };
    let den = 10i128.pow(frac.len() as u32);
    let r = Rational::new(num, den);
    Some(if neg { -r } else { r })
}
