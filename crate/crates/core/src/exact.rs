//! Exact rational values for kernel identities.

use num_integer::Integer;

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i128>;

/// Samples stored as integer numerators over one positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactValues {
    pub numerators: Vec<i128>,
    pub denominator: i128,
}

impl ExactValues {
    pub fn integers(numerators: Vec<i128>) -> Self {
        ExactValues {
            numerators,
            denominator: 1,
        }
    }

    pub fn value(&self, j: usize) -> Rational {
        Rational::new(self.numerators[j], self.denominator)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let d = self.denominator as f64;
        self.numerators.iter().map(|&n| n as f64 / d).collect()
    }

    /// Rescale to a denominator that is a multiple of the current one.
    pub fn with_denominator(&self, denominator: i128) -> Result<ExactValues> {
        if denominator <= 0 || denominator % self.denominator != 0 {
            return Err(Error::Inexact("denominator is not a multiple"));
        }
        let factor = denominator / self.denominator;
        let numerators = self
            .numerators
            .iter()
            .map(|&n| n.checked_mul(factor).ok_or(Error::Inexact("overflow")))
            .collect::<Result<_>>()?;
        Ok(ExactValues {
            numerators,
            denominator,
        })
    }

    /// Pointwise sum, exact.
    pub fn add(&self, other: &ExactValues) -> Result<ExactValues> {
        if self.numerators.len() != other.numerators.len() {
            return Err(Error::LengthMismatch {
                expected: self.numerators.len(),
                found: other.numerators.len(),
            });
        }
        let d = self.denominator.lcm(&other.denominator);
        let a = self.with_denominator(d)?;
        let b = other.with_denominator(d)?;
        let numerators = a
            .numerators
            .iter()
            .zip(&b.numerators)
            .map(|(x, y)| x.checked_add(*y).ok_or(Error::Inexact("overflow")))
            .collect::<Result<_>>()?;
        Ok(ExactValues {
            numerators,
            denominator: d,
        })
    }

    /// `2^{-N} sum_j |v_j|` as a reduced fraction.
    pub fn l1_norm(&self) -> Rational {
        let total: i128 = self.numerators.iter().map(|n| n.abs()).sum();
        Rational::new(total, self.denominator * self.numerators.len() as i128)
    }

    /// Largest `|a_j - b_j|`, exact.
    pub fn max_abs_diff(&self, other: &ExactValues) -> Result<Rational> {
        let d = self.denominator.lcm(&other.denominator);
        let a = self.with_denominator(d)?;
        let b = other.with_denominator(d)?;
        let worst = a
            .numerators
            .iter()
            .zip(&b.numerators)
            .map(|(x, y)| (x - y).abs())
            .max()
            .unwrap_or(0);
        Ok(Rational::new(worst, d))
    }
}

/// Parse `p/q` or an integer.
pub fn parse_rational(token: &str) -> Option<Rational> {
    let token = token.trim();
    match token.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().ok()?;
            let q: i128 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => token.parse::<i128>().ok().map(Rational::from_integer),
    }
}

/// Express rationals over their least common denominator.
pub fn common_denominator(values: &[Rational]) -> (Vec<i128>, i128) {
    let d = values.iter().fold(1i128, |acc, r| acc.lcm(r.denom()));
    let nums = values.iter().map(|r| r.numer() * (d / r.denom())).collect();
    (nums, d)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
