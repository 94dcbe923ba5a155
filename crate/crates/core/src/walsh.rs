//! Rademacher and Walsh–Paley functions and the fast Walsh–Hadamard transform.
//!
//! With LSB-first coordinates, `w_n(x) = (-1)^{popcount(n & x)}` and the
//! natural-order butterfly produces coefficients directly in Paley order.
//! The forward transform carries the `2^{-N}` factor so that
//! `coeffs[n] = ∫ f w_n dμ`; the inverse is unnormalized.

use crate::dyadic::{Resolution, SampledFunction};
use crate::error::{Error, Result};

/// `w_n(x)` for the point with index `x`, as `±1`.
#[inline]
pub fn walsh_sign(n: usize, x: usize) -> i64 {
    if (n & x).count_ones() & 1 == 0 {
        1
    } else {
        -1
    }
}

/// `r_k(x) = (-1)^{x_k}`.
pub fn rademacher(k: u32, resolution: Resolution) -> Result<SampledFunction> {
    if k >= resolution.bits() {
        return Err(Error::OutOfRange {
            what: "Rademacher index",
            value: k as u64,
            limit: resolution.bits() as u64 - 1,
        });
    }
    Ok(SampledFunction::from_vec_unchecked(
        resolution,
        (0..resolution.len())
            .map(|j| if (j >> k) & 1 == 0 { 1.0 } else { -1.0 })
            .collect(),
    ))
}

/// Walsh–Paley function `w_n`.
pub fn walsh(n: usize, resolution: Resolution) -> Result<SampledFunction> {
    check_frequency(n, resolution)?;
    Ok(SampledFunction::from_vec_unchecked(
        resolution,
        (0..resolution.len())
            .map(|j| walsh_sign(n, j) as f64)
            .collect(),
    ))
}

fn check_frequency(n: usize, resolution: Resolution) -> Result<()> {
    if n >= resolution.len() {
        return Err(Error::OutOfRange {
            what: "Walsh frequency",
            value: n as u64,
            limit: resolution.len() as u64 - 1,
        });
    }
    Ok(())
}

/// `|n|`, the index of the highest set bit. Undefined for `n = 0`.
pub fn order_of(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "order argument",
            value: 0,
            limit: 0,
        });
    }
    Ok(63 - n.leading_zeros())
}

/// Unnormalized in-place Hadamard butterfly over a power-of-two slice.
///
/// Applying it twice multiplies by the length.
pub fn fwht_in_place(data: &mut [f64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// Integer version of [`fwht_in_place`]; exact.
pub fn fwht_in_place_i64(data: &mut [i64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// Walsh–Fourier coefficients in Paley order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    resolution: Resolution,
    coeffs: Vec<f64>,
}

impl Spectrum {
    pub fn new(resolution: Resolution, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != resolution.len() {
            return Err(Error::LengthMismatch {
                expected: resolution.len(),
                found: coeffs.len(),
            });
        }
        if let Some(index) = coeffs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Spectrum { resolution, coeffs })
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Zero every coefficient with index `>= n`.
    pub fn truncate(&self, n: usize) -> Spectrum {
        let mut coeffs = self.coeffs.clone();
        for c in coeffs.iter_mut().skip(n) {
            *c = 0.0;
        }
        Spectrum {
            resolution: self.resolution,
            coeffs,
        }
    }

    /// `sum_n coeffs[n]^2`, which equals `‖f‖_2^2`.
    pub fn energy(&self) -> f64 {
        let sq: Vec<f64> = self.coeffs.iter().map(|c| c * c).collect();
        crate::dyadic::pairwise_sum(&sq)
    }
}

/// `f̂(n) = ∫ f w_n dμ` for all `n < 2^N`, in `O(N 2^N)`.
pub fn fwht_forward(f: &SampledFunction) -> Spectrum {
    let res = f.resolution();
    let mut data = f.values().to_vec();
    fwht_in_place(&mut data);
    let scale = 1.0 / res.len() as f64;
    for v in &mut data {
        *v *= scale;
    }
    Spectrum {
        resolution: res,
        coeffs: data,
    }
}

/// Synthesis `sum_n coeffs[n] w_n`.
pub fn fwht_inverse(s: &Spectrum) -> SampledFunction {
    let mut data = s.coeffs.clone();
    fwht_in_place(&mut data);
    SampledFunction::from_vec_unchecked(s.resolution, data)
}

/// `S_n(f) = sum_{k<n} f̂(k) w_k`; `S_0 = 0`.
pub fn partial_sum(f: &SampledFunction, n: usize) -> Result<SampledFunction> {
    let res = f.resolution();
    if n > res.len() {
        return Err(Error::OutOfRange {
            what: "partial sum index",
            value: n as u64,
            limit: res.len() as u64,
        });
    }
    if n == res.len() {
        return Ok(f.clone());
    }
    Ok(fwht_inverse(&fwht_forward(f).truncate(n)))
}

/// `max_{k >= 2^n} |f̂(k)|`; zero exactly when `f` lies in `P_{2^n}`.
pub fn spectral_tail(f: &SampledFunction, n: u32) -> f64 {
    fwht_forward(f)
        .coeffs
        .iter()
        .skip(1usize << n)
        .map(|c| c.abs())
        .fold(0.0, f64::max)
}
