//! Matrix-transform de la Vallée Poussin means `σ^T_{m,n}(f) = sum t_k S_k(f)`.
//!
//! Two independent evaluation paths: a running sum of partial sums in the
//! time domain, and dyadic convolution with the kernel `K^T`.

use serde::Serialize;

use crate::dyadic::{Resolution, SampledFunction};
use crate::error::{Error, Result};
use crate::kernels::vp_kernel;
use crate::walsh::{fwht_forward, fwht_in_place, partial_sum, walsh_sign};
use crate::weights::WeightScheme;

/// Max-norm agreement required between the two paths.
pub const PATH_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanPath {
    PartialSums,
    #[default]
    Convolution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanResult {
    pub result: SampledFunction,
    pub path: MeanPath,
    /// `(m, n)` of `σ^T_{m,n}`.
    pub block: (usize, usize),
}

/// `x -> ∫ f(u) K(u + x) dμ(u)`, via `(f * K)^ = f̂ K̂`.
pub fn dyadic_convolve(f: &SampledFunction, kernel: &SampledFunction) -> Result<SampledFunction> {
    let res = f.resolution();
    res.check_same(kernel.resolution())?;
    let a = fwht_forward(f);
    let b = fwht_forward(kernel);
    let mut product: Vec<f64> = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x * y)
        .collect();
    fwht_in_place(&mut product);
    Ok(SampledFunction::from_vec_unchecked(res, product))
}

fn check_block(w: &WeightScheme, resolution: Resolution) -> Result<()> {
    if w.block() + 1 > resolution.bits() {
        return Err(Error::OutOfRange {
            what: "block exponent + 1",
            value: w.block() as u64 + 1,
            limit: resolution.bits() as u64,
        });
    }
    Ok(())
}

/// `σ^T_{2^n, 2^{n+1}-1}(f)` for the block stored in `w`.
pub fn vp_mean(f: &SampledFunction, w: &WeightScheme, path: MeanPath) -> Result<MeanResult> {
    let res = f.resolution();
    check_block(w, res)?;
    let result = match path {
        MeanPath::PartialSums => weighted_partial_sums(f, w.weights(), w.first_index())?,
        MeanPath::Convolution => {
            let kernel = vp_kernel(w, res)?;
            dyadic_convolve(f, kernel.function())?
        }
    };
    Ok(MeanResult {
        result,
        path,
        block: (w.first_index(), w.last_index()),
    })
}

/// `sum_{k=m}^{n} t_{k-m} S_k(f)` for any `1 <= m <= n < 2^N`.
pub fn general_vp_mean(
    f: &SampledFunction,
    t: &[f64],
    m: usize,
    n: usize,
) -> Result<SampledFunction> {
    let len = f.resolution().len();
    if m == 0 || m > n || n >= len {
        return Err(Error::OutOfRange {
            what: "mean bounds (m, n)",
            value: if m == 0 || m > n { m as u64 } else { n as u64 },
            limit: len as u64 - 1,
        });
    }
    if t.len() != n - m + 1 {
        return Err(Error::LengthMismatch {
            expected: n - m + 1,
            found: t.len(),
        });
    }
    weighted_partial_sums(f, t, m)
}

/// Start from `S_m` and step `S_{k+1} = S_k + f̂(k) w_k`.
fn weighted_partial_sums(f: &SampledFunction, t: &[f64], m: usize) -> Result<SampledFunction> {
    let res = f.resolution();
    let coeffs = fwht_forward(f).into_coeffs();
    let mut current = partial_sum(f, m)?.into_values();
    let mut acc = vec![0.0; res.len()];
    for (i, &weight) in t.iter().enumerate() {
        let k = m + i;
        if i > 0 {
            let c = coeffs[k - 1];
            if c != 0.0 {
                for (x, v) in current.iter_mut().enumerate() {
                    *v += c * walsh_sign(k - 1, x) as f64;
                }
            }
        }
        if weight != 0.0 {
            for (a, s) in acc.iter_mut().zip(&current) {
                *a += weight * s;
            }
        }
    }
    SampledFunction::new(res, acc)
}
