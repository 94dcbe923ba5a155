//! Dirichlet, Fejér and matrix-transform de la Vallée Poussin kernels.
//!
//! Dirichlet kernels are integer valued and `k K_k = D_1 + ... + D_k` is an
//! integer too, so every kernel here has an exact form whenever the weights
//! are rational: integer numerators over the common weight denominator.

use std::ops::Sub;

use num_traits::Zero;

use crate::dyadic::{Resolution, SampledFunction};
use crate::error::{Error, Result};
use crate::exact::{common_denominator, ExactValues, Rational};
use crate::walsh::{fwht_in_place, fwht_in_place_i64, walsh_sign};
use crate::weights::WeightScheme;

/// Sharp bound on `sup_n ‖K_n‖_1`.
pub const FEJER_L1_SUP: Rational = Rational::new_raw(17, 15);

/// Uniform bound on `‖K_n‖_1`.
pub const FEJER_L1_UNIFORM: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Dirichlet(usize),
    Fejer(usize),
    ValleePoussin {
        first: usize,
        last: usize,
    },
    /// `K_{j,n}` of the three-term decomposition.
    Component {
        j: u8,
        block: u32,
    },
    Sum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelFunction {
    kind: KernelKind,
    function: SampledFunction,
    exact: Option<ExactValues>,
}

impl KernelFunction {
    fn from_exact(kind: KernelKind, resolution: Resolution, exact: ExactValues) -> Self {
        let function = SampledFunction::from_vec_unchecked(resolution, exact.to_f64());
        KernelFunction {
            kind,
            function,
            exact: Some(exact),
        }
    }

    fn from_float(kind: KernelKind, function: SampledFunction) -> Self {
        KernelFunction {
            kind,
            function,
            exact: None,
        }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn function(&self) -> &SampledFunction {
        &self.function
    }

    pub fn into_function(self) -> SampledFunction {
        self.function
    }

    pub fn exact(&self) -> Option<&ExactValues> {
        self.exact.as_ref()
    }

    pub fn resolution(&self) -> Resolution {
        self.function.resolution()
    }

    pub fn l1_norm(&self) -> f64 {
        kernel_l1_norm(self)
    }

    pub fn exact_l1_norm(&self) -> Option<Rational> {
        self.exact.as_ref().map(ExactValues::l1_norm)
    }
}

/// `‖K‖_1 = 2^{-N} sum_j |K_j|`; evaluated from the exact form when present.
pub fn kernel_l1_norm(k: &KernelFunction) -> f64 {
    match k.exact_l1_norm() {
        Some(r) => crate::exact::rational_to_f64(&r),
        None => k.function.lp_norm(crate::dyadic::LpExponent::ONE),
    }
}

fn check_order(n: usize, resolution: Resolution) -> Result<()> {
    if n > resolution.len() {
        return Err(Error::OutOfRange {
            what: "kernel order",
            value: n as u64,
            limit: resolution.len() as u64,
        });
    }
    Ok(())
}

/// `D_n = sum_{k<n} w_k` by direct summation; `D_0 = 0`.
pub fn dirichlet(n: usize, resolution: Resolution) -> Result<KernelFunction> {
    check_order(n, resolution)?;
    let nums = (0..resolution.len())
        .map(|x| (0..n).map(|k| walsh_sign(k, x) as i128).sum())
        .collect();
    Ok(KernelFunction::from_exact(
        KernelKind::Dirichlet(n),
        resolution,
        ExactValues::integers(nums),
    ))
}

/// `D_n` from `D_{2^k} = 2^k 1_{I_k}` and `D_{2^k + j} = D_{2^k} + r_k D_j`.
pub fn dirichlet_via_recursion(n: usize, resolution: Resolution) -> Result<KernelFunction> {
    check_order(n, resolution)?;
    let nums = recursive_dirichlet(n, resolution.len())
        .into_iter()
        .map(i128::from)
        .collect();
    Ok(KernelFunction::from_exact(
        KernelKind::Dirichlet(n),
        resolution,
        ExactValues::integers(nums),
    ))
}

fn recursive_dirichlet(n: usize, len: usize) -> Vec<i64> {
    if n == 0 {
        return vec![0; len];
    }
    let k = usize::BITS - 1 - n.leading_zeros();
    let base = 1usize << k;
    let mut out = paley_values(k, len);
    let j = n - base;
    if j > 0 {
        let tail = recursive_dirichlet(j, len);
        for (x, (o, t)) in out.iter_mut().zip(tail).enumerate() {
            *o += if (x >> k) & 1 == 0 { t } else { -t };
        }
    }
    out
}

/// `2^k` on `I_k`, zero elsewhere.
fn paley_values(k: u32, len: usize) -> Vec<i64> {
    let mask = (1usize << k) - 1;
    (0..len)
        .map(|x| if x & mask == 0 { 1i64 << k } else { 0 })
        .collect()
}

/// Running `D_k` and `C_k = D_1 + ... + D_k` over `k = 1, 2, ...`.
struct DirichletWalk {
    len: usize,
    k: usize,
    dirichlet: Vec<i64>,
    cumulative: Vec<i64>,
}

impl DirichletWalk {
    fn new(len: usize) -> Self {
        DirichletWalk {
            len,
            k: 0,
            dirichlet: vec![0; len],
            cumulative: vec![0; len],
        }
    }

    /// Advance from `k` to `k + 1`: `D_{k+1} = D_k + w_k`.
    fn step(&mut self) {
        let k = self.k;
        for x in 0..self.len {
            self.dirichlet[x] += walsh_sign(k, x);
            self.cumulative[x] += self.dirichlet[x];
        }
        self.k += 1;
    }
}

/// `K_n = (1/n) sum_{k=1}^n D_k`, exact with denominator `n`.
pub fn fejer(n: usize, resolution: Resolution) -> Result<KernelFunction> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "Fejér order",
            value: 0,
            limit: resolution.len() as u64,
        });
    }
    check_order(n, resolution)?;
    let mut walk = DirichletWalk::new(resolution.len());
    for _ in 0..n {
        walk.step();
    }
    let nums = walk.cumulative.iter().map(|&c| c as i128).collect();
    Ok(KernelFunction::from_exact(
        KernelKind::Fejer(n),
        resolution,
        ExactValues {
            numerators: nums,
            denominator: n as i128,
        },
    ))
}

/// One row of the kernel-norm table.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelNorms {
    pub n: usize,
    pub l1_dirichlet: Rational,
    pub l1_fejer: Rational,
}

/// `‖D_n‖_1` and `‖K_n‖_1` for `1 <= n <= n_max`, exact, in one pass.
pub fn kernel_norm_table(n_max: usize, resolution: Resolution) -> Result<Vec<KernelNorms>> {
    check_order(n_max, resolution)?;
    let len = resolution.len();
    let mut walk = DirichletWalk::new(len);
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        walk.step();
        let sd: i128 = walk
            .dirichlet
            .iter()
            .map(|v| v.unsigned_abs() as i128)
            .sum();
        let sc: i128 = walk
            .cumulative
            .iter()
            .map(|v| v.unsigned_abs() as i128)
            .sum();
        rows.push(KernelNorms {
            n,
            l1_dirichlet: Rational::new(sd, len as i128),
            l1_fejer: Rational::new(sc, len as i128 * n as i128),
        });
    }
    Ok(rows)
}

/// Largest `‖K_n‖_1` over the table and the first `n` attaining it.
pub fn fejer_norm_max(rows: &[KernelNorms]) -> Option<(usize, Rational)> {
    rows.iter()
        .fold(None, |best: Option<(usize, Rational)>, r| match best {
            Some((_, v)) if v >= r.l1_fejer => best,
            _ => Some((r.n, r.l1_fejer)),
        })
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

/// Walsh coefficients of `sum_k t_k D_k`: coefficient `j` is `sum_{k>j} t_k`.
fn vp_tail_sums<T>(weights: &[T], first: usize, len: usize) -> Vec<T>
where
    T: Copy + Zero + std::ops::AddAssign,
{
    let mut coeffs = vec![T::zero(); len];
    let mut tail = T::zero();
    // k runs down the block; coefficient j sees every k > j.
    for i in (0..weights.len()).rev() {
        let k = first + i;
        coeffs[k] = tail;
        tail += weights[i];
    }
    for c in coeffs.iter_mut().take(first) {
        *c = tail;
    }
    coeffs
}

/// `K^T = sum_{k=2^n}^{2^{n+1}-1} t_k D_k`, synthesized from its spectrum in
/// `O(N 2^N)`. Exact when the weights are rational.
pub fn vp_kernel(w: &WeightScheme, resolution: Resolution) -> Result<KernelFunction> {
    check_block(w, resolution)?;
    let kind = KernelKind::ValleePoussin {
        first: w.first_index(),
        last: w.last_index(),
    };
    let len = resolution.len();
    if let Some(exact) = w.exact() {
        let (nums, den) = common_denominator(exact);
        let nums: Option<Vec<i64>> = nums.iter().map(|&v| i64::try_from(v).ok()).collect();
        if let Some(nums) = nums {
            let mut coeffs = vp_tail_sums(&nums, w.first_index(), len);
            fwht_in_place_i64(&mut coeffs);
            let values = ExactValues {
                numerators: coeffs.into_iter().map(i128::from).collect(),
                denominator: den,
            };
            return Ok(KernelFunction::from_exact(kind, resolution, values));
        }
    }
    let mut coeffs = vp_tail_sums(w.weights(), w.first_index(), len);
    fwht_in_place(&mut coeffs);
    Ok(KernelFunction::from_float(
        kind,
        SampledFunction::from_vec_unchecked(resolution, coeffs),
    ))
}

/// Summation by parts with `a_{L+1} := 0`.
///
/// For `seq = (a_1, ..., a_L)` returns `Δa_k = a_k - a_{k+1}` for
/// `k = 1..=L` and the boundary coefficient `a_L`, so that
/// `sum a_k D_k = sum_{k<L} Δa_k k K_k + a_L L K_L`.
pub fn abel_transform<T>(seq: &[T]) -> Result<(Vec<T>, T)>
where
    T: Clone + Zero + Sub<Output = T>,
{
    let last = seq.last().ok_or(Error::EmptySequence)?.clone();
    let mut diffs: Vec<T> = seq
        .windows(2)
        .map(|p| p[0].clone() - p[1].clone())
        .collect();
    diffs.push(last.clone() - T::zero());
    Ok((diffs, last))
}

/// `K_{1,n} + K_{2,n} + K_{3,n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelDecomposition {
    pub components: [KernelFunction; 3],
}

impl KernelDecomposition {
    pub fn sum(&self) -> Result<KernelFunction> {
        let [a, b, c] = &self.components;
        let res = a.resolution();
        match (&a.exact, &b.exact, &c.exact) {
            (Some(x), Some(y), Some(z)) => Ok(KernelFunction::from_exact(
                KernelKind::Sum,
                res,
                x.add(y)?.add(z)?,
            )),
            _ => {
                let f = a
                    .function
                    .linear_combination(1.0, &b.function, 1.0)?
                    .linear_combination(1.0, &c.function, 1.0)?;
                Ok(KernelFunction::from_float(KernelKind::Sum, f))
            }
        }
    }

    /// Exact pointwise discrepancy against `kernel`, when both are exact.
    pub fn exact_error(&self, kernel: &KernelFunction) -> Result<Option<Rational>> {
        let sum = self.sum()?;
        match (sum.exact(), kernel.exact()) {
            (Some(a), Some(b)) => Ok(Some(a.max_abs_diff(b)?)),
            _ => Ok(None),
        }
    }

    /// Floating-point discrepancy against `kernel`.
    pub fn float_error(&self, kernel: &KernelFunction) -> Result<f64> {
        self.sum()?.function.max_abs_diff(&kernel.function)
    }
}

/// Split `K^T_{2^n, 2^{n+1}-1}` into
/// `K_1 = (sum t) D_{2^n}`,
/// `K_2 = r_n sum_{k=1}^{2^n-2} Δt_{2^n+k} k K_k`,
/// `K_3 = r_n t_{2^{n+1}-1} (2^n - 1) K_{2^n-1}`.
///
/// The Dirichlet and Fejér pieces are accumulated directly in the time
/// domain, independently of [`vp_kernel`].
pub fn decompose_vp_kernel(
    w: &WeightScheme,
    resolution: Resolution,
) -> Result<KernelDecomposition> {
    let n = w.block();
    if n == 0 {
        return Err(Error::DegenerateBlock(0));
    }
    check_block(w, resolution)?;
    let len = resolution.len();
    let m = w.first_index();

    // C_k for k = 1..=m-1 and D_m.
    let mut walk = DirichletWalk::new(len);
    let mut cumulative: Vec<Vec<i64>> = Vec::with_capacity(m - 1);
    for _ in 1..m {
        walk.step();
        cumulative.push(walk.cumulative.clone());
    }
    walk.step();
    let d_m = walk.dirichlet;
    let r_n = |x: usize| if (x >> n) & 1 == 0 { 1i128 } else { -1 };

    let kind = |j| KernelKind::Component { j, block: n };
    let components = match w.exact() {
        Some(exact) => {
            let (a, den) = common_denominator(exact);
            let total: i128 = a.iter().sum();
            let (diffs, boundary) = abel_transform(&a[1..])?;
            let k1: Vec<i128> = d_m.iter().map(|&d| total * d as i128).collect();
            let mut k2 = vec![0i128; len];
            for (i, delta) in diffs.iter().take(diffs.len() - 1).enumerate() {
                if *delta == 0 {
                    continue;
                }
                for (x, v) in k2.iter_mut().enumerate() {
                    *v += delta * cumulative[i][x] as i128;
                }
            }
            let c_last = &cumulative[m - 2];
            let mut k3 = vec![0i128; len];
            for x in 0..len {
                k2[x] *= r_n(x);
                k3[x] = r_n(x) * boundary * c_last[x] as i128;
            }
            let ev = |numerators| ExactValues {
                numerators,
                denominator: den,
            };
            [
                KernelFunction::from_exact(kind(1), resolution, ev(k1)),
                KernelFunction::from_exact(kind(2), resolution, ev(k2)),
                KernelFunction::from_exact(kind(3), resolution, ev(k3)),
            ]
        }
        None => {
            let t = w.weights();
            let total = w.sum();
            let (diffs, boundary) = abel_transform(&t[1..])?;
            let k1: Vec<f64> = d_m.iter().map(|&d| total * d as f64).collect();
            let mut k2 = vec![0.0f64; len];
            for (i, delta) in diffs.iter().take(diffs.len() - 1).enumerate() {
                if *delta == 0.0 {
                    continue;
                }
                for (x, v) in k2.iter_mut().enumerate() {
                    *v += delta * cumulative[i][x] as f64;
                }
            }
            let c_last = &cumulative[m - 2];
            let mut k3 = vec![0.0f64; len];
            for x in 0..len {
                k2[x] *= r_n(x) as f64;
                k3[x] = r_n(x) as f64 * boundary * c_last[x] as f64;
            }
            let sf = |v| SampledFunction::from_vec_unchecked(resolution, v);
            [
                KernelFunction::from_float(kind(1), sf(k1)),
                KernelFunction::from_float(kind(2), sf(k2)),
                KernelFunction::from_float(kind(3), sf(k3)),
            ]
        }
    };
    Ok(KernelDecomposition { components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational_to_f64;
    use crate::walsh::{rademacher, walsh};
    use crate::weights::{build_scheme, WeightFamily};
    use num_traits::One;

    fn res(n: u32) -> Resolution {
        Resolution::new(n).unwrap()
    }

    fn ints(k: &KernelFunction) -> Vec<i128> {
        let e = k.exact().unwrap();
        assert_eq!(e.denominator, 1);
        e.numerators.clone()
    }

    #[test]
    fn paley_lemma_example() {
        let d4 = dirichlet(4, res(3)).unwrap();
        assert_eq!(ints(&d4), vec![4, 0, 0, 0, 4, 0, 0, 0]);
        assert_eq!(d4.function().integrate(), 1.0);
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(ints(&dirichlet(0, res(3)).unwrap()), vec![0; 8]);
        // 1 + r_0 + r_1 at x = 0, 1, 2, 3 with x_0 the low bit
        assert_eq!(ints(&dirichlet(3, res(2)).unwrap()), vec![3, 1, 1, -1]);
        assert!(dirichlet(9, res(3)).is_err());
        assert_eq!(dirichlet(2, res(3)).unwrap().l1_norm(), 1.0);
    }

    #[test]
    fn recursion_examples() {
        let r = res(3);
        let d5 = dirichlet_via_recursion(5, r).unwrap();
        let d4 = dirichlet(4, r).unwrap();
        let d1 = dirichlet(1, r).unwrap();
        let r2 = rademacher(2, r).unwrap();
        let by_hand = d4
            .function()
            .linear_combination(1.0, &r2.mul(d1.function()).unwrap(), 1.0)
            .unwrap();
        assert_eq!(d5.function(), &by_hand);
        assert_eq!(d5, dirichlet(5, r).unwrap());
    }

    #[test]
    fn recursion_matches_direct_exhaustive() {
        for bits in 1..=6 {
            let r = res(bits);
            for n in 0..=r.len() {
                assert_eq!(
                    dirichlet_via_recursion(n, r).unwrap(),
                    dirichlet(n, r).unwrap(),
                    "n={n}, N={bits}"
                );
            }
        }
    }

    #[test]
    fn dirichlet_integrates_to_one() {
        let r = res(5);
        for n in 1..=32 {
            let e = dirichlet(n, r).unwrap();
            let s: i128 = e.exact().unwrap().numerators.iter().sum();
            assert_eq!(s, 32);
        }
    }

    #[test]
    fn fejer_examples() {
        assert_eq!(
            fejer(1, res(3)).unwrap().function(),
            &SampledFunction::constant(res(3), 1.0)
        );
        let k2 = fejer(2, res(1)).unwrap();
        assert_eq!(k2.function().values(), &[1.5, 0.5]);
        assert_eq!(k2.exact().unwrap().denominator, 2);
        assert_eq!(k2.l1_norm(), 1.0);
        assert!(fejer(0, res(3)).is_err());
        assert!(fejer(9, res(3)).is_err());
        for n in 1..=64 {
            let k = fejer(n, res(6)).unwrap();
            let s: i128 = k.exact().unwrap().numerators.iter().sum();
            assert_eq!(Rational::new(s, 64 * n as i128), Rational::one());
        }
    }

    #[test]
    fn fejer_matches_mean_of_dirichlet() {
        let r = res(4);
        for n in 1..=16 {
            let mut acc = SampledFunction::zero(r);
            for k in 1..=n {
                acc = acc
                    .linear_combination(1.0, dirichlet(k, r).unwrap().function(), 1.0)
                    .unwrap();
            }
            let mean = acc.scale(1.0 / n as f64).unwrap();
            assert!(mean.max_abs_diff(fejer(n, r).unwrap().function()).unwrap() < 1e-14);
        }
    }

    #[test]
    fn norm_table_bounds() {
        let r = res(9);
        let rows = kernel_norm_table(512, r).unwrap();
        for row in &rows {
            assert!(row.l1_fejer <= FEJER_L1_SUP, "n={}", row.n);
            assert!(rational_to_f64(&row.l1_fejer) <= FEJER_L1_UNIFORM);
            assert!(row.l1_dirichlet >= Rational::one());
        }
        assert_eq!(rows[1].l1_fejer, Rational::one());
        for n in [1, 7, 100, 512] {
            let direct = fejer(n, r).unwrap().exact_l1_norm().unwrap();
            assert_eq!(rows[n - 1].l1_fejer, direct);
            let d = dirichlet(n, r).unwrap().exact_l1_norm().unwrap();
            assert_eq!(rows[n - 1].l1_dirichlet, d);
        }
        let (argmax, max) = fejer_norm_max(&rows).unwrap();
        assert!(max > Rational::one());
        assert_eq!(rows[argmax - 1].l1_fejer, max);
    }

    fn naive_vp(w: &WeightScheme, r: Resolution) -> SampledFunction {
        let mut acc = SampledFunction::zero(r);
        for (i, t) in w.weights().iter().enumerate() {
            let d = dirichlet(w.first_index() + i, r).unwrap();
            acc = acc.linear_combination(1.0, d.function(), *t).unwrap();
        }
        acc
    }

    #[test]
    fn vp_kernel_uniform_and_trivial() {
        let r = res(5);
        let w = build_scheme(&WeightFamily::Uniform, 3).unwrap();
        let k = vp_kernel(&w, r).unwrap();
        assert_eq!(k.exact().unwrap().numerators.iter().sum::<i128>(), 32 * 8);
        assert!((k.function().integrate() - 1.0).abs() < 1e-15);
        assert!(k.function().max_abs_diff(&naive_vp(&w, r)).unwrap() < 1e-12);

        let single = WeightScheme::from_rationals(0, vec![Rational::one()]).unwrap();
        let k = vp_kernel(&single, r).unwrap();
        assert_eq!(k.function(), &SampledFunction::constant(r, 1.0));
        assert!(vp_kernel(&w, res(3)).is_err());
    }

    #[test]
    fn vp_kernel_random_weights_match_naive() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(5);
        let r = res(6);
        for _ in 0..5 {
            let raw: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..1.0)).collect();
            let w = WeightScheme::new(3, raw).unwrap().normalized().unwrap();
            let k = vp_kernel(&w, r).unwrap();
            assert!(k.exact().is_none());
            assert!(k.function().max_abs_diff(&naive_vp(&w, r)).unwrap() < 1e-12);
            assert!((k.function().integrate() - w.sum()).abs() < 1e-14);
        }
    }

    #[test]
    fn vp_kernel_walsh_coefficients() {
        let r = res(4);
        let w = build_scheme(&WeightFamily::LinearUp, 2).unwrap();
        let k = vp_kernel(&w, r).unwrap();
        let s = crate::walsh::fwht_forward(k.function());
        // j < 4 sees all of the block; then tails 0.9, 0.7, 0.4; then zero.
        let expected = [1.0, 1.0, 1.0, 1.0, 0.9, 0.7, 0.4, 0.0];
        for (j, c) in s.coeffs().iter().enumerate() {
            let e = expected.get(j).copied().unwrap_or(0.0);
            assert!((c - e).abs() < 1e-14, "j={j}");
        }
        // w_j has coefficient 1 at j, so K^T against w_5 gives 0.7
        let w5 = walsh(5, r).unwrap();
        assert!((k.function().mul(&w5).unwrap().integrate() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn abel_transform_examples() {
        let (d, b) = abel_transform(&[3.0, 3.0, 3.0]).unwrap();
        assert_eq!(d, vec![0.0, 0.0, 3.0]);
        assert_eq!(b, 3.0);
        let (d, b) = abel_transform(&[Rational::new(1, 2)]).unwrap();
        assert_eq!(d, vec![Rational::new(1, 2)]);
        assert_eq!(b, Rational::new(1, 2));
        assert!(matches!(
            abel_transform::<f64>(&[]),
            Err(Error::EmptySequence)
        ));
    }

    #[test]
    fn summation_by_parts_identity() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(17);
        let r = res(4);
        let seq: Vec<Rational> = (0..7)
            .map(|_| Rational::new(rng.random_range(-20i128..20), rng.random_range(1i128..9)))
            .collect();
        let (diffs, boundary) = abel_transform(&seq).unwrap();
        let len = seq.len();
        for x in 0..r.len() {
            let direct: Rational = (1..=len)
                .map(|k| seq[k - 1] * dirichlet(k, r).unwrap().exact().unwrap().value(x))
                .sum();
            // k K_k = C_k
            let c = |k: usize| {
                fejer(k, r).unwrap().exact().unwrap().value(x) * Rational::from_integer(k as i128)
            };
            let by_parts: Rational =
                (1..len).map(|k| diffs[k - 1] * c(k)).sum::<Rational>() + boundary * c(len);
            assert_eq!(direct, by_parts);
        }
    }

    #[test]
    fn decomposition_uniform_has_no_middle_term() {
        let r = res(6);
        let w = build_scheme(&WeightFamily::Uniform, 3).unwrap();
        let dec = decompose_vp_kernel(&w, r).unwrap();
        assert!(dec.components[1]
            .exact()
            .unwrap()
            .numerators
            .iter()
            .all(|&v| v == 0));
        assert_eq!(
            dec.exact_error(&vp_kernel(&w, r).unwrap()).unwrap(),
            Some(Rational::zero())
        );
    }

    #[test]
    fn decomposition_smallest_block() {
        let r = res(3);
        let w = WeightScheme::from_rationals(1, vec![Rational::new(1, 2); 2]).unwrap();
        let dec = decompose_vp_kernel(&w, r).unwrap();
        let sum = dec.sum().unwrap();
        let d2 = dirichlet(2, r).unwrap();
        let d3 = dirichlet(3, r).unwrap();
        for x in 0..8 {
            let expected = (d2.exact().unwrap().value(x) + d3.exact().unwrap().value(x))
                / Rational::from_integer(2);
            assert_eq!(sum.exact().unwrap().value(x), expected);
        }
    }

    #[test]
    fn decomposition_float_path() {
        let r = res(6);
        let w = WeightScheme::new(3, vec![0.3, 0.2, 0.15, 0.1, 0.1, 0.08, 0.04, 0.03]).unwrap();
        let dec = decompose_vp_kernel(&w, r).unwrap();
        assert!(dec
            .exact_error(&vp_kernel(&w, r).unwrap())
            .unwrap()
            .is_none());
        assert!(dec.float_error(&vp_kernel(&w, r).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn decomposition_rejects_bad_blocks() {
        let single = WeightScheme::from_rationals(0, vec![Rational::one()]).unwrap();
        assert!(matches!(
            decompose_vp_kernel(&single, res(4)),
            Err(Error::DegenerateBlock(0))
        ));
        let w = build_scheme(&WeightFamily::Uniform, 4).unwrap();
        assert!(decompose_vp_kernel(&w, res(4)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rational_scheme(max_block: u32) -> impl Strategy<Value = WeightScheme> {
            (1u32..=max_block)
                .prop_flat_map(|n| (Just(n), prop::collection::vec(1i128..60, 1usize << n)))
                .prop_map(|(n, raw)| {
                    let r = raw.into_iter().map(Rational::from_integer).collect();
                    WeightScheme::from_rationals(n, r)
                        .unwrap()
                        .normalized()
                        .unwrap()
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn decomposition_is_exact(w in rational_scheme(5)) {
                let r = Resolution::new(6).unwrap();
                let dec = decompose_vp_kernel(&w, r).unwrap();
                let k = vp_kernel(&w, r).unwrap();
                prop_assert_eq!(dec.exact_error(&k).unwrap(), Some(Rational::zero()));
            }

            #[test]
            fn vp_integral_is_weight_sum(w in rational_scheme(4)) {
                let r = Resolution::new(5).unwrap();
                let k = vp_kernel(&w, r).unwrap();
                let e = k.exact().unwrap();
                let total: i128 = e.numerators.iter().sum();
                prop_assert_eq!(
                    Rational::new(total, e.denominator * 32),
                    w.exact_sum().unwrap()
                );
            }
        }
    }
}
