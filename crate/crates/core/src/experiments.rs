//! Numerical checks of the kernel lemmas and the approximation theorem.
//!
//! Everything runs at a finite resolution `N`, where every integral is a
//! finite sum. Random inputs come from a seeded SplitMix64 stream with
//! samples uniform in `[-1, 1]`; the seed is the only state needed to replay
//! a run.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_traits::Zero;
use rand::{RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{
    abs_value, modulus_of_continuity, translation_distance, LpExponent, Resolution, SampledFunction,
};
use crate::error::{Error, Result};
use crate::exact::{rational_to_f64, Rational};
use crate::kernels::{
    decompose_vp_kernel, dirichlet, dirichlet_via_recursion, fejer, fejer_norm_max,
    kernel_norm_table, vp_kernel, FEJER_L1_SUP, FEJER_L1_UNIFORM,
};
use crate::means::{vp_mean, MeanPath};
use crate::walsh::{fwht_forward, fwht_in_place, fwht_inverse, spectral_tail, Spectrum};
use crate::weights::{build_scheme, validate_with_cap, WeightFamily, WeightScheme, DEFAULT_C2_CAP};

/// Explicit constant for non-increasing weights: `1 + (1/2)(17/15)`.
pub const CASE_B_CONSTANT: f64 = 47.0 / 30.0;

/// Absolute slack, relative to `‖f‖_p`, on the theorem bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// Moduli below this are treated as zero.
pub const MODULUS_FLOOR: f64 = 1e-13;

/// Errors below this count as exact reproduction.
pub const ZERO_ERROR: f64 = 1e-10;

/// Absolute slack on the modulus inequality comparison.
pub const INEQUALITY_SLACK: f64 = 1e-10;

/// Default seed for every randomized run.
pub const DEFAULT_SEED: u64 = 0x005e_ed0f_ca11;

pub fn seeded_rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Test-function library.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// `|x|^α`.
    AbsPower(f64),
    /// Indicator of `I_n`.
    IntervalIndicator(u32),
    /// `sum c w_k` over `(k, c)` pairs.
    WalshPoly(Vec<(usize, f64)>),
    /// Independent samples uniform in `[-1, 1]`.
    RandomBounded(u64),
    /// Sum of six randomly placed dyadic steps with levels in `[-1, 1]`.
    StepMix(u64),
}

impl TestFunction {
    pub fn sample(&self, resolution: Resolution) -> Result<SampledFunction> {
        match self {
            TestFunction::AbsPower(alpha) => {
                let a = *alpha;
                SampledFunction::from_fn(resolution, |j| abs_value(j, resolution).powf(a))
            }
            TestFunction::IntervalIndicator(n) => crate::dyadic::interval_indicator(*n, resolution),
            TestFunction::WalshPoly(terms) => {
                let mut coeffs = vec![0.0; resolution.len()];
                for &(k, c) in terms {
                    if k >= resolution.len() {
                        return Err(Error::OutOfRange {
                            what: "Walsh frequency",
                            value: k as u64,
                            limit: resolution.len() as u64 - 1,
                        });
                    }
                    coeffs[k] += c;
                }
                Ok(fwht_inverse(&Spectrum::new(resolution, coeffs)?))
            }
            TestFunction::RandomBounded(seed) => {
                let mut rng = seeded_rng(*seed);
                SampledFunction::from_fn(resolution, |_| rng.random_range(-1.0..=1.0))
            }
            TestFunction::StepMix(seed) => {
                let mut rng = seeded_rng(*seed);
                let bits = resolution.bits();
                let mut values = vec![0.0; resolution.len()];
                for _ in 0..6 {
                    let level = rng.random_range(1..=bits);
                    let center = rng.random_range(0..resolution.len());
                    let height: f64 = rng.random_range(-1.0..=1.0);
                    let mask = (1usize << level) - 1;
                    for (y, v) in values.iter_mut().enumerate() {
                        if y & mask == center & mask {
                            *v += height;
                        }
                    }
                }
                SampledFunction::new(resolution, values)
            }
        }
    }

    /// Five functions spanning smooth, rough, polynomial and random inputs.
    pub fn standard_suite(seed: u64) -> Vec<TestFunction> {
        vec![
            TestFunction::AbsPower(0.5),
            TestFunction::AbsPower(1.0),
            TestFunction::IntervalIndicator(3),
            TestFunction::RandomBounded(seed),
            TestFunction::StepMix(seed.wrapping_add(1)),
        ]
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::AbsPower(a) => write!(f, "abs_power:{a}"),
            TestFunction::IntervalIndicator(n) => write!(f, "indicator:{n}"),
            TestFunction::WalshPoly(terms) => {
                f.write_str("walsh:")?;
                for (i, (k, c)) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{k}={c}")?;
                }
                Ok(())
            }
            TestFunction::RandomBounded(s) => write!(f, "random:{s}"),
            TestFunction::StepMix(s) => write!(f, "step_mix:{s}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `abs_power:<α>`, `indicator:<n>`, `walsh:<k>=<c>,...`, `random:<seed>`,
    /// `step_mix:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownSpec {
            what: "function",
            value: s.to_string(),
        };
        let (name, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        let name = name.to_ascii_lowercase().replace('-', "_");
        match name.as_str() {
            "abs_power" => arg.parse().map(TestFunction::AbsPower).map_err(|_| bad()),
            "indicator" => arg
                .parse()
                .map(TestFunction::IntervalIndicator)
                .map_err(|_| bad()),
            "walsh" => {
                let terms = arg
                    .split(',')
                    .map(|t| {
                        let (k, c) = t.split_once('=').unwrap_or((t, "1"));
                        Some((k.trim().parse().ok()?, c.trim().parse().ok()?))
                    })
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(bad)?;
                Ok(TestFunction::WalshPoly(terms))
            }
            "random" => arg
                .parse()
                .map(TestFunction::RandomBounded)
                .map_err(|_| bad()),
            "step_mix" | "stepmix" => arg.parse().map(TestFunction::StepMix).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

/// Which bound a record is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum BoundKind {
    /// Non-increasing weights: `47/30 ω`.
    CaseB,
    /// Non-decreasing weights: `(1 + 2 c2) ω`, with `c2 = t_last (2^{n+1}-1)`
    /// as in the chain of estimates for this case.
    CaseA { c2: f64 },
    /// Hypotheses not met; nothing to check.
    Unchecked,
}

impl BoundKind {
    pub fn for_scheme(w: &WeightScheme, c2_cap: f64) -> BoundKind {
        let report = validate_with_cap(w, c2_cap);
        if !report.sum_ok {
            BoundKind::Unchecked
        } else if report.case_b_ok {
            BoundKind::CaseB
        } else if report.case_a_ok {
            BoundKind::CaseA {
                c2: report.c2_constant,
            }
        } else {
            BoundKind::Unchecked
        }
    }

    pub fn constant(self) -> Option<f64> {
        match self {
            BoundKind::CaseB => Some(CASE_B_CONSTANT),
            BoundKind::CaseA { c2 } => Some(1.0 + 2.0 * c2),
            BoundKind::Unchecked => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    BoundExceeded,
    /// Zero modulus but non-zero error.
    Inconsistent,
    /// Weights violate the sum condition or both monotonicity cases.
    HypothesesUnmet,
}

/// One row of an approximation table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxRecord {
    pub n: u32,
    pub p: LpExponent,
    pub error: f64,
    pub modulus: f64,
    pub ratio: f64,
    pub bound: Option<f64>,
    pub bound_ok: bool,
    pub bound_kind: BoundKind,
    pub status: RecordStatus,
}

impl ApproxRecord {
    fn assemble(
        n: u32,
        p: LpExponent,
        error: f64,
        modulus: f64,
        f_norm: f64,
        kind: BoundKind,
    ) -> Self {
        let (ratio, consistent) = if modulus < MODULUS_FLOOR {
            if error < ZERO_ERROR {
                (0.0, true)
            } else {
                (f64::INFINITY, false)
            }
        } else {
            (error / modulus, true)
        };
        let bound = kind.constant().map(|c| c * modulus);
        let within = bound.is_some_and(|b| error <= b + BOUND_SLACK * f_norm.max(1.0));
        let status = match (consistent, kind, within) {
            (false, _, _) => RecordStatus::Inconsistent,
            (_, BoundKind::Unchecked, _) => RecordStatus::HypothesesUnmet,
            (_, _, false) => RecordStatus::BoundExceeded,
            _ => RecordStatus::Ok,
        };
        ApproxRecord {
            n,
            p,
            error,
            modulus,
            ratio,
            bound,
            bound_ok: status == RecordStatus::Ok,
            bound_kind: kind,
            status,
        }
    }
}

fn check_scheme_fits(w: &WeightScheme, resolution: Resolution) -> Result<()> {
    if w.block() == 0 || w.block() + 1 > resolution.bits() {
        return Err(Error::OutOfRange {
            what: "block exponent + 1",
            value: w.block() as u64 + 1,
            limit: resolution.bits() as u64,
        });
    }
    Ok(())
}

/// `‖σ^T_{2^n,2^{n+1}-1}(f) - f‖_p` against `ω_p(f, 2^{-n})`.
pub fn approximation_error(
    f: &SampledFunction,
    w: &WeightScheme,
    p: LpExponent,
) -> Result<ApproxRecord> {
    approximation_error_with_cap(f, w, p, DEFAULT_C2_CAP)
}

pub fn approximation_error_with_cap(
    f: &SampledFunction,
    w: &WeightScheme,
    p: LpExponent,
    c2_cap: f64,
) -> Result<ApproxRecord> {
    check_scheme_fits(w, f.resolution())?;
    let mean = vp_mean(f, w, MeanPath::Convolution)?;
    let error = mean.result.sub(f)?.lp_norm(p);
    let modulus = modulus_of_continuity(f, w.block(), p)?;
    Ok(ApproxRecord::assemble(
        w.block(),
        p,
        error,
        modulus,
        f.lp_norm(p),
        BoundKind::for_scheme(w, c2_cap),
    ))
}

/// `ω_p(f, 2^{-n})` for every `n` in `levels`, sharing work across levels.
///
/// For `p = 2` the translation distances come from the spectrum:
/// `‖f(·+t) - f‖_2^2 = 2 sum_{j >= 2^n} f̂(j)^2 (1 - w_j(t))` for `t ∈ I_n`.
/// Other exponents evaluate every translation in `I_{min level}` directly.
pub fn modulus_profile(
    f: &SampledFunction,
    p: LpExponent,
    levels: RangeInclusive<u32>,
) -> Result<Vec<(u32, f64)>> {
    let res = f.resolution();
    res.check_level(*levels.end())?;
    if levels.is_empty() {
        return Ok(Vec::new());
    }
    let lo = *levels.start();
    if p == LpExponent::TWO {
        let coeffs = fwht_forward(f).into_coeffs();
        let squares: Vec<f64> = coeffs.iter().map(|c| c * c).collect();
        return Ok(levels
            .into_par_iter()
            .map(|n| {
                let start = 1usize << n;
                let mut masked = vec![0.0; res.len()];
                masked[start..].copy_from_slice(&squares[start..]);
                let tail = crate::dyadic::pairwise_sum(&masked);
                if tail == 0.0 {
                    return (n, 0.0);
                }
                fwht_in_place(&mut masked);
                let worst = masked
                    .iter()
                    .step_by(start)
                    .skip(1)
                    .map(|h| (2.0 * (tail - h)).max(0.0))
                    .fold(0.0, f64::max);
                (n, worst.sqrt())
            })
            .collect());
    }
    let step = 1usize << lo;
    let values = f.values();
    let dist: Vec<f64> = (0..res.len())
        .into_par_iter()
        .step_by(step)
        .map(|t| translation_distance(values, t, p))
        .collect();
    Ok(levels
        .map(|n| {
            let stride = 1usize << (n - lo);
            (n, dist.iter().step_by(stride).copied().fold(0.0, f64::max))
        })
        .collect())
}

/// Summary of one `(f, family)` sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub family: String,
    pub records: Vec<ApproxRecord>,
    /// Largest finite ratio over the sweep.
    pub sup_ratio: f64,
    /// Largest `t_last (2^{n+1} - 1)` over the sweep.
    pub sup_c2: f64,
    pub all_ok: bool,
}

/// `approximation_error` for every `(n, p)` of a family; records are in
/// `(n, p_list order)` order.
pub fn ratio_sweep(
    f: &SampledFunction,
    family: &WeightFamily,
    n_range: RangeInclusive<u32>,
    p_list: &[LpExponent],
) -> Result<SweepReport> {
    ratio_sweep_with_cap(f, family, n_range, p_list, DEFAULT_C2_CAP)
}

pub fn ratio_sweep_with_cap(
    f: &SampledFunction,
    family: &WeightFamily,
    n_range: RangeInclusive<u32>,
    p_list: &[LpExponent],
    c2_cap: f64,
) -> Result<SweepReport> {
    let res = f.resolution();
    let schemes: Vec<WeightScheme> = n_range
        .clone()
        .map(|n| {
            let w = build_scheme(family, n)?;
            check_scheme_fits(&w, res)?;
            Ok(w)
        })
        .collect::<Result<_>>()?;
    let errors: Vec<SampledFunction> = schemes
        .par_iter()
        .map(|w| vp_mean(f, w, MeanPath::Convolution)?.result.sub(f))
        .collect::<Result<_>>()?;
    let mut records = Vec::with_capacity(schemes.len() * p_list.len());
    let mut moduli = Vec::with_capacity(p_list.len());
    for &p in p_list {
        moduli.push(modulus_profile(f, p, n_range.clone())?);
    }
    for (i, (w, diff)) in schemes.iter().zip(&errors).enumerate() {
        let kind = BoundKind::for_scheme(w, c2_cap);
        for (pi, &p) in p_list.iter().enumerate() {
            let modulus = moduli[pi][i].1;
            records.push(ApproxRecord::assemble(
                w.block(),
                p,
                diff.lp_norm(p),
                modulus,
                f.lp_norm(p),
                kind,
            ));
        }
    }
    let sup_ratio = records
        .iter()
        .map(|r| r.ratio)
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max);
    let sup_c2 = schemes
        .iter()
        .map(|w| validate_with_cap(w, c2_cap).c2_constant)
        .fold(0.0, f64::max);
    let all_ok = records.iter().all(|r| r.bound_ok);
    Ok(SweepReport {
        family: family.name(),
        records,
        sup_ratio,
        sup_c2,
        all_ok,
    })
}

/// Fit of `log2 error ≈ log2 c - α n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzFit {
    pub alpha_hat: f64,
    pub c_hat: f64,
    pub used: Vec<u32>,
    /// Levels dropped because the error vanished.
    pub excluded: Vec<u32>,
}

/// Least-squares line through `(n, log2 error)`, skipping zero errors.
pub fn fit_rate(points: &[(u32, f64)]) -> Result<LipschitzFit> {
    let (used, excluded): (Vec<_>, Vec<_>) = points.iter().partition(|(_, e)| *e > ZERO_ERROR);
    if used.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            found: used.len(),
        });
    }
    let k = used.len() as f64;
    let xs: Vec<f64> = used.iter().map(|(n, _)| *n as f64).collect();
    let ys: Vec<f64> = used.iter().map(|(_, e)| e.log2()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(LipschitzFit {
        alpha_hat: -slope,
        c_hat: intercept.exp2(),
        used: used.iter().map(|(n, _)| *n).collect(),
        excluded: excluded.iter().map(|(n, _)| *n).collect(),
    })
}

/// Empirical decay rate of the approximation error over `n_range`.
pub fn lipschitz_rate(
    f: &SampledFunction,
    family: &WeightFamily,
    p: LpExponent,
    n_range: RangeInclusive<u32>,
) -> Result<LipschitzFit> {
    let res = f.resolution();
    let points: Vec<(u32, f64)> = n_range
        .map(|n| {
            let w = build_scheme(family, n)?;
            check_scheme_fits(&w, res)?;
            let err = vp_mean(f, &w, MeanPath::Convolution)?
                .result
                .sub(f)?
                .lp_norm(p);
            Ok((n, err))
        })
        .collect::<Result<_>>()?;
    fit_rate(&points)
}

/// Both sides of the modulus inequality for one instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModulusInequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `‖∫ r_n(t) g(t) (f(·+t) - f) dμ(t)‖_p <= (1/2) ‖g‖_1 ω_p(f, 2^{-n})`
/// for `g ∈ P_{2^n}`, by direct quadrature over every `t`.
pub fn verify_modulus_inequality(
    f: &SampledFunction,
    g: &SampledFunction,
    n: u32,
    p: LpExponent,
) -> Result<ModulusInequalityCheck> {
    let res = f.resolution();
    res.check_same(g.resolution())?;
    if n == 0 || n >= res.bits() {
        return Err(Error::OutOfRange {
            what: "inequality level",
            value: n as u64,
            limit: res.bits() as u64 - 1,
        });
    }
    let tail = spectral_tail(g, n);
    let scale = g.lp_norm(LpExponent::Infinity).max(1.0);
    if tail > 1e-12 * scale {
        return Err(Error::NotInPolynomialSpace { n, tail });
    }
    let len = res.len();
    let fv = f.values();
    let weights: Vec<f64> = g
        .values()
        .iter()
        .enumerate()
        .map(|(t, gv)| if (t >> n) & 1 == 0 { *gv } else { -gv })
        .collect();
    let h: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|x| {
            let terms: Vec<f64> = (0..len).map(|t| weights[t] * (fv[x ^ t] - fv[x])).collect();
            crate::dyadic::pairwise_sum(&terms) / len as f64
        })
        .collect();
    let lhs = SampledFunction::new(res, h)?.lp_norm(p);
    let rhs = 0.5 * g.lp_norm(LpExponent::ONE) * modulus_of_continuity(f, n, p)?;
    Ok(ModulusInequalityCheck {
        lhs,
        rhs,
        pass: lhs <= rhs + INEQUALITY_SLACK,
    })
}

/// One row of the lemma report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaRow {
    pub lemma: String,
    pub instances: usize,
    /// Smallest slack `bound - value`; for identities, minus the largest
    /// discrepancy (so 0 means exact).
    pub worst_margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub resolution: u32,
    pub seed: u64,
    pub rows: Vec<LemmaRow>,
    /// Empirical `max ‖K_n‖_1` and its first argmax.
    pub fejer_max: (usize, f64),
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaConfig {
    pub seed: u64,
    pub inequality_instances: usize,
    pub random_schemes: usize,
    /// Largest block exponent in the decomposition check (further capped
    /// by `N - 2`).
    pub max_block: u32,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            seed: DEFAULT_SEED,
            inequality_instances: 200,
            random_schemes: 100,
            max_block: 6,
        }
    }
}

/// Exact check of `D_{2^n} = 2^n 1_{I_n}` for `0 <= n <= N`.
pub fn check_paley(resolution: Resolution) -> Result<LemmaRow> {
    let mut worst = 0i128;
    for n in 0..=resolution.bits() {
        let d = dirichlet(1usize << n, resolution)?;
        let mask = (1usize << n) - 1;
        for (x, v) in d
            .exact()
            .expect("integer kernel")
            .numerators
            .iter()
            .enumerate()
        {
            let expected = if x & mask == 0 { 1i128 << n } else { 0 };
            worst = worst.max((v - expected).abs());
        }
    }
    Ok(LemmaRow {
        lemma: "paley".into(),
        instances: resolution.bits() as usize + 1,
        worst_margin: -(worst as f64),
        pass: worst == 0,
    })
}

/// `D_{2^k + j} = D_{2^k} + r_k D_j` against direct sums for all `n <= 2^N`.
pub fn check_dirichlet_recursion(resolution: Resolution) -> Result<LemmaRow> {
    let worst = (0..=resolution.len())
        .into_par_iter()
        .map(|n| {
            let a = dirichlet(n, resolution)?;
            let b = dirichlet_via_recursion(n, resolution)?;
            let (a, b) = (a.exact().unwrap(), b.exact().unwrap());
            Ok(a.numerators
                .iter()
                .zip(&b.numerators)
                .map(|(x, y)| (x - y).abs())
                .max()
                .unwrap_or(0))
        })
        .collect::<Result<Vec<i128>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok(LemmaRow {
        lemma: "dirichlet_recursion".into(),
        instances: resolution.len() + 1,
        worst_margin: -(worst as f64),
        pass: worst == 0,
    })
}

/// `‖K_n‖_1 <= 2` and `<= 17/15` for `1 <= n <= n_max`, exact.
pub fn check_fejer_norms(
    resolution: Resolution,
    n_max: usize,
) -> Result<(LemmaRow, LemmaRow, (usize, Rational))> {
    let rows = kernel_norm_table(n_max, resolution)?;
    let (argmax, max) = fejer_norm_max(&rows).ok_or(Error::EmptySequence)?;
    let two = Rational::from_integer(FEJER_L1_UNIFORM as i128);
    let uniform_bound = LemmaRow {
        lemma: "fejer_l1_le_2".into(),
        instances: rows.len(),
        worst_margin: rational_to_f64(&(two - max)),
        pass: max <= two,
    };
    let sharp_bound = LemmaRow {
        lemma: "fejer_l1_le_17_15".into(),
        instances: rows.len(),
        worst_margin: rational_to_f64(&(FEJER_L1_SUP - max)),
        pass: max <= FEJER_L1_SUP,
    };
    Ok((uniform_bound, sharp_bound, (argmax, max)))
}

/// Random `g ∈ P_{2^n}`: Fejér kernels on even draws, random polynomials on odd.
fn random_inequality_instance(
    resolution: Resolution,
    rng: &mut SplitMix64,
    i: usize,
) -> Result<(SampledFunction, SampledFunction, u32, LpExponent)> {
    let bits = resolution.bits();
    let n = rng.random_range(1..bits);
    let p = match rng.random_range(0..4) {
        0 => LpExponent::ONE,
        1 => LpExponent::TWO,
        2 => LpExponent::Infinity,
        _ => LpExponent::Finite(rng.random_range(1.0..6.0)),
    };
    let f = TestFunction::RandomBounded(rng.random()).sample(resolution)?;
    let g = if i.is_multiple_of(2) {
        let k = rng.random_range(1..=(1usize << n));
        fejer(k, resolution)?.into_function()
    } else {
        let mut coeffs = vec![0.0; resolution.len()];
        for c in coeffs.iter_mut().take(1usize << n) {
            *c = rng.random_range(-1.0..=1.0);
        }
        fwht_inverse(&Spectrum::new(resolution, coeffs)?)
    };
    Ok((f, g, n, p))
}

/// Randomized modulus inequality instances.
pub fn check_modulus_inequality(
    resolution: Resolution,
    instances: usize,
    seed: u64,
) -> Result<LemmaRow> {
    let mut rng = seeded_rng(seed);
    let cases = (0..instances)
        .map(|i| random_inequality_instance(resolution, &mut rng, i))
        .collect::<Result<Vec<_>>>()?;
    let checks = cases
        .iter()
        .map(|(f, g, n, p)| verify_modulus_inequality(f, g, *n, *p))
        .collect::<Result<Vec<_>>>()?;
    let worst = checks
        .iter()
        .map(|c| c.rhs - c.lhs)
        .fold(f64::INFINITY, f64::min);
    Ok(LemmaRow {
        lemma: "modulus_inequality".into(),
        instances,
        worst_margin: if instances == 0 { 0.0 } else { worst },
        pass: checks.iter().all(|c| c.pass),
    })
}

/// A random rational scheme with integer numerators in `1..=50`.
pub fn random_rational_scheme(n: u32, rng: &mut SplitMix64) -> Result<WeightScheme> {
    let raw = (0..1usize << n)
        .map(|_| Rational::from_integer(rng.random_range(1..=50)))
        .collect();
    WeightScheme::from_rationals(n, raw)?.normalized()
}

/// Decomposition identity for every built-in family and random schemes.
pub fn check_decomposition(resolution: Resolution, config: &LemmaConfig) -> Result<LemmaRow> {
    let top = config.max_block.min(resolution.bits().saturating_sub(2));
    let mut schemes = Vec::new();
    for family in WeightFamily::builtins() {
        for n in 1..=top {
            schemes.push(build_scheme(&family, n)?);
        }
    }
    let mut rng = seeded_rng(config.seed ^ 0xdec0);
    if top >= 1 {
        for _ in 0..config.random_schemes {
            let n = rng.random_range(1..=top);
            schemes.push(random_rational_scheme(n, &mut rng)?);
        }
    }
    let results = schemes
        .par_iter()
        .map(|w| {
            let dec = decompose_vp_kernel(w, resolution)?;
            let k = vp_kernel(w, resolution)?;
            match dec.exact_error(&k)? {
                Some(e) => Ok((rational_to_f64(&e), e.is_zero())),
                None => {
                    let e = dec.float_error(&k)?;
                    Ok((
                        e,
                        e <= 1e-10 * k.function().lp_norm(LpExponent::Infinity).max(1.0),
                    ))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    Ok(LemmaRow {
        lemma: "kernel_decomposition".into(),
        instances: schemes.len(),
        worst_margin: -worst,
        pass: results.iter().all(|r| r.1),
    })
}

/// Run every lemma check at resolution `N >= 4`.
pub fn verify_all_lemmas(resolution: Resolution, config: &LemmaConfig) -> Result<LemmaReport> {
    if resolution.bits() < 4 {
        return Err(Error::ResolutionOutOfRange {
            bits: resolution.bits(),
            cap: crate::dyadic::max_bits(),
        });
    }
    let paley = check_paley(resolution)?;
    let recursion = check_dirichlet_recursion(resolution)?;
    let (uniform_bound, sharp_bound, (argmax, max)) =
        check_fejer_norms(resolution, resolution.len() / 2)?;
    let inequality =
        check_modulus_inequality(resolution, config.inequality_instances, config.seed)?;
    let decomposition = check_decomposition(resolution, config)?;
    Ok(LemmaReport {
        resolution: resolution.bits(),
        seed: config.seed,
        rows: vec![
            paley,
            recursion,
            uniform_bound,
            sharp_bound,
            inequality,
            decomposition,
        ],
        fejer_max: (argmax, rational_to_f64(&max)),
    })
}
