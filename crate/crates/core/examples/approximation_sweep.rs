//! Approximation error against the modulus for each weight family, and the
//! fitted decay rate for |x|.

use walshvp::dyadic::{LpExponent, Resolution};
use walshvp::experiments::{lipschitz_rate, ratio_sweep, TestFunction};
use walshvp::weights::WeightFamily;

fn main() -> walshvp::Result<()> {
    let res = Resolution::new(12)?;
    let f = TestFunction::AbsPower(1.0).sample(res)?;
    for family in WeightFamily::builtins() {
        let sweep = ratio_sweep(&f, &family, 1..=10, &LpExponent::standard())?;
        println!(
            "{:>12}: sup ratio {:.4}, sup c2 {:.4}, all within bound: {}",
            sweep.family, sweep.sup_ratio, sweep.sup_c2, sweep.all_ok
        );
    }
    let fit = lipschitz_rate(&f, &WeightFamily::Uniform, LpExponent::Infinity, 2..=9)?;
    println!(
        "|x|: error ≈ {:.3} * 2^(-{:.3} n) over n = {:?}",
        fit.c_hat, fit.alpha_hat, fit.used
    );
    Ok(())
}
