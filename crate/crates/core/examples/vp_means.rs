//! The mean computed by partial sums and by convolution, plus the general
//! (m, n) mean.

use walshvp::dyadic::{LpExponent, Resolution};
use walshvp::experiments::TestFunction;
use walshvp::means::{general_vp_mean, vp_mean, MeanPath};
use walshvp::weights::{build_scheme, WeightFamily};

fn main() -> walshvp::Result<()> {
    let res = Resolution::new(12)?;
    let f = TestFunction::StepMix(2024).sample(res)?;
    for n in 1..=8 {
        let w = build_scheme(&WeightFamily::Cesaro(2.0), n)?;
        let direct = vp_mean(&f, &w, MeanPath::PartialSums)?.result;
        let conv = vp_mean(&f, &w, MeanPath::Convolution)?.result;
        println!(
            "n={n}: ‖σ - f‖_1 = {:.6}, path difference {:.1e}",
            conv.sub(&f)?.lp_norm(LpExponent::ONE),
            direct.max_abs_diff(&conv)?
        );
    }
    let t = vec![0.25; 4];
    let g = general_vp_mean(&f, &t, 5, 8)?;
    println!("mean of S_5..S_8 at x=0: {:.6}", g.values()[0]);
    Ok(())
}
