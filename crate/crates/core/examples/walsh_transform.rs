//! Forward transform, Parseval, and partial sums of |x|.

use walshvp::dyadic::{LpExponent, Resolution, SampledFunction};
use walshvp::walsh::{fwht_forward, fwht_inverse, partial_sum};

fn main() -> walshvp::Result<()> {
    let res = Resolution::new(10)?;
    let f = SampledFunction::abs_coordinate(res);
    let spectrum = fwht_forward(&f);

    println!("first coefficients of |x|:");
    for (k, c) in spectrum.coeffs().iter().enumerate().take(9) {
        println!("  f^({k}) = {c:+.6}");
    }
    let l2 = f.lp_norm(LpExponent::TWO);
    println!("energy {:.12}, ‖f‖_2^2 {:.12}", spectrum.energy(), l2 * l2);

    let back = fwht_inverse(&spectrum);
    println!("round-trip error {:.1e}", back.max_abs_diff(&f)?);

    for n in [1, 4, 16, 64, 256] {
        let s = partial_sum(&f, n)?;
        println!(
            "‖S_{n} f - f‖_inf = {:.6}",
            s.sub(&f)?.lp_norm(LpExponent::Infinity)
        );
    }
    Ok(())
}
