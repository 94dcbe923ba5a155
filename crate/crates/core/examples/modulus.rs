//! Dyadic modulus of continuity of |x|^α for several exponents.

use walshvp::dyadic::{modulus_at, LpExponent, Resolution};
use walshvp::experiments::{modulus_profile, TestFunction};

fn main() -> walshvp::Result<()> {
    let res = Resolution::new(12)?;
    let f = TestFunction::AbsPower(0.5).sample(res)?;
    for p in LpExponent::standard() {
        let profile = modulus_profile(&f, p, 0..=12)?;
        let line: Vec<String> = profile.iter().map(|(_, w)| format!("{w:.4}")).collect();
        println!("p={p:>3}: {}", line.join(" "));
    }
    let m = modulus_at(&f, 0.1, LpExponent::Infinity)?;
    println!(
        "ω_inf(f, 0.1) uses the grid point 2^-{} = {}: {:.6}",
        m.level, m.delta, m.value
    );
    Ok(())
}
