//! Exact L1 norms of Dirichlet and Fejér kernels, and the running maximum
//! of the Fejér norms against 17/15.

use walshvp::dyadic::Resolution;
use walshvp::exact::rational_to_f64;
use walshvp::kernels::{fejer_norm_max, kernel_norm_table, FEJER_L1_SUP};

fn main() -> walshvp::Result<()> {
    let res = Resolution::new(11)?;
    let rows = kernel_norm_table(1 << 10, res)?;
    println!("{:>5} {:>10} {:>14}", "n", "‖D_n‖_1", "‖K_n‖_1");
    for r in rows
        .iter()
        .filter(|r| r.n.is_power_of_two() || r.n % 170 == 0)
    {
        println!(
            "{:>5} {:>10.4} {:>14.10}",
            r.n,
            rational_to_f64(&r.l1_dirichlet),
            rational_to_f64(&r.l1_fejer)
        );
    }
    let (n, max) = fejer_norm_max(&rows).expect("non-empty table");
    println!(
        "max ‖K_n‖_1 = {max} ≈ {:.12} at n = {n}",
        rational_to_f64(&max)
    );
    println!("17/15 ≈ {:.12}", rational_to_f64(&FEJER_L1_SUP));
    Ok(())
}
