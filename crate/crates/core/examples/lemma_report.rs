//! Run every kernel lemma check at N = 8 and print the report as CSV.

use walshvp::dyadic::Resolution;
use walshvp::experiments::{verify_all_lemmas, LemmaConfig};
use walshvp::report::lemma_csv;

fn main() -> walshvp::Result<()> {
    let report = verify_all_lemmas(Resolution::new(8)?, &LemmaConfig::default())?;
    print!("{}", lemma_csv(&report));
    let (n, max) = report.fejer_max;
    println!(
        "# max ‖K_n‖_1 = {max:.12} at n = {n}; all pass: {}",
        report.all_pass()
    );
    Ok(())
}
