//! Check weight schemes against the sum and monotonicity hypotheses.

use walshvp::exact::Rational;
use walshvp::report::validation_csv;
use walshvp::weights::{build_scheme, parse_weight_csv, validate, WeightFamily, WeightScheme};

fn main() -> walshvp::Result<()> {
    for family in WeightFamily::builtins() {
        let r = validate(&build_scheme(&family, 4)?);
        println!(
            "{family:>12}: {:?}, c2 = {:.4}, applies: {}",
            r.monotonicity,
            r.c2_constant,
            r.theorem_applies()
        );
    }

    let file = "k,t\n4,1/2\n5,1/4\n6,1/8\n7,0.125\n";
    let w = parse_weight_csv(file)?;
    print!("{}", validation_csv(&validate(&w)));

    let raw = vec![Rational::from_integer(1); 4];
    let w = WeightScheme::from_rationals(2, raw)?;
    println!("unnormalized: applies = {}", validate(&w).theorem_applies());
    println!(
        "normalized:   applies = {}",
        validate(&w.normalized()?).theorem_applies()
    );
    Ok(())
}
