//! Split the de la Vallée Poussin kernel into its three pieces and check
//! the sum exactly.

use walshvp::dyadic::Resolution;
use walshvp::kernels::{decompose_vp_kernel, vp_kernel};
use walshvp::weights::{build_scheme, WeightFamily};

fn main() -> walshvp::Result<()> {
    let res = Resolution::new(8)?;
    for family in WeightFamily::builtins() {
        for n in [2, 5] {
            let w = build_scheme(&family, n)?;
            let kernel = vp_kernel(&w, res)?;
            let parts = decompose_vp_kernel(&w, res)?;
            let norms: Vec<String> = parts
                .components
                .iter()
                .map(|c| format!("{:.4}", c.l1_norm()))
                .collect();
            let residual = match parts.exact_error(&kernel)? {
                Some(e) => format!("exact residual {e}"),
                None => format!("float residual {:.1e}", parts.float_error(&kernel)?),
            };
            println!(
                "{family:>12} n={n}: ‖K^T‖_1 = {:.4}, pieces [{}], {residual}",
                kernel.l1_norm(),
                norms.join(", ")
            );
        }
    }
    Ok(())
}
