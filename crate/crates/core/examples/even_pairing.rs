//! Even Chern pairing on a graded module: a two-fold circle model whose
//! idempotent differs between the two halves by one basis vector.

use fredholm_lab::chern::{chern_even, riesz_block_model};
use fredholm_lab::fredholm::even_pairing_operator;

fn main() -> fredholm_lab::Result<()> {
    let (module, e) = riesz_block_model(6)?;
    let pairing = even_pairing_operator(&module, &e)?;
    println!(
        "e F+ e: {} -> {}, ker {}, coker {}, index {}",
        pairing.domain_dim, pairing.codomain_dim, pairing.kernel_dim, pairing.cokernel_dim, pairing.index
    );
    for n in [0, 2, 4] {
        let eval = chern_even(&module, &e, n)?;
        println!(
            "n = {n}: raw trace {:.3}, pairing {:.3}",
            eval.raw_trace.re, eval.predicted_index.re
        );
    }
    Ok(())
}
