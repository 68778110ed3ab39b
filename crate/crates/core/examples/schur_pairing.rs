//! Toeplitz compressions T_a(b) = P(ab) on upper-triangular matrices: the
//! index vanishes for every invertible a.

use fredholm_lab::schur::{matrix_unit_commutator, schur_pairing_table};

fn main() -> fredholm_lab::Result<()> {
    println!("trial  n  cond       ker  coker  index");
    for row in schur_pairing_table(5, 8, 42)? {
        println!(
            "{:>5}  {}  {:>9.2e}  {:>3}  {:>5}  {:>5}",
            row.trial, row.n, row.condition_number, row.kernel_dim, row.cokernel_dim, row.index
        );
    }
    println!("\nrank of [F, L_E_kl] for n = 4 (bound 2n - 1 = 7)");
    for k in 0..4 {
        let ranks = (0..4)
            .map(|l| matrix_unit_commutator(4, k, l).map(|c| c.rank))
            .collect::<Result<Vec<_>, _>>()?;
        println!("  k = {k}: {ranks:?}");
    }
    Ok(())
}
