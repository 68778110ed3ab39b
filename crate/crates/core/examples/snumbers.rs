//! Approximation numbers in ℓ^p operator norms, S^q quasi-norms and the
//! Weyl eigenvalue inequality.

use fredholm_lab::linalg::{CMatrix, PNormContext};
use fredholm_lab::snumbers::{approx_numbers, sqapp_norm, weyl_eigenvalue_check, weyl_numbers_estimate};

fn main() -> fredholm_lab::Result<()> {
    let t = CMatrix::from_real_rows(&[&[3.0, 1.0, 0.0], &[0.0, 2.0, 1.0], &[1.0, 0.0, 1.0]])?;
    for p in [1.0, 2.0, f64::INFINITY] {
        let ctx = PNormContext::new(p)?.with_seed(7);
        let a = approx_numbers(&t, &ctx)?;
        let x = weyl_numbers_estimate(&t, &ctx, 64)?;
        println!(
            "p = {p}: a_n = {:.4?} ({:?}), x_n >= {:.4?}",
            a.values, a.certainty, x.values
        );
        for q in [0.5, 1.0, 2.0] {
            println!("  S^{q} quasi-norm: {:.4}", sqapp_norm(&t, q, &ctx)?.value);
        }
        let weyl = weyl_eigenvalue_check(&t, 1.0, &ctx)?;
        println!(
            "  Weyl inequality at q = 1: {:.4} <= {:.4}: {:?}",
            weyl.lhs, weyl.rhs, weyl.verdict
        );
    }
    Ok(())
}
