//! tr(Id − RT)^n − tr(Id − TR)^n for square matrices with R the
//! pseudo-inverse: always zero, whatever the rank.

use fredholm_lab::circle::FourierSymbol;
use fredholm_lab::fredholm::{calderon_index, toeplitz_section};
use fredholm_lab::linalg::{numerical_rank, pseudo_inverse, CMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fredholm_lab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let low_rank = &CMatrix::random(12, 4, &mut rng) * &CMatrix::random(4, 12, &mut rng);
    let shift = toeplitz_section(&FourierSymbol::z_power(2), 11, 2.0).into_matrix();
    let cases = [
        ("random 12x12", CMatrix::random(12, 12, &mut rng)),
        ("rank 4 product", low_rank),
        ("section of z^2", shift),
    ];
    for (name, t) in cases {
        let r = pseudo_inverse(&t, 1e-8)?;
        let rank = numerical_rank(&t, 1e-8)?.rank;
        for n in 1..=3 {
            let rep = calderon_index(&t, &r, n, 0.1)?;
            println!(
                "{name:<16} rank {rank:>2}  n = {n}:  {:.3} - {:.3} -> {:?}",
                rep.lhs_trace.re, rep.rhs_trace.re, rep.index
            );
        }
    }
    Ok(())
}
