//! The free Hilbert transform on F_k: signs chosen by the first letter, and
//! its commutators with left translations.

use fredholm_lab::groups::{free_hilbert, free_hilbert_commutator, parse_word, FreeHilbertSigns, GroupBall, GroupTag};

fn main() -> fredholm_lab::Result<()> {
    let group = GroupTag::FreeGroup(2);
    let ball = GroupBall::build(group, 4)?;
    for pattern in ["++,--", "+-,+-", "+-,-+"] {
        let signs: FreeHilbertSigns = pattern.parse()?;
        let h = free_hilbert(&signs, &ball)?;
        let plus = h.iter().filter(|&&x| x == 1).count();
        println!("signs {pattern}: {plus} of {} basis vectors get +1", ball.len());
        for t in ["g1", "g2^-1", "g1 g2"] {
            let report = free_hilbert_commutator(&signs, &ball, &parse_word(group, t)?)?;
            println!(
                "  [H, lambda({t})]: rank {}, coefficient counts {:?}",
                report.rank, report.coefficients
            );
        }
    }
    Ok(())
}
