//! Left orders on ℤ and ℤ² and the combinatorial Toeplitz index they give.

use fredholm_lab::groups::{group_toeplitz_index, GroupBall, GroupTag, GroupWord, OrderOracle};

fn main() -> fredholm_lab::Result<()> {
    let z = OrderOracle::new(GroupTag::Z)?;
    for k in [-3, -1, 0, 2] {
        let g = GroupWord::from_vector(GroupTag::Z, &[k])?;
        let r = group_toeplitz_index(&z, &g, &[6, 8, 10])?;
        println!("Z, g = {k}: index {}", r.report.index);
    }

    let lex = OrderOracle::new(GroupTag::ZdLex(2))?;
    let ball = GroupBall::build(GroupTag::ZdLex(2), 2)?;
    let mut sorted = ball.elements().to_vec();
    sorted.sort_by(|s, t| lex.compare(s, t).expect("same group"));
    let shown: Vec<String> = sorted.iter().map(|w| format!("{:?}", w.exponent_vector())).collect();
    println!("Z^2 ball of radius 2 in lexicographic order:\n  {}", shown.join(" < "));

    for v in [[1, 0], [0, 1], [-1, 3]] {
        let g = GroupWord::from_vector(GroupTag::ZdLex(2), &v)?;
        let r = group_toeplitz_index(&lex, &g, &[4, 6, 8, 10])?;
        let counts: Vec<String> = r
            .report
            .evidence
            .iter()
            .map(|e| format!("{}/{}", e.kernel_dim, e.cokernel_dim))
            .collect();
        println!(
            "Z^2 lex, g = {v:?}: {} (ker/coker by radius: {})",
            r.report.index,
            counts.join(" ")
        );
    }
    Ok(())
}
