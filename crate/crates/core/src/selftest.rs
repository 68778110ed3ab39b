//! A quick property sweep over every module, used by the `selftest` command.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chern::chern_odd_circle;
use crate::circle::FourierSymbol;
use crate::error::Result;
use crate::fredholm::{
    calderon_index, index_by_winding, toeplitz_index_by_stabilization, IndexValue, StabilizationConfig,
};
use crate::groups::{
    free_hilbert, free_hilbert_commutator, group_toeplitz_index, handle_reduce_checked, FreeHilbertSigns, GroupBall,
    GroupTag, GroupWord, OrderOracle, DEFAULT_STEP_BUDGET,
};
use crate::linalg::{pseudo_inverse, singular_values, CMatrix, PNormContext};
use crate::schur::schur_pairing_table;
use crate::snumbers::approx_numbers;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, run: impl FnOnce() -> Result<(bool, String)>) -> SelfCheck {
    let (passed, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
    SelfCheck {
        name: name.to_string(),
        passed,
        detail,
    }
}

pub fn run(seed: u64) -> Vec<SelfCheck> {
    vec![
        check("toeplitz_routes_agree", || {
            let mut bad = Vec::new();
            for k in -3..=3i64 {
                let f = FourierSymbol::z_power(k);
                let w = index_by_winding(&f)?.index;
                let config = StabilizationConfig::for_symbol(k.unsigned_abs() as usize, 1);
                let s = toeplitz_index_by_stabilization(&f, &[16, 24, 32], &config)?.index;
                if w != IndexValue::Stable(-k) || s != w {
                    bad.push(k);
                }
            }
            Ok((bad.is_empty(), format!("k in -3..=3, mismatches {bad:?}")))
        }),
        check("chern_odd_matches_winding", || {
            let mut bad = Vec::new();
            for k in 1..=3i64 {
                if chern_odd_circle(&FourierSymbol::z_power(k), 1)?.nearest_integer != Some(-k) {
                    bad.push(k);
                }
            }
            Ok((bad.is_empty(), format!("k in 1..=3, mismatches {bad:?}")))
        }),
        check("calderon_zero_law", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            for size in 2..8 {
                let t = CMatrix::random(size, size, &mut rng);
                let r = pseudo_inverse(&t, 1e-8)?;
                let rep = calderon_index(&t, &r, 2, 0.1)?;
                worst = worst.max((rep.lhs_trace - rep.rhs_trace).norm());
            }
            Ok((worst < 1e-8, format!("largest residue {worst:.2e}")))
        }),
        check("approximation_numbers_are_singular_values", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
            let ctx = PNormContext::new(2.0)?;
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let t = CMatrix::random(5, 4, &mut rng);
                let a = approx_numbers(&t, &ctx)?;
                for (x, y) in a.values.iter().zip(singular_values(&t)) {
                    worst = worst.max((x - y).abs());
                }
            }
            Ok((worst < 1e-10, format!("largest deviation {worst:.2e}")))
        }),
        check("schur_pairing_vanishes", || {
            let rows = schur_pairing_table(4, 5, seed)?;
            Ok((
                rows.iter().all(|r| r.index == 0),
                format!("{} trials at n = 4", rows.len()),
            ))
        }),
        check("integer_group_index", || {
            let oracle = OrderOracle::new(GroupTag::Z)?;
            let mut bad = Vec::new();
            for k in -3..=3i64 {
                let g = GroupWord::from_vector(GroupTag::Z, &[k])?;
                if group_toeplitz_index(&oracle, &g, &[4, 5, 6])?.report.index != IndexValue::Stable(-k) {
                    bad.push(k);
                }
            }
            Ok((bad.is_empty(), format!("k in -3..=3, mismatches {bad:?}")))
        }),
        check("braid_reduction_agrees_with_burau", || {
            let ball = GroupBall::build(GroupTag::B3, 3)?;
            for w in ball.elements() {
                handle_reduce_checked(w, DEFAULT_STEP_BUDGET)?;
            }
            Ok((true, format!("{} elements of the radius-3 ball", ball.len())))
        }),
        check("free_hilbert_structure", || {
            let ball = GroupBall::build(GroupTag::FreeGroup(2), 3)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
            let signs = FreeHilbertSigns::random(2, &mut rng);
            let h = free_hilbert(&signs, &ball)?;
            let squares = h[0] == 0 && h[1..].iter().all(|x| x * x == 1);
            let t = GroupWord::new(GroupTag::FreeGroup(2), vec![crate::groups::Letter::new(1, 1)])?;
            let c = free_hilbert_commutator(&signs, &ball, &t)?;
            Ok((
                squares && c.matrix.is_monomial(),
                format!("signs {signs}, commutator rank {}", c.rank),
            ))
        }),
    ]
}
