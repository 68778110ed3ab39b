use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::{GroupBall, OrderOracle};
use super::word::{GroupTag, GroupWord};
use crate::error::{Error, Result};
use crate::fredholm::{IndexReport, Route, ScaleEvidence, Tolerances};
use crate::linalg::{CMatrix, C64, I};

/// Sparse matrix with entries listed as (row, column, value).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl MonomialMatrix {
    pub fn to_cmatrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for &(i, j, v) in &self.entries {
            m.set(i, j, m.get(i, j) + v);
        }
        m
    }

    /// At most one nonzero entry in every column and every row.
    pub fn is_monomial(&self) -> bool {
        let mut rows = vec![false; self.rows];
        let mut cols = vec![false; self.cols];
        for &(i, j, v) in &self.entries {
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            if rows[i] || cols[j] {
                return false;
            }
            rows[i] = true;
            cols[j] = true;
        }
        true
    }

    /// Rank of a monomial matrix: its number of nonzero entries.
    pub fn monomial_rank(&self) -> Option<usize> {
        self.is_monomial()
            .then(|| self.entries.iter().filter(|e| e.2 != C64::new(0.0, 0.0)).count())
    }
}

/// φ_s = +1 if e ⪯ s, −1 otherwise, for every element of the ball.
pub fn group_f_symbol(oracle: &OrderOracle, ball: &GroupBall) -> Result<Vec<i8>> {
    check_ball(oracle, ball)?;
    ball.elements()
        .par_iter()
        .map(|s| Ok(if oracle.in_cone(s)? { 1 } else { -1 }))
        .collect()
}

pub fn group_f_operator(oracle: &OrderOracle, ball: &GroupBall) -> Result<CMatrix> {
    let phi = group_f_symbol(oracle, ball)?;
    Ok(CMatrix::from_real_diagonal(
        &phi.iter().map(|&x| x as f64).collect::<Vec<_>>(),
    ))
}

fn check_ball(oracle: &OrderOracle, ball: &GroupBall) -> Result<()> {
    if oracle.group != ball.group {
        return Err(Error::invalid(format!(
            "{} oracle used on a {} ball",
            oracle.group, ball.group
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub group: GroupTag,
    pub t: String,
    pub in_radius: usize,
    pub out_radius: usize,
    pub matrix: MonomialMatrix,
    pub rank: usize,
    /// Count of each coefficient c·k, keyed by k, where c is i for the
    /// Hilbert transform of an order and 1 for the free one.
    pub coefficients: BTreeMap<i64, usize>,
}

/// [H, M_{λ_t}] with H(λ_s) = −i·sgn(s)·λ_s: λ_s ↦ i(sgn(s) − sgn(ts))·λ_{ts}.
/// Columns run over `ball`, rows over the ball of radius `ball.radius + |t|`.
pub fn commutator_report(oracle: &OrderOracle, ball: &GroupBall, t: &GroupWord) -> Result<CommutatorReport> {
    check_ball(oracle, ball)?;
    let out = GroupBall::build(ball.group, ball.radius + t.len())?;
    let columns = ball
        .elements()
        .par_iter()
        .enumerate()
        .map(|(j, s)| {
            let ts = t.mul(s)?;
            let k = (oracle.sign(s)? - oracle.sign(&ts)?) as i64;
            let row = out
                .lookup(&ts)?
                .ok_or_else(|| Error::invalid(format!("`{ts}` fell outside the output ball")))?;
            Ok((row, j, k))
        })
        .collect::<Result<Vec<_>>>()?;
    finish_report(
        ball.group,
        t,
        (ball.radius, out.radius),
        (out.len(), ball.len()),
        I,
        columns,
    )
}

pub(crate) fn finish_report(
    group: GroupTag,
    t: &GroupWord,
    (in_radius, out_radius): (usize, usize),
    (rows, cols): (usize, usize),
    scale: C64,
    columns: Vec<(usize, usize, i64)>,
) -> Result<CommutatorReport> {
    let mut coefficients = BTreeMap::new();
    for &(_, _, k) in &columns {
        *coefficients.entry(k).or_insert(0) += 1;
    }
    let matrix = MonomialMatrix {
        rows,
        cols,
        entries: columns
            .into_iter()
            .filter(|e| e.2 != 0)
            .map(|(i, j, k)| (i, j, scale * k as f64))
            .collect(),
    };
    let rank = matrix
        .monomial_rank()
        .ok_or_else(|| Error::CrossCheck("left translation produced a non-monomial commutator".into()))?;
    Ok(CommutatorReport {
        group,
        t: t.to_string(),
        in_radius,
        out_radius,
        matrix,
        rank,
        coefficients,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupIndexReport {
    pub group: GroupTag,
    pub element: String,
    pub report: IndexReport,
    pub ball_sizes: Vec<(usize, usize)>,
    /// Words whose handle reduction was confirmed by the Burau matrix (B₃ only).
    pub words_cross_checked: usize,
}

/// Per radius r: ker(r) = #{s : |s| ≤ r, e ⪯ s, gs ≺ e} and
/// coker(r) = #{t : |t| ≤ r, e ⪯ t, g⁻¹t ≺ e}. The index is settled once three
/// consecutive radii agree on both counts.
pub fn group_toeplitz_index(oracle: &OrderOracle, g: &GroupWord, radii: &[usize]) -> Result<GroupIndexReport> {
    if radii.len() < 3 {
        return Err(Error::invalid("the index needs at least three radii"));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    if g.group != oracle.group {
        return Err(Error::invalid(format!(
            "element of {} given to the {} oracle",
            g.group, oracle.group
        )));
    }
    let before = oracle.checks();
    let ball = GroupBall::build(g.group, *radii.last().expect("non-empty"))?;
    let g_inv = g.inverse();
    let flags = ball
        .elements()
        .par_iter()
        .map(|s| {
            if !oracle.in_cone(s)? {
                return Ok((false, false));
            }
            let ker = oracle.sign(&g.mul(s)?)? < 0;
            let coker = oracle.sign(&g_inv.mul(s)?)? < 0;
            Ok((ker, coker))
        })
        .collect::<Result<Vec<_>>>()?;
    let evidence: Vec<ScaleEvidence> = radii
        .iter()
        .map(|&r| {
            let within = &flags[..ball.count_within(r)];
            let kernel_dim = within.iter().filter(|f| f.0).count();
            let cokernel_dim = within.iter().filter(|f| f.1).count();
            ScaleEvidence {
                scale: r,
                kernel_dim,
                cokernel_dim,
                raw_kernel_dim: kernel_dim,
                raw_cokernel_dim: cokernel_dim,
            }
        })
        .collect();
    Ok(GroupIndexReport {
        group: g.group,
        element: g.to_string(),
        report: IndexReport::from_evidence(Route::Combinatorial, evidence, Tolerances::default()),
        ball_sizes: radii.iter().map(|&r| (r, ball.count_within(r))).collect(),
        words_cross_checked: oracle.checks() - before,
    })
}
