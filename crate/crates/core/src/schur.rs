//! Schur multipliers on n×n matrices: the upper-triangular subalgebra, its
//! Hilbert transform and the Toeplitz compressions T_a(b) = P(ab).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{IndexReport, IndexValue, Route, ScaleEvidence, Tolerances};
use crate::linalg::{null_space, numerical_rank, singular_values, CMatrix, C64, DEFAULT_RANK_TOLERANCE, I, ONE, ZERO};

/// Largest condition number accepted for the symbol of a Toeplitz compression.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurModel {
    pub n: usize,
    pub p: f64,
}

impl SchurModel {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix size must be at least 1"));
        }
        if !(p >= 1.0) {
            return Err(Error::invalid(format!("p must be at least 1, got {p}")));
        }
        Ok(Self { n, p })
    }

    /// Dimension of the upper-triangular space.
    pub fn triangular_dim(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// (i, j) pairs with i ≤ j, row by row.
    pub fn triangular_positions(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| (i..self.n).map(move |j| (i, j))).collect()
    }
}

fn schur_multiply(x: &CMatrix, symbol: impl Fn(usize, usize) -> C64) -> Result<CMatrix> {
    x.require_square()?;
    Ok(CMatrix::from_fn(x.rows(), x.cols(), |i, j| symbol(i, j) * x.get(i, j)))
}

fn sgn(i: usize, j: usize) -> f64 {
    (i as i64 - j as i64).signum() as f64
}

/// Y_ij = −i·sgn(i − j)·X_ij, with sgn(0) = 0.
pub fn schur_hilbert(x: &CMatrix) -> Result<CMatrix> {
    schur_multiply(x, |i, j| -I * sgn(i, j))
}

/// Keeps the entries with i ≤ j.
pub fn triangular_projection(x: &CMatrix) -> Result<CMatrix> {
    schur_multiply(x, |i, j| if i <= j { ONE } else { ZERO })
}

pub fn diagonal_expectation(x: &CMatrix) -> Result<CMatrix> {
    schur_multiply(x, |i, j| if i == j { ONE } else { ZERO })
}

/// +1 on i ≤ j and −1 on i > j, so that (Id + F)/2 is the triangular
/// projection. With the Hilbert symbol above this is F = E − iH.
pub fn f_operator(x: &CMatrix) -> Result<CMatrix> {
    schur_multiply(x, f_symbol)
}

fn f_symbol(i: usize, j: usize) -> C64 {
    if i <= j {
        ONE
    } else {
        -ONE
    }
}

/// Strictly lower, diagonal and strictly upper parts of X.
pub fn triangular_parts(x: &CMatrix) -> Result<(CMatrix, CMatrix, CMatrix)> {
    let lower = schur_multiply(x, |i, j| if i > j { ONE } else { ZERO })?;
    let upper = schur_multiply(x, |i, j| if i < j { ONE } else { ZERO })?;
    Ok((lower, diagonal_expectation(x)?, upper))
}

pub fn condition_number(a: &CMatrix) -> Result<f64> {
    a.require_square()?;
    let s = singular_values(a);
    let (max, min) = (s[0], *s.last().expect("non-empty"));
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

/// T_a(b) = P(a·b) as an explicit matrix on the triangular space, in the
/// basis E_ij (i ≤ j) ordered row by row.
pub fn toeplitz_compression(a: &CMatrix) -> Result<CMatrix> {
    a.require_square()?;
    let model = SchurModel::new(a.rows(), 2.0)?;
    let cond = condition_number(a)?;
    if cond >= MAX_CONDITION {
        return Err(Error::refusal(format!(
            "condition number {cond:.3e} is not below {MAX_CONDITION:.0e}"
        )));
    }
    let pos = model.triangular_positions();
    // a·E_kl = Σ_i a_ik E_il, and P keeps i ≤ l
    Ok(CMatrix::from_fn(pos.len(), pos.len(), |r, c| {
        let ((i, j), (k, l)) = (pos[r], pos[c]);
        if j == l {
            a.get(i, k)
        } else {
            ZERO
        }
    }))
}

/// Index of the odd pairing, computed from exact ranks of T_a.
pub fn schur_index_pairing(a: &CMatrix) -> Result<IndexReport> {
    let t = toeplitz_compression(a)?;
    let kernel_dim = null_space(&t, DEFAULT_RANK_TOLERANCE)?.cols();
    let cokernel_dim = null_space(&t.adjoint(), DEFAULT_RANK_TOLERANCE)?.cols();
    let evidence = ScaleEvidence {
        scale: a.rows(),
        kernel_dim,
        cokernel_dim,
        raw_kernel_dim: kernel_dim,
        raw_cokernel_dim: cokernel_dim,
    };
    Ok(IndexReport {
        index: IndexValue::Stable(evidence.index()),
        route: Route::ExactFinite,
        evidence: vec![evidence],
        tolerances: Tolerances {
            rank_tolerance: Some(DEFAULT_RANK_TOLERANCE),
            ..Tolerances::default()
        },
        winding: None,
    })
}

/// Vectorization X ↦ (X_00, X_01, …) used for superoperators on M_n.
fn superoperator(n: usize, op: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(n * n, n * n);
    for c in 0..n * n {
        let mut e = CMatrix::zeros(n, n);
        e.set(c / n, c % n, ONE);
        let image = op(&e);
        for r in 0..n * n {
            out.set(r, c, image.get(r / n, r % n));
        }
    }
    out
}

/// [F, L_a] as an n²×n² matrix, with L_a(X) = aX.
pub fn f_commutator(a: &CMatrix) -> Result<CMatrix> {
    a.require_square()?;
    let n = a.rows();
    let fa = superoperator(n, |x| f_operator(&(a * x)).expect("square"));
    let af = superoperator(n, |x| a * &f_operator(x).expect("square"));
    Ok(&fa - &af)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixUnitCommutator {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub rank: usize,
    /// Number of nonzero coefficients φ(k, j) − φ(l, j), j = 0..n.
    pub predicted_rank: usize,
    pub bound: usize,
}

/// Rank of [F, L_{E_kl}]: it sends E_lj to (φ(k, j) − φ(l, j))·E_kj and kills
/// every other matrix unit, so the rank is the number of nonzero differences.
pub fn matrix_unit_commutator(n: usize, k: usize, l: usize) -> Result<MatrixUnitCommutator> {
    if k >= n || l >= n {
        return Err(Error::invalid(format!(
            "matrix unit ({k}, {l}) outside a {n}×{n} matrix"
        )));
    }
    let mut e = CMatrix::zeros(n, n);
    e.set(k, l, ONE);
    let rank = numerical_rank(&f_commutator(&e)?, DEFAULT_RANK_TOLERANCE)?.rank;
    let predicted_rank = (0..n).filter(|&j| f_symbol(k, j) != f_symbol(l, j)).count();
    Ok(MatrixUnitCommutator {
        n,
        k,
        l,
        rank,
        predicted_rank,
        bound: 2 * n - 1,
    })
}

/// Singular values and Schatten norms of [F, L_a] on S²_n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorDiagnostics {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub schatten: Vec<(f64, f64)>,
}

pub fn commutator_diagnostics(a: &CMatrix, exponents: &[f64]) -> Result<CommutatorDiagnostics> {
    let c = f_commutator(a)?;
    let s = singular_values(&c);
    let rank = numerical_rank(&c, DEFAULT_RANK_TOLERANCE)?.rank;
    let schatten = exponents
        .iter()
        .map(|&q| Ok((q, crate::snumbers::lq_norm(&s, q)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CommutatorDiagnostics {
        rank,
        singular_values: s,
        schatten,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingRow {
    pub trial: usize,
    pub n: usize,
    pub condition_number: f64,
    pub rank: usize,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub index: i64,
}

/// Index of T_a for `trials` random invertible n×n matrices; trial t uses
/// the stream seeded by (seed, t), so rows do not depend on thread count.
pub fn schur_pairing_table(n: usize, trials: usize, seed: u64) -> Result<Vec<PairingRow>> {
    SchurModel::new(n, 2.0)?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let a = loop {
                let a = CMatrix::random(n, n, &mut rng);
                if condition_number(&a)? < MAX_CONDITION {
                    break a;
                }
            };
            let report = schur_index_pairing(&a)?;
            let e = report.evidence[0];
            Ok(PairingRow {
                trial,
                n,
                condition_number: condition_number(&a)?,
                rank: SchurModel::new(n, 2.0)?.triangular_dim() - e.kernel_dim,
                kernel_dim: e.kernel_dim,
                cokernel_dim: e.cokernel_dim,
                index: e.index(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, i: usize, j: usize) -> CMatrix {
        let mut e = CMatrix::zeros(n, n);
        e.set(i, j, ONE);
        e
    }

    #[test]
    fn hilbert_symbol_examples() {
        assert_eq!(schur_hilbert(&unit(3, 0, 1)).unwrap(), unit(3, 0, 1).scale(I));
        assert_eq!(schur_hilbert(&unit(3, 1, 0)).unwrap(), unit(3, 1, 0).scale(-I));
        let d = CMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(schur_hilbert(&d).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn projections() {
        assert_eq!(triangular_projection(&unit(3, 1, 0)).unwrap().max_abs(), 0.0);
        assert_eq!(triangular_projection(&unit(3, 0, 1)).unwrap(), unit(3, 0, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = CMatrix::random(5, 5, &mut rng);
        let f = f_operator(&x).unwrap();
        assert_eq!(f_operator(&f).unwrap(), x);
        let half = C64::new(0.5, 0.0);
        let p = (&x + &f).scale(half);
        assert!(p.max_abs_diff(&triangular_projection(&x).unwrap()) < 1e-15);
        // F = E − iH
        let alt = &diagonal_expectation(&x).unwrap() - &schur_hilbert(&x).unwrap().scale(I);
        assert!(alt.max_abs_diff(&f) < 1e-15);
        let (l, d, u) = triangular_parts(&x).unwrap();
        assert_eq!(&(&l + &d) + &u, x);
        assert_eq!(diagonal_expectation(&x).unwrap().diagonal(), x.diagonal());
    }

    #[test]
    fn compression_of_triangular_symbols_is_injective() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut a = triangular_projection(&CMatrix::random(4, 4, &mut rng)).unwrap();
        for i in 0..4 {
            a.set(i, i, C64::new(2.0, 0.0));
        }
        let t = toeplitz_compression(&a).unwrap();
        assert_eq!(t.rows(), 10);
        assert_eq!(numerical_rank(&t, 1e-8).unwrap().rank, 10);
        assert_eq!(
            schur_index_pairing(&CMatrix::identity(3)).unwrap().index,
            IndexValue::Stable(0)
        );
    }

    #[test]
    fn compression_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = CMatrix::random(4, 4, &mut rng);
        let t = toeplitz_compression(&a).unwrap();
        let pos = SchurModel::new(4, 2.0).unwrap().triangular_positions();
        for (c, &(k, l)) in pos.iter().enumerate() {
            let image = triangular_projection(&(&a * &unit(4, k, l))).unwrap();
            for (r, &(i, j)) in pos.iter().enumerate() {
                assert_eq!(t.get(r, c), image.get(i, j));
            }
        }
    }

    #[test]
    fn singular_symbols_are_refused() {
        let a = CMatrix::from_real_diagonal(&[1.0, 0.0, 1.0]);
        assert!(matches!(schur_index_pairing(&a), Err(Error::NumericalRefusal(_))));
    }

    #[test]
    fn pairing_table_is_zero() {
        for n in [3, 5] {
            let rows = schur_pairing_table(n, 6, 9).unwrap();
            assert!(rows.iter().all(|r| r.index == 0));
            assert_eq!(rows, schur_pairing_table(n, 6, 9).unwrap());
        }
    }

    #[test]
    fn matrix_unit_commutator_ranks() {
        for n in 1..=5 {
            for k in 0..n {
                for l in 0..n {
                    let r = matrix_unit_commutator(n, k, l).unwrap();
                    assert_eq!(r.rank, r.predicted_rank, "{n} {k} {l}");
                    assert!(r.rank <= r.bound);
                }
            }
        }
        assert!(matrix_unit_commutator(3, 3, 0).is_err());
    }

    #[test]
    fn diagnostics_of_identity() {
        let d = commutator_diagnostics(&CMatrix::identity(3), &[1.0, 2.0]).unwrap();
        assert_eq!(d.rank, 0);
        assert_eq!(d.schatten, vec![(1.0, 0.0), (2.0, 0.0)]);
    }
}
