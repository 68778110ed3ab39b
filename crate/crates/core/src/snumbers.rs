//! Approximation numbers, Weyl numbers and the S^q_app quasi-norms.
//!
//! In the Hilbert case (p = 2) approximation numbers are singular values and
//! everything here is exact. For p ∈ {1, ∞} the distance to rank-k operators
//! is an intractable minimax problem; we run an SVD-seeded alternating
//! ℓ¹-regression over the rank-k factors and report the best residual norm,
//! which is attained by an explicit operator and hence an upper bound. Other
//! p use the Riesz–Thorin bound ‖A‖_p ≤ ‖A‖_1^{1/p} ‖A‖_∞^{1-1/p} on the same
//! candidates.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    dense_singular_values, eigenvalues, operator_pnorm, singular_values, svd, CMatrix, Certainty, PNormContext, C64,
    DEFAULT_RANK_TOLERANCE, ZERO,
};

/// Nonincreasing sequence of s-numbers of one operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SNumberSequence {
    pub values: Vec<f64>,
    pub p: f64,
    pub certainty: Certainty,
}

impl SNumberSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The n-th s-number with the usual 1-based indexing (`s_1 = values[0]`).
    /// Indices past the end are zero.
    pub fn nth(&self, n: usize) -> f64 {
        assert!(n >= 1, "s-numbers are indexed from 1");
        self.values.get(n - 1).copied().unwrap_or(0.0)
    }

    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        lq_norm(&self.values, q)
    }
}

/// Value of the S^q quasi-norm of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealNorm {
    pub q: f64,
    pub value: f64,
}

/// ℓ^q (quasi-)norm of a nonnegative sequence, q > 0.
pub fn lq_norm(values: &[f64], q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::invalid(format!("q = {q} must be positive")));
    }
    if q == f64::INFINITY {
        return Ok(values.iter().copied().fold(0.0, f64::max));
    }
    let m = values.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(m * values.iter().map(|&x| (x / m).powf(q)).sum::<f64>().powf(1.0 / q))
}

/// Knobs for the non-Hilbert rank-k search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxOptions {
    pub restarts: usize,
    pub sweeps: usize,
    pub irls_iterations: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            sweeps: 12,
            irls_iterations: 20,
        }
    }
}

/// a_1 ≥ a_2 ≥ … of `t` on ℓ^p. Entries past the numerical rank (relative
/// tolerance 1e-8) are exactly 0.
pub fn approx_numbers(t: &CMatrix, ctx: &PNormContext) -> Result<SNumberSequence> {
    approx_numbers_with(t, ctx, &ApproxOptions::default())
}

pub fn approx_numbers_with(t: &CMatrix, ctx: &PNormContext, opts: &ApproxOptions) -> Result<SNumberSequence> {
    let n_values = t.rows().min(t.cols());
    if ctx.p == 2.0 {
        // past the numerical rank the values are rounding noise; report 0
        let mut values = singular_values(t);
        let rank = crate::linalg::rank_from_singular_values(&values, DEFAULT_RANK_TOLERANCE).rank;
        values[rank..].iter_mut().for_each(|x| *x = 0.0);
        return Ok(SNumberSequence {
            values,
            p: 2.0,
            certainty: Certainty::Exact,
        });
    }
    if n_values == 0 {
        return Ok(SNumberSequence {
            values: Vec::new(),
            p: ctx.p,
            certainty: Certainty::Estimated,
        });
    }
    let dec = svd(t);
    let rank = crate::linalg::rank_from_singular_values(&dec.singular_values, DEFAULT_RANK_TOLERANCE).rank;
    let mut values = vec![0.0; n_values];
    values[0] = operator_pnorm(t, ctx)?.value;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for k in 1..rank.min(n_values) {
        values[k] = best_rank_k_residual(t, &dec, k, ctx.p, opts, &mut rng);
    }
    // running minimum from the front keeps every entry an upper bound
    for k in 1..n_values {
        values[k] = values[k].min(values[k - 1]);
    }
    Ok(SNumberSequence {
        values,
        p: ctx.p,
        certainty: if ctx.p == 2.0 {
            Certainty::Exact
        } else {
            Certainty::Estimated
        },
    })
}

fn norm_1(a: &DMatrix<C64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn norm_inf(a: &DMatrix<C64>) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Certified upper bound on ‖a‖_{p→p}.
fn norm_upper(a: &DMatrix<C64>, p: f64) -> f64 {
    if p == 1.0 {
        norm_1(a)
    } else if p == f64::INFINITY {
        norm_inf(a)
    } else {
        let riesz_thorin = norm_1(a).powf(1.0 / p) * norm_inf(a).powf(1.0 - 1.0 / p);
        if a.is_empty() {
            return 0.0;
        }
        // ‖a‖_p ≤ ‖a‖_2 · max(1, n^{1/p-1/2}) · max(1, m^{1/2-1/p})
        let (m, n) = (a.nrows() as f64, a.ncols() as f64);
        let s = dense_singular_values(a).first().copied().unwrap_or(0.0);
        let via_two = s * n.powf((1.0 / p - 0.5).max(0.0)) * m.powf((0.5 - 1.0 / p).max(0.0));
        riesz_thorin.min(via_two)
    }
}

/// Smallest ‖T − R‖_p found over rank-k operators R.
fn best_rank_k_residual(
    t: &CMatrix,
    dec: &crate::linalg::Svd,
    k: usize,
    p: f64,
    opts: &ApproxOptions,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let target = t.as_dmatrix();
    let (m, n) = (t.rows(), t.cols());
    // seed: truncated SVD, L = U_k Σ_k, W = V_k*
    let l0 = DMatrix::from_fn(m, k, |i, j| dec.u.get(i, j) * dec.singular_values[j]);
    let w0 = DMatrix::from_fn(k, n, |i, j| dec.v.get(j, i).conj());
    let mut best = norm_upper(&(target - &l0 * &w0), p);
    let scale = dec.singular_values[0].max(f64::MIN_POSITIVE);

    // p = ∞ is p = 1 for the adjoint
    let routes: &[bool] = if p == 1.0 {
        &[false]
    } else if p == f64::INFINITY {
        &[true]
    } else {
        &[false, true]
    };
    for &adjoint in routes {
        let (tt, l_seed, w_seed) = if adjoint {
            (target.adjoint(), w0.adjoint(), l0.adjoint())
        } else {
            (target.clone(), l0.clone(), w0.clone())
        };
        for restart in 0..opts.restarts.max(1) {
            let mut l = l_seed.clone();
            if restart > 0 {
                let noise = 0.1 * scale;
                l += DMatrix::from_fn(l.nrows(), l.ncols(), |_, _| {
                    C64::new(rng.gen_range(-noise..noise), rng.gen_range(-noise..noise))
                });
            }
            let r = alternating_l1_factorization(&tt, l, w_seed.clone(), opts);
            let cand = if adjoint { r.adjoint() } else { r };
            best = best.min(norm_upper(&(target - cand), p));
        }
    }
    best
}

/// Returns the best rank-k product L·W found while decreasing the maximal
/// column ℓ¹ residual of `t − L·W`.
fn alternating_l1_factorization(
    t: &DMatrix<C64>,
    mut l: DMatrix<C64>,
    mut w: DMatrix<C64>,
    opts: &ApproxOptions,
) -> DMatrix<C64> {
    let (m, n) = t.shape();
    let mut best = &l * &w;
    let mut best_value = norm_1(&(t - &best));
    for _ in 0..opts.sweeps {
        // columns of W: independent ℓ¹ regressions against L
        for j in 0..n {
            let b: DVector<C64> = t.column(j).into_owned();
            let x = l1_regression(&l, &b, None, opts.irls_iterations);
            w.set_column(j, &x);
        }
        let residual = t - &l * &w;
        let col_err: Vec<f64> = residual
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum())
            .collect();
        let max_err = col_err.iter().copied().fold(0.0, f64::max);
        if max_err < best_value {
            best_value = max_err;
            best = &l * &w;
        }
        if max_err == 0.0 {
            break;
        }
        // rows of L: weighted ℓ¹ regressions emphasising the worst columns
        let col_weights: Vec<f64> = col_err.iter().map(|e| (e / max_err).powi(8) + 1e-3).collect();
        let w_adj = w.adjoint();
        for i in 0..m {
            let b: DVector<C64> = t.row(i).adjoint();
            let x = l1_regression(&w_adj, &b, Some(&col_weights), opts.irls_iterations);
            l.set_row(i, &x.adjoint());
        }
        let value = norm_1(&(t - &l * &w));
        if value < best_value {
            best_value = value;
            best = &l * &w;
        }
    }
    best
}

/// Approximate argmin_x Σ c_i |b_i − (A x)_i| by iteratively reweighted least
/// squares.
fn l1_regression(a: &DMatrix<C64>, b: &DVector<C64>, weights: Option<&[f64]>, iterations: usize) -> DVector<C64> {
    let rows = a.nrows();
    let c = |i: usize| weights.map_or(1.0, |w| w[i]);
    let solve = |omega: &[f64]| -> DVector<C64> {
        let sa = DMatrix::from_fn(rows, a.ncols(), |i, j| a[(i, j)] * omega[i].sqrt());
        let sb = DVector::from_fn(rows, |i, _| b[i] * omega[i].sqrt());
        sa.svd(true, true)
            .solve(&sb, 1e-12)
            .unwrap_or_else(|_| DVector::from_element(a.ncols(), ZERO))
    };
    let mut omega: Vec<f64> = (0..rows).map(c).collect();
    let mut x = solve(&omega);
    let mut best_x = x.clone();
    let objective = |x: &DVector<C64>| -> f64 {
        let r = b - a * x;
        r.iter().enumerate().map(|(i, z)| c(i) * z.norm()).sum()
    };
    let mut best_obj = objective(&x);
    let floor = 1e-10 * (b.iter().map(|z| z.norm()).fold(0.0, f64::max) + 1e-300);
    for _ in 0..iterations {
        let r = b - a * &x;
        for i in 0..rows {
            omega[i] = c(i) / r[i].norm().max(floor);
        }
        x = solve(&omega);
        let obj = objective(&x);
        if obj < best_obj {
            best_obj = obj;
            best_x = x.clone();
        }
    }
    best_x
}

pub fn sqapp_norm(t: &CMatrix, q: f64, ctx: &PNormContext) -> Result<IdealNorm> {
    if !(q > 0.0) {
        return Err(Error::invalid(format!("q = {q} must be positive")));
    }
    let seq = approx_numbers(t, ctx)?;
    Ok(IdealNorm {
        q,
        value: seq.lq_norm(q)?,
    })
}

/// Upper bound for ‖a‖ as a map ℓ² → ℓ^p.
fn two_to_p_upper(a: &DMatrix<C64>, p: f64) -> f64 {
    let s = dense_singular_values(a).first().copied().unwrap_or(0.0);
    let m = a.nrows() as f64;
    let via_spectral = s * m.powf((1.0 / p - 0.5).max(0.0));
    let row_norms: Vec<f64> = a.row_iter().map(|r| r.norm()).collect();
    let via_rows = if p == f64::INFINITY {
        row_norms.iter().copied().fold(0.0, f64::max)
    } else {
        row_norms.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
    };
    via_spectral.min(via_rows)
}

/// Lower-bound estimate of the Weyl numbers x_n(T) = sup a_n(T A) over
/// ℓ²-contractions A.
///
/// For each candidate A (the right singular basis of T plus `samples` random
/// matrices), A is scaled to a certified ℓ² → ℓ^p contraction and a_n(T A) is
/// bounded below through the Bernstein number on the top-n right singular
/// subspace of T A. The result is therefore a certified lower bound; for
/// p = 2 it coincides with the singular values and is reported exact.
pub fn weyl_numbers_estimate(t: &CMatrix, ctx: &PNormContext, samples: usize) -> Result<SNumberSequence> {
    if samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    let p = ctx.p;
    let k = t.rows().min(t.cols());
    if p == 2.0 {
        return Ok(SNumberSequence {
            values: singular_values(t),
            p,
            certainty: Certainty::Exact,
        });
    }
    let n = t.cols();
    let m = t.rows() as f64;
    // ‖y‖_p ≥ c ‖y‖_2 on the codomain
    let codomain = m.powf((1.0 / p - 0.5).min(0.0));
    let mut lower = vec![0.0f64; k];
    let mut consider = |a: DMatrix<C64>| {
        let bound = two_to_p_upper(&a, p);
        if bound <= 0.0 {
            return;
        }
        let ta = t.as_dmatrix() * a;
        let s = dense_singular_values(&ta);
        for (slot, sv) in lower.iter_mut().zip(s) {
            *slot = slot.max(codomain * sv / bound);
        }
    };
    if k > 0 {
        consider(svd(t).v.into_dmatrix());
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x5eed_0f_3e71);
        for _ in 0..samples {
            consider(CMatrix::random(n, n, &mut rng).into_dmatrix());
        }
    }
    // suffix maximum keeps every entry a lower bound
    for i in (0..k.saturating_sub(1)).rev() {
        lower[i] = lower[i].max(lower[i + 1]);
    }
    Ok(SNumberSequence {
        values: lower,
        p,
        certainty: Certainty::Estimated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeylVerdict {
    Passed,
    /// The right-hand side uses a lower bound of the Weyl numbers, so a
    /// failed comparison says nothing about the inequality itself.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
    pub verdict: WeylVerdict,
}

/// Compares ‖(λ_n)‖_q with 2^{1/q} √(2e) ‖(x_n)‖_q.
pub fn weyl_eigenvalue_check(t: &CMatrix, q: f64, ctx: &PNormContext) -> Result<WeylCheck> {
    t.require_square()?;
    let moduli: Vec<f64> = eigenvalues(t)?.iter().map(|z| z.norm()).collect();
    let lhs = lq_norm(&moduli, q)?;
    let weyl = weyl_numbers_estimate(t, ctx, 64)?;
    let rhs = 2f64.powf(1.0 / q) * (2.0 * std::f64::consts::E).sqrt() * weyl.lq_norm(q)?;
    let passed = lhs <= rhs + 1e-9;
    Ok(WeylCheck {
        lhs,
        rhs,
        passed,
        verdict: if passed {
            WeylVerdict::Passed
        } else {
            WeylVerdict::Inconclusive
        },
    })
}
