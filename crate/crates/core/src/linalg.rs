//! Dense complex matrices acting between finite-dimensional ℓ^p spaces.
//!
//! The decompositions (SVD, Schur) come from `nalgebra`, with a Jacobi
//! fallback for SVDs that fail a probe; everything the rest of the crate
//! needs on top of them (ℓ^p norms, rank decisions, the Moore–Penrose
//! inverse, eigenvalue ordering) lives here.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default relative tolerance for rank decisions.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-8;

/// A dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    inner: DMatrix<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix {}x{} ", self.rows(), self.cols())?;
        f.debug_list()
            .entries((0..self.rows()).map(|i| (0..self.cols()).map(|j| self.inner[(i, j)]).collect::<Vec<_>>()))
            .finish()
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    /// Wraps an `nalgebra` matrix, rejecting NaN or infinite entries.
    pub fn from_dmatrix(inner: DMatrix<C64>) -> Result<Self> {
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { inner })
    }

    /// Builds a matrix from entries listed in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(n_rows, n_cols, rows.concat())
    }

    /// Real-valued convenience constructor, mostly for tests and examples.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            inner: DMatrix::from_fn(rows, cols, |i, j| f(i, j)),
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Outer product `u v*`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Random matrix with independent standard complex Gaussian-ish entries
    /// (uniform real and imaginary parts on [-1, 1]).
    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(rows, cols, |_, _| {
            C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
        })
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.inner[(i, j)] = value;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.inner
    }

    pub fn row_major(&self) -> Vec<C64> {
        (0..self.rows())
            .flat_map(|i| (0..self.cols()).map(move |j| (i, j)))
            .map(|(i, j)| self.inner[(i, j)])
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.inner.column(j).iter().copied().collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols())).map(|i| self.inner[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    pub fn map(&self, f: impl FnMut(C64) -> C64) -> Self {
        Self {
            inner: self.inner.map(f),
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self {
            inner: &self.inner + &rhs.inner,
        })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self {
            inner: &self.inner - &rhs.inner,
        })
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(())
    }

    /// Integer power of a square matrix.
    pub fn pow(&self, n: u32) -> Result<Self> {
        self.require_square()?;
        let mut acc = Self::identity(self.rows());
        for _ in 0..n {
            acc = &acc * self;
        }
        Ok(acc)
    }

    /// Copies rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self {
            inner: self
                .inner
                .view((rows.start, cols.start), (rows.len(), cols.len()))
                .into_owned(),
        }
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self {
            inner: self.inner.kronecker(&rhs.inner),
        }
    }

    /// Assembles a 2x2 block matrix.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols() {
            return Err(Error::DimensionMismatch("incompatible blocks".into()));
        }
        let (r0, c0) = (a.rows(), a.cols());
        Ok(Self::from_fn(r0 + c.rows(), c0 + b.cols(), |i, j| {
            match (i < r0, j < c0) {
                (true, true) => a.get(i, j),
                (true, false) => b.get(i, j - c0),
                (false, true) => c.get(i - r0, j),
                (false, false) => d.get(i - r0, j - c0),
            }
        }))
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn count_nonzero(&self, tol: f64) -> usize {
        self.inner.iter().filter(|z| z.norm() > tol).count()
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NonSquare {
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let x = DVector::from_column_slice(v);
        (&self.inner * x).iter().copied().collect()
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix { inner: -&self.inner }
    }
}

/// Whether a number was computed exactly or estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Exact,
    Estimated,
}

/// Settings for ℓ^p operator-norm computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PNormContext {
    /// Exponent in [1, ∞]; `f64::INFINITY` encodes p = ∞.
    pub p: f64,
    pub estimation_iterations: usize,
    pub estimation_restarts: usize,
    pub seed: u64,
}

impl PNormContext {
    pub fn new(p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self {
            p,
            estimation_iterations: 200,
            estimation_restarts: 8,
            seed: 0,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_exact_route(&self) -> bool {
        self.p == 1.0 || self.p == 2.0 || self.p == f64::INFINITY
    }

    pub fn dual(&self) -> Self {
        Self {
            p: dual_exponent(self.p),
            ..*self
        }
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("exponent p = {p} must satisfy p >= 1")));
    }
    Ok(())
}

/// Hölder conjugate exponent, with 1 ↔ ∞.
pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p == f64::INFINITY {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub fn vector_pnorm(v: &[C64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(pnorm_unchecked(v, p))
}

fn pnorm_unchecked(v: &[C64], p: f64) -> f64 {
    if p == f64::INFINITY {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else if p == 1.0 {
        v.iter().map(|z| z.norm()).sum()
    } else if p == 2.0 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    } else {
        // scale by the max modulus to keep |z|^p in range
        let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        m * v.iter().map(|z| (z.norm() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// An operator norm together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub certainty: Certainty,
}

/// Operator norm of `t` as a map ℓ^p → ℓ^p.
///
/// Exact for p ∈ {1, 2, ∞}. Any other p falls back to
/// [`estimate_operator_pnorm`], which returns a value attained by an explicit
/// vector and is therefore a lower bound.
pub fn operator_pnorm(t: &CMatrix, ctx: &PNormContext) -> Result<NormValue> {
    check_exponent(ctx.p)?;
    if t.is_empty() {
        return Err(Error::invalid("operator norm of an empty matrix"));
    }
    let value = if ctx.p == 1.0 {
        max_column_sum(t)
    } else if ctx.p == f64::INFINITY {
        max_row_sum(t)
    } else if ctx.p == 2.0 {
        singular_values(t)[0]
    } else {
        return Ok(NormValue {
            value: estimate_operator_pnorm(t, ctx)?,
            certainty: Certainty::Estimated,
        });
    };
    Ok(NormValue {
        value,
        certainty: Certainty::Exact,
    })
}

fn max_column_sum(t: &CMatrix) -> f64 {
    (0..t.cols())
        .map(|j| (0..t.rows()).map(|i| t.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn max_row_sum(t: &CMatrix) -> f64 {
    (0..t.rows())
        .map(|i| (0..t.cols()).map(|j| t.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Unit vector of ℓ^{p'} norming `y` in ℓ^p: `⟨z, y⟩ = ‖y‖_p`.
fn norming_functional(y: &DVector<C64>, p: f64) -> DVector<C64> {
    let phase = |z: C64| if z.norm() == 0.0 { ZERO } else { z / z.norm() };
    let norm = pnorm_unchecked(y.as_slice(), p);
    if norm == 0.0 {
        return DVector::zeros(y.len());
    }
    if p == 1.0 {
        y.map(phase)
    } else if p == f64::INFINITY {
        let k = (0..y.len())
            .max_by(|&a, &b| y[a].norm().total_cmp(&y[b].norm()))
            .unwrap_or(0);
        let mut z = DVector::zeros(y.len());
        z[k] = phase(y[k]);
        z
    } else {
        y.map(|z| phase(z) * (z.norm() / norm).powf(p - 1.0))
    }
}

/// Lower bound for ‖t‖_{p→p} by alternating dual ascent (Boyd's power method),
/// with `estimation_restarts` starts. The first start is the all-ones vector,
/// the rest are seeded from `ctx.seed`.
pub fn estimate_operator_pnorm(t: &CMatrix, ctx: &PNormContext) -> Result<f64> {
    check_exponent(ctx.p)?;
    if t.is_empty() {
        return Err(Error::invalid("operator norm of an empty matrix"));
    }
    let p = ctx.p;
    let q = dual_exponent(p);
    let a = t.as_dmatrix();
    let a_adj = a.adjoint();
    let n = t.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut best = 0.0f64;

    for restart in 0..ctx.estimation_restarts.max(1) {
        let mut x = if restart == 0 {
            DVector::from_element(n, ONE)
        } else {
            DVector::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        };
        let nx = pnorm_unchecked(x.as_slice(), p);
        if nx == 0.0 {
            continue;
        }
        x /= C64::new(nx, 0.0);
        let mut current = pnorm_unchecked((a * &x).as_slice(), p);
        best = best.max(current);
        for _ in 0..ctx.estimation_iterations {
            let y = a * &x;
            let z = norming_functional(&y, p);
            let w = &a_adj * z;
            let x_next = norming_functional(&w, q);
            if x_next.iter().all(|c| c.norm() == 0.0) {
                break;
            }
            let value = pnorm_unchecked((a * &x_next).as_slice(), p) / pnorm_unchecked(x_next.as_slice(), p);
            best = best.max(value);
            if value <= current * (1.0 + 1e-13) {
                break;
            }
            current = value;
            x = x_next;
        }
    }
    Ok(best)
}

/// Singular value decomposition `T = U diag(σ) V*` with σ nonincreasing.
#[derive(Clone, Debug)]
pub struct Svd {
    /// rows × k, orthonormal columns.
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    /// cols × k, orthonormal columns.
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let s: Vec<C64> = self.singular_values.iter().map(|&x| C64::new(x, 0.0)).collect();
        &(&self.u * &CMatrix::from_diagonal(&s)) * &self.v.adjoint()
    }
}

pub fn svd(t: &CMatrix) -> Svd {
    let (m, n) = (t.rows(), t.cols());
    if m.min(n) == 0 {
        return Svd {
            u: CMatrix::zeros(m, 0),
            singular_values: Vec::new(),
            v: CMatrix::zeros(n, 0),
        };
    }
    if m < n {
        let Svd { u, singular_values, v } = svd(&t.adjoint());
        return Svd {
            u: v,
            singular_values,
            v: u,
        };
    }
    tall_svd(t.as_dmatrix())
}

pub fn singular_values(t: &CMatrix) -> Vec<f64> {
    dense_singular_values(t.as_dmatrix())
}

/// Nonincreasing singular values.
pub(crate) fn dense_singular_values(a: &DMatrix<C64>) -> Vec<f64> {
    if a.nrows().min(a.ncols()) == 0 {
        return Vec::new();
    }
    if a.nrows() < a.ncols() {
        tall_svd(&a.adjoint()).singular_values
    } else {
        tall_svd(a).singular_values
    }
}

const JACOBI_SWEEPS: usize = 80;

/// SVD of a matrix with at least as many rows as columns. The LAPACK-style
/// solver in `nalgebra` occasionally returns a wrong factorization for
/// rank-deficient input, so its output is probed and, when the probe fails,
/// replaced by one-sided Jacobi.
fn tall_svd(a: &DMatrix<C64>) -> Svd {
    let (m, n) = a.shape();
    let dec = a.clone().svd(true, true);
    let u = dec.u.expect("u requested");
    let v = dec.v_t.expect("v_t requested").adjoint();
    let s: Vec<f64> = dec.singular_values.iter().map(|x| x.max(0.0)).collect();
    let (u, s, v) = if factorization_holds(a, &u, &s, &v) {
        (u, s, v)
    } else {
        jacobi_svd(a)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    Svd {
        u: CMatrix::from_fn(m, n, |i, j| u[(i, order[j])]),
        singular_values: order.iter().map(|&j| s[j]).collect(),
        v: CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]),
    }
}

/// Checks `A x = U Σ V* x`, `U* U y = y` and `V* V x = x` on fixed probes.
fn factorization_holds(a: &DMatrix<C64>, u: &DMatrix<C64>, s: &[f64], v: &DMatrix<C64>) -> bool {
    let (m, n) = a.shape();
    if u.shape() != (m, n) || v.shape() != (n, n) || s.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let probe = |len: usize, salt: usize| {
        DVector::from_fn(len, |i, _| {
            let k = (i * 7 + salt * 13 + 3) as f64;
            C64::new((k * 0.618).sin(), (k * 1.414).cos())
        })
    };
    let smax = s.iter().copied().fold(0.0, f64::max);
    let tol = 1e-11 * ((m + n) as f64).sqrt();
    for salt in 0..2 {
        let x = probe(n, salt);
        let y = probe(n, salt + 5);
        let mut sx = v.adjoint() * &x;
        for (k, e) in sx.iter_mut().enumerate() {
            *e *= s[k];
        }
        if (a * &x - u * sx).norm() > tol * smax.max(f64::MIN_POSITIVE) * x.norm() {
            return false;
        }
        if (u.adjoint() * (u * &y) - &y).norm() > tol * y.norm() {
            return false;
        }
        if (v.adjoint() * (v * &x) - &x).norm() > tol * x.norm() {
            return false;
        }
    }
    true
}

/// One-sided (Hestenes) Jacobi SVD for `m ≥ n`: columns are rotated pairwise
/// until mutually orthogonal; their norms are the singular values.
fn jacobi_svd(a: &DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>, DMatrix<C64>) {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    let tol = f64::EPSILON * m as f64;
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for (x, y) in w.column(p).iter().zip(w.column(q).iter()) {
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let smax = s.iter().copied().fold(0.0, f64::max);
    let floor = smax * f64::EPSILON * m as f64;
    let mut u = DMatrix::<C64>::zeros(m, n);
    let mut missing = Vec::new();
    for j in 0..n {
        if s[j] > floor {
            u.set_column(j, &(w.column(j) / C64::new(s[j], 0.0)));
        } else {
            missing.push(j);
        }
    }
    // complete U with unit vectors orthogonalised against the columns so far
    let mut basis = 0;
    for j in missing {
        loop {
            let mut e = DVector::<C64>::zeros(m);
            e[basis % m] = ONE;
            basis += 1;
            for _ in 0..2 {
                for k in 0..n {
                    let col = u.column(k);
                    let dot = col.dotc(&e);
                    e -= col * dot;
                }
            }
            let norm = e.norm();
            if norm > 0.5 {
                u.set_column(j, &(e / C64::new(norm, 0.0)));
                break;
            }
        }
    }
    (u, s, v)
}

fn rotate_columns(mat: &mut DMatrix<C64>, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    for i in 0..mat.nrows() {
        let x = mat[(i, p)];
        let y = mat[(i, q)] * phase;
        mat[(i, p)] = x * c - y * s;
        mat[(i, q)] = x * s + y * c;
    }
}

/// Outcome of a numerical rank decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankDecision {
    pub rank: usize,
    pub relative_tolerance: f64,
    /// Largest singular value that was declared zero.
    pub discarded_mass: f64,
}

pub fn numerical_rank(t: &CMatrix, relative_tolerance: f64) -> Result<RankDecision> {
    check_tolerance(relative_tolerance)?;
    Ok(rank_from_singular_values(&singular_values(t), relative_tolerance))
}

pub(crate) fn rank_from_singular_values(s: &[f64], relative_tolerance: f64) -> RankDecision {
    let smax = s.first().copied().unwrap_or(0.0);
    let cutoff = relative_tolerance * smax;
    let rank = if smax == 0.0 {
        0
    } else {
        s.iter().filter(|&&x| x > cutoff).count()
    };
    RankDecision {
        rank,
        relative_tolerance,
        discarded_mass: s.get(rank).copied().unwrap_or(0.0),
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid(format!("relative tolerance {tol} must lie in (0, 1)")));
    }
    Ok(())
}

/// Moore–Penrose pseudo-inverse with singular values below
/// `relative_tolerance · σ_max` treated as zero.
pub fn pseudo_inverse(t: &CMatrix, relative_tolerance: f64) -> Result<CMatrix> {
    check_tolerance(relative_tolerance)?;
    let dec = svd(t);
    let rank = rank_from_singular_values(&dec.singular_values, relative_tolerance).rank;
    let (m, n) = (t.rows(), t.cols());
    let mut out = CMatrix::zeros(n, m);
    for k in 0..rank {
        let inv = 1.0 / dec.singular_values[k];
        for i in 0..n {
            let vik = dec.v.get(i, k) * inv;
            for j in 0..m {
                let cur = out.get(i, j);
                out.set(i, j, cur + vik * dec.u.get(j, k).conj());
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis (as columns) of the numerical null space of `t`:
/// right singular vectors whose singular value is at most
/// `relative_tolerance · σ_max`, plus the directions a wide matrix cannot see.
pub fn null_space(t: &CMatrix, relative_tolerance: f64) -> Result<CMatrix> {
    check_tolerance(relative_tolerance)?;
    let (m, n) = (t.rows(), t.cols());
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    // pad wide matrices with zero rows so the SVD returns a full V
    let padded = if m < n {
        CMatrix::from_fn(n, n, |i, j| if i < m { t.get(i, j) } else { ZERO })
    } else {
        t.clone()
    };
    let dec = svd(&padded);
    let rank = rank_from_singular_values(&dec.singular_values, relative_tolerance).rank;
    Ok(dec.v.submatrix(0..n, rank..n))
}

pub fn trace(t: &CMatrix) -> Result<C64> {
    t.require_square()?;
    Ok(t.diagonal().into_iter().sum())
}

/// All eigenvalues, ordered by nonincreasing modulus (ties broken by argument).
pub fn eigenvalues(t: &CMatrix) -> Result<Vec<C64>> {
    t.require_square()?;
    let n = t.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(t.as_dmatrix().clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::refusal("Schur iteration did not converge"))?;
    let (_, tri) = schur.unpack();
    let mut values = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        // complex Schur is triangular in exact arithmetic; fold any residual
        // 2x2 bump explicitly
        if i + 1 < n && tri[(i + 1, i)].norm() > 1e-14 * (tri[(i, i)].norm() + tri[(i + 1, i + 1)].norm() + 1e-300) {
            let (a, b, c, d) = (tri[(i, i)], tri[(i, i + 1)], tri[(i + 1, i)], tri[(i + 1, i + 1)]);
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            values.push(half_tr + disc);
            values.push(half_tr - disc);
            i += 2;
        } else {
            values.push(tri[(i, i)]);
            i += 1;
        }
    }
    values.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then_with(|| b.arg().total_cmp(&a.arg())));
    Ok(values)
}
