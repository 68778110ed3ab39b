//! Fredholm index engines.
//!
//! Three independent routes are offered: the winding number of a symbol, the
//! finite-section method with interior-mass filtering of kernel vectors, and
//! trace formulas of Calderón type. The odd and even pairing operators of a
//! Fredholm module are built here as well.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{
    default_samples, multiplication_operator, riesz_projection, winding_number, FourierSymbol, WindingResult, Window,
    WindowedOperator,
};
use crate::error::{Error, Result};
use crate::linalg::{null_space, numerical_rank, singular_values, trace, CMatrix, C64, DEFAULT_RANK_TOLERANCE};

/// Integer index, or the verdict that the finite evidence never settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexValue {
    Stable(i64),
    #[serde(with = "non_stabilizing")]
    NonStabilizing,
}

mod non_stabilizing {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("non-stabilizing")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let text = String::deserialize(d)?;
        if text == "non-stabilizing" {
            Ok(())
        } else {
            Err(serde::de::Error::custom("expected \"non-stabilizing\""))
        }
    }
}

impl IndexValue {
    pub fn value(&self) -> Option<i64> {
        match self {
            IndexValue::Stable(n) => Some(*n),
            IndexValue::NonStabilizing => None,
        }
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Stable(n) => write!(f, "{n}"),
            IndexValue::NonStabilizing => write!(f, "non-stabilizing"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Winding,
    KernelStabilization,
    Calderon,
    Combinatorial,
    /// Ranks of an operator on a genuinely finite-dimensional space.
    ExactFinite,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Route::Winding => "winding",
            Route::KernelStabilization => "kernel_stabilization",
            Route::Calderon => "calderon",
            Route::Combinatorial => "combinatorial",
            Route::ExactFinite => "exact_finite",
        };
        f.write_str(name)
    }
}

/// Kernel and cokernel counts observed at one truncation scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleEvidence {
    pub scale: usize,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    /// Null-space dimensions before boundary filtering (equal to the
    /// filtered ones for combinatorial routes).
    pub raw_kernel_dim: usize,
    pub raw_cokernel_dim: usize,
}

impl ScaleEvidence {
    pub fn index(&self) -> i64 {
        self.kernel_dim as i64 - self.cokernel_dim as i64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_margin: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding_samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub index: IndexValue,
    pub route: Route,
    pub evidence: Vec<ScaleEvidence>,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<WindingResult>,
}

impl IndexReport {
    /// Settles the index from a per-scale table: the last three scales must
    /// agree on both counts.
    pub fn from_evidence(route: Route, evidence: Vec<ScaleEvidence>, tolerances: Tolerances) -> Self {
        let index = match evidence.len() {
            n if n >= 3 => {
                let tail = &evidence[n - 3..];
                let same = tail
                    .iter()
                    .all(|e| e.kernel_dim == tail[0].kernel_dim && e.cokernel_dim == tail[0].cokernel_dim);
                if same {
                    IndexValue::Stable(tail[0].index())
                } else {
                    IndexValue::NonStabilizing
                }
            }
            _ => IndexValue::NonStabilizing,
        };
        Self {
            index,
            route,
            evidence,
            tolerances,
            winding: None,
        }
    }
}

/// Toeplitz index through the winding number: Index T_f = −wind f.
pub fn index_by_winding(f: &FourierSymbol) -> Result<IndexReport> {
    let samples = default_samples(f);
    let w = winding_number(f, samples)?;
    Ok(IndexReport {
        index: IndexValue::Stable(-w.winding),
        route: Route::Winding,
        evidence: Vec::new(),
        tolerances: Tolerances {
            winding_samples: Some(samples),
            ..Tolerances::default()
        },
        winding: Some(w),
    })
}

/// Which coordinates of a truncation are artificial cut edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edges {
    Leading,
    Trailing,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizationConfig {
    pub boundary_margin: usize,
    pub mass_threshold: f64,
    pub rank_tolerance: f64,
    pub edges: Edges,
}

impl StabilizationConfig {
    /// Margin 2·(bandwidth + |expected shift|), threshold 1e-6, trailing edge
    /// (the natural cut of a Toeplitz section on `[0, N]`).
    pub fn for_symbol(bandwidth: usize, expected_shift: usize) -> Self {
        Self {
            boundary_margin: 2 * (bandwidth + expected_shift),
            ..Self::default()
        }
    }
}

impl Default for StabilizationConfig {
    fn default() -> Self {
        Self {
            boundary_margin: 2,
            mass_threshold: 1e-6,
            rank_tolerance: DEFAULT_RANK_TOLERANCE,
            edges: Edges::Trailing,
        }
    }
}

/// Number of directions of the column space of `basis` (orthonormal columns)
/// whose mass on the boundary rows is below `threshold`.
///
/// The boundary masses of the principal directions are the eigenvalues of
/// K* B K, with B the boundary projector; counting those below the threshold
/// does not depend on which orthonormal basis the SVD happened to return.
fn interior_dimension(basis: &CMatrix, edges: Edges, margin: usize, threshold: f64) -> usize {
    let (n, d) = (basis.rows(), basis.cols());
    if d == 0 {
        return 0;
    }
    let is_boundary = |i: usize| match edges {
        Edges::Leading => i < margin,
        Edges::Trailing => i + margin >= n,
        Edges::Both => i < margin || i + margin >= n,
    };
    let boundary_rows: Vec<usize> = (0..n).filter(|&i| is_boundary(i)).collect();
    let b = CMatrix::from_fn(boundary_rows.len(), d, |r, j| basis.get(boundary_rows[r], j));
    let mut masses: Vec<f64> = singular_values(&b).iter().map(|s| s * s).collect();
    masses.resize(d, 0.0);
    masses.iter().filter(|&&m| m < threshold).count()
}

fn stabilization_evidence(scale: usize, op: &WindowedOperator, config: &StabilizationConfig) -> Result<ScaleEvidence> {
    let a = op.matrix();
    let kernel = null_space(a, config.rank_tolerance)?;
    let cokernel = null_space(&a.adjoint(), config.rank_tolerance)?;
    Ok(ScaleEvidence {
        scale,
        kernel_dim: interior_dimension(&kernel, config.edges, config.boundary_margin, config.mass_threshold),
        cokernel_dim: interior_dimension(&cokernel, config.edges, config.boundary_margin, config.mass_threshold),
        raw_kernel_dim: kernel.cols(),
        raw_cokernel_dim: cokernel.cols(),
    })
}

/// Finite-section index: at each scale the truncation's kernel and cokernel
/// are filtered down to interior vectors, and the index is read off once the
/// last three scales agree.
pub fn index_by_kernel_stabilization<F>(
    family: F,
    scales: &[usize],
    config: &StabilizationConfig,
) -> Result<IndexReport>
where
    F: Fn(usize) -> Result<WindowedOperator> + Sync,
{
    if scales.len() < 3 {
        return Err(Error::invalid("kernel stabilization needs at least three scales"));
    }
    if scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("scales must be strictly increasing"));
    }
    let evidence = scales
        .par_iter()
        .map(|&n| stabilization_evidence(n, &family(n)?, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndexReport::from_evidence(
        Route::KernelStabilization,
        evidence,
        Tolerances {
            rank_tolerance: Some(config.rank_tolerance),
            mass_threshold: Some(config.mass_threshold),
            boundary_margin: Some(config.boundary_margin),
            winding_samples: None,
        },
    ))
}

/// Toeplitz section P_N M_f P_N on `[0, n]`.
pub fn toeplitz_section(f: &FourierSymbol, n: usize, p: f64) -> WindowedOperator {
    let w = Window { lo: 0, hi: n as i64 };
    multiplication_operator(f, w, p)
        .compress(w, w)
        .expect("window lies inside its own expansion")
}

/// Index of T_f by finite sections on `[0, N]` for each N in `scales`.
pub fn toeplitz_index_by_stabilization(
    f: &FourierSymbol,
    scales: &[usize],
    config: &StabilizationConfig,
) -> Result<IndexReport> {
    index_by_kernel_stabilization(|n| Ok(toeplitz_section(f, n, 2.0)), scales, config)
}

/// The odd pairing operator P u P − (Id − P) on a window, together with its
/// compression P u P to the nonnegative frequencies.
#[derive(Clone, Debug)]
pub struct OddPairing {
    pub full: WindowedOperator,
    pub compressed: Option<WindowedOperator>,
}

/// Builds P·M_u·P − (Id − P) with P the Riesz projection, as a square
/// section on `window`. Rows produced outside `window` are cut.
pub fn odd_pairing_operator(u: &FourierSymbol, window: Window, p: f64) -> Result<OddPairing> {
    let w = winding_number(u, default_samples(u))?;
    if w.min_modulus <= 1e-9 {
        return Err(Error::refusal("symbol is not invertible"));
    }
    let mu = multiplication_operator(u, window, p);
    let p_in = riesz_projection(window, p);
    let p_out = riesz_projection(mu.out_window(), p);
    let pup = p_out.compose(&mu)?.compose(&p_in)?.compress(window, window)?;
    let complement = WindowedOperator::identity(window, p).sub(&p_in)?;
    let full = pup.sub(&complement)?;
    let compressed = if window.hi >= 0 {
        let half = Window::new(window.lo.max(0), window.hi)?;
        Some(full.restrict(half)?)
    } else {
        None
    };
    Ok(OddPairing { full, compressed })
}

/// Odd pairing for a finite module: P π(u) P − (Id − P) with P = (Id + F)/2.
pub fn odd_pairing_matrix(u_rep: &CMatrix, f: &CMatrix) -> Result<CMatrix> {
    u_rep.require_square()?;
    f.require_square()?;
    if u_rep.rows() != f.rows() {
        return Err(Error::DimensionMismatch("u and F act on different spaces".into()));
    }
    let n = u_rep.rows();
    if numerical_rank(u_rep, DEFAULT_RANK_TOLERANCE)?.rank < n {
        return Err(Error::refusal("u is not invertible"));
    }
    let id = CMatrix::identity(n);
    let proj = (&id + f).scale(C64::new(0.5, 0.0));
    Ok(&(&(&proj * u_rep) * &proj) - &(&id - &proj))
}

fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b)
}

/// A finite even module: X = X₊ ⊕ X₋ split by the grading γ, with F odd.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenModule {
    pub gamma: CMatrix,
    pub f: CMatrix,
}

impl EvenModule {
    /// Checks γ² = Id and Fγ = −γF to 1e-10.
    pub fn new(gamma: CMatrix, f: CMatrix) -> Result<Self> {
        gamma.require_square()?;
        f.require_square()?;
        if gamma.rows() != f.rows() {
            return Err(Error::DimensionMismatch("γ and F act on different spaces".into()));
        }
        let id = CMatrix::identity(gamma.rows());
        if max_dev(&(&gamma * &gamma), &id) > 1e-10 {
            return Err(Error::refusal("grading does not square to the identity"));
        }
        if (&(&f * &gamma) + &(&gamma * &f)).max_abs() > 1e-10 {
            return Err(Error::refusal("F does not anticommute with the grading"));
        }
        Ok(Self { gamma, f })
    }

    /// γ = diag(Id, −Id) and F = [[0, F₋], [F₊, 0]] on X₊ ⊕ X₋.
    pub fn from_blocks(f_plus: &CMatrix, f_minus: &CMatrix) -> Result<Self> {
        let (dp, dm) = (f_plus.cols(), f_plus.rows());
        if f_minus.rows() != dp || f_minus.cols() != dm {
            return Err(Error::DimensionMismatch("F₋ must map X₋ to X₊".into()));
        }
        let gamma = CMatrix::block2(
            &CMatrix::identity(dp),
            &CMatrix::zeros(dp, dm),
            &CMatrix::zeros(dm, dp),
            &(-&CMatrix::identity(dm)),
        )?;
        let f = CMatrix::block2(&CMatrix::zeros(dp, dp), f_minus, f_plus, &CMatrix::zeros(dm, dm))?;
        Self::new(gamma, f)
    }

    /// Even module X ⊕ X, F' = [[0, F], [F, 0]], γ = diag(−Id, Id) built from
    /// an odd module (X, F).
    pub fn doubled(f_odd: &CMatrix) -> Result<Self> {
        f_odd.require_square()?;
        let n = f_odd.rows();
        let zero = CMatrix::zeros(n, n);
        let id = CMatrix::identity(n);
        let f = CMatrix::block2(&zero, f_odd, f_odd, &zero)?;
        let gamma = CMatrix::block2(&(-&id), &zero, &zero, &id)?;
        Self::new(gamma, f)
    }

    pub fn dim(&self) -> usize {
        self.f.rows()
    }

    /// Orthonormal bases of X₊ = Ran (1+γ)/2 and X₋ = Ran (1−γ)/2.
    pub fn graded_bases(&self) -> Result<(CMatrix, CMatrix)> {
        let id = CMatrix::identity(self.dim());
        let half = C64::new(0.5, 0.0);
        let plus = range_basis(&(&id + &self.gamma).scale(half))?;
        let minus = range_basis(&(&id - &self.gamma).scale(half))?;
        Ok((plus, minus))
    }

    /// F₊ : X₊ → X₋ in the bases of [`Self::graded_bases`].
    pub fn f_plus(&self) -> Result<CMatrix> {
        let (qp, qm) = self.graded_bases()?;
        Ok(&(&qm.adjoint() * &self.f) * &qp)
    }

    /// Checks that a represented idempotent is even: [π(e), γ] = 0 and e² = e.
    pub fn check_even_idempotent(&self, e: &CMatrix) -> Result<()> {
        if e.rows() != self.dim() || e.cols() != self.dim() {
            return Err(Error::DimensionMismatch("idempotent acts on a different space".into()));
        }
        if max_dev(&(e * e), e) > 1e-10 {
            return Err(Error::refusal("e is not idempotent"));
        }
        if (&(e * &self.gamma) - &(&self.gamma * e)).max_abs() > 1e-10 {
            return Err(Error::refusal("e does not commute with the grading"));
        }
        Ok(())
    }
}

/// Orthonormal basis of the range of `t`.
pub fn range_basis(t: &CMatrix) -> Result<CMatrix> {
    let dec = crate::linalg::svd(t);
    let rank = crate::linalg::rank_from_singular_values(&dec.singular_values, DEFAULT_RANK_TOLERANCE).rank;
    Ok(dec.u.submatrix(0..t.rows(), 0..rank))
}

/// The even pairing operator e (Id ⊗ F₊) e : e X₊ → e X₋, written in
/// orthonormal bases of the two ranges.
#[derive(Clone, Debug)]
pub struct EvenPairing {
    pub operator: CMatrix,
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub index: i64,
}

pub fn even_pairing_operator(module: &EvenModule, e: &CMatrix) -> Result<EvenPairing> {
    module.check_even_idempotent(e)?;
    let (qp, qm) = module.graded_bases()?;
    let e_plus = &(&qp.adjoint() * e) * &qp;
    let e_minus = &(&qm.adjoint() * e) * &qm;
    let f_plus = module.f_plus()?;
    let dom = range_basis(&e_plus)?;
    let cod = range_basis(&e_minus)?;
    let operator = &(&(&cod.adjoint() * &e_minus) * &f_plus) * &dom;
    let rank = if operator.is_empty() {
        0
    } else {
        numerical_rank(&operator, DEFAULT_RANK_TOLERANCE)?.rank
    };
    let (domain_dim, codomain_dim) = (dom.cols(), cod.cols());
    Ok(EvenPairing {
        operator,
        domain_dim,
        codomain_dim,
        kernel_dim: domain_dim - rank,
        cokernel_dim: codomain_dim - rank,
        index: domain_dim as i64 - codomain_dim as i64,
    })
}

/// Result of the trace formula tr(Id − RT)^n − tr(Id − TR)^n.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalderonReport {
    /// tr(Id − RT)^n
    pub lhs_trace: C64,
    /// tr(Id − TR)^n
    pub rhs_trace: C64,
    pub n: u32,
    /// Nearest integer when the difference lies within the snapping distance.
    pub index: Option<i64>,
    pub reliable: bool,
}

/// Index by tr(Id − RT)^n − tr(Id − TR)^n, snapped to the nearest integer
/// when within `snap_distance` (0.1 by default elsewhere in the crate).
pub fn calderon_index(t: &CMatrix, r: &CMatrix, n: u32, snap_distance: f64) -> Result<CalderonReport> {
    t.require_square()?;
    r.require_square()?;
    if t.rows() != r.rows() {
        return Err(Error::DimensionMismatch("T and R must have the same size".into()));
    }
    if n == 0 {
        return Err(Error::invalid("the power n must be at least 1"));
    }
    let id = CMatrix::identity(t.rows());
    let k = &id - &(r * t);
    let l = &id - &(t * r);
    let lhs_trace = trace(&k.pow(n)?)?;
    let rhs_trace = trace(&l.pow(n)?)?;
    let diff = lhs_trace - rhs_trace;
    let nearest = diff.re.round();
    let reliable = (diff - C64::new(nearest, 0.0)).norm() < snap_distance;
    Ok(CalderonReport {
        lhs_trace,
        rhs_trace,
        n,
        index: reliable.then_some(nearest as i64),
        reliable,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub base: IndexReport,
    pub perturbed: IndexReport,
    pub max_perturbation_rank: usize,
    pub agree: bool,
}

/// Compares the stabilized index of T with that of T + K, where K is required
/// to have rank at most `rank_budget` at every scale.
pub fn compact_perturbation_check<F, G>(
    t_family: F,
    k_family: G,
    scales: &[usize],
    config: &StabilizationConfig,
    rank_budget: usize,
) -> Result<PerturbationReport>
where
    F: Fn(usize) -> Result<WindowedOperator> + Sync,
    G: Fn(usize) -> Result<WindowedOperator> + Sync,
{
    let mut max_rank = 0;
    for &n in scales {
        let r = numerical_rank(k_family(n)?.matrix(), config.rank_tolerance)?.rank;
        if r > rank_budget {
            return Err(Error::invalid(format!(
                "perturbation has rank {r} at scale {n}, above the budget {rank_budget}"
            )));
        }
        max_rank = max_rank.max(r);
    }
    let base = index_by_kernel_stabilization(&t_family, scales, config)?;
    let perturbed = index_by_kernel_stabilization(|n| t_family(n)?.add(&k_family(n)?), scales, config)?;
    let agree = base.index == perturbed.index && base.index != IndexValue::NonStabilizing;
    Ok(PerturbationReport {
        base,
        perturbed,
        max_perturbation_rank: max_rank,
        agree,
    })
}

/// Pairing family for the circle: P M_u P − (Id − P) on `[-n, n]`, with both
/// edges treated as cuts.
pub fn circle_pairing_family(u: &FourierSymbol, n: usize) -> Result<WindowedOperator> {
    Ok(odd_pairing_operator(u, Window::symmetric(n), 2.0)?.full)
}

/// Pairing family for the compact perturbation F' = iH of F = iH + E:
/// P' = (Id + iH)/2 is no longer a projection (it halves e₀).
pub fn circle_pairing_family_sgn0(u: &FourierSymbol, n: usize) -> Result<WindowedOperator> {
    let window = Window::symmetric(n);
    let half_sign = |k: i64| C64::new(0.5 * (1.0 + k.signum() as f64), 0.0);
    let mu = multiplication_operator(u, window, 2.0);
    let p_in = crate::circle::multiplier(half_sign, window, 2.0);
    let p_out = crate::circle::multiplier(half_sign, mu.out_window(), 2.0);
    let pup = p_out.compose(&mu)?.compose(&p_in)?.compress(window, window)?;
    let id = WindowedOperator::identity(window, 2.0);
    pup.sub(&id.sub(&p_in)?)
}

/// Convenience: all routes agree on one index value.
pub fn routes_agree(reports: &[IndexReport]) -> bool {
    let mut values = reports.iter().map(|r| r.index);
    match values.next() {
        Some(IndexValue::Stable(first)) => values.all(|v| v == IndexValue::Stable(first)),
        _ => false,
    }
}
