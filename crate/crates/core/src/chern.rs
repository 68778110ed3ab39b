//! Quantized differentials da = [F, π(a)] and Chern-character pairings.
//!
//! On the circle every differential of a trigonometric polynomial is a
//! finite-rank matrix supported near frequency 0, so the traces below are
//! exact finite sums once the windows are wide enough.

use serde::{Deserialize, Serialize};

use crate::circle::{f_operator, multiplication_operator, FourierSymbol, Window, WindowedOperator};
use crate::error::{Error, Result};
use crate::fredholm::EvenModule;
use crate::linalg::{trace, CMatrix, C64, ONE, ZERO};

/// Residue allowed for ‖u·u_inv − 1‖ (ℓ¹ of the Fourier coefficients).
pub const INVERSE_RESIDUE: f64 = 1e-10;

const IDENTITY_TOLERANCE: f64 = 1e-10;
const INTEGER_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernEvaluation {
    pub n: u32,
    pub parity: Parity,
    /// tr(F (du⁻¹du)^N) for odd n, tr(γF (de)^{n+1}) for even n.
    pub raw_trace: C64,
    pub normalization: f64,
    pub predicted_index: C64,
    /// Nearest integer when `predicted_index` is within 1e-6 of it.
    pub nearest_integer: Option<i64>,
    pub c_n_convention: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interior_window: Option<Window>,
}

impl ChernEvaluation {
    fn new(n: u32, parity: Parity, raw_trace: C64, normalization: f64, interior_window: Option<Window>) -> Self {
        let predicted_index = raw_trace * normalization;
        let rounded = predicted_index.re.round();
        let nearest_integer =
            ((predicted_index - C64::new(rounded, 0.0)).norm() < INTEGER_TOLERANCE).then_some(rounded as i64);
        Self {
            n,
            parity,
            raw_trace,
            normalization,
            predicted_index,
            nearest_integer,
            c_n_convention: 1.0,
            interior_window,
        }
    }
}

/// (−1)^N / 4^N with N = (n+1)/2.
pub fn odd_normalization(n: u32) -> f64 {
    let big_n = (n + 1) / 2;
    let sign = if big_n % 2 == 0 { 1.0 } else { -1.0 };
    sign / 4f64.powi(big_n as i32)
}

/// (−1)^{n/2} / 2.
pub fn even_normalization(n: u32) -> f64 {
    if (n / 2) % 2 == 0 {
        0.5
    } else {
        -0.5
    }
}

/// Diagonal of a Fourier multiplier, or an error if `f` is not diagonal.
fn multiplier_symbol(f: &WindowedOperator) -> Result<Vec<C64>> {
    if f.in_window() != f.out_window() {
        return Err(Error::WindowMismatch {
            expected: f.in_window().to_string(),
            found: f.out_window().to_string(),
        });
    }
    let m = f.matrix();
    let off_diagonal = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .any(|(i, j)| i != j && m.get(i, j) != C64::new(0.0, 0.0));
    if off_diagonal {
        return Err(Error::invalid("F must be a Fourier multiplier (diagonal)"));
    }
    Ok(m.diagonal())
}

fn restrict_multiplier(f: &WindowedOperator, window: Window) -> Result<WindowedOperator> {
    multiplier_symbol(f)?;
    f.restrict(window)
}

/// da = [F, M_a] from `window` to `window` expanded by the bandwidth of a.
///
/// F is a Fourier multiplier whose window must cover the expanded window;
/// every entry of the result is then exact.
pub fn quantized_differential(f: &WindowedOperator, a: &FourierSymbol, window: Window) -> Result<WindowedOperator> {
    let ma = multiplication_operator(a, window, f.p());
    let d_out = restrict_multiplier(f, ma.out_window())?.matrix().diagonal();
    let d_in = restrict_multiplier(f, window)?.matrix().diagonal();
    let m = ma.matrix();
    let matrix = CMatrix::from_fn(m.rows(), m.cols(), |i, j| (d_out[i] - d_in[j]) * m.get(i, j));
    WindowedOperator::new(matrix, window, ma.out_window(), f.p())
}

/// [F, A] for finite modules.
pub fn quantized_differential_matrix(f: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    f.require_square()?;
    a.require_square()?;
    if f.rows() != a.rows() {
        return Err(Error::DimensionMismatch("F and π(a) act on different spaces".into()));
    }
    Ok(&(f * a) - &(a * f))
}

fn check_involution(f: &CMatrix) -> Result<()> {
    let id = CMatrix::identity(f.rows());
    let dev = (f * f).max_abs_diff(&id);
    if dev > IDENTITY_TOLERANCE {
        return Err(Error::refusal(format!("F² differs from Id by {dev:.3e}")));
    }
    Ok(())
}

/// Odd Chern pairing on the circle.
///
/// The trace is taken on the interior window [−m, m] with
/// m = (n+1)·(bandwidth u + bandwidth u_inv); `f` must be a diagonal
/// involution on a window containing [−2m, 2m].
pub fn chern_odd(f: &WindowedOperator, u: &FourierSymbol, u_inv: &FourierSymbol, n: u32) -> Result<ChernEvaluation> {
    if n % 2 == 0 {
        return Err(Error::invalid("odd pairing needs odd n"));
    }
    let residue = u.mul(u_inv).sub(&FourierSymbol::constant(ONE)).l1_norm();
    if residue >= INVERSE_RESIDUE {
        return Err(Error::refusal(format!(
            "‖u·u_inv − 1‖ = {residue:.3e} exceeds {INVERSE_RESIDUE:.0e}"
        )));
    }
    let margin = (n as usize + 1) * (u.bandwidth() + u_inv.bandwidth());
    let margin = margin.max(1);
    let interior = Window::symmetric(margin);
    if !f.in_window().contains_window(&interior.expand(margin)) {
        return Err(Error::WindowMismatch {
            expected: format!("a window containing {}", interior.expand(margin)),
            found: f.in_window().to_string(),
        });
    }
    let diag = multiplier_symbol(f)?;
    if diag.iter().any(|d| (d * d - ONE).norm() > IDENTITY_TOLERANCE) {
        return Err(Error::refusal("F² ≠ Id on the interior"));
    }

    // Columns outside the support of du contribute nothing to the trace, so
    // (du⁻¹ du)^N is applied to the supported interior columns only.
    let first = quantized_differential(f, u, interior)?;
    let support: Vec<usize> = (0..interior.len())
        .filter(|&j| (0..first.matrix().rows()).any(|i| first.matrix().get(i, j) != ZERO))
        .collect();
    let mut acc = CMatrix::from_fn(
        interior.len(),
        support.len(),
        |i, j| if i == support[j] { ONE } else { ZERO },
    );
    let mut out = interior;
    for _ in 0..(n + 1) / 2 {
        let du = quantized_differential(f, u, out)?;
        let du_inv = quantized_differential(f, u_inv, du.out_window())?;
        acc = du_inv.matrix() * &(du.matrix() * &acc);
        out = du_inv.out_window();
    }
    let d_out = restrict_multiplier(f, out)?.matrix().diagonal();
    let raw_trace = support
        .iter()
        .enumerate()
        .map(|(j, &col)| {
            let row = out
                .index_of(interior.frequency(col))
                .expect("interior lies inside the output window");
            d_out[row] * acc.get(row, j)
        })
        .sum();
    Ok(ChernEvaluation::new(
        n,
        Parity::Odd,
        raw_trace,
        odd_normalization(n),
        Some(interior),
    ))
}

/// Odd pairing on the circle with F = iH + E; u⁻¹ is computed as a truncated
/// Fourier inverse.
pub fn chern_odd_circle(u: &FourierSymbol, n: u32) -> Result<ChernEvaluation> {
    let u_inv = u.inverse(INVERSE_RESIDUE / 10.0)?;
    let margin = ((n as usize + 1) * (u.bandwidth() + u_inv.bandwidth())).max(1);
    let f = f_operator(Window::symmetric(2 * margin), 2.0);
    chern_odd(&f, u, &u_inv, n)
}

/// Odd pairing for a finite module: u and u_inv are represented matrices.
pub fn chern_odd_matrix(f: &CMatrix, u: &CMatrix, u_inv: &CMatrix, n: u32) -> Result<ChernEvaluation> {
    if n % 2 == 0 {
        return Err(Error::invalid("odd pairing needs odd n"));
    }
    check_involution(f)?;
    let dev = (u * u_inv).max_abs_diff(&CMatrix::identity(u.rows()));
    if dev > IDENTITY_TOLERANCE {
        return Err(Error::refusal(format!("u·u_inv differs from Id by {dev:.3e}")));
    }
    let du = quantized_differential_matrix(f, u)?;
    let du_inv = quantized_differential_matrix(f, u_inv)?;
    let step = &du_inv * &du;
    let raw_trace = trace(&(f * &step.pow((n + 1) / 2)?))?;
    Ok(ChernEvaluation::new(
        n,
        Parity::Odd,
        raw_trace,
        odd_normalization(n),
        None,
    ))
}

/// Even pairing (−1)^{n/2}/2 · tr(γF (de)^{n+1}) for a finite even module.
pub fn chern_even(module: &EvenModule, e: &CMatrix, n: u32) -> Result<ChernEvaluation> {
    if n % 2 == 1 {
        return Err(Error::invalid("even pairing needs even n"));
    }
    check_involution(&module.f)?;
    module.check_even_idempotent(e)?;
    let de = quantized_differential_matrix(&module.f, e)?;
    let raw_trace = trace(&(&(&module.gamma * &module.f) * &de.pow(n + 1)?))?;
    Ok(ChernEvaluation::new(
        n,
        Parity::Even,
        raw_trace,
        even_normalization(n),
        None,
    ))
}

/// Two-fold circle model on `[−l, l]`: X₊ = X₋ = ℓ²([−l, l]), F₊ = F₋ = Id,
/// and the idempotent acts by the Riesz projection on X₊ and by the
/// projection onto n ≥ 1 on X₋. Returns the module and π(e).
pub fn riesz_block_model(l: usize) -> Result<(EvenModule, CMatrix)> {
    let w = Window::symmetric(l);
    let id = CMatrix::identity(w.len());
    let module = EvenModule::from_blocks(&id, &id)?;
    let plus: Vec<f64> = w.frequencies().map(|k| if k >= 0 { 1.0 } else { 0.0 }).collect();
    let minus: Vec<f64> = w.frequencies().map(|k| if k >= 1 { 1.0 } else { 0.0 }).collect();
    let e = CMatrix::from_real_diagonal(&[plus, minus].concat());
    Ok((module, e))
}
