//! Truncated Fourier model of operators on the circle.
//!
//! Operators act on finite windows of the basis {e^{inθ}}. A multiplication
//! operator by a trigonometric polynomial of bandwidth b maps a window
//! `[lo, hi]` into `[lo - b, hi + b]` with no truncation, so products and
//! commutators built with [`WindowedOperator::compose`] carry exact entries.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::FftPlanner;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{trace, CMatrix, C64, I, ONE, ZERO};

/// Finitely supported Fourier series Σ c_n e^{inθ}.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FourierSymbol {
    coefficients: BTreeMap<i64, C64>,
}

impl FourierSymbol {
    /// Zero coefficients are dropped; non-finite ones are rejected.
    pub fn new(coefficients: impl IntoIterator<Item = (i64, C64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, c) in coefficients {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::invalid(format!("coefficient of z^{n} is not finite")));
            }
            *map.entry(n).or_insert(ZERO) += c;
        }
        map.retain(|_, c| *c != ZERO);
        Ok(Self { coefficients: map })
    }

    pub fn monomial(k: i64, c: C64) -> Self {
        Self::new([(k, c)]).expect("finite coefficient")
    }

    /// e^{ikθ}
    pub fn z_power(k: i64) -> Self {
        Self::monomial(k, ONE)
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    pub fn coefficient(&self, n: i64) -> C64 {
        self.coefficients.get(&n).copied().unwrap_or(ZERO)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coefficients.iter().map(|(&n, &c)| (n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Largest |n| in the support (0 for constants and the zero symbol).
    pub fn bandwidth(&self) -> usize {
        self.coefficients
            .keys()
            .map(|n| n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Returns the single (frequency, coefficient) pair of a monomial.
    pub fn as_monomial(&self) -> Option<(i64, C64)> {
        if self.coefficients.len() == 1 {
            self.coefficients().next()
        } else {
            None
        }
    }

    pub fn eval(&self, theta: f64) -> C64 {
        self.coefficients()
            .map(|(n, c)| c * C64::from_polar(1.0, n as f64 * theta))
            .sum()
    }

    /// θ-derivative divided by i, i.e. Σ n c_n e^{inθ}.
    fn dirac_applied(&self) -> Self {
        Self::new(self.coefficients().map(|(n, c)| (n, c * n as f64))).expect("finite")
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = BTreeMap::new();
        for (n, a) in self.coefficients() {
            for (m, b) in other.coefficients() {
                *out.entry(n + m).or_insert(ZERO) += a * b;
            }
        }
        Self::new(out).expect("product of finite symbols")
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coefficients().chain(other.coefficients())).expect("finite")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coefficients().map(|(n, c)| (n, c * s))).expect("finite")
    }

    /// Sum of coefficient moduli; an upper bound for the sup norm on the circle.
    pub fn l1_norm(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm()).sum()
    }

    /// Smallest modulus over a uniform grid of `samples` points.
    pub fn min_modulus(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|j| self.eval(2.0 * PI * j as f64 / samples as f64).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Truncated Fourier series of 1/f with ‖f·g − 1‖∞ < `residue_bound`,
    /// certified through the ℓ¹ norm of the coefficients of f·g − 1.
    pub fn inverse(&self, residue_bound: f64) -> Result<Self> {
        if let Some((k, c)) = self.as_monomial() {
            return Ok(Self::monomial(-k, ONE / c));
        }
        if self.is_zero() {
            return Err(Error::refusal("the zero symbol is not invertible"));
        }
        let mut size = (16 * (self.bandwidth() + 1)).next_power_of_two().max(256);
        let mut planner = FftPlanner::<f64>::new();
        while size <= 1 << 16 {
            let mut buf: Vec<C64> = (0..size)
                .map(|j| self.eval(2.0 * PI * j as f64 / size as f64))
                .collect();
            if buf.iter().any(|z| z.norm() < 1e-9) {
                return Err(Error::refusal("symbol vanishes on the circle"));
            }
            for z in buf.iter_mut() {
                *z = ONE / *z;
            }
            planner.plan_fft_forward(size).process(&mut buf);
            let half = (size / 2) as i64;
            let coeff = |n: i64| buf[n.rem_euclid(size as i64) as usize] / size as f64;
            let truncate = |c: i64| Self::new((-c..=c).map(|n| (n, coeff(n))));
            let meets = |g: &Self| self.mul(g).sub(&Self::constant(ONE)).l1_norm() < residue_bound;
            // smallest bandwidth whose truncation meets the residue bound:
            // doubling, then bisection
            let (mut failed, mut cutoff) = (0, 1);
            loop {
                if meets(&truncate(cutoff)?) {
                    while cutoff - failed > 1 {
                        let mid = (failed + cutoff) / 2;
                        if meets(&truncate(mid)?) {
                            cutoff = mid;
                        } else {
                            failed = mid;
                        }
                    }
                    return truncate(cutoff);
                }
                if cutoff >= half - 1 {
                    break;
                }
                failed = cutoff;
                cutoff = (cutoff * 2).min(half - 1);
            }
            size *= 2;
        }
        Err(Error::refusal(format!(
            "no truncated inverse with residue below {residue_bound}"
        )))
    }
}

impl fmt::Display for FourierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coefficients()
            .map(|(n, c)| {
                let coef = if c.im == 0.0 {
                    format!("{}", c.re)
                } else if c.re == 0.0 {
                    format!("{}i", c.im)
                } else {
                    format!("({}{:+}i)", c.re, c.im)
                };
                if n == 0 {
                    coef
                } else {
                    format!("{coef}*z^{n}")
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Serialize for FourierSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coefficients.len()))?;
        for (n, c) in self.coefficients() {
            map.serialize_entry(&n.to_string(), &[c.re, c.im])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for FourierSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SymbolVisitor;
        impl<'de> Visitor<'de> for SymbolVisitor {
            type Value = FourierSymbol;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from integer frequencies to [re, im] pairs")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Self::Value, A::Error> {
                let mut pairs = Vec::new();
                while let Some((key, [re, im])) = access.next_entry::<String, [f64; 2]>()? {
                    let n: i64 = key
                        .trim()
                        .parse()
                        .map_err(|_| de::Error::custom(format!("frequency `{key}` is not an integer")))?;
                    pairs.push((n, C64::new(re, im)));
                }
                FourierSymbol::new(pairs).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_map(SymbolVisitor)
    }
}

impl FromStr for FourierSymbol {
    type Err = Error;

    /// Parses sums and products of complex literals and powers of `z`, e.g.
    /// `"z^3"`, `"2 + z"`, `"(1+2i)*z^-1 - 0.5*z^2"`, `"z*(3+z)"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parser = SymbolParser {
            chars: s.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        if parser.chars.is_empty() {
            return Err(Error::Parse("empty symbol".into()));
        }
        let sym = parser.expression()?;
        if parser.pos != parser.chars.len() {
            return Err(Error::Parse(format!(
                "unexpected `{}` at position {} in `{s}`",
                parser.chars[parser.pos], parser.pos
            )));
        }
        Ok(sym)
    }
}

struct SymbolParser {
    chars: Vec<char>,
    pos: usize,
}

impl SymbolParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expression(&mut self) -> Result<FourierSymbol> {
        let mut acc = FourierSymbol::default();
        let mut sign = ONE;
        if let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            if c == '-' {
                sign = -ONE;
            }
        }
        loop {
            acc = acc.add(&self.term()?.scale(sign));
            match self.peek() {
                Some('+') => sign = ONE,
                Some('-') => sign = -ONE,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<FourierSymbol> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                // implicit product: "2z", "3i(z+1)"
                Some('z' | '(') => acc = acc.mul(&self.factor()?),
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<FourierSymbol> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expression()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('z') => {
                self.pos += 1;
                let mut k = 1;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    k = self.integer()?;
                }
                Ok(FourierSymbol::z_power(k))
            }
            Some('i') => {
                self.pos += 1;
                Ok(FourierSymbol::constant(I))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let x = self.real()?;
                if self.peek() == Some('i') {
                    self.pos += 1;
                    Ok(FourierSymbol::constant(C64::new(0.0, x)))
                } else {
                    Ok(FourierSymbol::constant(C64::new(x, 0.0)))
                }
            }
            Some(c) => Err(Error::Parse(format!("unexpected `{c}` at position {}", self.pos))),
            None => Err(Error::Parse("unexpected end of symbol".into())),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        if let Some('+' | '-') = self.peek() {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| Error::Parse(format!("bad exponent `{text}`")))
    }

    fn real(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if let Some('e' | 'E') = self.peek() {
            let save = self.pos;
            self.pos += 1;
            if let Some('+' | '-') = self.peek() {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| Error::Parse(format!("bad number `{text}`")))
    }
}

/// Contiguous range of frequencies `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid(format!("window [{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    /// `[-n, n]`
    pub fn symmetric(n: usize) -> Self {
        Self {
            lo: -(n as i64),
            hi: n as i64,
        }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn index_of(&self, n: i64) -> Option<usize> {
        self.contains(n).then(|| (n - self.lo) as usize)
    }

    pub fn frequency(&self, index: usize) -> i64 {
        self.lo + index as i64
    }

    pub fn expand(&self, by: usize) -> Self {
        Self {
            lo: self.lo - by as i64,
            hi: self.hi + by as i64,
        }
    }

    pub fn frequencies(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A matrix whose rows are labelled by `out_window` frequencies and columns
/// by `in_window` frequencies, acting between ℓ^p spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedOperator {
    matrix: CMatrix,
    in_window: Window,
    out_window: Window,
    p: f64,
}

impl WindowedOperator {
    pub fn new(matrix: CMatrix, in_window: Window, out_window: Window, p: f64) -> Result<Self> {
        if matrix.rows() != out_window.len() || matrix.cols() != in_window.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for windows {out_window} <- {in_window}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            matrix,
            in_window,
            out_window,
            p,
        })
    }

    pub fn identity(window: Window, p: f64) -> Self {
        multiplier(|_| ONE, window, p)
    }

    pub fn zero(in_window: Window, out_window: Window, p: f64) -> Self {
        Self {
            matrix: CMatrix::zeros(out_window.len(), in_window.len()),
            in_window,
            out_window,
            p,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn in_window(&self) -> Window {
        self.in_window
    }

    pub fn out_window(&self) -> Window {
        self.out_window
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Matrix entry ⟨e_out, A e_in⟩ indexed by frequencies; zero outside the windows.
    pub fn entry(&self, out: i64, input: i64) -> C64 {
        match (self.out_window.index_of(out), self.in_window.index_of(input)) {
            (Some(i), Some(j)) => self.matrix.get(i, j),
            _ => ZERO,
        }
    }

    /// `self ∘ rhs`; requires `rhs.out_window == self.in_window`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if rhs.out_window != self.in_window {
            return Err(Error::WindowMismatch {
                expected: self.in_window.to_string(),
                found: rhs.out_window.to_string(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &rhs.matrix,
            in_window: rhs.in_window,
            out_window: self.out_window,
            p: self.p,
        })
    }

    fn check_same_windows(&self, rhs: &Self) -> Result<()> {
        if self.in_window != rhs.in_window || self.out_window != rhs.out_window {
            return Err(Error::WindowMismatch {
                expected: format!("{} <- {}", self.out_window, self.in_window),
                found: format!("{} <- {}", rhs.out_window, rhs.in_window),
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_windows(rhs)?;
        Ok(self.with_matrix(&self.matrix + &rhs.matrix))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_windows(rhs)?;
        Ok(self.with_matrix(&self.matrix - &rhs.matrix))
    }

    pub fn scale(&self, s: C64) -> Self {
        self.with_matrix(self.matrix.scale(s))
    }

    fn with_matrix(&self, matrix: CMatrix) -> Self {
        Self {
            matrix,
            in_window: self.in_window,
            out_window: self.out_window,
            p: self.p,
        }
    }

    /// Compression to `rows ← cols`; both must lie inside the current windows.
    pub fn compress(&self, rows: Window, cols: Window) -> Result<Self> {
        if !self.out_window.contains_window(&rows) || !self.in_window.contains_window(&cols) {
            return Err(Error::WindowMismatch {
                expected: format!("sub-windows of {} <- {}", self.out_window, self.in_window),
                found: format!("{rows} <- {cols}"),
            });
        }
        let r0 = (rows.lo - self.out_window.lo) as usize;
        let c0 = (cols.lo - self.in_window.lo) as usize;
        Ok(Self {
            matrix: self.matrix.submatrix(r0..r0 + rows.len(), c0..c0 + cols.len()),
            in_window: cols,
            out_window: rows,
            p: self.p,
        })
    }

    /// Square compression to an interior window.
    pub fn restrict(&self, interior: Window) -> Result<Self> {
        self.compress(interior, interior)
    }

    /// Re-labels the output space as a larger window, padding with zero rows.
    pub fn widen_output(&self, out: Window) -> Result<Self> {
        if !out.contains_window(&self.out_window) {
            return Err(Error::WindowMismatch {
                expected: format!("a window containing {}", self.out_window),
                found: out.to_string(),
            });
        }
        let shift = (self.out_window.lo - out.lo) as usize;
        let rows = self.out_window.len();
        let matrix = CMatrix::from_fn(out.len(), self.in_window.len(), |i, j| {
            if i >= shift && i < shift + rows {
                self.matrix.get(i - shift, j)
            } else {
                ZERO
            }
        });
        Ok(Self {
            matrix,
            in_window: self.in_window,
            out_window: out,
            p: self.p,
        })
    }

    /// Trace of a square-window operator.
    pub fn trace(&self) -> Result<C64> {
        if self.in_window != self.out_window {
            return Err(Error::WindowMismatch {
                expected: self.in_window.to_string(),
                found: self.out_window.to_string(),
            });
        }
        trace(&self.matrix)
    }
}

/// Diagonal operator e_n ↦ φ(n) e_n on `window`.
pub fn multiplier(phi: impl Fn(i64) -> C64, window: Window, p: f64) -> WindowedOperator {
    let diag: Vec<C64> = window.frequencies().map(phi).collect();
    WindowedOperator {
        matrix: CMatrix::from_diagonal(&diag),
        in_window: window,
        out_window: window,
        p,
    }
}

fn sgn(n: i64) -> f64 {
    n.signum() as f64
}

/// D = (1/i) d/dθ, diagonal with eigenvalue n on e_n.
pub fn dirac(window: Window, p: f64) -> WindowedOperator {
    multiplier(|n| C64::new(n as f64, 0.0), window, p)
}

/// sgn(D), with sgn(0) = 0.
pub fn sign_of_dirac(window: Window, p: f64) -> WindowedOperator {
    multiplier(|n| C64::new(sgn(n), 0.0), window, p)
}

/// Hilbert transform: symbol −i·sgn(n).
pub fn hilbert_transform(window: Window, p: f64) -> WindowedOperator {
    multiplier(|n| -I * sgn(n), window, p)
}

/// Rank-one projection onto the constants e_0.
pub fn mean_projection(window: Window, p: f64) -> Result<WindowedOperator> {
    if !window.contains(0) {
        return Err(Error::invalid(format!("window {window} does not contain 0")));
    }
    Ok(multiplier(|n| if n == 0 { ONE } else { ZERO }, window, p))
}

/// F = iH + E: +1 on n ≥ 0 and −1 on n < 0, so F² = Id.
pub fn f_operator(window: Window, p: f64) -> WindowedOperator {
    multiplier(|n| if n >= 0 { ONE } else { -ONE }, window, p)
}

/// Riesz projection P = (Id + F)/2 onto n ≥ 0.
pub fn riesz_projection(window: Window, p: f64) -> WindowedOperator {
    multiplier(|n| if n >= 0 { ONE } else { ZERO }, window, p)
}

/// M_f from `in_window` to `in_window` expanded by the bandwidth of f:
/// entry (m, n) = c_{m−n}.
pub fn multiplication_operator(f: &FourierSymbol, in_window: Window, p: f64) -> WindowedOperator {
    let out_window = in_window.expand(f.bandwidth());
    let matrix = CMatrix::from_fn(out_window.len(), in_window.len(), |i, j| {
        f.coefficient(out_window.frequency(i) - in_window.frequency(j))
    });
    WindowedOperator {
        matrix,
        in_window,
        out_window,
        p,
    }
}

/// [M_φ, M_f] for a diagonal multiplier φ, on the expanded windows.
pub fn commutator_with_multiplier(
    phi: impl Fn(i64) -> C64,
    f: &FourierSymbol,
    window: Window,
    p: f64,
) -> WindowedOperator {
    let mf = multiplication_operator(f, window, p);
    let left = multiplier(&phi, mf.out_window(), p)
        .compose(&mf)
        .expect("windows agree by construction");
    let right = mf
        .compose(&multiplier(&phi, window, p))
        .expect("windows agree by construction");
    left.sub(&right).expect("windows agree by construction")
}

/// [F, M_f] with F = iH + E, exact on every entry.
pub fn commutator_with_f(f: &FourierSymbol, window: Window, p: f64) -> WindowedOperator {
    commutator_with_multiplier(|n| if n >= 0 { ONE } else { -ONE }, f, window, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub winding: i64,
    pub min_modulus: f64,
    pub samples: usize,
}

/// Winding number of θ ↦ f(e^{iθ}) about 0.
///
/// Computed by tracking the continuous argument over a uniform grid and
/// independently by the trapezoid rule for (1/2π)∫ (Df)/f dθ; the two must
/// round to the same integer.
pub fn winding_number(f: &FourierSymbol, samples: usize) -> Result<WindingResult> {
    let needed = 8 * (f.bandwidth() + 1);
    if samples < needed {
        return Err(Error::invalid(format!(
            "{samples} samples; at least {needed} are required for bandwidth {}",
            f.bandwidth()
        )));
    }
    let grid: Vec<f64> = (0..samples).map(|j| 2.0 * PI * j as f64 / samples as f64).collect();
    let values: Vec<C64> = grid.iter().map(|&t| f.eval(t)).collect();
    let min_modulus = values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if min_modulus <= 1e-9 {
        return Err(Error::refusal(format!(
            "symbol nearly vanishes on the circle (min modulus {min_modulus:e})"
        )));
    }

    let mut total_arg = 0.0;
    let mut max_step = 0.0f64;
    for j in 0..samples {
        let step = (values[(j + 1) % samples] / values[j]).arg();
        max_step = max_step.max(step.abs());
        total_arg += step;
    }
    if max_step > 0.75 * PI {
        return Err(Error::refusal(format!(
            "argument jumps by {max_step:.3} rad between samples; refine the grid"
        )));
    }
    let by_argument = total_arg / (2.0 * PI);

    let df = f.dirac_applied();
    let by_integral: f64 = grid.iter().zip(&values).map(|(&t, v)| (df.eval(t) / v).re).sum::<f64>() / samples as f64;

    let w_arg = by_argument.round();
    let w_int = by_integral.round();
    if w_arg != w_int || (by_argument - w_arg).abs() > 1e-6 || (by_integral - w_int).abs() > 0.1 {
        return Err(Error::CrossCheck(format!(
            "argument tracking gives {by_argument}, logarithmic derivative gives {by_integral}"
        )));
    }
    Ok(WindingResult {
        winding: w_arg as i64,
        min_modulus,
        samples,
    })
}

/// Grid size used when callers do not choose one.
pub fn default_samples(f: &FourierSymbol) -> usize {
    (64 * (f.bandwidth() + 1)).max(512)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::numerical_rank;

    fn sym(s: &str) -> FourierSymbol {
        s.parse().unwrap()
    }

    #[test]
    fn hilbert_multiplier_symbol() {
        let w = Window::symmetric(4);
        let h = hilbert_transform(w, 2.0);
        for n in w.frequencies() {
            let expected = if n > 0 {
                -I
            } else if n < 0 {
                I
            } else {
                ZERO
            };
            assert_eq!(h.entry(n, n), expected);
        }
        assert_eq!(multiplier(|_| ONE, w, 2.0), WindowedOperator::identity(w, 2.0));
        let d = dirac(Window::symmetric(2), 2.0);
        assert_eq!(
            d.matrix().diagonal(),
            [-2.0, -1.0, 0.0, 1.0, 2.0].map(|x| C64::new(x, 0.0))
        );
    }

    #[test]
    fn f_riesz_and_mean_identities() {
        let w = Window::new(-5, 7).unwrap();
        let f = f_operator(w, 2.0);
        let id = WindowedOperator::identity(w, 2.0);
        assert_eq!(f.compose(&f).unwrap(), id);

        let h = hilbert_transform(w, 2.0);
        let e = mean_projection(w, 2.0).unwrap();
        assert_eq!(h.scale(I).add(&e).unwrap(), f);
        assert_eq!(h.compose(&e).unwrap().matrix().max_abs(), 0.0);
        assert_eq!(e.compose(&h).unwrap().matrix().max_abs(), 0.0);

        let p = riesz_projection(w, 2.0);
        assert_eq!(p.compose(&p).unwrap(), p);
        assert_eq!(id.add(&f).unwrap().scale(C64::new(0.5, 0.0)), p);
        assert_eq!(p.entry(-3, -3), ZERO);
        assert_eq!(p.entry(2, 2), ONE);

        // sgn(D) + E = F
        assert_eq!(sign_of_dirac(w, 2.0).add(&e).unwrap(), f);
        assert!(mean_projection(Window::new(1, 3).unwrap(), 2.0).is_err());
    }

    #[test]
    fn multiplication_operator_examples() {
        let w = Window::symmetric(2);
        let one = multiplication_operator(&FourierSymbol::constant(ONE), w, 2.0);
        assert_eq!(one, WindowedOperator::identity(w, 2.0));

        let z = multiplication_operator(&FourierSymbol::z_power(1), w, 2.0);
        assert_eq!(z.out_window(), Window::symmetric(3));
        for n in w.frequencies() {
            for m in z.out_window().frequencies() {
                assert_eq!(z.entry(m, n), if m == n + 1 { ONE } else { ZERO });
            }
        }

        let g = multiplication_operator(&sym("2 + z"), w, 2.0);
        for n in w.frequencies() {
            assert_eq!(g.entry(n, n), C64::new(2.0, 0.0));
            assert_eq!(g.entry(n + 1, n), ONE);
            assert_eq!(g.entry(n - 1, n), ZERO);
        }
    }

    #[test]
    fn commutator_of_f_with_z() {
        // [F, M_z] e_n = (φ(n+1) − φ(n)) e_{n+1}: only e_{-1} ↦ 2 e_0
        for n in [2usize, 5, 9] {
            let c = commutator_with_f(&FourierSymbol::z_power(1), Window::symmetric(n), 2.0);
            for col in c.in_window().frequencies() {
                for row in c.out_window().frequencies() {
                    let expected = if (row, col) == (0, -1) {
                        C64::new(2.0, 0.0)
                    } else {
                        ZERO
                    };
                    assert_eq!(c.entry(row, col), expected);
                }
            }
            assert_eq!(numerical_rank(c.matrix(), 1e-8).unwrap().rank, 1);
        }
        let c = commutator_with_f(&FourierSymbol::constant(C64::new(3.0, -1.0)), Window::symmetric(4), 2.0);
        assert_eq!(c.matrix().max_abs(), 0.0);
    }

    #[test]
    fn hilbert_commutator_with_z_has_two_jumps() {
        // the symbol sgn(n) of iH jumps at −1 → 0 and at 0 → 1
        let c = commutator_with_multiplier(
            |n| C64::new(sgn(n), 0.0),
            &FourierSymbol::z_power(1),
            Window::symmetric(6),
            2.0,
        );
        assert_eq!(c.entry(0, -1), ONE);
        assert_eq!(c.entry(1, 0), ONE);
        assert_eq!(numerical_rank(c.matrix(), 1e-8).unwrap().rank, 2);
    }

    #[test]
    fn winding_examples() {
        let w = |s: &str| winding_number(&sym(s), 512).unwrap().winding;
        assert_eq!(w("z^3"), 3);
        assert_eq!(w("2 + z"), 0);
        assert_eq!(w("z + 2z^2"), 2);
        assert_eq!(w("z^-1 + 0.1"), -1);
        assert!(matches!(
            winding_number(&sym("1 + z"), 512),
            Err(Error::NumericalRefusal(_))
        ));
        assert!(matches!(winding_number(&sym("z^3"), 16), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn parser_accepts_the_mini_language() {
        assert_eq!(sym("z^3"), FourierSymbol::z_power(3));
        assert_eq!(sym("1"), FourierSymbol::constant(ONE));
        assert_eq!(sym("1+2i"), FourierSymbol::constant(C64::new(1.0, 2.0)));
        let s = sym("(1+2i)*z^-1 - 0.5*z^2 + 3");
        assert_eq!(s.coefficient(-1), C64::new(1.0, 2.0));
        assert_eq!(s.coefficient(2), C64::new(-0.5, 0.0));
        assert_eq!(s.coefficient(0), C64::new(3.0, 0.0));
        assert_eq!(sym("z*(3+z)"), sym("3z + z^2"));
        assert_eq!(sym("1e-1 z"), FourierSymbol::monomial(1, C64::new(0.1, 0.0)));
        assert_eq!(sym("-i z^-2"), FourierSymbol::monomial(-2, -I));
        for bad in ["", "z^", "2*", "(1+z", "w", "z^1.5"] {
            assert!(bad.parse::<FourierSymbol>().is_err(), "{bad}");
        }
    }

    #[test]
    fn json_shape() {
        let s = sym("2 - i z^-1");
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"-1":[0.0,-1.0],"0":[2.0,0.0]}"#);
        let back: FourierSymbol = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<FourierSymbol>(r#"{"x":[1,0]}"#).is_err());
    }

    #[test]
    fn truncated_inverse_meets_its_residue() {
        let f = sym("2 + z");
        let g = f.inverse(1e-10).unwrap();
        assert!(f.mul(&g).sub(&FourierSymbol::constant(ONE)).l1_norm() < 1e-10);
        assert!((g.coefficient(0) - C64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((g.coefficient(1) + C64::new(0.25, 0.0)).norm() < 1e-12);
        assert_eq!(
            sym("2z^3").inverse(1e-10).unwrap(),
            FourierSymbol::monomial(-3, C64::new(0.5, 0.0))
        );
        assert!(sym("1 + z").inverse(1e-10).is_err());
    }

    #[test]
    fn window_bookkeeping() {
        let a = multiplication_operator(&FourierSymbol::z_power(1), Window::symmetric(2), 2.0);
        assert!(a.compose(&a).is_err());
        let b = multiplication_operator(&FourierSymbol::z_power(1), Window::symmetric(3), 2.0);
        assert_eq!(b.compose(&a).unwrap().out_window(), Window::symmetric(4));
        assert!(a.add(&b).is_err());
        assert!(Window::new(3, 1).is_err());
        let r = b
            .compress(Window::new(-1, 1).unwrap(), Window::new(-1, 1).unwrap())
            .unwrap();
        assert_eq!(r.entry(1, 0), ONE);
        assert!(b.restrict(Window::symmetric(9)).is_err());
    }
}
