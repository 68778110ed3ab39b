//! The braid group B₃: handle reduction and the reduced Burau representation
//! over ℤ[t, t⁻¹], used as an independent word-problem oracle.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::word::{free_reduce, GroupTag, GroupWord, Letter};
use crate::error::{Error, Result};

pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// Laurent polynomial with i128 coefficients; `coeffs[k]` multiplies t^(low + k).
/// Kept trimmed so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Laurent {
    low: i32,
    coeffs: Vec<i128>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: i128, power: i32) -> Self {
        Self {
            low: power,
            coeffs: vec![c],
        }
        .trimmed()
    }

    pub fn constant(c: i128) -> Self {
        Self::monomial(c, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead == self.coeffs.len() {
            return Self::zero();
        }
        self.coeffs.drain(..lead);
        self.low += lead as i32;
        self
    }

    pub fn coefficient(&self, power: i32) -> i128 {
        let k = power as i64 - self.low as i64;
        if k < 0 {
            return 0;
        }
        self.coeffs.get(k as usize).copied().unwrap_or(0)
    }

    fn high(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let low = self.low.min(other.low);
        let high = self.high().max(other.high());
        let coeffs = (low..=high)
            .map(|p| {
                self.coefficient(p)
                    .checked_add(other.coefficient(p))
                    .ok_or(Error::Overflow("Laurent polynomial addition"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { low, coeffs }.trimmed())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let mut coeffs = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = a.checked_mul(*b).ok_or(Error::Overflow("Laurent polynomial product"))?;
                coeffs[i + j] = coeffs[i + j]
                    .checked_add(prod)
                    .ok_or(Error::Overflow("Laurent polynomial product"))?;
            }
        }
        Ok(Self {
            low: self.low + other.low,
            coeffs,
        }
        .trimmed())
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, c)| format!("{c}t^{}", self.low + k as i32))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// 2×2 matrix over ℤ[t, t⁻¹].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BurauMatrix(pub [[Laurent; 2]; 2]);

impl BurauMatrix {
    pub fn identity() -> Self {
        Self([
            [Laurent::constant(1), Laurent::zero()],
            [Laurent::zero(), Laurent::constant(1)],
        ])
    }

    fn m(a: Laurent, b: Laurent, c: Laurent, d: Laurent) -> Self {
        Self([[a, b], [c, d]])
    }

    /// σ₁ ↦ [[−t, 1], [0, 1]], σ₂ ↦ [[1, 0], [t, −t]] and their inverses.
    pub fn of_letter(l: Letter) -> Self {
        let t = |c: i128, p: i32| Laurent::monomial(c, p);
        let zero = Laurent::zero;
        match (l.generator, l.exponent) {
            (1, 1) => Self::m(t(-1, 1), t(1, 0), zero(), t(1, 0)),
            (1, -1) => Self::m(t(-1, -1), t(1, -1), zero(), t(1, 0)),
            (2, 1) => Self::m(t(1, 0), zero(), t(1, 1), t(-1, 1)),
            (2, -1) => Self::m(t(1, 0), zero(), t(1, 0), t(-1, -1)),
            _ => unreachable!("B3 letters are validated on construction"),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::identity();
        for i in 0..2 {
            for j in 0..2 {
                let a = self.0[i][0].checked_mul(&other.0[0][j])?;
                let b = self.0[i][1].checked_mul(&other.0[1][j])?;
                out.0[i][j] = a.checked_add(&b)?;
            }
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

/// Reduced Burau image of a B₃ word.
pub fn burau(w: &GroupWord) -> Result<BurauMatrix> {
    if w.group != GroupTag::B3 {
        return Err(Error::invalid(format!(
            "Burau matrices are defined for B3, not {}",
            w.group
        )));
    }
    w.letters.iter().try_fold(BurauMatrix::identity(), |acc, &l| {
        acc.checked_mul(&BurauMatrix::of_letter(l))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Empty,
    Sigma1Positive,
    Sigma1Negative,
    Sigma2OnlyPositive,
    Sigma2OnlyNegative,
}

impl Classification {
    pub fn sign(&self) -> i8 {
        match self {
            Classification::Empty => 0,
            Classification::Sigma1Positive | Classification::Sigma2OnlyPositive => 1,
            Classification::Sigma1Negative | Classification::Sigma2OnlyNegative => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandleReduction {
    pub word: GroupWord,
    pub classification: Classification,
    pub steps: usize,
}

const S1: usize = 1;
const S2: usize = 2;

/// Leftmost σ₁-handle σ₁^e σ₂^m σ₁^(−e) in a freely reduced word, as
/// (start, end inclusive, e, m).
fn find_handle(w: &[Letter]) -> Option<(usize, usize, i8, i64)> {
    let mut prev: Option<usize> = None;
    for (i, l) in w.iter().enumerate() {
        if l.generator != S1 {
            continue;
        }
        if let Some(p) = prev {
            if w[p].exponent != l.exponent {
                let m = w[p + 1..i].iter().map(|x| x.exponent as i64).sum();
                return Some((p, i, w[p].exponent, m));
            }
        }
        prev = Some(i);
    }
    None
}

/// Reduces σ₁-handles with σ₁^e σ₂^(d·m) σ₁^(−e) → (σ₂^(−e) σ₁^d σ₂^e)^m until
/// the word is empty, 1-positive, 1-negative or free of σ₁.
pub fn handle_reduce(w: &GroupWord, budget: usize) -> Result<HandleReduction> {
    if w.group != GroupTag::B3 {
        return Err(Error::invalid(format!(
            "handle reduction is defined for B3, not {}",
            w.group
        )));
    }
    let mut letters = free_reduce(&w.letters);
    let mut steps = 0;
    while let Some((start, end, e, m)) = find_handle(&letters) {
        steps += 1;
        if steps > budget {
            return Err(Error::BudgetExceeded {
                budget,
                word: w.to_string(),
            });
        }
        let d: i8 = if m < 0 { -1 } else { 1 };
        let block = [Letter::new(S2, -e), Letter::new(S1, d), Letter::new(S2, e)];
        let mut next = Vec::with_capacity(letters.len() + 3 * m.unsigned_abs() as usize);
        next.extend_from_slice(&letters[..start]);
        for _ in 0..m.unsigned_abs() {
            next.extend_from_slice(&block);
        }
        next.extend_from_slice(&letters[end + 1..]);
        letters = free_reduce(&next);
    }
    let classification = match letters.iter().find(|l| l.generator == S1) {
        Some(l) if l.exponent > 0 => Classification::Sigma1Positive,
        Some(_) => Classification::Sigma1Negative,
        None => match letters.first() {
            None => Classification::Empty,
            Some(l) if l.exponent > 0 => Classification::Sigma2OnlyPositive,
            Some(_) => Classification::Sigma2OnlyNegative,
        },
    };
    Ok(HandleReduction {
        word: GroupWord {
            group: GroupTag::B3,
            letters,
            canonical: true,
        },
        classification,
        steps,
    })
}

/// Handle reduction followed by the Burau cross-check: the reduced word must
/// have the same Burau matrix, and the word reduces to empty exactly when its
/// matrix is the identity.
pub fn handle_reduce_checked(w: &GroupWord, budget: usize) -> Result<HandleReduction> {
    let r = handle_reduce(w, budget)?;
    let before = burau(w)?;
    if before != burau(&r.word)? {
        return Err(Error::CrossCheck(format!(
            "handle reduction changed the Burau image of `{w}` (got `{}`)",
            r.word
        )));
    }
    if (r.classification == Classification::Empty) != before.is_identity() {
        return Err(Error::CrossCheck(format!(
            "handle reduction says `{w}` is {:?}, Burau disagrees",
            r.classification
        )));
    }
    Ok(r)
}
