use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ball::GroupBall;
use super::toeplitz::{finish_report, CommutatorReport};
use super::word::{GroupTag, GroupWord};
use crate::error::{Error, Result};
use crate::linalg::ONE;

/// Signs (ε⁺, ε⁻) per generator of a free group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeHilbertSigns {
    pub plus: Vec<i8>,
    pub minus: Vec<i8>,
}

impl FreeHilbertSigns {
    pub fn new(plus: Vec<i8>, minus: Vec<i8>) -> Result<Self> {
        if plus.len() != minus.len() || plus.is_empty() {
            return Err(Error::invalid("one sign pair per generator is required"));
        }
        if plus.iter().chain(&minus).any(|s| s.abs() != 1) {
            return Err(Error::invalid("signs must be ±1"));
        }
        Ok(Self { plus, minus })
    }

    pub fn constant(k: usize, sign: i8) -> Result<Self> {
        Self::new(vec![sign; k], vec![sign; k])
    }

    pub fn random(k: usize, rng: &mut impl Rng) -> Self {
        let mut draw = || {
            (0..k)
                .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect::<Vec<i8>>()
        };
        let plus = draw();
        let minus = draw();
        Self { plus, minus }
    }

    pub fn generators(&self) -> usize {
        self.plus.len()
    }

    /// ε of the first letter of a reduced word; 0 for the identity.
    pub fn epsilon(&self, w: &GroupWord) -> i8 {
        match w.first_letter() {
            None => 0,
            Some(l) if l.exponent > 0 => self.plus[l.generator - 1],
            Some(l) => self.minus[l.generator - 1],
        }
    }

    fn check_group(&self, group: GroupTag) -> Result<()> {
        match group {
            GroupTag::FreeGroup(k) if k == self.generators() => Ok(()),
            _ => Err(Error::invalid(format!(
                "signs for {} generators cannot act on {group}",
                self.generators()
            ))),
        }
    }
}

impl fmt::Display for FreeHilbertSigns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |s: i8| if s > 0 { '+' } else { '-' };
        let pairs: Vec<String> = self
            .plus
            .iter()
            .zip(&self.minus)
            .map(|(&p, &m)| format!("{}{}", c(p), c(m)))
            .collect();
        write!(f, "{}", pairs.join(","))
    }
}

impl FromStr for FreeHilbertSigns {
    type Err = Error;

    /// `+-,-+,++`: one (ε⁺, ε⁻) pair per generator.
    fn from_str(s: &str) -> Result<Self> {
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for pair in s.split(',') {
            let signs = pair
                .trim()
                .chars()
                .map(|c| match c {
                    '+' => Ok(1),
                    '-' => Ok(-1),
                    _ => Err(Error::Parse(format!("bad sign `{c}` in `{pair}`"))),
                })
                .collect::<Result<Vec<i8>>>()?;
            if signs.len() != 2 {
                return Err(Error::Parse(format!("`{pair}` is not a sign pair")));
            }
            plus.push(signs[0]);
            minus.push(signs[1]);
        }
        Self::new(plus, minus)
    }
}

impl Serialize for FreeHilbertSigns {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FreeHilbertSigns {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Diagonal of H_ε on the ball: λ_s ↦ ε(first letter of s)·λ_s, λ_e ↦ 0.
pub fn free_hilbert(signs: &FreeHilbertSigns, ball: &GroupBall) -> Result<Vec<i8>> {
    signs.check_group(ball.group)?;
    Ok(ball.elements().iter().map(|s| signs.epsilon(s)).collect())
}

/// [H_ε, M_{λ_t}]: λ_s ↦ (ε(ts) − ε(s))·λ_{ts}, with ε(e) = 0.
pub fn free_hilbert_commutator(signs: &FreeHilbertSigns, ball: &GroupBall, t: &GroupWord) -> Result<CommutatorReport> {
    signs.check_group(ball.group)?;
    let out = GroupBall::build(ball.group, ball.radius + t.len())?;
    let columns = ball
        .elements()
        .par_iter()
        .enumerate()
        .map(|(j, s)| {
            let ts = t.mul(s)?;
            let row = out
                .lookup(&ts)?
                .ok_or_else(|| Error::invalid(format!("`{ts}` fell outside the output ball")))?;
            Ok((row, j, (signs.epsilon(&ts) - signs.epsilon(s)) as i64))
        })
        .collect::<Result<Vec<_>>>()?;
    finish_report(
        ball.group,
        t,
        (ball.radius, out.radius),
        (out.len(), ball.len()),
        ONE,
        columns,
    )
}
