use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Which group a word lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupTag {
    Z,
    /// ℤᵈ with the lexicographic order.
    ZdLex(usize),
    B3,
    FreeGroup(usize),
}

impl GroupTag {
    pub fn generator_count(&self) -> usize {
        match self {
            GroupTag::Z => 1,
            GroupTag::ZdLex(d) => *d,
            GroupTag::B3 => 2,
            GroupTag::FreeGroup(k) => *k,
        }
    }

    /// Generators and their inverses, in the order used for ball enumeration.
    pub fn alphabet(&self) -> Vec<Letter> {
        (1..=self.generator_count())
            .flat_map(|g| [Letter::new(g, 1), Letter::new(g, -1)])
            .collect()
    }

    pub fn identity(&self) -> GroupWord {
        GroupWord {
            group: *self,
            letters: Vec::new(),
            canonical: true,
        }
    }

    pub fn generator(&self, g: usize, exponent: i8) -> Result<GroupWord> {
        GroupWord::new(*self, vec![Letter::new(g, exponent)])
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::Z => write!(f, "Z"),
            GroupTag::ZdLex(d) => write!(f, "Z{d}"),
            GroupTag::B3 => write!(f, "B3"),
            GroupTag::FreeGroup(k) => write!(f, "F{k}"),
        }
    }
}

impl FromStr for GroupTag {
    type Err = Error;

    /// `Z`, `Z2` (or `Z^2`), `B3`, `F3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let count = |rest: &str| -> Result<usize> {
            let rest = rest.trim_start_matches('^');
            rest.parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::Parse(format!("bad group rank in `{s}`")))
        };
        match s {
            "Z" => Ok(GroupTag::Z),
            "B3" => Ok(GroupTag::B3),
            _ if s.starts_with('Z') => Ok(GroupTag::ZdLex(count(&s[1..])?)),
            _ if s.starts_with('F') => Ok(GroupTag::FreeGroup(count(&s[1..])?)),
            _ => Err(Error::Parse(format!("unknown group `{s}`"))),
        }
    }
}

impl Serialize for GroupTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A generator (1-based) raised to ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: usize, exponent: i8) -> Self {
        Self { generator, exponent }
    }

    pub fn inverse(self) -> Self {
        Self::new(self.generator, -self.exponent)
    }
}

/// A word in the generators of a group. `canonical` records that the letters
/// are in the group's normal form (exponent vector, free reduction, or the
/// output of handle reduction for B₃).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupWord {
    pub group: GroupTag,
    pub letters: Vec<Letter>,
    pub canonical: bool,
}

pub(crate) fn free_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn vector_letters(v: &[i64]) -> Vec<Letter> {
    v.iter()
        .enumerate()
        .flat_map(|(g, &n)| {
            let e = if n < 0 { -1 } else { 1 };
            std::iter::repeat(Letter::new(g + 1, e)).take(n.unsigned_abs() as usize)
        })
        .collect()
}

impl GroupWord {
    /// Validates generator indices; abelian and free words are brought to
    /// normal form, braid words are freely reduced.
    pub fn new(group: GroupTag, letters: Vec<Letter>) -> Result<Self> {
        for l in &letters {
            if l.generator == 0 || l.generator > group.generator_count() || l.exponent.abs() != 1 {
                return Err(Error::invalid(format!(
                    "letter {}^{} is not a generator of {group}",
                    l.generator, l.exponent
                )));
            }
        }
        let mut w = Self {
            group,
            letters,
            canonical: false,
        };
        w.normalize();
        Ok(w)
    }

    fn normalize(&mut self) {
        match self.group {
            GroupTag::Z | GroupTag::ZdLex(_) => {
                self.letters = vector_letters(&self.exponent_vector());
                self.canonical = true;
            }
            GroupTag::FreeGroup(_) => {
                self.letters = free_reduce(&self.letters);
                self.canonical = true;
            }
            GroupTag::B3 => {
                self.letters = free_reduce(&self.letters);
            }
        }
    }

    pub fn from_vector(group: GroupTag, v: &[i64]) -> Result<Self> {
        if !matches!(group, GroupTag::Z | GroupTag::ZdLex(_)) || v.len() != group.generator_count() {
            return Err(Error::invalid(format!(
                "exponent vector of length {} for {group}",
                v.len()
            )));
        }
        Self::new(group, vector_letters(v))
    }

    /// Exponent sums per generator.
    pub fn exponent_vector(&self) -> Vec<i64> {
        let mut v = vec![0; self.group.generator_count()];
        for l in &self.letters {
            v[l.generator - 1] += l.exponent as i64;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn check_group(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::invalid(format!("words from {} and {}", self.group, other.group)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_group(other)?;
        let letters = self.letters.iter().chain(&other.letters).copied().collect();
        Self::new(self.group, letters)
    }

    pub fn inverse(&self) -> Self {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        Self::new(self.group, letters).expect("inverse of a valid word")
    }

    /// The first letter of a reduced word.
    pub fn first_letter(&self) -> Option<Letter> {
        self.letters.first().copied()
    }
}

fn write_runs(f: &mut fmt::Formatter<'_>, letters: &[Letter], prefix: char) -> fmt::Result {
    if letters.is_empty() {
        return write!(f, "e");
    }
    let mut i = 0;
    let mut first = true;
    while i < letters.len() {
        let l = letters[i];
        let mut j = i;
        while j < letters.len() && letters[j] == l {
            j += 1;
        }
        let power = (j - i) as i64 * l.exponent as i64;
        if !first {
            write!(f, " ")?;
        }
        first = false;
        if power == 1 {
            write!(f, "{prefix}{}", l.generator)?;
        } else {
            write!(f, "{prefix}{}^{power}", l.generator)?;
        }
        i = j;
    }
    Ok(())
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.group {
            GroupTag::Z => write!(f, "{}", self.exponent_vector()[0]),
            GroupTag::ZdLex(_) => {
                let v: Vec<String> = self.exponent_vector().iter().map(|n| n.to_string()).collect();
                write!(f, "({})", v.join(","))
            }
            GroupTag::B3 => write_runs(f, &self.letters, 's'),
            GroupTag::FreeGroup(_) => write_runs(f, &self.letters, 'g'),
        }
    }
}

/// Parses `s1 s2^-1 s1^3` (braids), `g1 g2^-1` (free groups), `3` (ℤ) or
/// `(2,-1)` (ℤᵈ). `e` or an empty string is the identity.
pub fn parse_word(group: GroupTag, text: &str) -> Result<GroupWord> {
    let text = text.trim();
    match group {
        GroupTag::Z => {
            let n: i64 = text
                .parse()
                .map_err(|_| Error::Parse(format!("`{text}` is not an integer")))?;
            GroupWord::from_vector(group, &[n])
        }
        GroupTag::ZdLex(_) => {
            let inner = text
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected `(a,b,…)`, got `{text}`")))?;
            let v = inner
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad entry `{x}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            GroupWord::from_vector(group, &v)
        }
        GroupTag::B3 | GroupTag::FreeGroup(_) => {
            let prefix = if group == GroupTag::B3 { 's' } else { 'g' };
            if text.is_empty() || text == "e" {
                return Ok(group.identity());
            }
            let mut letters = Vec::new();
            for token in text.split_whitespace() {
                let body = token
                    .strip_prefix(prefix)
                    .ok_or_else(|| Error::Parse(format!("token `{token}` should start with `{prefix}`")))?;
                let (gen, power) = match body.split_once('^') {
                    Some((g, p)) => (g, p),
                    None => (body, "1"),
                };
                let gen: usize = gen
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad generator in `{token}`")))?;
                let power: i64 = power
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{token}`")))?;
                let e = if power < 0 { -1 } else { 1 };
                letters.extend(std::iter::repeat(Letter::new(gen, e)).take(power.unsigned_abs() as usize));
            }
            GroupWord::new(group, letters)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct WordRepr {
    group: GroupTag,
    word: String,
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WordRepr {
            group: self.group,
            word: self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = WordRepr::deserialize(d)?;
        parse_word(repr.group, &repr.word).map_err(serde::de::Error::custom)
    }
}
