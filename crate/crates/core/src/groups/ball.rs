use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};

use super::braid::{burau, handle_reduce, handle_reduce_checked, BurauMatrix, DEFAULT_STEP_BUDGET};
use super::word::{parse_word, GroupTag, GroupWord, Letter};
use crate::error::{Error, Result};

/// Left-invariant total order, decided through the sign of s⁻¹t.
#[derive(Debug)]
pub struct OrderOracle {
    pub group: GroupTag,
    pub budget: usize,
    checks: AtomicUsize,
}

impl Clone for OrderOracle {
    fn clone(&self) -> Self {
        Self {
            group: self.group,
            budget: self.budget,
            checks: AtomicUsize::new(self.checks()),
        }
    }
}

impl OrderOracle {
    /// ℤ and ℤᵈ are ordered lexicographically, B₃ by the Dehornoy order. Free
    /// groups carry no oracle here.
    pub fn new(group: GroupTag) -> Result<Self> {
        if let GroupTag::FreeGroup(_) = group {
            return Err(Error::invalid("no order oracle is provided for free groups"));
        }
        Ok(Self {
            group,
            budget: DEFAULT_STEP_BUDGET,
            checks: AtomicUsize::new(0),
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Number of words whose handle reduction was cross-checked against Burau.
    pub fn checks(&self) -> usize {
        self.checks.load(AtomicOrdering::Relaxed)
    }

    pub fn sign(&self, s: &GroupWord) -> Result<i8> {
        if s.group != self.group {
            return Err(Error::invalid(format!(
                "word from {} given to the {} oracle",
                s.group, self.group
            )));
        }
        match self.group {
            GroupTag::Z | GroupTag::ZdLex(_) => {
                let first = s.exponent_vector().into_iter().find(|&n| n != 0).unwrap_or(0);
                Ok(first.signum() as i8)
            }
            GroupTag::B3 => {
                self.checks.fetch_add(1, AtomicOrdering::Relaxed);
                Ok(handle_reduce_checked(s, self.budget)?.classification.sign())
            }
            GroupTag::FreeGroup(_) => unreachable!("rejected on construction"),
        }
    }

    /// s ≺ t iff s⁻¹t is positive.
    pub fn compare(&self, s: &GroupWord, t: &GroupWord) -> Result<std::cmp::Ordering> {
        Ok(match self.sign(&s.inverse().mul(t)?)? {
            1 => std::cmp::Ordering::Less,
            0 => std::cmp::Ordering::Equal,
            _ => std::cmp::Ordering::Greater,
        })
    }

    /// e ⪯ s.
    pub fn in_cone(&self, s: &GroupWord) -> Result<bool> {
        Ok(self.sign(s)? >= 0)
    }
}

/// Group equality. For B₃ both handle reduction of w1·w2⁻¹ and the Burau
/// matrices decide, and they must agree.
pub fn word_equal(w1: &GroupWord, w2: &GroupWord) -> Result<bool> {
    if w1.group != w2.group {
        return Err(Error::invalid(format!("words from {} and {}", w1.group, w2.group)));
    }
    match w1.group {
        GroupTag::B3 => {
            let by_reduction = handle_reduce(&w1.mul(&w2.inverse())?, DEFAULT_STEP_BUDGET)?
                .word
                .is_empty();
            let by_burau = burau(w1)? == burau(w2)?;
            if by_reduction != by_burau {
                return Err(Error::CrossCheck(format!(
                    "`{w1}` = `{w2}`: handle reduction says {by_reduction}, Burau says {by_burau}"
                )));
            }
            Ok(by_reduction)
        }
        _ => Ok(w1.letters == w2.letters),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum BallKey {
    Word(Vec<Letter>),
    Burau(BurauMatrix),
}

fn ball_key(w: &GroupWord) -> Result<BallKey> {
    Ok(match w.group {
        GroupTag::B3 => BallKey::Burau(burau(w)?),
        _ => BallKey::Word(w.letters.clone()),
    })
}

pub const BALL_FORMAT_VERSION: u32 = 1;

/// All elements of word length ≤ radius, in breadth-first order.
#[derive(Clone, Debug)]
pub struct GroupBall {
    pub group: GroupTag,
    pub radius: usize,
    elements: Vec<GroupWord>,
    lengths: Vec<usize>,
    index: HashMap<BallKey, usize>,
}

#[derive(Serialize, Deserialize)]
struct BallFile {
    format_version: u32,
    group: GroupTag,
    radius: usize,
    elements: Vec<String>,
    lengths: Vec<usize>,
}

impl GroupBall {
    /// Breadth-first products by generators; B₃ elements are deduplicated by
    /// their Burau matrix, so each is represented by the first geodesic word
    /// found.
    pub fn build(group: GroupTag, radius: usize) -> Result<Self> {
        let mut ball = Self {
            group,
            radius,
            elements: Vec::new(),
            lengths: Vec::new(),
            index: HashMap::new(),
        };
        ball.insert(group.identity(), 0)?;
        let alphabet = group.alphabet();
        let mut layer = vec![0usize];
        for r in 1..=radius {
            let mut next = Vec::new();
            for &i in &layer {
                for &x in &alphabet {
                    let w = ball.elements[i].mul(&GroupWord::new(group, vec![x])?)?;
                    if let Some(j) = ball.insert(w, r)? {
                        next.push(j);
                    }
                }
            }
            layer = next;
        }
        Ok(ball)
    }

    fn insert(&mut self, w: GroupWord, length: usize) -> Result<Option<usize>> {
        let key = ball_key(&w)?;
        if self.index.contains_key(&key) {
            return Ok(None);
        }
        let i = self.elements.len();
        self.index.insert(key, i);
        self.elements.push(w);
        self.lengths.push(length);
        Ok(Some(i))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupWord] {
        &self.elements
    }

    /// Word length of the i-th element.
    pub fn length(&self, i: usize) -> usize {
        self.lengths[i]
    }

    /// Number of elements of length ≤ r (they form a prefix).
    pub fn count_within(&self, r: usize) -> usize {
        self.lengths.partition_point(|&l| l <= r)
    }

    pub fn lookup(&self, w: &GroupWord) -> Result<Option<usize>> {
        if w.group != self.group {
            return Err(Error::invalid(format!(
                "word from {} looked up in a {} ball",
                w.group, self.group
            )));
        }
        Ok(self.index.get(&ball_key(w)?).copied())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = BallFile {
            format_version: BALL_FORMAT_VERSION,
            group: self.group,
            radius: self.radius,
            elements: self.elements.iter().map(|w| w.to_string()).collect(),
            lengths: self.lengths.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    /// Reads a cached ball; duplicates and unsorted lengths are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: BallFile = serde_json::from_str(text)?;
        if file.format_version != BALL_FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "ball cache has format version {}, expected {BALL_FORMAT_VERSION}",
                file.format_version
            )));
        }
        if file.elements.len() != file.lengths.len() || file.lengths.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("ball cache lengths are inconsistent"));
        }
        let mut ball = Self {
            group: file.group,
            radius: file.radius,
            elements: Vec::new(),
            lengths: Vec::new(),
            index: HashMap::new(),
        };
        for (text, &len) in file.elements.iter().zip(&file.lengths) {
            let w = parse_word(file.group, text)?;
            if w.len() != len || len > file.radius {
                return Err(Error::invalid(format!("`{text}` does not have length {len}")));
            }
            if ball.insert(w, len)?.is_none() {
                return Err(Error::invalid(format!("`{text}` appears twice in the ball cache")));
            }
        }
        Ok(ball)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json()?)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
