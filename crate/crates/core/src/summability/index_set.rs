//! Declarative subsets of ℕ = {1, 2, 3, …}.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexSet {
    All,
    Empty,
    Evens,
    Odds,
    /// `{k : k mod modulus ∈ residues}`.
    Residues { modulus: usize, residues: Vec<usize> },
    Squares,
    /// `{1, 2, 4, 8, …}`.
    PowersOfTwo,
    /// `⋃_j [j^p, j^p + j)`: blocks of growing length whose density still
    /// vanishes for `p ≥ 3`.
    SparseBlocks { exponent: u32 },
    Finite { members: Vec<usize> },
    /// `lo..=hi`.
    Range { lo: usize, hi: usize },
    /// `bits[k - 1]` decides `k`; indices past the end are excluded.
    Mask { bits: Vec<bool> },
    Not { set: Box<IndexSet> },
    Union { sets: Vec<IndexSet> },
    Intersection { sets: Vec<IndexSet> },
}

fn is_square(k: usize) -> bool {
    let r = k.isqrt();
    r * r == k
}

fn in_sparse_blocks(k: usize, p: u32) -> bool {
    let root = (k as f64).powf(1.0 / p as f64).round() as usize;
    (root.saturating_sub(1)..=root + 1)
        .filter(|&j| j >= 1)
        .any(|j| match j.checked_pow(p) {
            Some(start) => start <= k && k < start + j,
            None => false,
        })
}

impl IndexSet {
    pub fn residues(modulus: usize, residues: &[usize]) -> Self {
        IndexSet::Residues {
            modulus,
            residues: residues.to_vec(),
        }
    }

    pub fn finite(members: &[usize]) -> Self {
        IndexSet::Finite {
            members: members.to_vec(),
        }
    }

    pub fn complement(&self) -> Self {
        match self {
            IndexSet::Not { set } => (**set).clone(),
            other => IndexSet::Not {
                set: Box::new(other.clone()),
            },
        }
    }

    pub fn union(a: IndexSet, b: IndexSet) -> Self {
        IndexSet::Union { sets: vec![a, b] }
    }

    pub fn intersection(a: IndexSet, b: IndexSet) -> Self {
        IndexSet::Intersection { sets: vec![a, b] }
    }

    /// Membership of the 1-based index `k`; `k = 0` is never a member.
    pub fn contains(&self, k: usize) -> bool {
        if k == 0 {
            return false;
        }
        match self {
            IndexSet::All => true,
            IndexSet::Empty => false,
            IndexSet::Evens => k % 2 == 0,
            IndexSet::Odds => k % 2 == 1,
            IndexSet::Residues { modulus, residues } => {
                *modulus > 0 && residues.iter().any(|r| r % modulus == k % modulus)
            }
            IndexSet::Squares => is_square(k),
            IndexSet::PowersOfTwo => k.is_power_of_two(),
            IndexSet::SparseBlocks { exponent } => in_sparse_blocks(k, *exponent),
            IndexSet::Finite { members } => members.contains(&k),
            IndexSet::Range { lo, hi } => *lo <= k && k <= *hi,
            IndexSet::Mask { bits } => bits.get(k - 1).copied().unwrap_or(false),
            IndexSet::Not { set } => !set.contains(k),
            IndexSet::Union { sets } => sets.iter().any(|s| s.contains(k)),
            IndexSet::Intersection { sets } => sets.iter().all(|s| s.contains(k)),
        }
    }

    /// `out[i]` is membership of `k = i + 1`, for `k = 1..=len`.
    pub fn indicator(&self, len: usize) -> Vec<bool> {
        (1..=len).map(|k| self.contains(k)).collect()
    }

    /// `|self ∩ [1, n]|`.
    pub fn count_upto(&self, n: usize) -> usize {
        match self {
            IndexSet::All => n,
            IndexSet::Empty => 0,
            IndexSet::Evens => n / 2,
            IndexSet::Odds => n.div_ceil(2),
            IndexSet::Squares => n.isqrt(),
            IndexSet::PowersOfTwo if n == 0 => 0,
            IndexSet::PowersOfTwo => n.ilog2() as usize + 1,
            _ => (1..=n).filter(|&k| self.contains(k)).count(),
        }
    }

    pub fn members_upto(&self, n: usize) -> Vec<usize> {
        (1..=n).filter(|&k| self.contains(k)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            IndexSet::Residues { modulus: 0, .. } => Err(Error::Parse("modulus must be positive".into())),
            IndexSet::SparseBlocks { exponent } if *exponent < 2 => {
                Err(Error::Parse("sparse block exponent must be at least 2".into()))
            }
            IndexSet::Not { set } => set.validate(),
            IndexSet::Union { sets } | IndexSet::Intersection { sets } => {
                sets.iter().try_for_each(IndexSet::validate)
            }
            _ => Ok(()),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad index `{x}`")))
        })
        .collect()
}

/// Textual forms: `all`, `empty`, `evens`, `odds`, `squares`, `pow2`,
/// `blocks:<p>`, `mod:<m>:<r1,r2,…>`, `finite:<k1,k2,…>`, `range:<lo>:<hi>`,
/// `not:<set>`.
impl FromStr for IndexSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("not:") {
            return Ok(rest.parse::<IndexSet>()?.complement());
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            return parse_combination(inner);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("unknown index set `{s}`"));
        let set = match parts.as_slice() {
            ["all"] | ["n"] => IndexSet::All,
            ["empty"] => IndexSet::Empty,
            ["evens"] => IndexSet::Evens,
            ["odds"] => IndexSet::Odds,
            ["squares"] => IndexSet::Squares,
            ["pow2"] | ["powers-of-two"] => IndexSet::PowersOfTwo,
            ["blocks", p] => IndexSet::SparseBlocks {
                exponent: p.parse().map_err(|_| bad())?,
            },
            ["mod", m, rs] => IndexSet::Residues {
                modulus: m.parse().map_err(|_| bad())?,
                residues: parse_list(rs)?,
            },
            ["finite", ks] => IndexSet::Finite {
                members: parse_list(ks)?,
            },
            ["range", lo, hi] => IndexSet::Range {
                lo: lo.parse().map_err(|_| bad())?,
                hi: hi.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        set.validate()?;
        Ok(set)
    }
}

/// `a | b | ...` or `a & b & ...`, splitting only outside parentheses.
fn parse_combination(inner: &str) -> Result<IndexSet> {
    let bad = || Error::Parse(format!("unbalanced or mixed set expression `({inner})`"));
    let mut depth = 0usize;
    let mut op = None;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1).ok_or_else(bad)?,
            '|' | '&' if depth == 0 => {
                if op.is_some_and(|o| o != c) {
                    return Err(bad());
                }
                op = Some(c);
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(bad());
    }
    parts.push(&inner[start..]);
    let sets = parts.into_iter().map(str::parse).collect::<Result<Vec<IndexSet>>>()?;
    Ok(match op {
        Some('&') => IndexSet::Intersection { sets },
        Some(_) => IndexSet::Union { sets },
        None => sets.into_iter().next().ok_or_else(bad)?,
    })
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSet::All => write!(f, "all"),
            IndexSet::Empty => write!(f, "empty"),
            IndexSet::Evens => write!(f, "evens"),
            IndexSet::Odds => write!(f, "odds"),
            IndexSet::Residues { modulus, residues } => write!(f, "mod:{modulus}:{}", join(residues)),
            IndexSet::Squares => write!(f, "squares"),
            IndexSet::PowersOfTwo => write!(f, "pow2"),
            IndexSet::SparseBlocks { exponent } => write!(f, "blocks:{exponent}"),
            IndexSet::Finite { members } => write!(f, "finite:{}", join(members)),
            IndexSet::Range { lo, hi } => write!(f, "range:{lo}:{hi}"),
            IndexSet::Mask { bits } => write!(f, "mask[{}]", bits.len()),
            IndexSet::Not { set } => write!(f, "not:{set}"),
            IndexSet::Union { sets } => {
                let inner: Vec<String> = sets.iter().map(ToString::to_string).collect();
                write!(f, "({})", inner.join(" | "))
            }
            IndexSet::Intersection { sets } => {
                let inner: Vec<String> = sets.iter().map(ToString::to_string).collect();
                write!(f, "({})", inner.join(" & "))
            }
        }
    }
}
