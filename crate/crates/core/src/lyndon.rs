//! Reduced words in the free group on `a, b`, the leaf-crossing count of the
//! tree model and the Lyndon length-function axioms.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on `4 · 3^(max_len - 1)`.
pub const DEFAULT_WORD_CAP: usize = 500;

/// Leaves crossed per edge of the tree: each region has two boundary leaves.
pub const LEAVES_PER_EDGE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::A => "a",
            Letter::AInv => "a⁻¹",
            Letter::B => "b",
            Letter::BInv => "b⁻¹",
        })
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OverlapConvention {
    /// `s(g,h) = ½(N(g) + N(h) - N(g h⁻¹))`
    Right,
    /// `s(g,h) = ½(N(g) + N(h) - N(h⁻¹ g))`
    Left,
}

impl FromStr for OverlapConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "right" => Ok(OverlapConvention::Right),
            "left" => Ok(OverlapConvention::Left),
            _ => Err(Error::Config(format!("unknown overlap convention `{s}`"))),
        }
    }
}

/// Free reduction by a cancellation stack.
pub fn reduce(letters: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// Parses letters `a`, `b` with optional inverse marks `⁻¹`, `^-1` or `'`;
/// `A`, `B` also denote inverses. Whitespace is ignored.
pub fn parse_letters(src: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    let mut rest = src;
    while let Some(c) = rest.chars().next() {
        rest = &rest[c.len_utf8()..];
        let base = match c {
            c if c.is_whitespace() || c == '·' || c == '*' => continue,
            'a' => Letter::A,
            'b' => Letter::B,
            'A' => Letter::AInv,
            'B' => Letter::BInv,
            other => return Err(Error::BadLetter(other.to_string())),
        };
        let mut letter = base;
        for mark in ["⁻¹", "^-1", "'"] {
            if let Some(r) = rest.strip_prefix(mark) {
                rest = r;
                letter = letter.inverse();
                break;
            }
        }
        out.push(letter);
    }
    Ok(out)
}

impl Word {
    pub fn identity() -> Word {
        Word(vec![])
    }

    pub fn parse(src: &str) -> Result<Word> {
        Ok(reduce(&parse_letters(src)?))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        reduce(&v)
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `N(w)`: leaves crossed from the base chamber to the `w`-chamber.
pub fn crossing_count(w: &Word) -> usize {
    LEAVES_PER_EDGE * w.len()
}

/// Overlap `s(g, h)`. Every `N` is even here, so `s` is an integer.
pub fn overlap(g: &Word, h: &Word, conv: OverlapConvention) -> i64 {
    let third = match conv {
        OverlapConvention::Right => g.mul(&h.inverse()),
        OverlapConvention::Left => h.inverse().mul(g),
    };
    let twice = crossing_count(g) as i64 + crossing_count(h) as i64 - crossing_count(&third) as i64;
    twice / 2
}

/// All reduced words of length at most `max_len`, shortest first.
pub fn enumerate_words(max_len: usize) -> Vec<Word> {
    let mut all = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * 3);
        for w in &layer {
            for l in Letter::ALL {
                if w.0.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn guard(max_len: usize, cap: usize) -> Result<()> {
    if max_len == 0 {
        return Err(Error::Domain("max_len must be at least 1".into()));
    }
    let count = 3usize
        .checked_pow(max_len as u32 - 1)
        .and_then(|p| p.checked_mul(4))
        .unwrap_or(usize::MAX);
    if count > cap {
        return Err(Error::ResourceGuard { count: count as u64, cap: cap as u64 });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub witnesses: Vec<String>,
    pub lhs: i64,
    pub rhs: i64,
}

impl Violation {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("violation serializes")
    }
}

pub fn check_axioms(max_len: usize, conv: OverlapConvention) -> Result<Vec<Violation>> {
    check_axioms_capped(max_len, conv, DEFAULT_WORD_CAP)
}

/// Exhaustive check of axioms (I)-(V) over all reduced words up to
/// `max_len`.
pub fn check_axioms_capped(max_len: usize, conv: OverlapConvention, cap: usize) -> Result<Vec<Violation>> {
    guard(max_len, cap)?;
    let words = enumerate_words(max_len);
    let n = words.len();
    let names: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    let big_n: Vec<i64> = words.iter().map(|w| crossing_count(w) as i64).collect();
    let index: std::collections::HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let inv: Vec<usize> = words.iter().map(|w| index[&w.inverse()]).collect();
    let mut s = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            s[i * n + j] = overlap(&words[i], &words[j], conv);
        }
    }
    let mut out = Vec::new();
    let v = |axiom: &str, w: &[usize], lhs: i64, rhs: i64| Violation {
        axiom: axiom.to_string(),
        witnesses: w.iter().map(|&i| names[i].clone()).collect(),
        lhs,
        rhs,
    };
    for i in 0..n {
        if (big_n[i] == 0) != words[i].is_empty() {
            out.push(v("I", &[i], big_n[i], 0));
        }
        if big_n[inv[i]] != big_n[i] {
            out.push(v("II", &[i], big_n[inv[i]], big_n[i]));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if s[i * n + j] < 0 {
                out.push(v("III", &[i, j], s[i * n + j], 0));
            }
        }
    }
    for g in 0..n {
        let row = &s[g * n..(g + 1) * n];
        for h in 0..n {
            let sgh = row[h];
            let hrow = &s[h * n..(h + 1) * n];
            for l in 0..n {
                if sgh < row[l] && hrow[l] != sgh {
                    out.push(v("IV", &[g, h, l], hrow[l], sgh));
                }
            }
        }
    }
    for g in 0..n {
        for h in 0..n {
            if g == h || big_n[g] != big_n[h] {
                continue;
            }
            let lhs = s[g * n + h] + s[inv[g] * n + inv[h]];
            if lhs > big_n[g] {
                out.push(v("V", &[g, h], lhs, big_n[g]));
            }
        }
    }
    Ok(out)
}

/// Nontrivial words with `N(w²) ≤ N(w)`.
pub fn non_archimedean(max_len: usize) -> Result<Vec<Word>> {
    non_archimedean_capped(max_len, DEFAULT_WORD_CAP)
}

pub fn non_archimedean_capped(max_len: usize, cap: usize) -> Result<Vec<Word>> {
    guard(max_len, cap)?;
    Ok(enumerate_words(max_len)
        .into_iter()
        .filter(|w| !w.is_empty() && crossing_count(&w.mul(w)) <= crossing_count(w))
        .collect())
}
