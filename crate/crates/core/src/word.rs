//! Words over the alphabet `{1, …, d}` and the shuffle Hopf algebra on them.
//!
//! Words are ordered by length first and lexicographically within a length
//! (letter `1 < 2 < … < d`). That order is the flattening order of
//! [`TruncatedTensor`] coefficients, so the `i`-th word returned by
//! [`enumerate_words`] indexes the `i`-th flat coefficient.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{count_entries, entry_cap, TruncatedTensor};

/// A finite string of letters, each `≥ 1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    /// The empty word `∅`.
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, rejecting the letter `0`.
    pub fn new(letters: impl Into<Vec<usize>>) -> Result<Self> {
        let letters = letters.into();
        if let Some(&bad) = letters.iter().find(|&&a| a == 0) {
            return Err(Error::LetterOutOfRange { letter: bad, d: 0 });
        }
        Ok(Word(letters))
    }

    /// Builds a word and checks every letter lies in `1..=d`.
    pub fn over(letters: impl Into<Vec<usize>>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let w = Word::new(letters)?;
        w.check_alphabet(d)?;
        Ok(w)
    }

    /// Single-letter word.
    pub fn letter(a: usize) -> Result<Self> {
        Word::new(vec![a])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_alphabet(&self, d: usize) -> Result<()> {
        match self.0.iter().find(|&&a| a > d) {
            Some(&letter) => Err(Error::LetterOutOfRange { letter, d }),
            None => Ok(()),
        }
    }

    /// Position of this word inside its tensor level: `Σ (aᵢ−1)·d^{k−i}`.
    pub fn index(&self, d: usize) -> usize {
        self.0.iter().fold(0, |acc, &a| acc * d + (a - 1))
    }

    /// Inverse of [`Word::index`] for words of length `len`.
    pub fn from_index(len: usize, mut index: usize, d: usize) -> Self {
        let mut letters = vec![0; len];
        for slot in letters.iter_mut().rev() {
            *slot = index % d + 1;
            index /= d;
        }
        Word(letters)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        let sep = if self.0.iter().any(|&a| a > 9) {
            ","
        } else {
            ""
        };
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

/// Integer linear combination of words. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct WordPoly {
    terms: BTreeMap<Word, i64>,
}

impl WordPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_word(w: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(w, 1);
        p
    }

    pub fn add_term(&mut self, w: Word, coeff: i64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, w: &Word) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    /// Terms in (length, lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of all coefficients.
    pub fn mass(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Bilinear extension of the shuffle product.
    pub fn shuffle(&self, other: &WordPoly) -> WordPoly {
        let mut out = WordPoly::zero();
        for (u, cu) in self.terms() {
            for (v, cv) in other.terms() {
                for (w, c) in shuffle(u, v).terms() {
                    out.add_term(w.clone(), cu * cv * c);
                }
            }
        }
        out
    }

    /// Linear extension of [`antipode`].
    pub fn antipode(&self) -> WordPoly {
        let mut out = WordPoly::zero();
        for (w, c) in self.terms() {
            let (sign, r) = antipode(w);
            out.add_term(r, i64::from(sign) * c);
        }
        out
    }
}

impl fmt::Debug for WordPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                if *c == 1 {
                    format!("{w}")
                } else {
                    format!("{c}·{w}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl From<Word> for WordPoly {
    fn from(w: Word) -> Self {
        WordPoly::from_word(w)
    }
}

/// Shuffle product of two words, via the recursion
/// `(au) ⧢ (bw) = a(u ⧢ bw) + b(au ⧢ w)`, memoised over suffix pairs.
pub fn shuffle(u: &Word, v: &Word) -> WordPoly {
    let mut memo: HashMap<(usize, usize), HashMap<Vec<usize>, i64>> = HashMap::new();
    let terms = shuffle_suffixes(u.letters(), v.letters(), 0, 0, &mut memo);
    let mut out = WordPoly::zero();
    for (letters, c) in terms {
        out.add_term(Word(letters), c);
    }
    out
}

fn shuffle_suffixes(
    u: &[usize],
    v: &[usize],
    i: usize,
    j: usize,
    memo: &mut HashMap<(usize, usize), HashMap<Vec<usize>, i64>>,
) -> HashMap<Vec<usize>, i64> {
    if i == u.len() {
        return HashMap::from([(v[j..].to_vec(), 1)]);
    }
    if j == v.len() {
        return HashMap::from([(u[i..].to_vec(), 1)]);
    }
    if let Some(hit) = memo.get(&(i, j)) {
        return hit.clone();
    }
    let mut out: HashMap<Vec<usize>, i64> = HashMap::new();
    for (head, rest) in [
        (u[i], shuffle_suffixes(u, v, i + 1, j, memo)),
        (v[j], shuffle_suffixes(u, v, i, j + 1, memo)),
    ] {
        for (tail, c) in rest {
            let mut w = Vec::with_capacity(tail.len() + 1);
            w.push(head);
            w.extend(tail);
            *out.entry(w).or_insert(0) += c;
        }
    }
    memo.insert((i, j), out.clone());
    out
}

/// Deconcatenation coproduct: all `|w|+1` splittings `(prefix, suffix)`.
pub fn deconcat(w: &Word) -> Vec<(Word, Word)> {
    (0..=w.len())
        .map(|i| (Word(w.0[..i].to_vec()), Word(w.0[i..].to_vec())))
        .collect()
}

/// Antipode `S(a₁⋯aₙ) = (−1)ⁿ aₙ⋯a₁`, returned as `(sign, reversed word)`.
pub fn antipode(w: &Word) -> (i8, Word) {
    let sign = if w.len().is_multiple_of(2) { 1 } else { -1 };
    (sign, w.reversed())
}

/// All words of length `≤ max_len` over `{1..d}` in canonical order, using
/// the default entry cap.
pub fn enumerate_words(d: usize, max_len: usize) -> Result<Vec<Word>> {
    enumerate_words_with_cap(d, max_len, entry_cap())
}

pub fn enumerate_words_with_cap(d: usize, max_len: usize, cap: usize) -> Result<Vec<Word>> {
    let total = count_entries(d, max_len, cap, "word enumeration")?;
    let mut out = Vec::with_capacity(total);
    for len in 0..=max_len {
        let count = d.pow(len as u32);
        out.extend((0..count).map(|i| Word::from_index(len, i, d)));
    }
    Ok(out)
}

/// Words of length exactly `len` in lexicographic order.
pub fn words_of_length(d: usize, len: usize) -> impl Iterator<Item = Word> {
    (0..d.pow(len as u32)).map(move |i| Word::from_index(len, i, d))
}

/// Coefficient of `e_{a₁}⊗…⊗e_{a_k}` in level `|w|` of `x`.
pub fn pair<S: Scalar>(x: &TruncatedTensor<S>, w: &Word) -> Result<S> {
    if w.len() > x.depth() {
        return Err(Error::DepthExceeded {
            requested: w.len(),
            depth: x.depth(),
        });
    }
    w.check_alphabet(x.d())?;
    Ok(x.level(w.len())[w.index(x.d())].clone())
}

/// Linear extension of [`pair`].
pub fn pair_poly<S: Scalar>(x: &TruncatedTensor<S>, p: &WordPoly) -> Result<S> {
    let mut acc = S::zero();
    for (w, c) in p.terms() {
        acc += pair(x, w)? * S::from_count(c.unsigned_abs() as usize) * sign_of::<S>(c);
    }
    Ok(acc)
}

fn sign_of<S: Scalar>(c: i64) -> S {
    if c < 0 {
        -S::one()
    } else {
        S::one()
    }
}
