//! Permutations in one-line notation, words with zeros, and the primitive
//! descent/fixed-point statistics.
//!
//! Positions are 1-based throughout: `des_set` of `2 1 3` is `{1}`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("position {position}: cannot parse {token:?} as a non-negative integer")]
    BadToken { position: usize, token: String },
    #[error("position {position}: letter {value} is outside 1..={order}")]
    OutOfRange {
        position: usize,
        value: usize,
        order: usize,
    },
    #[error("position {position}: letter {value} is repeated")]
    Repeated { position: usize, value: usize },
}

/// Splits on whitespace and/or commas. A single token made of two or more
/// digits is read digit by digit (`"182453697"`) when `compact_digits` is set.
fn tokenize(text: &str, compact_digits: bool) -> Result<Vec<usize>, PermError> {
    let tokens: Vec<&str> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .collect();
    if compact_digits && tokens.len() == 1 && tokens[0].len() > 1 {
        let tok = tokens[0];
        return tok
            .chars()
            .enumerate()
            .map(|(i, c)| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or(PermError::BadToken {
                        position: i + 1,
                        token: c.to_string(),
                    })
            })
            .collect();
    }
    tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.parse::<usize>().map_err(|_| PermError::BadToken {
                position: i + 1,
                token: (*t).to_string(),
            })
        })
        .collect()
}

fn write_word(f: &mut fmt::Formatter<'_>, letters: &[usize]) -> fmt::Result {
    for (i, x) in letters.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    word: Vec<usize>,
}

impl Permutation {
    /// Validates that `word` is a rearrangement of `1..=word.len()`.
    pub fn new(word: Vec<usize>) -> Result<Self, PermError> {
        let n = word.len();
        let mut seen = vec![false; n + 1];
        for (i, &x) in word.iter().enumerate() {
            if x == 0 || x > n {
                return Err(PermError::OutOfRange {
                    position: i + 1,
                    value: x,
                    order: n,
                });
            }
            if seen[x] {
                return Err(PermError::Repeated {
                    position: i + 1,
                    value: x,
                });
            }
            seen[x] = true;
        }
        Ok(Permutation { word })
    }

    pub(crate) fn from_word_unchecked(word: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(word.clone()).is_ok());
        Permutation { word }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            word: (1..=n).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn into_word(self) -> Vec<usize> {
        self.word
    }

    /// `σ(i)` for a 1-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.word[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(i, &x)| x == i + 1)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.word.len()];
        for (i, &x) in self.word.iter().enumerate() {
            inv[x - 1] = i + 1;
        }
        Permutation { word: inv }
    }

    pub fn des_set(&self) -> PositionSet {
        des_set(&self.word)
    }

    pub fn des(&self) -> usize {
        des_set(&self.word).len()
    }

    pub fn maj(&self) -> usize {
        maj(&self.word)
    }

    pub fn ides_set(&self) -> PositionSet {
        des_set(&self.inverse().word)
    }

    /// `IDES` read off directly: `i` belongs when `i+1` sits left of `i`.
    pub fn ides_set_by_positions(&self) -> PositionSet {
        let n = self.order();
        let inv = self.inverse();
        let members = (1..n).filter(|&i| inv.at(i + 1) < inv.at(i)).collect();
        PositionSet::from_sorted(members, n)
    }

    pub fn imaj(&self) -> usize {
        self.ides_set().sum()
    }

    pub fn inv(&self) -> usize {
        let w = &self.word;
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn fix_set(&self) -> PositionSet {
        let members = self
            .word
            .iter()
            .enumerate()
            .filter(|&(i, &x)| x == i + 1)
            .map(|(i, _)| i + 1)
            .collect();
        PositionSet::from_sorted(members, self.order())
    }

    pub fn fix(&self) -> usize {
        self.word
            .iter()
            .enumerate()
            .filter(|&(i, &x)| x == i + 1)
            .count()
    }

    /// Lexicographically next permutation of the same order, if any.
    pub fn next_lex(&self) -> Option<Permutation> {
        let mut w = self.word.clone();
        next_permutation(&mut w).then_some(Permutation { word: w })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, &self.word)
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Permutation::new(tokenize(s, true)?)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;

    fn try_from(word: Vec<usize>) -> Result<Self, Self::Error> {
        Permutation::new(word)
    }
}

/// A word over non-negative integers whose nonzero letters are distinct.
/// Zeros may repeat.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZeroWord {
    letters: Vec<usize>,
}

impl ZeroWord {
    pub fn new(letters: Vec<usize>) -> Result<Self, PermError> {
        let mut sorted: Vec<(usize, usize)> = letters
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| (x, i))
            .collect();
        sorted.sort_unstable();
        if let Some(pair) = sorted.windows(2).find(|p| p[0].0 == p[1].0) {
            return Err(PermError::Repeated {
                position: pair[0].1.max(pair[1].1) + 1,
                value: pair[0].0,
            });
        }
        Ok(ZeroWord { letters })
    }

    pub(crate) fn from_letters_unchecked(letters: Vec<usize>) -> Self {
        ZeroWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn des_set(&self) -> PositionSet {
        des_set(&self.letters)
    }

    pub fn maj(&self) -> usize {
        maj(&self.letters)
    }

    /// `Zero w`: positions holding a zero.
    pub fn zero_set(&self) -> PositionSet {
        let members = self
            .letters
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == 0)
            .map(|(i, _)| i + 1)
            .collect();
        PositionSet::from_sorted(members, self.len())
    }

    /// `zero w`.
    pub fn zero_count(&self) -> usize {
        self.letters.iter().filter(|&&x| x == 0).count()
    }

    /// `Pos w`: the subword of positive letters.
    pub fn positive_part(&self) -> Vec<usize> {
        self.letters.iter().copied().filter(|&x| x != 0).collect()
    }
}

impl From<&Permutation> for ZeroWord {
    fn from(p: &Permutation) -> Self {
        ZeroWord {
            letters: p.word.clone(),
        }
    }
}

impl fmt::Display for ZeroWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, &self.letters)
    }
}

impl FromStr for ZeroWord {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ZeroWord::new(tokenize(s, false)?)
    }
}

/// A set of 1-based positions drawn from `1..=universe`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PositionSet {
    members: Vec<usize>,
    universe: usize,
}

impl PositionSet {
    pub fn new(mut members: Vec<usize>, universe: usize) -> Self {
        members.sort_unstable();
        members.dedup();
        assert!(
            members.iter().all(|&i| (1..=universe).contains(&i)),
            "position set {members:?} escapes 1..={universe}"
        );
        PositionSet { members, universe }
    }

    fn from_sorted(members: Vec<usize>, universe: usize) -> Self {
        PositionSet { members, universe }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn sum(&self) -> usize {
        self.members.iter().sum()
    }

    /// `Σ_{i∈S} i − (1 + 2 + ⋯ + |S|)`, the shift term shared by maf, mag
    /// and mafz.
    pub fn excess(&self) -> usize {
        let k = self.members.len();
        self.sum() - k * (k + 1) / 2
    }
}

impl fmt::Display for PositionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// Descent set of an arbitrary word: `{i : 1 ≤ i < n, w_i > w_{i+1}}`.
pub fn des_set(letters: &[usize]) -> PositionSet {
    let members = letters
        .windows(2)
        .enumerate()
        .filter(|(_, p)| p[0] > p[1])
        .map(|(i, _)| i + 1)
        .collect();
    PositionSet::from_sorted(members, letters.len())
}

/// Major index of an arbitrary word.
pub fn maj(letters: &[usize]) -> usize {
    letters
        .windows(2)
        .enumerate()
        .filter(|(_, p)| p[0] > p[1])
        .map(|(i, _)| i + 1)
        .sum()
}

/// Replaces each letter by its rank among the word's letters.
pub fn reduce(letters: &[usize]) -> Result<Permutation, PermError> {
    let mut order: Vec<(usize, usize)> = letters.iter().copied().zip(0..).collect();
    order.sort_unstable();
    let mut word = vec![0; letters.len()];
    for (rank, pair) in order.iter().enumerate() {
        if rank > 0 && order[rank - 1].0 == pair.0 {
            return Err(PermError::Repeated {
                position: pair.1.max(order[rank - 1].1) + 1,
                value: pair.0,
            });
        }
        word[pair.1] = rank + 1;
    }
    Ok(Permutation { word })
}

/// Checks that all letters are distinct; returns the first repeat.
pub fn check_distinct(letters: &[usize]) -> Result<(), PermError> {
    reduce(letters).map(|_| ())
}

/// In-place lexicographic successor. Returns `false` on the last arrangement.
pub fn next_permutation(w: &mut [usize]) -> bool {
    if w.len() < 2 {
        return false;
    }
    let mut i = w.len() - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = w.len() - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

/// Streams `S_n` in lexicographic order. `S_0` yields the empty permutation.
#[derive(Debug, Clone)]
pub struct Permutations {
    current: Option<Vec<usize>>,
}

impl Permutations {
    pub fn new(n: usize) -> Self {
        Permutations {
            current: Some((1..=n).collect()),
        }
    }

    /// The permutations of order `n` whose first letter is `first`, in
    /// lexicographic order. Used to partition `S_n` across workers.
    pub fn starting_with(n: usize, first: usize) -> impl Iterator<Item = Permutation> {
        assert!((1..=n).contains(&first));
        let rest: Vec<usize> = (1..=n).filter(|&x| x != first).collect();
        Permutations::new(n - 1).map(move |tail| {
            let mut word = Vec::with_capacity(n);
            word.push(first);
            word.extend(tail.word().iter().map(|&k| rest[k - 1]));
            Permutation { word }
        })
    }
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let word = self.current.take()?;
        let mut succ = word.clone();
        if next_permutation(&mut succ) {
            self.current = Some(succ);
        }
        Some(Permutation { word })
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// One component of a statistic tuple: an integer, a position set (kept as
/// its sorted member list), or a permutation word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatValue {
    Int(usize),
    Set(Vec<usize>),
    Perm(Vec<usize>),
}

impl From<usize> for StatValue {
    fn from(x: usize) -> Self {
        StatValue::Int(x)
    }
}

impl From<PositionSet> for StatValue {
    fn from(s: PositionSet) -> Self {
        StatValue::Set(s.members)
    }
}

impl From<Permutation> for StatValue {
    fn from(p: Permutation) -> Self {
        StatValue::Perm(p.word)
    }
}

impl fmt::Display for StatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatValue::Int(x) => write!(f, "{x}"),
            StatValue::Set(s) => {
                write!(f, "{}", PositionSet::from_sorted(s.clone(), usize::MAX))
            }
            StatValue::Perm(w) => {
                if w.is_empty() {
                    f.write_str("()")
                } else {
                    f.write_str("(")?;
                    write_word(f, w)?;
                    f.write_str(")")
                }
            }
        }
    }
}
