//! Fixed and pixed decompositions and the statistics built on them.
//!
//! * fixed decomposition: `σ ↦ (FIX σ, Der σ)`, encoded as the word `ZDer(σ)`
//!   with fixed points replaced by `0`;
//! * pixed decomposition: `σ = σ^p σ^d` with `σ^p` increasing and `σ^d` the
//!   longest desarrangement right factor, giving `(PIX σ, Desar σ)` and the
//!   word `ZDesar(σ)`.
//!
//! `maf`, `maz`, `mag`, `mafz` and `DEZ` are the statistics these encodings
//! induce.

use thiserror::Error;

use crate::perm::{self, reduce, PermError, Permutation, Permutations, PositionSet, ZeroWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(
        "{count} marked positions plus a part of order {part_order} do not make order {order}"
    )]
    OrderMismatch {
        order: usize,
        count: usize,
        part_order: usize,
    },
    #[error("derangement part {part} has fixed point {position}")]
    NotADerangement { part: String, position: usize },
    #[error("part {part} is not a desarrangement")]
    NotADesarrangement { part: String },
    #[error("positive part {part} of {word} is not a permutation of 1..={order}")]
    PositiveNotPermutation {
        word: String,
        part: String,
        order: usize,
    },
    #[error("positive part {part} of {word} has fixed point {position}, so it is not ZDer of any permutation")]
    PositiveHasFixedPoint {
        word: String,
        part: String,
        position: usize,
    },
    #[error("inverse of positive part {part} of {word} is not a desarrangement, so it is not ZDesar of any permutation")]
    InverseNotDesarrangement { word: String, part: String },
}

pub fn is_derangement(p: &Permutation) -> bool {
    p.fix() == 0
}

/// True when the initial strictly decreasing run of `word` has even length,
/// with an implicit `+∞` after the last letter. Empty and one-letter words
/// are never desarrangements.
pub fn is_desarrangement(word: &[usize]) -> Result<bool, PermError> {
    perm::check_distinct(word)?;
    Ok(is_desarrangement_distinct(word))
}

fn is_desarrangement_distinct(word: &[usize]) -> bool {
    let run = 1 + word.windows(2).take_while(|p| p[0] > p[1]).count();
    !word.is_empty() && run % 2 == 0
}

/// Member of `K_n`: `PIX` is empty. Agrees with [`is_desarrangement`] for
/// `n ≥ 1`, and admits the empty permutation as the sole member of `K_0`.
pub fn in_desarrangement_class(p: &Permutation) -> bool {
    p.order() == 0 || is_desarrangement_distinct(p.word())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedDecomposition {
    pub fix_set: PositionSet,
    pub derangement_part: Permutation,
}

pub fn fixed_decomposition(p: &Permutation) -> FixedDecomposition {
    let moved: Vec<usize> = p
        .word()
        .iter()
        .enumerate()
        .filter(|&(i, &x)| x != i + 1)
        .map(|(_, &x)| x)
        .collect();
    FixedDecomposition {
        fix_set: p.fix_set(),
        derangement_part: reduce(&moved).expect("letters of a permutation are distinct"),
    }
}

/// Positions of `1..=n` not in `set`, increasing.
fn complement(set: &PositionSet, n: usize) -> Vec<usize> {
    (1..=n).filter(|&i| !set.contains(i)).collect()
}

impl FixedDecomposition {
    pub fn recompose(&self) -> Result<Permutation, DecompError> {
        let n = self.fix_set.universe();
        let m = self.derangement_part.order();
        if self.fix_set.len() + m != n {
            return Err(DecompError::OrderMismatch {
                order: n,
                count: self.fix_set.len(),
                part_order: m,
            });
        }
        if let Some(&position) = self.derangement_part.fix_set().members().first() {
            return Err(DecompError::NotADerangement {
                part: self.derangement_part.to_string(),
                position,
            });
        }
        let moved = complement(&self.fix_set, n);
        let mut word: Vec<usize> = (1..=n).collect();
        for (k, &j) in moved.iter().enumerate() {
            word[j - 1] = moved[self.derangement_part.word()[k] - 1];
        }
        Ok(Permutation::from_word_unchecked(word))
    }
}

pub fn der(p: &Permutation) -> Permutation {
    fixed_decomposition(p).derangement_part
}

/// `ZDer(σ)`: fixed points become `0`, the other letters are reduced in place.
pub fn zder(p: &Permutation) -> ZeroWord {
    let d = fixed_decomposition(p);
    let mut ranks = d.derangement_part.word().iter();
    let letters = p
        .word()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if x == i + 1 {
                0
            } else {
                *ranks.next().unwrap()
            }
        })
        .collect();
    ZeroWord::from_letters_unchecked(letters)
}

/// `Pos w` as a permutation of `1..=m`, or the reason it is not one.
pub(crate) fn positive_permutation(w: &ZeroWord) -> Result<Permutation, DecompError> {
    let pos = w.positive_part();
    let m = pos.len();
    Permutation::new(pos.clone()).map_err(|_| DecompError::PositiveNotPermutation {
        word: w.to_string(),
        part: pos
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" "),
        order: m,
    })
}

pub fn zder_inverse(w: &ZeroWord) -> Result<Permutation, DecompError> {
    let v = positive_permutation(w)?;
    if let Some(&position) = v.fix_set().members().first() {
        return Err(DecompError::PositiveHasFixedPoint {
            word: w.to_string(),
            part: v.to_string(),
            position,
        });
    }
    FixedDecomposition {
        fix_set: w.zero_set(),
        derangement_part: v,
    }
    .recompose()
}

pub fn dez_set(p: &Permutation) -> PositionSet {
    zder(p).des_set()
}

pub fn dez(p: &Permutation) -> usize {
    dez_set(p).len()
}

pub fn maz(p: &Permutation) -> usize {
    zder(p).maj()
}

/// `maf σ = Σ_{i∈FIX} i − Σ_{i≤fix} i + maj Der σ`.
pub fn maf(p: &Permutation) -> usize {
    let d = fixed_decomposition(p);
    d.fix_set.excess() + d.derangement_part.maj()
}

/// `maf` as `Σ_k (i_k − k) + maj Der σ` over the increasing fixed points
/// `i_1 < i_2 < ⋯`.
pub fn maf_by_offsets(p: &Permutation) -> usize {
    let d = fixed_decomposition(p);
    let offsets: usize = d
        .fix_set
        .members()
        .iter()
        .enumerate()
        .map(|(k, &i)| i - (k + 1))
        .sum();
    offsets + d.derangement_part.maj()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixedFactorization {
    pub increasing_prefix: Vec<usize>,
    pub desarrangement_suffix: Vec<usize>,
}

pub fn pixed_factorization(p: &Permutation) -> PixedFactorization {
    let w = p.word();
    let split = (0..w.len())
        .find(|&k| is_desarrangement_distinct(&w[k..]))
        .unwrap_or(w.len());
    debug_assert!(w[..split].windows(2).all(|q| q[0] < q[1]));
    PixedFactorization {
        increasing_prefix: w[..split].to_vec(),
        desarrangement_suffix: w[split..].to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixedDecomposition {
    pub pix_set: PositionSet,
    pub desarrangement_part: Permutation,
}

pub fn pixed_decomposition(p: &Permutation) -> PixedDecomposition {
    let f = pixed_factorization(p);
    PixedDecomposition {
        pix_set: PositionSet::new(f.increasing_prefix, p.order()),
        desarrangement_part: reduce(&f.desarrangement_suffix)
            .expect("letters of a permutation are distinct"),
    }
}

impl PixedDecomposition {
    pub fn recompose(&self) -> Result<Permutation, DecompError> {
        let n = self.pix_set.universe();
        let m = self.desarrangement_part.order();
        if self.pix_set.len() + m != n {
            return Err(DecompError::OrderMismatch {
                order: n,
                count: self.pix_set.len(),
                part_order: m,
            });
        }
        if m > 0 && !is_desarrangement_distinct(self.desarrangement_part.word()) {
            return Err(DecompError::NotADesarrangement {
                part: self.desarrangement_part.to_string(),
            });
        }
        let rest = complement(&self.pix_set, n);
        let mut word = self.pix_set.members().to_vec();
        word.extend(self.desarrangement_part.word().iter().map(|&k| rest[k - 1]));
        Ok(Permutation::from_word_unchecked(word))
    }
}

pub fn pix_set(p: &Permutation) -> PositionSet {
    pixed_decomposition(p).pix_set
}

pub fn pix(p: &Permutation) -> usize {
    pixed_factorization(p).increasing_prefix.len()
}

pub fn desar(p: &Permutation) -> Permutation {
    pixed_decomposition(p).desarrangement_part
}

/// `mag σ = Σ_{i∈PIX} i − Σ_{i≤pix} i + imaj Desar σ`.
pub fn mag(p: &Permutation) -> usize {
    let d = pixed_decomposition(p);
    d.pix_set.excess() + d.desarrangement_part.imaj()
}

/// `ZDesar(σ)`: the shuffle of zeros at the `PIX` positions with the letters
/// of `(Desar σ)^{-1}` elsewhere.
pub fn zdesar(p: &Permutation) -> ZeroWord {
    let d = pixed_decomposition(p);
    let inv = d.desarrangement_part.inverse();
    let mut letters = inv.word().iter();
    let word = (1..=p.order())
        .map(|i| {
            if d.pix_set.contains(i) {
                0
            } else {
                *letters.next().unwrap()
            }
        })
        .collect();
    ZeroWord::from_letters_unchecked(word)
}

/// `ZDesar(σ)` via `x_i = σ^{-1}(i) − pix σ` off `PIX σ`.
pub fn zdesar_by_inverse(p: &Permutation) -> ZeroWord {
    let f = pixed_factorization(p);
    let pix = f.increasing_prefix.len();
    let inv = p.inverse();
    let word = (1..=p.order())
        .map(|i| {
            if f.increasing_prefix.contains(&i) {
                0
            } else {
                inv.at(i) - pix
            }
        })
        .collect();
    ZeroWord::from_letters_unchecked(word)
}

pub fn zdesar_inverse(w: &ZeroWord) -> Result<Permutation, DecompError> {
    let v = positive_permutation(w)?;
    let desar = v.inverse();
    if !in_desarrangement_class(&desar) {
        return Err(DecompError::InverseNotDesarrangement {
            word: w.to_string(),
            part: v.to_string(),
        });
    }
    PixedDecomposition {
        pix_set: w.zero_set(),
        desarrangement_part: desar,
    }
    .recompose()
}

/// `mafz w = Σ_{i∈Zero w} i − Σ_{i≤zero w} i + maj Pos w`.
pub fn mafz(w: &ZeroWord) -> usize {
    w.zero_set().excess() + perm::maj(&w.positive_part())
}

/// Identifies `Sh(0^{n−m} v)`: all words of length `n` whose positive subword
/// is `v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShuffleClassId {
    pub total_length: usize,
    pub positive_word: Vec<usize>,
}

impl ShuffleClassId {
    pub fn new(total_length: usize, positive_word: Vec<usize>) -> Result<Self, DecompError> {
        perm::check_distinct(&positive_word)?;
        if let Some(i) = positive_word.iter().position(|&x| x == 0) {
            return Err(PermError::OutOfRange {
                position: i + 1,
                value: 0,
                order: positive_word.len(),
            }
            .into());
        }
        if positive_word.len() > total_length {
            return Err(DecompError::OrderMismatch {
                order: total_length,
                count: 0,
                part_order: positive_word.len(),
            });
        }
        Ok(ShuffleClassId {
            total_length,
            positive_word,
        })
    }

    pub fn of(w: &ZeroWord) -> Self {
        ShuffleClassId {
            total_length: w.len(),
            positive_word: w.positive_part(),
        }
    }

    pub fn zeros(&self) -> usize {
        self.total_length - self.positive_word.len()
    }

    /// Members in lexicographic order of their zero-position sets.
    pub fn members(&self) -> ShuffleClass {
        let k = self.zeros();
        ShuffleClass {
            id: self.clone(),
            zeros: Some((1..=k).collect()),
        }
    }
}

impl std::fmt::Display for ShuffleClassId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Sh(0^{}", self.zeros())?;
        for x in &self.positive_word {
            write!(f, " {x}")?;
        }
        f.write_str(")")
    }
}

/// Streaming iterator over a shuffle class.
#[derive(Debug, Clone)]
pub struct ShuffleClass {
    id: ShuffleClassId,
    zeros: Option<Vec<usize>>,
}

impl Iterator for ShuffleClass {
    type Item = ZeroWord;

    fn next(&mut self) -> Option<ZeroWord> {
        let zeros = self.zeros.take()?;
        let n = self.id.total_length;
        let mut pos = self.id.positive_word.iter();
        let mut z = zeros.iter().peekable();
        let word = (1..=n)
            .map(|i| {
                if z.peek() == Some(&&i) {
                    z.next();
                    0
                } else {
                    *pos.next().unwrap()
                }
            })
            .collect();
        self.zeros = next_combination(zeros, n);
        Some(ZeroWord::from_letters_unchecked(word))
    }
}

/// Lexicographic successor of a k-subset of `1..=n` held as a sorted list.
fn next_combination(mut c: Vec<usize>, n: usize) -> Option<Vec<usize>> {
    let k = c.len();
    let i = (0..k).rev().find(|&i| c[i] < n - (k - 1 - i))?;
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    Some(c)
}

pub fn shuffle_class(id: &ShuffleClassId) -> ShuffleClass {
    id.members()
}

/// `D_n` in lexicographic order.
pub fn enumerate_derangements(n: usize) -> impl Iterator<Item = Permutation> {
    Permutations::new(n).filter(is_derangement)
}

/// `K_n` in lexicographic order.
pub fn enumerate_desarrangements(n: usize) -> impl Iterator<Item = Permutation> {
    Permutations::new(n).filter(in_desarrangement_class)
}

/// Every shuffle class making up `S_n^Der`: `v` ranges over `D_m`, `m ≤ n`.
pub fn derangement_word_classes(n: usize) -> impl Iterator<Item = ShuffleClassId> {
    (0..=n).flat_map(move |m| {
        enumerate_derangements(m).map(move |v| ShuffleClassId {
            total_length: n,
            positive_word: v.into_word(),
        })
    })
}

/// Every shuffle class making up `S_n^Desar`: `v^{-1}` ranges over `K_m`.
pub fn desarrangement_word_classes(n: usize) -> impl Iterator<Item = ShuffleClassId> {
    (0..=n).flat_map(move |m| {
        enumerate_desarrangements(m).map(move |k| ShuffleClassId {
            total_length: n,
            positive_word: k.inverse().into_word(),
        })
    })
}
