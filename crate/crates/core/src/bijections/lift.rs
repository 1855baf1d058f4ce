//! Base bijections lifted through the fixed and pixed decompositions.

use super::oracles::{DwBase, WordBase};
use super::BijectionError;
use crate::decomp::{
    fixed_decomposition, positive_permutation, zder, zder_inverse, zdesar, zdesar_inverse,
    PixedDecomposition, ShuffleClassId,
};
use crate::perm::{Permutation, ZeroWord};

/// `DW^loc`: `(FIX τ, Der τ) ↦ (FIX τ, DW(Der τ))`, read back as a pixed
/// decomposition.
pub fn dw_loc(p: &Permutation, base: &DwBase) -> Result<Permutation, BijectionError> {
    let d = fixed_decomposition(p);
    let table = base.table(&d.derangement_part.order())?;
    let image = table.apply(&d.derangement_part)?.clone();
    Ok(PixedDecomposition {
        pix_set: d.fix_set,
        desarrangement_part: image,
    }
    .recompose()?)
}

/// `dw`: zeros stay put and the positive part `v` becomes `DW(v)^{-1}`.
pub fn dw_word(w: &ZeroWord, base: &DwBase) -> Result<ZeroWord, BijectionError> {
    let v = positive_permutation(w)?;
    let table = base.table(&v.order())?;
    let image = table.apply(&v)?.inverse();
    let mut letters = image.word().iter();
    let out = w
        .letters()
        .iter()
        .map(|&x| if x == 0 { 0 } else { *letters.next().unwrap() })
        .collect();
    Ok(ZeroWord::from_letters_unchecked(out))
}

/// `dw` as `ZDesar ∘ DW^loc ∘ ZDer^{-1}`.
pub fn dw_word_by_composition(w: &ZeroWord, base: &DwBase) -> Result<ZeroWord, BijectionError> {
    Ok(zdesar(&dw_loc(&zder_inverse(w)?, base)?))
}

/// The word-level F3 applied within the shuffle class of `w`.
pub fn word_f3(w: &ZeroWord, base: &WordBase) -> Result<ZeroWord, BijectionError> {
    let table = base.table(&ShuffleClassId::of(w))?;
    Ok(table.apply(w)?.clone())
}

/// `F3 = ZDer^{-1} ∘ 𝐅₃ ∘ ZDer`, carrying `(fix, maz, Der)` to `(fix, maf, Der)`.
pub fn f3(p: &Permutation, base: &WordBase) -> Result<Permutation, BijectionError> {
    Ok(zder_inverse(&word_f3(&zder(p), base)?)?)
}

/// `F3′ = ZDesar^{-1} ∘ 𝐅₃ ∘ ZDesar`, carrying `(pix, imaj, Desar)` to
/// `(pix, mag, Desar)`.
pub fn f3_prime(p: &Permutation, base: &WordBase) -> Result<Permutation, BijectionError> {
    Ok(zdesar_inverse(&word_f3(&zdesar(p), base)?)?)
}
