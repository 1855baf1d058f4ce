//! The second fundamental transformation and the variants built from it.

use crate::decomp::{pixed_decomposition, PixedDecomposition};
use crate::perm::Permutation;

/// Second fundamental transformation: `inv F2(σ) = maj σ`, `IDES` preserved.
///
/// Letters are inserted left to right into an image word `v`. Before
/// appending `a`, `v` is cut into blocks: when the last letter of `v` is
/// smaller than `a`, each block ends at a letter smaller than `a` and its
/// other letters are larger; otherwise the roles swap. Every block is then
/// rotated one step to the right.
pub fn f2(p: &Permutation) -> Permutation {
    let mut v: Vec<usize> = Vec::with_capacity(p.order());
    for &a in p.word() {
        if let Some(&last) = v.last() {
            let cut_at_small = last < a;
            let mut rotated = Vec::with_capacity(v.len() + 1);
            let mut start = 0;
            for i in 0..v.len() {
                if (v[i] < a) == cut_at_small {
                    rotated.push(v[i]);
                    rotated.extend_from_slice(&v[start..i]);
                    start = i + 1;
                }
            }
            debug_assert_eq!(start, v.len());
            v = rotated;
        }
        v.push(a);
    }
    Permutation::from_word_unchecked(v)
}

/// `i ∘ F2 ∘ i`: `inv F2′(σ) = imaj σ`, `DES` preserved.
pub fn f2_prime(p: &Permutation) -> Permutation {
    f2(&p.inverse()).inverse()
}

/// Applies [`f2_prime`] to the desarrangement part and keeps `PIX`.
pub fn f2_loc(p: &Permutation) -> Permutation {
    let d = pixed_decomposition(p);
    PixedDecomposition {
        pix_set: d.pix_set,
        desarrangement_part: f2_prime(&d.desarrangement_part),
    }
    .recompose()
    .expect("F2' preserves DES, hence desarrangements")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{mag, pix, pix_set};
    use crate::perm::Permutations;
    use std::collections::BTreeSet;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    /// All members of S_n with the given inv and IDES.
    fn by_inv_and_ides(n: usize, inv: usize, ides: &[usize]) -> Vec<Permutation> {
        Permutations::new(n)
            .filter(|q| q.inv() == inv && q.ides_set().members() == ides)
            .collect()
    }

    #[test]
    fn f2_examples() {
        assert_eq!(f2(&p("132")), p("312"));
        assert_eq!(f2(&Permutation::identity(5)), Permutation::identity(5));
        // 231 is the only member of S_3 with inv 2 and IDES {1}
        assert_eq!(by_inv_and_ides(3, 2, &[1]), vec![p("231")]);
        assert_eq!(f2(&p("231")), p("231"));
        assert_eq!(f2(&Permutation::identity(0)).order(), 0);
    }

    #[test]
    fn f2_prime_examples() {
        assert_eq!(f2_prime(&p("213")), p("213"));
        assert_eq!(f2_prime(&p("312")), p("312"));
        assert_eq!(p("312").imaj(), 2);
        assert_eq!(
            f2_prime(&Permutation::identity(4)),
            Permutation::identity(4)
        );
    }

    #[test]
    fn f2_loc_examples() {
        assert_eq!(f2_loc(&p("132")), p("132"));
        assert_eq!(f2_loc(&p("213")), p("213"));
        assert_eq!(f2_loc(&Permutation::identity(6)), Permutation::identity(6));
    }

    #[test]
    fn transport_properties_exhaustive() {
        for n in 0..=7 {
            let mut images = BTreeSet::new();
            for s in Permutations::new(n) {
                let r = f2(&s);
                assert_eq!(r.inv(), s.maj(), "{s}");
                assert_eq!(r.ides_set(), s.ides_set(), "{s}");
                images.insert(r);

                let r = f2_prime(&s);
                assert_eq!(r.inv(), s.imaj());
                assert_eq!(r.des_set(), s.des_set());
                assert_eq!(pix(&r), pix(&s));

                let r = f2_loc(&s);
                assert_eq!(pix_set(&r), pix_set(&s));
                assert_eq!(r.inv(), mag(&s));
            }
            assert_eq!(images.len() as u64, crate::perm::factorial(n));
        }
    }
}
