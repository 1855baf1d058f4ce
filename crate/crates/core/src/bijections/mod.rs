//! Bijections on `S_n` and on words with zeros.
//!
//! [`f2`] and its conjugates are constructed outright. DW, Φ, CHZ and the
//! word-level F3 are realized by [`matched_oracle`] unless a literal table is
//! registered as a plug-in; [`lift`] carries them through the fixed and
//! pixed decompositions.

mod f2;
mod lift;
mod oracles;
mod table;

use thiserror::Error;

use crate::decomp::DecompError;
use crate::perm::PermError;

pub use f2::{f2, f2_loc, f2_prime};
pub use lift::{dw_loc, dw_word, dw_word_by_composition, f3, f3_prime, word_f3};
pub use oracles::{
    chz_oracle, chz_spec, dw_oracle, dw_spec, import_table, matched_dw_base, matched_word_base,
    phi_oracle, phi_spec, register_dw_table, register_word_table, validate_chz_table,
    validate_dw_table, validate_phi_table, validate_word_table, word_f3_oracle, word_f3_spec,
    DwBase, LoadedTable, StatKey, TableKind, WordBase,
};
pub use table::{matched_oracle, BijectionTable, StatTransportSpec, TableFamily};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BijectionError {
    #[error("fiber {key} has {domain} element(s) in the domain but {codomain} in the codomain")]
    FiberMismatch {
        key: String,
        domain: usize,
        codomain: usize,
    },
    #[error("{element} is not in the domain of {tag}")]
    NotInDomain { element: String, tag: String },
    #[error("table for {tag} is not a bijection: {detail}")]
    NotBijective { tag: String, detail: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{element} -> {image}: {detail}")]
    TransportViolation {
        element: String,
        image: String,
        detail: String,
    },
    #[error("table for {tag} covers {found} of {expected} elements: {detail}")]
    Incomplete {
        tag: String,
        expected: usize,
        found: usize,
        detail: String,
    },
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Perm(#[from] PermError),
}
