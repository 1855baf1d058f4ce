//! Exact toolkit for fix-Mahonian permutation statistics.
//!
//! * [`perm`]: permutations, words with zeros, descent/fixed-point statistics;
//! * [`decomp`]: fixed and pixed decompositions and the statistics
//!   `maf`, `maz`, `mag`, `mafz`, `DEZ` they induce;
//! * [`bijections`]: the second fundamental transformation and its variants,
//!   lifted chains through the decompositions, and fiber-matched oracles for
//!   bijections known only through their transport properties;
//! * [`qseries`]: exact polynomial and truncated power-series arithmetic for
//!   the factorial generating functions of `(fix, des, maj)`;
//! * [`verifier`]: exhaustive distribution and pointwise checks.

pub mod bijections;
pub mod decomp;
pub mod perm;
pub mod qseries;
pub mod verifier;

pub use decomp::ShuffleClassId;
pub use perm::{Permutation, Permutations, PositionSet, StatValue, ZeroWord};
