//! Locally elliptic permutation groups of `Z` built from a block decomposition.
//!
//! `Z_{>=0}` is cut into consecutive blocks `[k_n, k_{n+1})` and each block carries
//! a finite group `D_n` of even permutations. The group `G` is generated by the
//! finitary alternating group `alt_f(Z)` and the product `∏ D_n`; elements are a
//! finitary window permutation times a tail `(d_n)`. See [`BlockPermElement`].

mod check;
mod element;
mod family;

use thiserror::Error;

use crate::perm::PermError;

pub use crate::plgroup::EventualRule;
pub use check::{splitting_check, splitting_generators, SplittingReport};
pub use element::{parity_correction_search, BlockCandidate, BlockPermElement, Finitary};
pub use family::{BlockEntry, BlockFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("invalid block family: {0}")]
    Family(String),
    #[error("D_{index} has more than {bound} elements")]
    TooLarge { index: u64, bound: usize },
    #[error("not representable: {0}")]
    NotRepresentable(String),
    #[error("{0}")]
    Precondition(String),
}
