//! Piecewise-affine homeomorphisms of `Q_p` and the groups built from them.
//!
//! - [`PLMap`]: compactly supported maps acting on finitely many balls by
//!   `x ↦ p^m x + b`, held in a canonical form so that equality is structural.
//! - membership in `Γ_p`, `Λ_p` and the Higman–Thompson group `V_p`, fixed points
//!   and supports ([`analysis`]).
//! - words over generator tables, including the built-in `Λ_p` generators ([`word`]).
//! - families `F_n` of finite groups acting on the annuli `X_n` ([`family`]) and
//!   the non-discrete groups `G_F` they define ([`gf`]).

pub mod analysis;
pub mod family;
pub mod gf;
mod map;
pub mod word;

use thiserror::Error;

use crate::exactnum::ExactError;
use crate::perm::PermError;

pub use analysis::{
    fixed_points, germ_trivial_at, in_gamma_p, in_lambda_p, in_vp, support, FixedPoints, Support,
};
pub use family::{make_alt_family, EventualRule, FamilyEntry, FamilySpec};
pub use gf::{gf_membership, GfCandidate, GfElement, NeighborhoodLevel, Truncation};
pub use map::{max_pieces, AffineLaw, AffinePiece, PLMap, DEFAULT_MAX_PIECES};
pub use word::{
    evaluate_word, evaluate_word_at, index_of_word, parse_numbered_words, parse_words,
    GeneratorTable, Word, ALPHA,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("piece list is not a bijection: {0}")]
    NotBijective(String),
    #[error("{0}")]
    Precondition(String),
    #[error("composition needs more than {0} pieces (raise CHABLAB_MAX_PIECES to allow more)")]
    PieceCeiling(usize),
    #[error("line {line}: malformed token `{token}`")]
    WordSyntax { line: usize, token: String },
    #[error("line {line}: unknown generator `{name}`")]
    UnknownGenerator { line: usize, name: String },
    #[error("invalid family: {0}")]
    Family(String),
    #[error("F_{index} has more than {bound} elements")]
    FamilyTooLarge { index: u64, bound: usize },
    #[error("not an element of G_F: {0}")]
    NotMember(String),
}
