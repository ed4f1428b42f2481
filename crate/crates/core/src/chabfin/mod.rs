//! Finite-group experiments on the space of subgroups.
//!
//! - [`FiniteGroup`] and bitset [`Subgroup`]s, the [`SubgroupLattice`] with
//!   conjugacy classes;
//! - `U`-saturation `[H]_U`, computed both from orbits on `G/U`
//!   ([`saturation_orbit`]) and as `∩_g H gUg^-1` ([`saturation_formula`]);
//! - towers `G_n, U_n` and the truncated saturation maps `λ_n` ([`trunc_saturation`]);
//! - URS's and IRS's of finite groups, and the identification of saturated
//!   measures with measures on `G_n / U_n` ([`saturated_push`]);
//! - the symbolic `Z[1/2] ⋊ {±1}` example ([`dyadic_counterexample`]);
//! - a corpus of all groups of order at most 24 ([`corpus::small_groups`]) and
//!   brute-force oracles ([`oracle`]).
//!
//! For a finite group the subgroup space is discrete, so "URS" and "IRS" here are the
//! degenerate finite readings: conjugacy classes, and measures constant on them.

pub mod corpus;
mod dot;
mod dyadic;
mod group;
mod lattice;
mod measure;
pub mod oracle;
mod saturation;

use thiserror::Error;

use crate::perm::PermError;

pub use dot::lattice_dot;
pub use dyadic::{dyadic_counterexample, Dyadic, DyadicReport, FullRow, SaturatedRow};
pub use group::{FiniteGroup, GroupInput, Subgroup, SubgroupReport, DEFAULT_ORDER_BOUND};
pub use lattice::{subgroup_lattice, SubgroupLattice};
pub use measure::{
    irs_vertices, saturated_pull, saturated_push, urs_list, InvariantMeasure, MeasureAtom,
    MeasureReport, PushResult, Quotient, Urs, UrsKind,
};
pub use saturation::{
    is_saturated, is_saturated_in, left_cosets, orbit_partition, partition_fixer,
    saturation_formula, saturation_formula_in, saturation_orbit, saturation_orbit_in,
    trunc_saturation, Tower,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChabError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("group of order {order} exceeds the bound {bound}")]
    TooLarge { order: usize, bound: usize },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("not normal: {0}")]
    NotNormal(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Precondition(String),
}
