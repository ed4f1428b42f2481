//! Exact computational models of locally compact groups without non-trivial
//! invariant or uniformly recurrent random subgroups.
//!
//! * [`exactnum`]: `Z[1/p]`, rationals, p-adic valuations and clopen balls of `Q_p`.
//! * [`plgroup`]: piecewise-affine homeomorphisms of `Q_p`, the groups they form and
//!   the non-discrete groups `G_F` built from annulus families.
//! * [`blockperm`]: permutation groups of `Z` prescribed on blocks.
//! * [`chabfin`]: subgroup lattices, saturation and trunc-saturation maps, and
//!   invariant measures for finite groups, plus the dyadic counterexample.

pub mod blockperm;
pub mod chabfin;
pub mod exactnum;
pub mod perm;
pub mod plgroup;
pub mod sample;
pub mod tail;
