//! Exact arithmetic in `Z[1/p]` and `Q`, p-adic valuations, and clopen balls of `Q_p`.
//!
//! Every object carries its prime; combining objects over different primes is
//! an error (checked operations) or a panic (operator overloads).

mod ball;
mod rational;
mod scalar;

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use ball::find_overlap;
pub use ball::{annulus, Ball, BallRelation, CompactOpen};
pub use rational::ExactRational;
pub use scalar::PScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("objects over different primes ({left} and {right}) cannot be combined")]
    PrimeMismatch { left: u32, right: u32 },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{0}")]
    Parse(String),
    #[error("balls {0} and {1} overlap")]
    Overlap(String, String),
}

/// A prime number `p`, the residue characteristic of every object built on it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self, ExactError> {
        if p < 2
            || (2..)
                .take_while(|d| d * d <= p)
                .any(|d| p.is_multiple_of(d))
        {
            return Err(ExactError::NotPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn pow_big(self, e: u64) -> BigInt {
        num_traits::pow(self.to_bigint(), e as usize)
    }

    pub(crate) fn check(self, other: Prime) -> Result<(), ExactError> {
        if self == other {
            Ok(())
        } else {
            Err(ExactError::PrimeMismatch {
                left: self.0,
                right: other.0,
            })
        }
    }
}

impl TryFrom<u32> for Prime {
    type Error = ExactError;

    fn try_from(p: u32) -> Result<Self, Self::Error> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}", self.0)
    }
}

/// A p-adic valuation; `Infinite` is the valuation of zero and exceeds every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// `v_p(x)` of a rational.
pub fn vp(prime: Prime, x: &ExactRational) -> Valuation {
    x.valuation(prime)
}
