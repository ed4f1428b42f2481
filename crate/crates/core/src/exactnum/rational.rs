use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, Prime, Valuation};

/// An arbitrary rational number in lowest terms with positive denominator.
///
/// Used for points of `Q_p` that need not lie in `Z[1/p]`, e.g. the fixed
/// point `b / (1 - p^m)` of an affine law.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self, ExactError> {
        if denom.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(ExactRational(BigRational::new(numer, denom)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        ExactRational(BigRational::from_integer(n))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_bigint(n.into())
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn valuation(&self, prime: Prime) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinite;
        }
        Valuation::Finite(int_valuation(self.numer(), prime) - int_valuation(self.denom(), prime))
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(ExactRational(self.0.recip()))
        }
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }
}

/// `v_p(n)` for non-zero `n`.
pub(crate) fn int_valuation(n: &BigInt, prime: Prime) -> i64 {
    debug_assert!(!n.is_zero());
    let p = prime.to_bigint();
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for ExactRational {
    type Err = ExactError;

    /// Accepts `a` or `a/b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(format!("malformed rational `{s}`"));
        match s.trim().split_once('/') {
            None => Ok(Self::from_bigint(
                BigInt::from_str(s.trim()).map_err(|_| bad())?,
            )),
            Some((a, b)) => {
                let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
                let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
                Self::new(a, b)
            }
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &ExactRational {
            type Output = ExactRational;

            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }

        impl $trait for ExactRational {
            type Output = ExactRational;

            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for &ExactRational {
    type Output = ExactRational;

    /// Panics on division by zero.
    fn div(self, rhs: &ExactRational) -> ExactRational {
        assert!(!rhs.is_zero(), "division by zero");
        ExactRational(&self.0 / &rhs.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;

    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}
