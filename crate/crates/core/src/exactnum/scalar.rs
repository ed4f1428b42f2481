use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, ExactRational, Prime, Valuation};

/// An exact element `mantissa * p^exponent` of the ring `Z[1/p]`.
///
/// Always kept in canonical form: a zero mantissa carries exponent zero, and a
/// non-zero mantissa is not divisible by `p`. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PScalar {
    prime: Prime,
    mantissa: BigInt,
    exponent: i64,
}

impl PScalar {
    pub fn new(prime: Prime, mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mut mantissa = mantissa.into();
        let mut exponent = exponent;
        if mantissa.is_zero() {
            return Self::zero(prime);
        }
        let p = prime.to_bigint();
        loop {
            let (q, r) = mantissa.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            mantissa = q;
            exponent += 1;
        }
        PScalar {
            prime,
            mantissa,
            exponent,
        }
    }

    pub fn zero(prime: Prime) -> Self {
        PScalar {
            prime,
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one(prime: Prime) -> Self {
        Self::from_int(prime, 1)
    }

    pub fn from_int(prime: Prime, value: i64) -> Self {
        Self::new(prime, value, 0)
    }

    /// `p^e`.
    pub fn power(prime: Prime, e: i64) -> Self {
        PScalar {
            prime,
            mantissa: BigInt::one(),
            exponent: e,
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            Valuation::Infinite
        } else {
            Valuation::Finite(self.exponent)
        }
    }

    /// Multiplies by `p^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        PScalar {
            prime: self.prime,
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + shift,
        }
    }

    /// The unique representative of `self + p^level Z_p` lying in `[0, p^level)`.
    pub fn reduce_mod(&self, level: i64) -> Self {
        if self.is_zero() || self.exponent >= level {
            return Self::zero(self.prime);
        }
        let modulus = self.prime.pow_big((level - self.exponent) as u64);
        Self::new(self.prime, self.mantissa.mod_floor(&modulus), self.exponent)
    }

    pub fn to_rational(&self) -> ExactRational {
        let p = self.prime.to_bigint();
        if self.exponent >= 0 {
            ExactRational::from_bigint(&self.mantissa * num_traits::pow(p, self.exponent as usize))
        } else {
            ExactRational::new(
                self.mantissa.clone(),
                num_traits::pow(p, (-self.exponent) as usize),
            )
            .expect("power of a prime is non-zero")
        }
    }

    /// Returns `Some` iff the rational lies in `Z[1/p]`.
    pub fn from_rational(prime: Prime, x: &ExactRational) -> Option<Self> {
        let mut den = x.denom().clone();
        let p = prime.to_bigint();
        let mut e = 0i64;
        while !den.is_one() {
            let (q, r) = den.div_rem(&p);
            if !r.is_zero() {
                return None;
            }
            den = q;
            e -= 1;
        }
        Some(Self::new(prime, x.numer().clone(), e))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.prime.check(other.prime)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        self.prime.check(other.prime)?;
        Ok(Self::new(
            self.prime,
            &self.mantissa * &other.mantissa,
            self.exponent + other.exponent,
        ))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(other.exponent);
        let m = self.aligned(e) + other.aligned(e);
        Self::new(self.prime, m, e)
    }

    /// Mantissa rescaled to exponent `e <= self.exponent`.
    fn aligned(&self, e: i64) -> BigInt {
        debug_assert!(e <= self.exponent || self.is_zero());
        if self.is_zero() {
            return BigInt::zero();
        }
        &self.mantissa * self.prime.pow_big((self.exponent - e) as u64)
    }

    /// Parses `m*p^e` or a bare integer `m`, requiring the stated prime to be `prime`.
    pub fn parse(text: &str, prime: Prime) -> Result<Self, ExactError> {
        let parsed = parse_parts(text)?;
        match parsed {
            (m, None) => Ok(Self::new(prime, m, 0)),
            (m, Some((q, e))) => {
                if q != prime.get() {
                    return Err(ExactError::PrimeMismatch {
                        left: prime.get(),
                        right: q,
                    });
                }
                Ok(Self::new(prime, m, e))
            }
        }
    }
}

fn parse_parts(text: &str) -> Result<(BigInt, Option<(u32, i64)>), ExactError> {
    let bad = || ExactError::Parse(format!("malformed p-adic scalar `{text}`"));
    let text = text.trim();
    match text.split_once('*') {
        None => {
            let m = BigInt::from_str(text).map_err(|_| bad())?;
            Ok((m, None))
        }
        Some((m, rest)) => {
            let m = BigInt::from_str(m.trim()).map_err(|_| bad())?;
            let (q, e) = rest.split_once('^').ok_or_else(bad)?;
            let q: u32 = q.trim().parse().map_err(|_| bad())?;
            let e: i64 = e.trim().parse().map_err(|_| bad())?;
            Ok((m, Some((q, e))))
        }
    }
}

impl FromStr for PScalar {
    type Err = ExactError;

    /// Requires the explicit `m*p^e` form so the prime is known.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse_parts(s)? {
            (_, None) => Err(ExactError::Parse(format!(
                "scalar `{s}` does not name its prime; expected `m*p^e`"
            ))),
            (m, Some((q, e))) => Ok(Self::new(Prime::new(q)?, m, e)),
        }
    }
}

impl fmt::Display for PScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}^{}", self.mantissa, self.prime, self.exponent)
    }
}

impl fmt::Debug for PScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for PScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PartialOrd for PScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric order within one prime; objects over different primes order by prime first.
impl Ord for PScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prime.cmp(&other.prime).then_with(|| {
            let e = self.exponent.min(other.exponent);
            self.aligned(e).cmp(&other.aligned(e))
        })
    }
}

impl Add for &PScalar {
    type Output = PScalar;

    fn add(self, rhs: &PScalar) -> PScalar {
        self.checked_add(rhs)
            .expect("p-adic scalars over different primes")
    }
}

impl Sub for &PScalar {
    type Output = PScalar;

    fn sub(self, rhs: &PScalar) -> PScalar {
        self.checked_add(&-rhs)
            .expect("p-adic scalars over different primes")
    }
}

impl Mul for &PScalar {
    type Output = PScalar;

    fn mul(self, rhs: &PScalar) -> PScalar {
        self.checked_mul(rhs)
            .expect("p-adic scalars over different primes")
    }
}

impl Neg for &PScalar {
    type Output = PScalar;

    fn neg(self) -> PScalar {
        PScalar {
            prime: self.prime,
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for PScalar {
    type Output = PScalar;

    fn neg(self) -> PScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn canonical_form_strips_prime_factors() {
        let x = PScalar::new(p2(), 12, -1);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), 1);
        assert_eq!(PScalar::new(p2(), 0, 5), PScalar::zero(p2()));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(PScalar::zero(p2()).valuation(), Valuation::Infinite);
        assert_eq!(
            PScalar::from_int(p2(), 12).valuation(),
            Valuation::Finite(2)
        );
    }

    #[test]
    fn reduce_mod_gives_least_nonnegative_representative() {
        let p3 = Prime::new(3).unwrap();
        assert_eq!(
            PScalar::from_int(p3, 4).reduce_mod(1),
            PScalar::from_int(p3, 1)
        );
        assert_eq!(
            PScalar::from_int(p2(), -1).reduce_mod(2),
            PScalar::from_int(p2(), 3)
        );
        // -1/2 mod 2^1 = 3/2
        assert_eq!(
            PScalar::new(p2(), -1, -1).reduce_mod(1),
            PScalar::new(p2(), 3, -1)
        );
        assert!(PScalar::from_int(p2(), 8).reduce_mod(3).is_zero());
    }

    #[test]
    fn text_round_trip() {
        let x: PScalar = "3*2^-1".parse().unwrap();
        assert_eq!(x.to_string(), "3*2^-1");
        assert_eq!(PScalar::parse("6", p2()).unwrap().to_string(), "3*2^1");
        assert!(PScalar::parse("3*3^1", p2()).is_err());
        assert!("3".parse::<PScalar>().is_err());
        assert!("3*2^x".parse::<PScalar>().is_err());
    }

    #[test]
    fn rational_membership() {
        let half = ExactRational::new(1.into(), 2.into()).unwrap();
        assert!(PScalar::from_rational(p2(), &half).is_some());
        let third = ExactRational::new(1.into(), 3.into()).unwrap();
        assert!(PScalar::from_rational(p2(), &third).is_none());
    }

    #[test]
    #[should_panic(expected = "different primes")]
    fn mixing_primes_panics() {
        let a = PScalar::one(p2());
        let b = PScalar::one(Prime::new(3).unwrap());
        let _ = &a + &b;
    }
}
