//! Random inputs for experiments: words, rationals, and points of balls.
//!
//! Everything is driven by a caller-supplied RNG, so a fixed seed reproduces a run.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;

use crate::exactnum::{Ball, ExactRational, PScalar, Prime};
use crate::perm::Perm;
use crate::plgroup::{evaluate_word, FamilySpec, GeneratorTable, GfElement, PlError, Word};
use crate::tail::Tail;

/// A word of length `0..=max_len` over `names`, with exponents `±1` or `±2`.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, names: &[&str], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| {
            let name = names[rng.gen_range(0..names.len())];
            let exp = *[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap();
            (name.to_string(), exp)
        })
        .collect();
    Word::new(letters)
}

/// A rational of mixed shape: moderate numerator, denominator a power of `p` times a
/// small integer, so that both `Z[1/p]` points and points with infinite p-adic
/// expansions are drawn.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, prime: Prime) -> ExactRational {
    let numer = rng.gen_range(-(1i64 << 20)..=(1 << 20));
    let e = rng.gen_range(0..6u32);
    let d = if rng.gen_bool(0.5) {
        1
    } else {
        rng.gen_range(1..60i64)
    };
    let denom = BigInt::from(prime.get()).pow(e) * d;
    ExactRational::new(BigInt::from(numer), denom).expect("non-zero denominator")
}

/// A p-adic integer `a/b` with `p ∤ b`.
pub fn random_unit_ball_point<R: Rng + ?Sized>(rng: &mut R, prime: Prime) -> ExactRational {
    let p = prime.get() as i64;
    let numer = rng.gen_range(-(1i64 << 24)..=(1 << 24));
    let mut denom = rng.gen_range(1..200i64);
    while denom % p == 0 {
        denom += 1;
    }
    ExactRational::new(BigInt::from(numer), BigInt::from(denom)).expect("non-zero denominator")
}

/// A random point of `ball`.
pub fn random_point_in<R: Rng + ?Sized>(rng: &mut R, ball: &Ball) -> ExactRational {
    let p = ball.prime();
    let u = random_unit_ball_point(rng, p);
    let scale = PScalar::power(p, ball.level()).to_rational();
    &ball.residue().to_rational() + &(&scale * &u)
}

/// A tail in `∏_{n >= from} F_n`, trivial below `from`: eventually periodic with a
/// random pattern, random entries up to the family's stable range, and a few
/// random exceptions beyond it.
pub fn random_tail<R: Rng + ?Sized>(
    rng: &mut R,
    family: &FamilySpec,
    from: u64,
) -> Result<Tail, PlError> {
    let len = family.period() * rng.gen_range(1..=3u64);
    let stable = family.stable_from();
    let pick = |rng: &mut R, n: u64| -> Result<Perm, PlError> {
        let group = family.group(n)?;
        Ok(group[rng.gen_range(0..group.len())].clone())
    };
    // pattern slot i serves every n ≡ i (mod len) past the stable range
    let pattern = (0..len)
        .map(|i| pick(rng, i + len * stable))
        .collect::<Result<Vec<_>, _>>()?;
    let mut tail = Tail::periodic(pattern);
    let explicit_until = from.max(stable) + len;
    for n in 0..explicit_until {
        let perm = if n < from {
            Perm::identity(family.ball_count(n))
        } else {
            pick(rng, n)?
        };
        tail = tail.with_exception(n, perm);
    }
    for _ in 0..rng.gen_range(0..3) {
        let n = explicit_until + rng.gen_range(0..6);
        tail = tail.with_exception(n, pick(rng, n)?);
    }
    Ok(tail)
}

/// A random element of `U_n`: identity on `p^{-n} Z_p`, random in `F_k` for `k >= n`.
pub fn random_neighborhood_element<R: Rng + ?Sized>(
    rng: &mut R,
    family: &Arc<FamilySpec>,
    n: u64,
) -> Result<GfElement, PlError> {
    GfElement::from_tail(family.clone(), random_tail(rng, family, n)?)
}

/// A random element of `G_F`: a `Λ_p` word of length `<= max_len` on `Z_p` followed
/// by a random tail.
pub fn random_gf_element<R: Rng + ?Sized>(
    rng: &mut R,
    family: &Arc<FamilySpec>,
    max_len: usize,
) -> Result<GfElement, PlError> {
    let table = GeneratorTable::lambda(family.prime());
    let head = evaluate_word(&table, &random_word(rng, &["s", "t", "a"], max_len))?;
    let head = GfElement::from_plmap(family.clone(), head)?;
    head.compose(&GfElement::from_tail(
        family.clone(),
        random_tail(rng, family, 0)?,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn points_land_in_their_ball() {
        let p = Prime::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ball = Ball::new(&PScalar::new(p, 5, -2), 3);
        for _ in 0..200 {
            assert!(ball.contains(&random_point_in(&mut rng, &ball)));
        }
        let w = random_word(&mut rng, &["s", "t"], 5);
        assert!(w.len() <= 5);
        let mut again = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            random_point_in(&mut again, &ball);
        }
        assert_eq!(random_word(&mut again, &["s", "t"], 5), w);
    }

    #[test]
    fn random_group_elements_are_members() {
        use crate::plgroup::{make_alt_family, EventualRule};
        let p = Prime::new(2).unwrap();
        let family =
            Arc::new(make_alt_family(p, &[2, 3], EventualRule::Periodic { period: 2 }).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 0..6 {
            let u = random_neighborhood_element(&mut rng, &family, n).unwrap();
            assert!(u.neighborhood_member(n).unwrap());
            let g = random_gf_element(&mut rng, &family, 5).unwrap();
            assert!(g.compose(&g.invert()).unwrap().is_identity());
        }
    }
}
