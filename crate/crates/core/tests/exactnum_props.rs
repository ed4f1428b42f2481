use chablab_core::exactnum::{annulus, Ball, ExactRational, PScalar, Prime};
use num_bigint::BigInt;
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = Prime> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(7)].prop_map(|p| Prime::new(p).unwrap())
}

fn scalar(p: Prime) -> impl Strategy<Value = PScalar> {
    (-10_000i64..10_000, -6i64..6).prop_map(move |(m, e)| PScalar::new(p, m, e))
}

fn rational() -> impl Strategy<Value = ExactRational> {
    (-100_000i64..100_000, 1i64..2_000)
        .prop_map(|(n, d)| ExactRational::new(BigInt::from(n), BigInt::from(d)).unwrap())
}

proptest! {
    #[test]
    fn ring_laws((p, a, b, c) in prime().prop_flat_map(|p| (Just(p), scalar(p), scalar(p), scalar(p)))) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        // Canonical form is stable under a round trip through text and rationals.
        prop_assert_eq!(PScalar::parse(&a.to_string(), p).unwrap(), a.clone());
        prop_assert_eq!(PScalar::from_rational(p, &a.to_rational()).unwrap(), a.clone());
        prop_assert_eq!(PScalar::new(p, a.mantissa().clone() * BigInt::from(p.get()), a.exponent() - 1), a);
    }

    #[test]
    fn children_partition_their_parent(
        (p, r, level) in prime().prop_flat_map(|p| (Just(p), scalar(p), -4i64..4)),
        xs in prop::collection::vec(rational(), 20),
    ) {
        let ball = Ball::new(&r, level);
        let kids = ball.children();
        prop_assert_eq!(kids.len(), p.get() as usize);
        for (i, a) in kids.iter().enumerate() {
            prop_assert!(a.is_subset_of(&ball));
            for b in &kids[i + 1..] {
                prop_assert!(a.disjoint(b));
            }
        }
        let shift = r.to_rational();
        for x in xs {
            // Sample both near the ball and at random.
            for y in [&x + &shift, x.clone()] {
                let hits = kids.iter().filter(|k| k.contains(&y)).count();
                prop_assert_eq!(hits, usize::from(ball.contains(&y)));
            }
        }
    }

    #[test]
    fn annuli_fill_the_next_ball(p in prime(), n in 0u32..4, xs in prop::collection::vec(rational(), 40)) {
        let inner = Ball::centered(p, -(n as i64));
        let outer = Ball::centered(p, -(n as i64) - 1);
        let ring = annulus(p, n);
        prop_assert_eq!(ring.len(), p.get() as usize - 1);
        for (i, a) in ring.iter().enumerate() {
            prop_assert_eq!(a.level(), -(n as i64));
            prop_assert!(a.disjoint(&inner));
            for b in &ring[i + 1..] {
                prop_assert!(a.disjoint(b));
            }
        }
        for x in xs {
            let hits = ring.iter().filter(|b| b.contains(&x)).count() + usize::from(inner.contains(&x));
            prop_assert_eq!(hits, usize::from(outer.contains(&x)));
        }
    }
}
