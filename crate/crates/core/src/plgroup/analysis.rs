//! Fixed points, supports, germs and membership predicates for [`PLMap`]s.

use serde::Serialize;

use super::{PLMap, PlError};
use crate::exactnum::{Ball, CompactOpen, ExactRational, PScalar};

/// Fixed-point set of a map: everything outside `moved_region`, plus the
/// isolated fixed points inside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPoints {
    /// Union of the piece domains; its complement is fixed pointwise.
    pub moved_region: CompactOpen,
    /// Fixed points lying inside a piece, sorted. Each is the unique solution of
    /// `p^m x + b = x` for a piece with `m ≠ 0`.
    pub isolated: Vec<ExactRational>,
}

impl FixedPoints {
    pub fn is_fixed(&self, x: &ExactRational) -> bool {
        !self.moved_region.contains(x) || self.isolated.contains(x)
    }
}

pub fn fixed_points(f: &PLMap) -> FixedPoints {
    let p = f.prime();
    let mut isolated = Vec::new();
    for piece in f.pieces() {
        let m = piece.slope_exp();
        if m == 0 {
            // a non-zero translation has no fixed point
            continue;
        }
        let slope = PScalar::power(p, m).to_rational();
        let denom = &ExactRational::from_int(1) - &slope;
        let x = &piece.translation().to_rational() / &denom;
        if piece.domain().contains(&x) {
            isolated.push(x);
        }
    }
    isolated.sort();
    FixedPoints {
        moved_region: f.domain(),
        isolated,
    }
}

/// `{x : f(x) ≠ x}` as its closure minus finitely many points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Support {
    pub closure: CompactOpen,
    pub removed_points: Vec<ExactRational>,
    pub compact_closure: bool,
}

pub fn support(f: &PLMap) -> Support {
    let fixed = fixed_points(f);
    Support {
        closure: fixed.moved_region,
        removed_points: fixed.isolated,
        // a finite union of balls is compact; the representation admits nothing else
        compact_closure: true,
    }
}

/// Whether `f` is the identity on some neighbourhood of `x`.
///
/// Inside a piece the law is a non-identity affine map, which moves all but at
/// most one point of every ball, so the germ is trivial exactly off the domain.
pub fn germ_trivial_at(f: &PLMap, x: &ExactRational) -> bool {
    f.piece_containing(x).is_none()
}

/// Membership in `Γ_p`: compactly supported, slopes in `p^Z`, translations in `Z[1/p]`.
/// Every representable [`PLMap`] satisfies all three.
pub fn in_gamma_p(f: &PLMap) -> bool {
    support(f).compact_closure
}

/// Membership in `Λ_p`: supported in `Z_p` (hence a homeomorphism of `Z_p`).
pub fn in_lambda_p(f: &PLMap) -> bool {
    let zp = Ball::centered(f.prime(), 0);
    f.pieces()
        .iter()
        .all(|piece| piece.domain().is_subset_of(&zp))
}

/// Membership in `V_p`: every piece is the prefix substitution between its domain
/// and image balls, `x ↦ p^m (x - r) + c` with `r`, `c` the canonical residues.
pub fn in_vp(f: &PLMap) -> Result<bool, PlError> {
    if !in_lambda_p(f) {
        return Err(PlError::Precondition(
            "V_p membership is only defined for maps supported in Z_p".into(),
        ));
    }
    Ok(f.pieces().iter().all(|piece| {
        let m = piece.slope_exp();
        let r = piece.domain().residue();
        let c = piece.image().residue();
        *piece.translation() == c - &r.shift(m)
    }))
}

#[cfg(test)]
mod tests {
    use super::super::{AffineLaw, AffinePiece};
    use super::*;
    use crate::exactnum::Prime;

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    fn ball(r: i64, level: i64) -> Ball {
        Ball::new(&PScalar::from_int(p2(), r), level)
    }

    fn piece(r: i64, level: i64, m: i64, b: PScalar) -> AffinePiece {
        AffinePiece::new(
            ball(r, level),
            AffineLaw {
                slope_exp: m,
                translation: b,
            },
        )
    }

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn three_piece() -> PLMap {
        let p = p2();
        PLMap::canonicalize(
            p,
            vec![
                piece(0, 1, 1, PScalar::zero(p)),
                piece(1, 2, 0, PScalar::one(p)),
                piece(3, 2, -1, PScalar::new(p, -1, -1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn three_piece_example() {
        let f = three_piece();
        let fixed = fixed_points(&f);
        assert_eq!(fixed.isolated, vec![q("-1"), q("0")]);
        let s = support(&f);
        assert_eq!(s.closure.balls(), &[Ball::centered(p2(), 0)]);
        assert!(s.compact_closure);
        assert!(!germ_trivial_at(&f, &q("0")));
        assert!(germ_trivial_at(&f, &q("1/2")));
    }

    #[test]
    fn swap_has_no_fixed_points_in_zp() {
        let p = p2();
        let swap = PLMap::canonicalize(
            p,
            vec![
                piece(0, 1, 0, PScalar::one(p)),
                piece(1, 1, 0, PScalar::from_int(p, -1)),
            ],
        )
        .unwrap();
        let fixed = fixed_points(&swap);
        assert!(fixed.isolated.is_empty());
        assert_eq!(fixed.moved_region.balls(), &[Ball::centered(p, 0)]);
        assert!(in_vp(&swap).unwrap());
        assert!(fixed.is_fixed(&q("1/2")));
    }

    #[test]
    fn lambda_and_vp_membership() {
        let p = p2();
        let alpha = PLMap::canonicalize(p, vec![piece(0, 0, 0, PScalar::one(p))]).unwrap();
        assert!(in_gamma_p(&alpha) && in_lambda_p(&alpha));
        assert!(!in_vp(&alpha).unwrap());
        let wide = PLMap::canonicalize(
            p,
            vec![AffinePiece::new(
                Ball::centered(p, -1),
                AffineLaw::translation(PScalar::one(p)),
            )],
        )
        .unwrap();
        assert!(in_gamma_p(&wide));
        assert!(!in_lambda_p(&wide));
        assert!(in_vp(&wide).is_err());
        let id = PLMap::identity(p);
        assert!(in_gamma_p(&id) && in_lambda_p(&id) && in_vp(&id).unwrap());
    }
}
