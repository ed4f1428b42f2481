//! Elements of the group `G_F` of a family `F = (F_n)`.
//!
//! An element is a head `h ∈ Γ_p` preserving `p^{-N} Z_p`, together with a tail
//! `(f_n)_{n >= N}`, `f_n ∈ F_n` acting on the annulus `X_n`. Elements are kept
//! with the smallest possible `N`: whenever the head acts on `X_{N-1}` by an
//! element of `F_{N-1}`, that action is moved into the tail. With the head and
//! tail in canonical form, equality of elements is structural.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FamilySpec, PLMap, PlError};
use crate::exactnum::{Ball, ExactRational, PScalar, Valuation};
use crate::perm::Perm;
use crate::tail::{first_in_class, Tail};

/// Raw element data as read from a file; validated by [`GfElement::from_candidate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfCandidate {
    pub level: u64,
    pub head: PLMap,
    #[serde(default)]
    pub tail: Tail,
}

#[derive(Clone)]
pub struct GfElement {
    family: Arc<FamilySpec>,
    level: u64,
    head: PLMap,
    tail: Tail,
}

/// The largest `M` with `g ∈ V_M = ∏_{n >= M} F_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborhoodLevel {
    /// Not even in `V_0`.
    None,
    Finite(u64),
    /// The identity, which lies in every `V_M`.
    Unbounded,
}

/// Result of cutting `g` down to the ball `p^{k+1} Z_p`.
#[derive(Clone, Debug)]
pub struct Truncation {
    /// `g` on the ball, identity elsewhere.
    pub truncated: GfElement,
    /// `g · truncated⁻¹`.
    pub residual: GfElement,
    /// Largest `M` with the residual in `V_M`.
    pub level: NeighborhoodLevel,
    /// The level the construction guarantees, `-k-1` (when non-negative).
    pub guaranteed: Option<u64>,
}

impl GfElement {
    pub fn identity(family: Arc<FamilySpec>) -> Self {
        let p = family.prime();
        GfElement {
            family,
            level: 0,
            head: PLMap::identity(p),
            tail: Tail::identity(),
        }
    }

    /// A compactly supported map, with trivial tail.
    pub fn from_plmap(family: Arc<FamilySpec>, head: PLMap) -> Result<Self, PlError> {
        let level = head.domain().bounding_level(0) as u64;
        Self::from_candidate(
            family,
            GfCandidate {
                level,
                head,
                tail: Tail::identity(),
            },
        )
    }

    /// A pure tail element `(f_n)_{n >= 0}`.
    pub fn from_tail(family: Arc<FamilySpec>, tail: Tail) -> Result<Self, PlError> {
        let p = family.prime();
        Self::from_candidate(
            family,
            GfCandidate {
                level: 0,
                head: PLMap::identity(p),
                tail,
            },
        )
    }

    /// Checks both membership conditions and returns the canonical element.
    ///
    /// Fails with [`PlError::NotMember`] if the head leaves `p^{-N} Z_p` or some
    /// tail entry is not in its `F_n`; other errors come from the family itself.
    pub fn from_candidate(family: Arc<FamilySpec>, cand: GfCandidate) -> Result<Self, PlError> {
        let p = family.prime();
        p.check(cand.head.prime())?;
        let level = cand.level;
        let region = Ball::centered(p, -(level as i64));
        if let Some(piece) = cand
            .head
            .pieces()
            .iter()
            .find(|pc| !pc.domain().is_subset_of(&region))
        {
            return Err(PlError::NotMember(format!(
                "head moves {} outside p^-{level}·Z_p",
                piece.domain()
            )));
        }
        let tail = fit_tail(&family, cand.tail.restricted_from(level), level)?;
        let bound = check_bound(&family, &tail, level);
        for n in level..bound {
            if let Some(perm) = tail.get(n) {
                if !family.contains(n, perm)? {
                    return Err(PlError::NotMember(format!(
                        "tail entry {perm} at X_{n} is not in F_{n}"
                    )));
                }
            }
        }
        GfElement {
            family,
            level,
            head: cand.head,
            tail,
        }
        .canonical()
    }

    pub fn family(&self) -> &Arc<FamilySpec> {
        &self.family
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn head(&self) -> &PLMap {
        &self.head
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn to_candidate(&self) -> GfCandidate {
        GfCandidate {
            level: self.level,
            head: self.head.clone(),
            tail: self.tail.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.head.is_identity() && self.tail == Tail::identity()
    }

    /// Lowers the level while the head acts on the next annulus inward by an `F_n` element.
    fn canonical(mut self) -> Result<Self, PlError> {
        while self.level > 0 {
            let n = self.level - 1;
            let Some(perm) = self.head.restriction_as_ball_perm(&self.family.balls(n)) else {
                break;
            };
            if !self.family.contains(n, &perm)? {
                break;
            }
            let part = self.family.realize(n, &perm)?;
            self.head = self.head.compose(&part.invert())?;
            self.tail = self.tail.with_exception(n, perm);
            self.level = n;
        }
        self.tail = self.tail.restricted_from(self.level).normalized();
        Ok(self)
    }

    /// The whole action on `p^{-to} Z_p` as a single map, `to >= level`.
    fn head_through(&self, to: u64) -> Result<PLMap, PlError> {
        let mut head = self.head.clone();
        for n in self.level..to {
            if let Some(perm) = self.tail.get(n) {
                head = head.compose(&self.family.realize(n, perm)?)?;
            }
        }
        Ok(head)
    }

    fn same_family(&self, other: &GfElement) -> Result<(), PlError> {
        if Arc::ptr_eq(&self.family, &other.family) || self.family == other.family {
            Ok(())
        } else {
            Err(PlError::Precondition(
                "elements belong to different families".into(),
            ))
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GfElement) -> Result<GfElement, PlError> {
        self.same_family(other)?;
        let level = self.level.max(other.level);
        let head = self
            .head_through(level)?
            .compose(&other.head_through(level)?)?;
        let family = &self.family;
        let tail = self
            .tail
            .restricted_from(level)
            .compose(&other.tail.restricted_from(level), |n| family.ball_count(n));
        GfElement {
            family: self.family.clone(),
            level,
            head,
            tail,
        }
        .canonical()
    }

    pub fn invert(&self) -> GfElement {
        GfElement {
            family: self.family.clone(),
            level: self.level,
            head: self.head.invert(),
            tail: self.tail.inverse(),
        }
    }

    pub fn apply(&self, x: &ExactRational) -> ExactRational {
        let p = self.family.prime();
        let v = match x.valuation(p) {
            Valuation::Infinite => return self.head.apply(x),
            Valuation::Finite(v) => v,
        };
        if v >= -(self.level as i64) {
            return self.head.apply(x);
        }
        let n = (-v - 1) as u64;
        let Some(perm) = self.tail.get(n) else {
            return x.clone();
        };
        let i = self.family.ball_index(n, x).expect("x lies in X_n");
        let j = perm.apply(i);
        if i == j {
            return x.clone();
        }
        let balls = self.family.balls(n);
        let shift: PScalar = balls[j].residue() - balls[i].residue();
        x + &shift.to_rational()
    }

    /// `g`'s action on `X_n` as a permutation of the depth-`d_n` balls, when it is one.
    pub fn annulus_action(&self, n: u64) -> Option<Perm> {
        if n >= self.level {
            Some(self.tail.entry(n, self.family.ball_count(n)))
        } else {
            self.head.restriction_as_ball_perm(&self.family.balls(n))
        }
    }

    /// Whether `g ∈ V_M = ∏_{n >= M} F_n`: identity on `p^{-M} Z_p` and acting on
    /// every `X_n`, `n >= M`, by an element of `F_n`.
    pub fn neighborhood_member(&self, m: u64) -> Result<bool, PlError> {
        let top = self.level.max(m);
        let head = self.head_through(top)?;
        if !head.is_identity_on(&Ball::centered(self.family.prime(), -(m as i64))) {
            return Ok(false);
        }
        let mut rebuilt = PLMap::identity(self.family.prime());
        for n in m..top {
            let Some(perm) = head.restriction_as_ball_perm(&self.family.balls(n)) else {
                return Ok(false);
            };
            if !self.family.contains(n, &perm)? {
                return Ok(false);
            }
            rebuilt = rebuilt.compose(&self.family.realize(n, &perm)?)?;
        }
        Ok(rebuilt == head)
    }

    pub fn max_neighborhood_level(&self) -> Result<NeighborhoodLevel, PlError> {
        if !self.neighborhood_member(0)? {
            return Ok(NeighborhoodLevel::None);
        }
        // past this bound the tail is periodic, so membership there means a trivial tail
        let bound = self.level.max(self.tail.horizon()) + self.tail.period() + 1;
        for m in 1..=bound {
            if !self.neighborhood_member(m)? {
                return Ok(NeighborhoodLevel::Finite(m - 1));
            }
        }
        Ok(NeighborhoodLevel::Unbounded)
    }

    /// Cuts `g` down to the ball `p^{k+1} Z_p`: the result acts like `g` there and
    /// trivially elsewhere. Always possible when `k + 1 <= -N`; for smaller balls
    /// the head must preserve the ball.
    pub fn truncate_to_ball(&self, k: i64) -> Result<Truncation, PlError> {
        let p = self.family.prime();
        let j = k + 1;
        let ball = Ball::centered(p, j);
        let head = if j <= -(self.level as i64) {
            self.head_through((-j) as u64)?
        } else {
            self.head.restrict_to_ball(&ball).ok_or_else(|| {
                PlError::Precondition(format!(
                    "the element does not preserve {ball}; truncation is guaranteed for k <= {}",
                    -(self.level as i64) - 1
                ))
            })?
        };
        let truncated = GfElement::from_plmap(self.family.clone(), head)?;
        let residual = self.compose(&truncated.invert())?;
        let level = residual.max_neighborhood_level()?;
        Ok(Truncation {
            truncated,
            residual,
            level,
            guaranteed: u64::try_from(-j).ok(),
        })
    }

    /// Whether `g` is the identity on a neighbourhood of `x`.
    pub fn germ_trivial_at(&self, x: &ExactRational) -> bool {
        let p = self.family.prime();
        match x.valuation(p) {
            Valuation::Finite(v) if v < -(self.level as i64) => {
                let n = (-v - 1) as u64;
                match self.tail.get(n) {
                    None => true,
                    Some(perm) => {
                        let i = self.family.ball_index(n, x).expect("x lies in X_n");
                        perm.apply(i) == i
                    }
                }
            }
            _ => self.head.piece_containing(x).is_none(),
        }
    }
}

impl PartialEq for GfElement {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.head == other.head && self.tail == other.tail
    }
}

impl Eq for GfElement {}

impl fmt::Debug for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GfElement")
            .field("level", &self.level)
            .field("head", &self.head)
            .field("tail", &self.tail)
            .finish()
    }
}

impl Serialize for GfElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_candidate().serialize(serializer)
    }
}

/// Membership test for raw data: `Ok(false)` when either condition fails.
pub fn gf_membership(family: &Arc<FamilySpec>, cand: &GfCandidate) -> Result<bool, PlError> {
    match GfElement::from_candidate(family.clone(), cand.clone()) {
        Ok(_) => Ok(true),
        Err(PlError::NotMember(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Brings every stored permutation to the degree of its annulus.
///
/// Indices below the family's stable range are written out as exceptions, so
/// the pattern only has to fit the (periodic) stable range.
fn fit_tail(family: &FamilySpec, mut tail: Tail, level: u64) -> Result<Tail, PlError> {
    let too_big = |n: u64, perm: &Perm| {
        PlError::NotMember(format!(
            "tail entry {perm} at X_{n} moves more than the {} balls of X_{n}",
            family.ball_count(n)
        ))
    };
    if !tail.pattern.is_empty() {
        for n in level..family.stable_from() {
            if !tail.exceptions.contains_key(&n) {
                let perm = tail.get(n).expect("pattern is non-empty").clone();
                tail.exceptions.insert(n, perm);
            }
        }
    }
    for (&n, perm) in tail.exceptions.iter_mut() {
        let size = family.ball_count(n);
        if perm.degree() > size {
            return Err(too_big(n, perm));
        }
        *perm = perm.extend(size);
    }
    let from = level.max(family.stable_from()).max(tail.horizon());
    let len = tail.pattern.len() as u64;
    for i in 0..len {
        // the class n ≡ i (mod len) meets every residue of the family's period within
        // one window of lcm(len, T); all of those annuli must have the same size
        let mut size = None;
        let lcm = num_integer::lcm(len, family.period());
        let start = first_in_class(i, len, from);
        for n in (start..start + lcm).step_by(len as usize) {
            let s = family.ball_count(n);
            if size.is_some_and(|prev| prev != s) {
                return Err(PlError::NotMember(format!(
                    "tail pattern entry {i} spans annuli with different ball counts"
                )));
            }
            size = Some(s);
        }
        let size = size.expect("class is non-empty");
        let perm = &mut tail.pattern[i as usize];
        if perm.degree() > size {
            return Err(too_big(start, perm));
        }
        *perm = perm.extend(size);
    }
    Ok(tail.normalized())
}

/// Indices past which tail entries repeat both in the tail and in the family, so
/// checking `[level, bound)` covers every `n >= level`.
fn check_bound(family: &FamilySpec, tail: &Tail, level: u64) -> u64 {
    let from = level.max(family.stable_from()).max(tail.horizon());
    from + num_integer::lcm(tail.period(), family.period())
}

#[cfg(test)]
mod tests {
    use super::super::{make_alt_family, AffineLaw, AffinePiece, EventualRule};
    use super::*;
    use crate::exactnum::Prime;

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    fn family() -> Arc<FamilySpec> {
        Arc::new(make_alt_family(p2(), &[2], EventualRule::Periodic { period: 1 }).unwrap())
    }

    fn perm(s: &str) -> Perm {
        Perm::parse(s, Some(4)).unwrap()
    }

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn alpha() -> PLMap {
        PLMap::canonicalize(
            p2(),
            vec![AffinePiece::new(
                Ball::centered(p2(), 0),
                AffineLaw::translation(PScalar::one(p2())),
            )],
        )
        .unwrap()
    }

    #[test]
    fn compactly_supported_and_tail_only_members() {
        let f = family();
        let g = GfElement::from_plmap(f.clone(), alpha()).unwrap();
        assert_eq!(g.level(), 0);
        let t = Tail::periodic(vec![perm("(0 1 2)")]).with_exception(3, perm("(0 1)(2 3)"));
        let u = GfElement::from_tail(f.clone(), t).unwrap();
        assert!(u.neighborhood_member(0).unwrap());
        let odd = Tail::identity().with_exception(2, perm("(0 1)"));
        assert!(matches!(
            GfElement::from_tail(f.clone(), odd.clone()),
            Err(PlError::NotMember(_))
        ));
        let cand = GfCandidate {
            level: 0,
            head: PLMap::identity(p2()),
            tail: odd,
        };
        assert!(!gf_membership(&f, &cand).unwrap());
    }

    #[test]
    fn inverse_and_pointwise_composition() {
        let f = family();
        let g = GfElement::from_plmap(f.clone(), alpha()).unwrap();
        let u = GfElement::from_tail(f.clone(), Tail::periodic(vec![perm("(0 2 3)")])).unwrap();
        let gu = g.compose(&u).unwrap();
        assert!(gu.compose(&gu.invert()).unwrap().is_identity());
        for x in ["0", "1/2", "3/4", "-5/8", "7/16", "1/3", "-11/64", "13/6"] {
            let x = q(x);
            assert_eq!(gu.apply(&x), g.apply(&u.apply(&x)), "at {x}");
        }
        assert_eq!(g.compose(&u).unwrap(), u.compose(&g).unwrap());
    }

    #[test]
    fn level_is_lowered_into_the_tail() {
        let f = family();
        // realize a 3-cycle of X_1 as a head at level 2
        let c = f.realize(1, &perm("(0 1 2)")).unwrap();
        let g = GfElement::from_candidate(
            f.clone(),
            GfCandidate {
                level: 2,
                head: c,
                tail: Tail::identity(),
            },
        )
        .unwrap();
        assert_eq!(g.level(), 0);
        assert!(g.head().is_identity());
        assert_eq!(g.tail().get(1), Some(&perm("(0 1 2)")));
        assert_eq!(
            g.max_neighborhood_level().unwrap(),
            NeighborhoodLevel::Finite(1)
        );
    }

    #[test]
    fn neighborhoods() {
        let f = family();
        assert_eq!(
            GfElement::identity(f.clone())
                .max_neighborhood_level()
                .unwrap(),
            NeighborhoodLevel::Unbounded
        );
        let g = GfElement::from_plmap(f.clone(), alpha()).unwrap();
        assert!(!g.neighborhood_member(0).unwrap());
        assert_eq!(g.max_neighborhood_level().unwrap(), NeighborhoodLevel::None);
        let u = GfElement::from_tail(
            f.clone(),
            Tail::identity().with_exception(5, perm("(1 2 3)")),
        )
        .unwrap();
        for m in 0..=5 {
            assert!(u.neighborhood_member(m).unwrap());
        }
        assert!(!u.neighborhood_member(6).unwrap());
    }

    #[test]
    fn truncation_levels_grow() {
        let f = family();
        let t = Tail::periodic(vec![perm("(0 1 2)")]);
        let g = GfElement::from_plmap(f.clone(), alpha())
            .unwrap()
            .compose(&GfElement::from_tail(f.clone(), t).unwrap())
            .unwrap();
        let mut last = NeighborhoodLevel::None;
        for k in (-8..=-1).rev() {
            let tr = g.truncate_to_ball(k).unwrap();
            assert_eq!(tr.level, NeighborhoodLevel::Finite((-k - 1) as u64));
            assert!(tr.level >= last);
            last = tr.level;
            assert_eq!(tr.residual.compose(&tr.truncated).unwrap(), g);
        }
        assert!(g.truncate_to_ball(0).is_err());
        let id = GfElement::identity(f.clone()).truncate_to_ball(-3).unwrap();
        assert_eq!(id.level, NeighborhoodLevel::Unbounded);
    }

    #[test]
    fn germs() {
        let f = family();
        let u = GfElement::from_tail(
            f.clone(),
            Tail::identity().with_exception(0, perm("(0 1 2)")),
        )
        .unwrap();
        let balls = f.balls(0);
        assert!(!u.germ_trivial_at(&balls[0].residue().to_rational()));
        assert!(u.germ_trivial_at(&balls[3].residue().to_rational()));
        assert!(u.germ_trivial_at(&q("0")));
    }
}
