use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::PlError;
use crate::exactnum::{Ball, BallRelation, CompactOpen, ExactRational, PScalar, Prime};

/// Default ceiling on the number of pieces any intermediate composition may hold.
pub const DEFAULT_MAX_PIECES: usize = 1_000_000;

/// The piece ceiling in force: `CHABLAB_MAX_PIECES` if set to a positive integer, else
/// [`DEFAULT_MAX_PIECES`]. Read once per process.
pub fn max_pieces() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("CHABLAB_MAX_PIECES")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&n: &usize| n > 0)
            .unwrap_or(DEFAULT_MAX_PIECES)
    })
}

/// The affine law `x ↦ p^slope_exp · x + translation`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineLaw {
    pub slope_exp: i64,
    pub translation: PScalar,
}

impl AffineLaw {
    pub fn identity(prime: Prime) -> Self {
        AffineLaw {
            slope_exp: 0,
            translation: PScalar::zero(prime),
        }
    }

    pub fn translation(by: PScalar) -> Self {
        AffineLaw {
            slope_exp: 0,
            translation: by,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.slope_exp == 0 && self.translation.is_zero()
    }

    pub fn apply(&self, x: &ExactRational) -> ExactRational {
        let prime = self.translation.prime();
        let scaled = &PScalar::power(prime, self.slope_exp).to_rational() * x;
        &scaled + &self.translation.to_rational()
    }

    pub fn apply_scalar(&self, x: &PScalar) -> PScalar {
        &x.shift(self.slope_exp) + &self.translation
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &AffineLaw) -> AffineLaw {
        AffineLaw {
            slope_exp: self.slope_exp + outer.slope_exp,
            translation: &self.translation.shift(outer.slope_exp) + &outer.translation,
        }
    }

    pub fn inverse(&self) -> AffineLaw {
        AffineLaw {
            slope_exp: -self.slope_exp,
            translation: -self.translation.shift(-self.slope_exp),
        }
    }

    pub fn image(&self, ball: &Ball) -> Ball {
        ball.affine_image(self.slope_exp, &self.translation)
    }
}

impl fmt::Display for AffineLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.translation.prime();
        write!(f, "x ↦ {p}^{}·x + {}", self.slope_exp, self.translation)
    }
}

/// One affine piece of a [`PLMap`]: `law` acting on `domain`, with its image cached.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(from = "PieceRepr", into = "PieceRepr")]
pub struct AffinePiece {
    domain: Ball,
    law: AffineLaw,
    image: Ball,
}

impl AffinePiece {
    pub fn new(domain: Ball, law: AffineLaw) -> Self {
        let image = law.image(&domain);
        AffinePiece { domain, law, image }
    }

    pub fn domain(&self) -> &Ball {
        &self.domain
    }

    pub fn law(&self) -> &AffineLaw {
        &self.law
    }

    pub fn image(&self) -> &Ball {
        &self.image
    }

    pub fn slope_exp(&self) -> i64 {
        self.law.slope_exp
    }

    pub fn translation(&self) -> &PScalar {
        &self.law.translation
    }
}

#[derive(Serialize, Deserialize)]
struct PieceRepr {
    ball: Ball,
    slope_exp: i64,
    translation: PScalar,
}

impl From<PieceRepr> for AffinePiece {
    fn from(r: PieceRepr) -> Self {
        AffinePiece::new(
            r.ball,
            AffineLaw {
                slope_exp: r.slope_exp,
                translation: r.translation,
            },
        )
    }
}

impl From<AffinePiece> for PieceRepr {
    fn from(p: AffinePiece) -> Self {
        PieceRepr {
            ball: p.domain,
            slope_exp: p.law.slope_exp,
            translation: p.law.translation,
        }
    }
}

/// A compactly supported piecewise-affine homeomorphism of `Q_p` with slopes in
/// `p^Z` and translations in `Z[1/p]`, identity off its pieces.
///
/// Always held in canonical form: the pieces are exactly the maximal balls on
/// which the map is a single non-identity affine law, sorted by `(level, residue)`.
/// Two maps are equal as functions iff they are equal as values.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PLMap {
    p: Prime,
    pieces: Vec<AffinePiece>,
}

impl PLMap {
    pub fn identity(prime: Prime) -> Self {
        PLMap {
            p: prime,
            pieces: Vec::new(),
        }
    }

    /// Validates a raw piece list and returns its canonical form.
    ///
    /// Rejects lists whose domains overlap, whose images overlap, or whose
    /// images do not cover exactly the union of the domains.
    pub fn canonicalize(prime: Prime, pieces: Vec<AffinePiece>) -> Result<Self, PlError> {
        for piece in &pieces {
            prime.check(piece.domain.prime())?;
            prime.check(piece.law.translation.prime())?;
        }
        let domains: Vec<Ball> = pieces.iter().map(|p| p.domain.clone()).collect();
        let images: Vec<Ball> = pieces.iter().map(|p| p.image.clone()).collect();
        if let Some((a, b)) = crate::exactnum::find_overlap(&domains) {
            return Err(PlError::NotBijective(format!(
                "domains {a} and {b} overlap"
            )));
        }
        if let Some((a, b)) = crate::exactnum::find_overlap(&images) {
            return Err(PlError::NotBijective(format!("images {a} and {b} overlap")));
        }
        let dom = CompactOpen::normalized(domains);
        let img = CompactOpen::normalized(images);
        if dom != img {
            let extra = img.subtract(&dom);
            let missing = dom.subtract(&img);
            return Err(PlError::NotBijective(format!(
                "images cover {:?} outside the domains and miss {:?}",
                extra.balls(),
                missing.balls()
            )));
        }
        Ok(Self::from_trusted(prime, pieces))
    }

    /// Canonical form of a piece list already known to describe a bijection.
    pub(crate) fn from_trusted(prime: Prime, pieces: Vec<AffinePiece>) -> Self {
        let mut laws: HashMap<Ball, AffineLaw> = pieces
            .into_iter()
            .filter(|p| !p.law.is_identity())
            .map(|p| (p.domain, p.law))
            .collect();
        let mut candidates: HashSet<Ball> = laws.keys().map(Ball::parent).collect();
        while !candidates.is_empty() {
            let mut next = HashSet::new();
            for parent in candidates {
                let children = parent.children();
                let Some(law) = laws.get(&children[0]).cloned() else {
                    continue;
                };
                if children[1..].iter().all(|c| laws.get(c) == Some(&law)) {
                    for c in &children {
                        laws.remove(c);
                    }
                    next.insert(parent.parent());
                    laws.insert(parent, law);
                }
            }
            candidates = next;
        }
        let mut pieces: Vec<AffinePiece> = laws
            .into_iter()
            .map(|(domain, law)| AffinePiece::new(domain, law))
            .collect();
        pieces.sort_by(|a, b| a.domain.cmp(&b.domain));
        PLMap { p: prime, pieces }
    }

    /// The bijection moving each listed ball onto its partner by translation, e.g.
    /// a ball permutation. Balls must be pairwise disjoint and of equal level.
    pub fn ball_translations(prime: Prime, moves: &[(Ball, Ball)]) -> Result<Self, PlError> {
        let pieces = moves
            .iter()
            .map(|(from, to)| {
                if from.level() != to.level() {
                    return Err(PlError::Precondition(format!(
                        "cannot translate {from} onto {to}: levels differ"
                    )));
                }
                Ok(AffinePiece::new(
                    from.clone(),
                    AffineLaw::translation(to.residue() - from.residue()),
                ))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::canonicalize(prime, pieces)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.is_empty()
    }

    /// The union of the piece domains (outside of which the map is the identity).
    pub fn domain(&self) -> CompactOpen {
        CompactOpen::normalized(self.pieces.iter().map(|p| p.domain.clone()).collect())
    }

    pub fn piece_containing(&self, x: &ExactRational) -> Option<&AffinePiece> {
        self.pieces.iter().find(|p| p.domain.contains(x))
    }

    pub fn apply(&self, x: &ExactRational) -> ExactRational {
        match self.piece_containing(x) {
            Some(piece) => piece.law.apply(x),
            None => x.clone(),
        }
    }

    pub fn invert(&self) -> PLMap {
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffinePiece::new(p.image.clone(), p.law.inverse()))
            .collect();
        Self::from_trusted(self.p, pieces)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &PLMap) -> Result<PLMap, PlError> {
        self.compose_with_limit(other, max_pieces())
    }

    /// `self ∘ other`, failing if the refinement ever holds more than `limit` pieces.
    ///
    /// Each piece of `other` (and each ball of `self`'s domain that `other` fixes)
    /// is split until its image lies inside one piece of `self` or misses all of them.
    pub fn compose_with_limit(&self, other: &PLMap, limit: usize) -> Result<PLMap, PlError> {
        self.p.check(other.p)?;
        if self.is_identity() {
            return Ok(other.clone());
        }
        if other.is_identity() {
            return Ok(self.clone());
        }
        let index = PieceIndex::new(self);
        let fixed_by_other = self.domain().subtract(&other.domain());
        let mut stack: Vec<(Ball, AffineLaw)> = other
            .pieces
            .iter()
            .map(|p| (p.domain.clone(), p.law.clone()))
            .chain(
                fixed_by_other
                    .balls()
                    .iter()
                    .map(|b| (b.clone(), AffineLaw::identity(self.p))),
            )
            .collect();
        let mut out = Vec::new();
        while let Some((ball, law)) = stack.pop() {
            let image = law.image(&ball);
            match index.locate(&image) {
                Location::Inside(i) => {
                    let outer = &self.pieces[i].law;
                    out.push(AffinePiece::new(ball, law.then(outer)));
                }
                Location::Outside => out.push(AffinePiece::new(ball, law)),
                Location::Straddles => {
                    for child in ball.children() {
                        stack.push((child, law.clone()));
                    }
                }
            }
            if out.len() + stack.len() > limit {
                return Err(PlError::PieceCeiling(limit));
            }
        }
        Ok(Self::from_trusted(self.p, out))
    }

    /// `self^e`.
    pub fn pow(&self, e: i64) -> Result<PLMap, PlError> {
        let base = if e < 0 { self.invert() } else { self.clone() };
        let mut acc = PLMap::identity(self.p);
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base)?;
        }
        Ok(acc)
    }

    pub fn commutator(&self, other: &PLMap) -> Result<PLMap, PlError> {
        self.compose(other)?
            .compose(&self.invert())?
            .compose(&other.invert())
    }

    /// If the map permutes `balls` (all of equal level) by the translations
    /// `x ↦ x + (r_j - r_i)` between canonical residues, returns that permutation of
    /// indices. Balls the map does not touch are fixed.
    pub fn restriction_as_ball_perm(&self, balls: &[Ball]) -> Option<crate::perm::Perm> {
        let index: HashMap<&Ball, usize> = balls.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut images = Vec::with_capacity(balls.len());
        for ball in balls {
            let mut target = None;
            for piece in &self.pieces {
                match piece.domain.relation(ball) {
                    BallRelation::Equal | BallRelation::Contains => {
                        let img = piece.law.image(ball);
                        let j = *index.get(&img)?;
                        let expected = &balls[j].residue().clone() - ball.residue();
                        if piece.law.slope_exp != 0 || piece.law.translation != expected {
                            return None;
                        }
                        target = Some(j);
                        break;
                    }
                    BallRelation::ContainedIn => return None,
                    BallRelation::Disjoint => {}
                }
            }
            images.push(target.unwrap_or(images.len()) as u32);
        }
        crate::perm::Perm::from_images(images).ok()
    }

    /// The restriction of the map to `ball`, identity elsewhere, provided the map
    /// sends `ball` onto itself.
    pub fn restrict_to_ball(&self, ball: &Ball) -> Option<PLMap> {
        let mut pieces = Vec::new();
        for piece in &self.pieces {
            match piece.domain.relation(ball) {
                BallRelation::Equal | BallRelation::ContainedIn => pieces.push(piece.clone()),
                BallRelation::Contains => {
                    pieces.push(AffinePiece::new(ball.clone(), piece.law.clone()))
                }
                BallRelation::Disjoint => {}
            }
        }
        if pieces.iter().any(|p| !p.image.is_subset_of(ball)) {
            return None;
        }
        Self::canonicalize(self.p, pieces).ok()
    }

    /// Whether the map sends `ball` onto itself.
    pub fn preserves_ball(&self, ball: &Ball) -> bool {
        self.restrict_to_ball(ball).is_some()
    }

    /// Whether the map is the identity on all of `ball`.
    pub fn is_identity_on(&self, ball: &Ball) -> bool {
        self.pieces.iter().all(|p| p.domain.disjoint(ball))
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "PLMap[{:?}; identity]", self.p);
        }
        write!(f, "PLMap[{:?}; ", self.p)?;
        for (i, piece) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}: {}", piece.domain, piece.law)?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Deserialize)]
struct PLMapRepr {
    p: u32,
    #[serde(default)]
    pieces: Vec<AffinePiece>,
}

impl<'de> Deserialize<'de> for PLMap {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PLMapRepr::deserialize(deserializer)?;
        let prime = Prime::new(repr.p).map_err(serde::de::Error::custom)?;
        PLMap::canonicalize(prime, repr.pieces).map_err(serde::de::Error::custom)
    }
}

enum Location {
    Inside(usize),
    Straddles,
    Outside,
}

/// Hash lookup of which piece (if any) contains a ball, and which balls strictly
/// contain some piece.
struct PieceIndex<'a> {
    map: &'a PLMap,
    by_domain: HashMap<&'a Ball, usize>,
    proper_ancestors: HashSet<Ball>,
    min_level: i64,
    max_level: i64,
}

impl<'a> PieceIndex<'a> {
    fn new(map: &'a PLMap) -> Self {
        let min_level = map
            .pieces
            .iter()
            .map(|p| p.domain.level())
            .min()
            .unwrap_or(0);
        let max_level = map
            .pieces
            .iter()
            .map(|p| p.domain.level())
            .max()
            .unwrap_or(0);
        let mut proper_ancestors = HashSet::new();
        for piece in &map.pieces {
            let mut b = piece.domain.clone();
            while b.level() > min_level {
                b = b.parent();
                if !proper_ancestors.insert(b.clone()) {
                    break;
                }
            }
        }
        PieceIndex {
            map,
            by_domain: map
                .pieces
                .iter()
                .enumerate()
                .map(|(i, p)| (&p.domain, i))
                .collect(),
            proper_ancestors,
            min_level,
            max_level,
        }
    }

    fn locate(&self, ball: &Ball) -> Location {
        if ball.level() < self.min_level {
            let straddles = self
                .map
                .pieces
                .iter()
                .any(|p| p.domain.relation(ball) == BallRelation::ContainedIn);
            return if straddles {
                Location::Straddles
            } else {
                Location::Outside
            };
        }
        let top = ball.level().min(self.max_level);
        let mut level = top;
        let mut candidate = if top == ball.level() {
            ball.clone()
        } else {
            ball.ancestor(top)
        };
        loop {
            if let Some(&i) = self.by_domain.get(&candidate) {
                return Location::Inside(i);
            }
            if level == self.min_level {
                break;
            }
            level -= 1;
            candidate = candidate.parent();
        }
        if self.proper_ancestors.contains(ball) {
            Location::Straddles
        } else {
            Location::Outside
        }
    }
}
