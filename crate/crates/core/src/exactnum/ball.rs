use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ExactError, ExactRational, PScalar, Prime, Valuation};

/// The clopen ball `residue + p^level Z_p`.
///
/// The residue is canonical: the unique element of `Z[1/p] ∩ [0, p^level)` in
/// the class, so two balls are equal iff their fields are.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "BallRepr", into = "BallRepr")]
pub struct Ball {
    level: i64,
    residue: PScalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallRelation {
    Equal,
    /// `self` strictly contains the other ball.
    Contains,
    /// `self` lies strictly inside the other ball.
    ContainedIn,
    Disjoint,
}

impl Ball {
    pub fn new(residue: &PScalar, level: i64) -> Self {
        Ball {
            level,
            residue: residue.reduce_mod(level),
        }
    }

    /// `p^level Z_p`.
    pub fn centered(prime: Prime, level: i64) -> Self {
        Ball {
            level,
            residue: PScalar::zero(prime),
        }
    }

    pub fn prime(&self) -> Prime {
        self.residue.prime()
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn residue(&self) -> &PScalar {
        &self.residue
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        let diff = x - &self.residue.to_rational();
        diff.valuation(self.prime()) >= Valuation::Finite(self.level)
    }

    pub fn contains_scalar(&self, x: &PScalar) -> bool {
        (x - &self.residue).valuation() >= Valuation::Finite(self.level)
    }

    /// The unique ball of level `level <= self.level` containing `self`.
    pub fn ancestor(&self, level: i64) -> Ball {
        debug_assert!(level <= self.level);
        Ball {
            level,
            residue: self.residue.reduce_mod(level),
        }
    }

    pub fn parent(&self) -> Ball {
        self.ancestor(self.level - 1)
    }

    /// The `p` balls of level `level + 1` partitioning `self`, in residue order.
    pub fn children(&self) -> Vec<Ball> {
        let prime = self.prime();
        let step = PScalar::power(prime, self.level);
        (0..prime.get())
            .map(|i| Ball {
                level: self.level + 1,
                residue: &self.residue + &(&step * &PScalar::from_int(prime, i as i64)),
            })
            .collect()
    }

    /// All sub-balls `depth` levels down, sorted by residue.
    pub fn descendants(&self, depth: u32) -> Vec<Ball> {
        let mut layer = vec![self.clone()];
        for _ in 0..depth {
            layer = layer.iter().flat_map(Ball::children).collect();
        }
        layer.sort();
        layer
    }

    pub fn relation(&self, other: &Ball) -> BallRelation {
        use std::cmp::Ordering::*;
        match self.level.cmp(&other.level) {
            Equal if self.residue == other.residue => BallRelation::Equal,
            Equal => BallRelation::Disjoint,
            Less if other.ancestor(self.level) == *self => BallRelation::Contains,
            Greater if self.ancestor(other.level) == *other => BallRelation::ContainedIn,
            _ => BallRelation::Disjoint,
        }
    }

    pub fn disjoint(&self, other: &Ball) -> bool {
        self.relation(other) == BallRelation::Disjoint
    }

    pub fn is_subset_of(&self, other: &Ball) -> bool {
        matches!(
            self.relation(other),
            BallRelation::Equal | BallRelation::ContainedIn
        )
    }

    /// The image `p^slope_exp * self + translation`, again a ball.
    pub fn affine_image(&self, slope_exp: i64, translation: &PScalar) -> Ball {
        let level = self.level + slope_exp;
        Ball::new(&(&self.residue.shift(slope_exp) + translation), level)
    }

    /// A point of `Z[1/p]` inside the ball.
    pub fn center(&self) -> &PScalar {
        &self.residue
    }
}

/// The `p - 1` balls of level `-n` whose union is the annulus `X_n = {x : v_p(x) = -(n+1)}`.
pub fn annulus(prime: Prime, n: u32) -> Vec<Ball> {
    let shift = -(n as i64) - 1;
    (1..prime.get())
        .map(|c| Ball::new(&PScalar::new(prime, c, shift), -(n as i64)))
        .collect()
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}^{}·Z", self.residue, self.prime(), self.level)
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Ball {
    type Err = ExactError;

    /// Parses `r + p^k·Z` (also accepting `*Z` or a bare `Z`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(format!("malformed ball `{s}`"));
        let (r, rest) = s.split_once('+').ok_or_else(bad)?;
        let residue: PScalar = r.trim().parse()?;
        let rest = rest.trim();
        let rest = rest
            .strip_suffix("·Z")
            .or_else(|| rest.strip_suffix("*Z"))
            .or_else(|| rest.strip_suffix('Z'))
            .ok_or_else(bad)?;
        let (q, k) = rest.trim().split_once('^').ok_or_else(bad)?;
        let q: u32 = q.trim().parse().map_err(|_| bad())?;
        residue.prime().check(Prime::new(q)?)?;
        let k: i64 = k.trim().parse().map_err(|_| bad())?;
        Ok(Ball::new(&residue, k))
    }
}

#[derive(Serialize, Deserialize)]
struct BallRepr {
    level: i64,
    residue: PScalar,
}

impl TryFrom<BallRepr> for Ball {
    type Error = ExactError;

    fn try_from(r: BallRepr) -> Result<Self, Self::Error> {
        Ok(Ball::new(&r.residue, r.level))
    }
}

impl From<Ball> for BallRepr {
    fn from(b: Ball) -> Self {
        BallRepr {
            level: b.level,
            residue: b.residue,
        }
    }
}

/// A compact open subset of `Q_p`, stored as its (unique) decomposition into
/// maximal balls, sorted.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct CompactOpen {
    balls: Vec<Ball>,
}

impl CompactOpen {
    pub fn empty() -> Self {
        CompactOpen::default()
    }

    /// Builds the set from pairwise-disjoint balls; reports the first overlap otherwise.
    pub fn from_disjoint(balls: Vec<Ball>) -> Result<Self, ExactError> {
        if let Some((a, b)) = find_overlap(&balls) {
            return Err(ExactError::Overlap(a.to_string(), b.to_string()));
        }
        Ok(Self::normalized(balls))
    }

    pub(crate) fn normalized(balls: Vec<Ball>) -> Self {
        let mut set: HashSet<Ball> = balls.into_iter().collect();
        loop {
            let mut by_parent: BTreeMap<Ball, usize> = BTreeMap::new();
            for b in &set {
                *by_parent.entry(b.parent()).or_default() += 1;
            }
            let full: Vec<Ball> = by_parent
                .into_iter()
                .filter(|(parent, n)| *n == parent.prime().get() as usize)
                .map(|(parent, _)| parent)
                .collect();
            if full.is_empty() {
                break;
            }
            for parent in full {
                for c in parent.children() {
                    set.remove(&c);
                }
                set.insert(parent);
            }
        }
        let mut balls: Vec<Ball> = set.into_iter().collect();
        balls.sort();
        CompactOpen { balls }
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        self.balls.iter().any(|b| b.contains(x))
    }

    pub fn contains_ball(&self, ball: &Ball) -> bool {
        self.balls.iter().any(|b| ball.is_subset_of(b))
    }

    pub fn subtract(&self, other: &CompactOpen) -> CompactOpen {
        let mut out = Vec::new();
        for b in &self.balls {
            subtract_ball(b, &other.balls, &mut out);
        }
        Self::normalized(out)
    }

    pub fn union(&self, other: &CompactOpen) -> CompactOpen {
        let extra = other.subtract(self);
        let mut balls = self.balls.clone();
        balls.extend(extra.balls);
        Self::normalized(balls)
    }

    pub fn is_subset_of(&self, other: &CompactOpen) -> bool {
        self.subtract(other).is_empty()
    }

    /// The smallest `N` such that the set lies in `p^{-N} Z_p`, clamped below at `min`.
    pub fn bounding_level(&self, min: i64) -> i64 {
        self.balls
            .iter()
            .map(|b| {
                let v = match b.residue.valuation() {
                    Valuation::Finite(v) => v.min(b.level),
                    Valuation::Infinite => b.level,
                };
                -v
            })
            .max()
            .unwrap_or(min)
            .max(min)
    }
}

impl fmt::Debug for CompactOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.balls).finish()
    }
}

fn subtract_ball(ball: &Ball, others: &[Ball], out: &mut Vec<Ball>) {
    for o in others {
        match ball.relation(o) {
            BallRelation::Equal | BallRelation::ContainedIn => return,
            BallRelation::Contains => {
                for c in ball.children() {
                    subtract_ball(&c, others, out);
                }
                return;
            }
            BallRelation::Disjoint => {}
        }
    }
    out.push(ball.clone());
}

/// First pair of overlapping balls in the list, if any.
pub(crate) fn find_overlap(balls: &[Ball]) -> Option<(Ball, Ball)> {
    let min_level = balls.iter().map(Ball::level).min()?;
    let mut seen: HashSet<&Ball> = HashSet::with_capacity(balls.len());
    for b in balls {
        if !seen.insert(b) {
            return Some((b.clone(), b.clone()));
        }
    }
    for b in balls {
        for level in min_level..b.level {
            let a = b.ancestor(level);
            if seen.contains(&a) {
                return Some((a, b.clone()));
            }
        }
    }
    None
}
