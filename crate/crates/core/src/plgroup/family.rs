//! Families `(F_n)` of finite groups of ball permutations on the annuli `X_n`.
//!
//! `F_n` acts on the `(p-1)·p^{d_n}` sub-balls of depth `d_n` of `X_n`, indexed in
//! increasing order of canonical residue. Entries are explicit for `n < M` and
//! follow an eventual rule afterwards: trivial, or periodic with period `T`, in
//! which case `F_n` is `F_{n-T}` conjugated by `x ↦ p^{-T} x` (the rescaling
//! preserves the ball order, so the permutations are literally the same).

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{PLMap, PlError};
use crate::exactnum::{annulus, Ball, ExactRational, PScalar, Prime, Valuation};
use crate::perm::{generate_group, Perm};

/// Default bound on `|F_n|` for enumeration.
pub const DEFAULT_MAX_ORDER: usize = 100_000;

/// Largest number of balls an annulus entry may use.
const MAX_BALLS: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum EventualRule {
    Identity,
    Periodic { period: u64 },
}

/// Ball transpositions `x`, `y` whose commutator `x y x⁻¹ y⁻¹` is a generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub x: Perm,
    pub y: Perm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub depth: u32,
    #[serde(default)]
    pub generators: Vec<Perm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Certificate>,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    p: Prime,
    #[serde(default)]
    entries: Vec<FamilyEntry>,
    eventual: EventualRule,
    #[serde(default = "default_max_order")]
    max_order: usize,
}

fn default_max_order() -> usize {
    DEFAULT_MAX_ORDER
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct FamilySpec {
    p: Prime,
    entries: Vec<FamilyEntry>,
    eventual: EventualRule,
    max_order: usize,
    groups: Vec<OnceLock<Result<Arc<Vec<Perm>>, PlError>>>,
}

impl Clone for FamilySpec {
    fn clone(&self) -> Self {
        FamilySpec {
            p: self.p,
            entries: self.entries.clone(),
            eventual: self.eventual,
            max_order: self.max_order,
            groups: self.groups.clone(),
        }
    }
}

impl PartialEq for FamilySpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.entries == other.entries
            && self.eventual == other.eventual
            && self.max_order == other.max_order
    }
}

impl Eq for FamilySpec {}

impl TryFrom<FamilyRepr> for FamilySpec {
    type Error = PlError;

    fn try_from(r: FamilyRepr) -> Result<Self, PlError> {
        FamilySpec::new(r.p, r.entries, r.eventual).map(|f| f.with_max_order(r.max_order))
    }
}

impl From<FamilySpec> for FamilyRepr {
    fn from(f: FamilySpec) -> Self {
        FamilyRepr {
            p: f.p,
            entries: f.entries,
            eventual: f.eventual,
            max_order: f.max_order,
        }
    }
}

impl FamilySpec {
    /// Validates the entries: permutations fit their annulus (smaller degrees are
    /// extended), generators are even, and a periodic rule has `1 <= T <= M`.
    pub fn new(
        prime: Prime,
        mut entries: Vec<FamilyEntry>,
        eventual: EventualRule,
    ) -> Result<Self, PlError> {
        if let EventualRule::Periodic { period } = eventual {
            if period == 0 || period > entries.len() as u64 {
                return Err(PlError::Family(format!(
                    "period {period} must lie between 1 and the {} explicit entries",
                    entries.len()
                )));
            }
        }
        for (n, entry) in entries.iter_mut().enumerate() {
            let size = ball_count(prime, entry.depth).ok_or_else(|| {
                PlError::Family(format!("depth {} of entry {n} is too large", entry.depth))
            })?;
            let fit = |perm: &mut Perm| -> Result<(), PlError> {
                if perm.degree() > size {
                    return Err(PlError::Family(format!(
                        "permutation {perm} of entry {n} moves more than its {size} balls"
                    )));
                }
                *perm = perm.extend(size);
                Ok(())
            };
            for g in entry.generators.iter_mut() {
                fit(g)?;
                if !g.is_even() {
                    return Err(PlError::Family(format!(
                        "generator {g} of entry {n} is odd"
                    )));
                }
            }
            for c in entry.certificates.iter_mut() {
                fit(&mut c.x)?;
                fit(&mut c.y)?;
            }
            if !entry.certificates.is_empty() && entry.certificates.len() != entry.generators.len()
            {
                return Err(PlError::Family(format!(
                    "entry {n} has {} certificates for {} generators",
                    entry.certificates.len(),
                    entry.generators.len()
                )));
            }
        }
        let groups = entries.iter().map(|_| OnceLock::new()).collect();
        Ok(FamilySpec {
            p: prime,
            entries,
            eventual,
            max_order: DEFAULT_MAX_ORDER,
            groups,
        })
    }

    pub fn with_max_order(mut self, bound: usize) -> Self {
        self.max_order = bound;
        self.groups = self.entries.iter().map(|_| OnceLock::new()).collect();
        self
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn entries(&self) -> &[FamilyEntry] {
        &self.entries
    }

    pub fn eventual(&self) -> EventualRule {
        self.eventual
    }

    /// The explicit entry governing `F_n`, or `None` where `F_n` is trivial by the
    /// eventual rule.
    pub fn base_index(&self, n: u64) -> Option<usize> {
        let m = self.entries.len() as u64;
        if n < m {
            return Some(n as usize);
        }
        match self.eventual {
            EventualRule::Identity => None,
            EventualRule::Periodic { period } => {
                let start = m - period;
                Some((start + (n - start) % period) as usize)
            }
        }
    }

    /// Period of the sequence `n ↦ F_n` from `stable_from()` on (1 when eventually trivial).
    pub fn period(&self) -> u64 {
        match self.eventual {
            EventualRule::Identity => 1,
            EventualRule::Periodic { period } => period,
        }
    }

    pub fn stable_from(&self) -> u64 {
        let m = self.entries.len() as u64;
        match self.eventual {
            EventualRule::Identity => m,
            EventualRule::Periodic { period } => m - period,
        }
    }

    pub fn depth(&self, n: u64) -> u32 {
        self.base_index(n).map_or(0, |i| self.entries[i].depth)
    }

    pub fn ball_count(&self, n: u64) -> usize {
        ball_count(self.p, self.depth(n)).expect("validated at construction")
    }

    /// The depth-`d_n` sub-balls of `X_n`, in index order.
    pub fn balls(&self, n: u64) -> Vec<Ball> {
        let depth = self.depth(n);
        let mut balls: Vec<Ball> = annulus(self.p, n as u32)
            .iter()
            .flat_map(|b| b.descendants(depth))
            .collect();
        balls.sort();
        balls
    }

    /// Index of the depth-`d_n` ball of `X_n` containing `x`, if `x ∈ X_n`.
    ///
    /// The balls are `j·p^{-(n+1)} + p^{d-n} Z_p` for `0 < j < p^{d+1}` with `p ∤ j`,
    /// sorted by `j`, so the index of `j` is `j - ⌊j/p⌋ - 1`.
    pub fn ball_index(&self, n: u64, x: &ExactRational) -> Option<usize> {
        if x.valuation(self.p) != Valuation::Finite(-(n as i64) - 1) {
            return None;
        }
        let p = self.p.to_bigint();
        let unit = x * &PScalar::power(self.p, n as i64 + 1).to_rational();
        let modulus = self.p.pow_big(self.depth(n) as u64 + 1);
        let inv = unit.denom().modinv(&modulus)?;
        let j: BigInt = (unit.numer() * inv).mod_floor(&modulus);
        let index: BigInt = &j - j.div_floor(&p) - 1;
        index.to_usize()
    }

    /// `F_n` as a sorted list of permutations of its balls.
    pub fn group(&self, n: u64) -> Result<Arc<Vec<Perm>>, PlError> {
        let Some(i) = self.base_index(n) else {
            return Ok(Arc::new(vec![Perm::identity(self.ball_count(n))]));
        };
        self.groups[i]
            .get_or_init(|| {
                let entry = &self.entries[i];
                let size = ball_count(self.p, entry.depth).expect("validated at construction");
                generate_group(size, &entry.generators, self.max_order)
                    .map(Arc::new)
                    .map_err(|_| PlError::FamilyTooLarge {
                        index: i as u64,
                        bound: self.max_order,
                    })
            })
            .clone()
    }

    pub fn contains(&self, n: u64, perm: &Perm) -> Result<bool, PlError> {
        if perm.degree() != self.ball_count(n) {
            return Ok(false);
        }
        if perm.is_identity() {
            return Ok(true);
        }
        Ok(self.group(n)?.binary_search(perm).is_ok())
    }

    /// The ball permutation `perm` of `X_n` as a map of `Q_p` (translations between balls).
    pub fn realize(&self, n: u64, perm: &Perm) -> Result<PLMap, PlError> {
        if perm.degree() != self.ball_count(n) {
            return Err(PlError::Precondition(format!(
                "{perm} is not a permutation of the {} balls of X_{n}",
                self.ball_count(n)
            )));
        }
        if perm.is_identity() {
            return Ok(PLMap::identity(self.p));
        }
        let balls = self.balls(n);
        let moves: Vec<(Ball, Ball)> = (0..balls.len())
            .filter(|&i| perm.apply(i) != i)
            .map(|i| (balls[i].clone(), balls[perm.apply(i)].clone()))
            .collect();
        PLMap::ball_translations(self.p, &moves)
    }

    /// Checks every certificate of `F_n`: the commutator of the realized pair equals
    /// the realized generator. Returns `false` if the entry carries no certificates.
    pub fn verify_certificates(&self, n: u64) -> Result<bool, PlError> {
        let Some(i) = self.base_index(n) else {
            return Ok(true);
        };
        let entry = &self.entries[i];
        if entry.certificates.is_empty() {
            return Ok(entry.generators.is_empty());
        }
        for (g, c) in entry.generators.iter().zip(&entry.certificates) {
            let x = self.realize(n, &c.x)?;
            let y = self.realize(n, &c.y)?;
            if x.commutator(&y)? != self.realize(n, g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn ball_count(prime: Prime, depth: u32) -> Option<usize> {
    let p = prime.get() as usize;
    let count = (p - 1).checked_mul(p.checked_pow(depth)?)?;
    (count <= MAX_BALLS).then_some(count)
}

/// The family with `F_n = Alt` of the depth-`d_n` balls of `X_n`, generated by the
/// 3-cycles `(0 1 j)`, each certified as the commutator of the ball transpositions
/// `(0 1)` and `(0 j)`.
pub fn make_alt_family(
    prime: Prime,
    depths: &[u32],
    eventual: EventualRule,
) -> Result<FamilySpec, PlError> {
    let mut entries = Vec::with_capacity(depths.len());
    for (n, &depth) in depths.iter().enumerate() {
        let size = ball_count(prime, depth)
            .ok_or_else(|| PlError::Family(format!("depth {depth} of entry {n} is too large")))?;
        if size < 3 {
            return Err(PlError::Family(format!(
                "X_{n} has only {size} balls at depth {depth}; an alternating group needs 3"
            )));
        }
        let cycle =
            |pts: &[i64]| Perm::from_cycles(size, &[pts.to_vec()]).expect("points are in range");
        let generators = (2..size as i64).map(|j| cycle(&[0, 1, j])).collect();
        let certificates = (2..size as i64)
            .map(|j| Certificate {
                x: cycle(&[0, 1]),
                y: cycle(&[0, j]),
            })
            .collect();
        entries.push(FamilyEntry {
            depth,
            generators,
            certificates,
        });
    }
    FamilySpec::new(prime, entries, eventual)
}
