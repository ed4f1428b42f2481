use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BlockError, BlockFamily};
use crate::perm::{parse_cycles, Perm};
use crate::tail::Tail;

/// A permutation of `Z` moving finitely many points, stored on the smallest
/// interval `[lo, lo + degree)` containing its support.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Finitary {
    lo: i64,
    perm: Perm,
}

impl Finitary {
    pub fn identity() -> Self {
        Finitary {
            lo: 0,
            perm: Perm::identity(0),
        }
    }

    /// `perm` acting on `[lo, lo + perm.degree())`.
    pub fn on_interval(lo: i64, perm: Perm) -> Self {
        Finitary { lo, perm }.trimmed()
    }

    pub fn from_cycles(cycles: &[Vec<i64>]) -> Result<Self, BlockError> {
        let Some(lo) = cycles.iter().flatten().copied().min() else {
            return Ok(Finitary::identity());
        };
        let hi = cycles.iter().flatten().copied().max().unwrap();
        let shifted: Vec<Vec<i64>> = cycles
            .iter()
            .map(|c| c.iter().map(|x| x - lo).collect())
            .collect();
        Ok(Finitary::on_interval(
            lo,
            Perm::from_cycles((hi - lo + 1) as usize, &shifted)?,
        ))
    }

    pub fn parse(text: &str) -> Result<Self, BlockError> {
        Finitary::from_cycles(&parse_cycles(text)?)
    }

    fn trimmed(self) -> Self {
        let moved: Vec<usize> = (0..self.perm.degree())
            .filter(|&i| self.perm.apply(i) != i)
            .collect();
        let (Some(&a), Some(&b)) = (moved.first(), moved.last()) else {
            return Finitary::identity();
        };
        let images = (a..=b).map(|i| (self.perm.apply(i) - a) as u32).collect();
        Finitary {
            lo: self.lo + a as i64,
            perm: Perm::from_images(images)
                .expect("restriction of a bijection to an invariant interval"),
        }
    }

    /// Smallest and one-past-largest moved points, or `None` for the identity.
    pub fn bounds(&self) -> Option<(i64, i64)> {
        (self.perm.degree() > 0).then(|| (self.lo, self.lo + self.perm.degree() as i64))
    }

    pub fn apply(&self, x: i64) -> i64 {
        let i = x - self.lo;
        if i >= 0 && (i as usize) < self.perm.degree() {
            self.lo + self.perm.apply(i as usize) as i64
        } else {
            x
        }
    }

    /// The permutation of `[lo, hi)` induced by `self`, whose support must lie inside.
    pub fn window(&self, lo: i64, hi: i64) -> Perm {
        let images = (lo..hi).map(|x| (self.apply(x) - lo) as u32).collect();
        Perm::from_images(images).expect("support lies inside the interval")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Finitary) -> Finitary {
        let (lo, hi) = match (self.bounds(), other.bounds()) {
            (None, None) => return Finitary::identity(),
            (Some(b), None) | (None, Some(b)) => b,
            (Some((a, b)), Some((c, d))) => (a.min(c), b.max(d)),
        };
        let images = (lo..hi)
            .map(|x| (self.apply(other.apply(x)) - lo) as u32)
            .collect();
        Finitary::on_interval(
            lo,
            Perm::from_images(images).expect("composition of bijections"),
        )
    }

    pub fn inverse(&self) -> Finitary {
        Finitary {
            lo: self.lo,
            perm: self.perm.inverse(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.degree() == 0
    }

    pub fn is_even(&self) -> bool {
        self.perm.is_even()
    }

    pub fn cycles(&self) -> Vec<Vec<i64>> {
        self.perm
            .cycles()
            .into_iter()
            .map(|c| c.into_iter().map(|i| self.lo + i as i64).collect())
            .collect()
    }
}

impl fmt::Display for Finitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(i64::to_string).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Finitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Finitary {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Finitary {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Finitary::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Raw element data: `window ∘ (d_n)`, where the tail may still contain entries
/// outside `D_n` at finitely many blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCandidate {
    #[serde(default = "Finitary::identity")]
    pub window: Finitary,
    #[serde(default)]
    pub tail: Tail,
}

impl Default for Finitary {
    fn default() -> Self {
        Finitary::identity()
    }
}

/// A permutation of `Z` of the form `w ∘ (d_n)_{n >= m}`: `w` finitary with support
/// below `k_m`, and `d_n ∈ D_n` acting on block `n`.
///
/// The split `m` is kept minimal (block actions that lie in `D_n` are moved into
/// the tail), so the representation is canonical. Windows of either parity are
/// representable; [`BlockPermElement::in_g`] decides membership in `G`.
#[derive(Clone)]
pub struct BlockPermElement {
    family: Arc<BlockFamily>,
    split: u64,
    window: Finitary,
    tail: Tail,
}

impl BlockPermElement {
    pub fn identity(family: Arc<BlockFamily>) -> Self {
        BlockPermElement {
            family,
            split: 0,
            window: Finitary::identity(),
            tail: Tail::identity(),
        }
    }

    pub fn finitary(family: Arc<BlockFamily>, window: Finitary) -> Result<Self, BlockError> {
        Self::from_candidate(
            family,
            BlockCandidate {
                window,
                tail: Tail::identity(),
            },
        )
    }

    pub fn from_tail(family: Arc<BlockFamily>, tail: Tail) -> Result<Self, BlockError> {
        Self::from_candidate(
            family,
            BlockCandidate {
                window: Finitary::identity(),
                tail,
            },
        )
    }

    /// Builds `window ∘ tail`. Tail entries outside `D_n` are folded into the window;
    /// fails if there are infinitely many of them.
    pub fn from_candidate(
        family: Arc<BlockFamily>,
        cand: BlockCandidate,
    ) -> Result<Self, BlockError> {
        let mut tail = fit_tail(&family, cand.tail)?;
        let mut split = match cand.window.bounds() {
            Some((_, hi)) if hi > 0 => family.locate(hi - 1).0 + 1,
            _ => 0,
        };
        for (&n, perm) in &tail.exceptions {
            if !family.contains(n, perm)? {
                split = split.max(n + 1);
            }
        }
        let from = family.stable_from().max(tail.horizon()).max(split);
        let end = from + num_integer::lcm(tail.period(), family.period());
        for n in split..end {
            if let Some(perm) = tail.get(n) {
                if !family.contains(n, perm)? {
                    return Err(BlockError::NotRepresentable(format!(
                        "the tail repeats {perm} on block {n}, which is not in D_{n}"
                    )));
                }
            }
        }
        let mut window = cand.window;
        for n in 0..split {
            if let Some(perm) = tail.get(n) {
                window = window.compose(&block_action(&family, n, perm));
            }
        }
        tail = tail.restricted_from(split);
        BlockPermElement {
            family,
            split,
            window,
            tail,
        }
        .canonical()
    }

    fn canonical(mut self) -> Result<Self, BlockError> {
        while self.split > 0 {
            let n = self.split - 1;
            let (lo, hi) = (self.family.cutpoint(n), self.family.cutpoint(n + 1));
            if (lo..hi).any(|x| !(lo..hi).contains(&self.window.apply(x))) {
                break;
            }
            let local = self.window.window(lo, hi);
            if !self.family.contains(n, &local)? {
                break;
            }
            self.window = self
                .window
                .compose(&block_action(&self.family, n, &local).inverse());
            self.tail = self.tail.with_exception(n, local);
            self.split = n;
        }
        self.tail = self.tail.restricted_from(self.split).normalized();
        Ok(self)
    }

    pub fn family(&self) -> &Arc<BlockFamily> {
        &self.family
    }

    pub fn split(&self) -> u64 {
        self.split
    }

    pub fn window(&self) -> &Finitary {
        &self.window
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Raw form; the tail is made explicitly trivial below the split, since a
    /// candidate's tail acts on every block.
    pub fn to_candidate(&self) -> BlockCandidate {
        let mut tail = self.tail.clone();
        for n in 0..self.split {
            if !tail.is_trivial_at(n) {
                tail.exceptions
                    .insert(n, Perm::identity(self.family.block_size(n)));
            }
        }
        BlockCandidate {
            window: self.window.clone(),
            tail,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.window.is_identity() && self.tail == Tail::identity()
    }

    /// The window enlarged to cover blocks below `to >= split`.
    fn window_through(&self, to: u64) -> Finitary {
        let mut w = self.window.clone();
        for n in self.split..to {
            if let Some(perm) = self.tail.get(n) {
                w = w.compose(&block_action(&self.family, n, perm));
            }
        }
        w
    }

    fn same_family(&self, other: &Self) -> Result<(), BlockError> {
        if Arc::ptr_eq(&self.family, &other.family) || self.family == other.family {
            Ok(())
        } else {
            Err(BlockError::Precondition(
                "elements belong to different block families".into(),
            ))
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self, BlockError> {
        self.same_family(other)?;
        let split = self.split.max(other.split);
        let window = self
            .window_through(split)
            .compose(&other.window_through(split));
        let family = &self.family;
        let tail = self
            .tail
            .restricted_from(split)
            .compose(&other.tail.restricted_from(split), |n| family.block_size(n));
        BlockPermElement {
            family: self.family.clone(),
            split,
            window,
            tail,
        }
        .canonical()
    }

    pub fn invert(&self) -> Self {
        BlockPermElement {
            family: self.family.clone(),
            split: self.split,
            window: self.window.inverse(),
            tail: self.tail.inverse(),
        }
    }

    pub fn apply(&self, x: i64) -> i64 {
        if x < self.family.cutpoint(self.split) {
            return self.window.apply(x);
        }
        let (n, offset) = self.family.locate(x);
        match self.tail.get(n) {
            Some(perm) => self.family.cutpoint(n) + perm.apply(offset) as i64,
            None => x,
        }
    }

    /// Membership in `G = ⟨alt_f(Z), ∏ D_n⟩`: the tail is already in `∏ D_n`, and
    /// `G` meets the finitary permutations exactly in `alt_f(Z)` (every `D_n` is
    /// even), so this is the parity of the window.
    pub fn in_g(&self) -> bool {
        self.window.is_even()
    }

    /// Whether `g` acts on every block `i >= n` by an element of `D_i`.
    pub fn in_gn(&self, n: u64) -> Result<bool, BlockError> {
        if !self.in_g() {
            return Err(BlockError::Precondition("element is not in G".into()));
        }
        Ok(self.block_actions(n)?.is_some())
    }

    /// The actions of the window on blocks `n..split`, if each lies in its `D_i`.
    fn block_actions(&self, n: u64) -> Result<Option<Vec<(u64, Perm)>>, BlockError> {
        let mut out = Vec::new();
        for i in n..self.split {
            let (lo, hi) = (self.family.cutpoint(i), self.family.cutpoint(i + 1));
            if (lo..hi).any(|x| !(lo..hi).contains(&self.window.apply(x))) {
                return Ok(None);
            }
            let local = self.window.window(lo, hi);
            if !self.family.contains(i, &local)? {
                return Ok(None);
            }
            out.push((i, local));
        }
        Ok(Some(out))
    }

    /// The image of `g` in `G_n / U_n`: its restriction to `Z_{<k_n}`.
    pub fn quotient(&self, n: u64) -> Result<Finitary, BlockError> {
        if !self.in_g() {
            return Err(BlockError::Precondition("element is not in G".into()));
        }
        let Some(actions) = self.block_actions(n)? else {
            return Err(BlockError::Precondition(format!("element is not in G_{n}")));
        };
        if n >= self.split {
            return Ok(self.window_through(n));
        }
        let mut w = self.window.clone();
        for (i, local) in actions {
            w = w.compose(&block_action(&self.family, i, &local).inverse());
        }
        Ok(w)
    }

    /// Whether `g ∈ U_N = ∏_{n >= N} D_n`.
    pub fn neighborhood_member(&self, n: u64) -> Result<bool, BlockError> {
        if !self.in_g() || self.block_actions(n)?.is_none() {
            return Ok(false);
        }
        Ok(self.quotient(n)?.is_identity())
    }
}

impl PartialEq for BlockPermElement {
    fn eq(&self, other: &Self) -> bool {
        self.split == other.split && self.window == other.window && self.tail == other.tail
    }
}

impl Eq for BlockPermElement {}

impl fmt::Debug for BlockPermElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockPermElement")
            .field("split", &self.split)
            .field("window", &self.window)
            .field("tail", &self.tail)
            .finish()
    }
}

impl Serialize for BlockPermElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_candidate().serialize(serializer)
    }
}

/// Searches corrections `u = (u_n)` agreeing with the tail of `g` from block
/// `blocks` on, with `u_n ∈ D_n` free below, for one making `g ∘ u⁻¹` an even
/// finitary permutation. Returns the choices `u_0, .., u_{blocks-1}` if found.
pub fn parity_correction_search(
    g: &BlockPermElement,
    blocks: u64,
) -> Result<Option<Vec<Perm>>, BlockError> {
    let family = g.family.clone();
    let groups = (0..blocks)
        .map(|n| family.group(n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut choice = vec![0usize; blocks as usize];
    loop {
        // agree with g's tail from `blocks` on, and take the current choice below
        let mut u_tail = g.tail.restricted_from(blocks);
        for (n, &c) in choice.iter().enumerate() {
            u_tail.exceptions.insert(n as u64, groups[n][c].clone());
        }
        let u = BlockPermElement::from_tail(family.clone(), u_tail)?;
        let r = g.compose(&u.invert())?;
        if r.tail == Tail::identity() && r.window.is_even() {
            return Ok(Some(
                choice
                    .iter()
                    .enumerate()
                    .map(|(n, &c)| groups[n][c].clone())
                    .collect(),
            ));
        }
        // odometer step over the product of the D_n
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(None);
            }
            choice[i] += 1;
            if choice[i] < groups[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// `perm` (in local positions) acting on block `n`.
fn block_action(family: &BlockFamily, n: u64, perm: &Perm) -> Finitary {
    Finitary::on_interval(family.cutpoint(n), perm.clone())
}

fn fit_tail(family: &BlockFamily, mut tail: Tail) -> Result<Tail, BlockError> {
    let too_big = |n: u64, perm: &Perm| {
        BlockError::NotRepresentable(format!(
            "{perm} does not fit block {n} of size {}",
            family.block_size(n)
        ))
    };
    if !tail.pattern.is_empty() {
        for n in 0..family.stable_from() {
            if !tail.exceptions.contains_key(&n) {
                let perm = tail.get(n).expect("pattern is non-empty").clone();
                tail.exceptions.insert(n, perm);
            }
        }
    }
    for (&n, perm) in tail.exceptions.iter_mut() {
        if perm.degree() > family.block_size(n) {
            return Err(too_big(n, perm));
        }
        *perm = perm.extend(family.block_size(n));
    }
    // from the stable range on every block has the eventual size
    let stable = family.stable_from().max(tail.horizon());
    let size = family.block_size(stable.max(family.explicit_blocks() as u64));
    for perm in tail.pattern.iter_mut() {
        if perm.degree() > size {
            return Err(too_big(stable, perm));
        }
        *perm = perm.extend(size);
    }
    Ok(tail.normalized())
}
