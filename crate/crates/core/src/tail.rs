//! Sequences `n ↦ π_n` of finite permutations that are eventually periodic.
//!
//! A [`Tail`] is a periodic pattern (indexed by `n mod period`) overridden at
//! finitely many indices. An empty pattern means "eventually the identity".
//! Entry `n` acts on a set whose size is dictated by the owner (ball count of
//! an annulus, block length), supplied as a `size_of` callback where needed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::perm::Perm;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tail {
    #[serde(default)]
    pub exceptions: BTreeMap<u64, Perm>,
    #[serde(default)]
    pub pattern: Vec<Perm>,
}

impl Tail {
    pub fn identity() -> Self {
        Tail::default()
    }

    pub fn periodic(pattern: Vec<Perm>) -> Self {
        Tail {
            exceptions: BTreeMap::new(),
            pattern,
        }
    }

    pub fn with_exception(mut self, n: u64, perm: Perm) -> Self {
        self.exceptions.insert(n, perm);
        self
    }

    /// Entry `n`, or `None` when it is the identity by default.
    pub fn get(&self, n: u64) -> Option<&Perm> {
        self.exceptions.get(&n).or_else(|| {
            if self.pattern.is_empty() {
                None
            } else {
                Some(&self.pattern[(n % self.pattern.len() as u64) as usize])
            }
        })
    }

    pub fn entry(&self, n: u64, size: usize) -> Perm {
        self.get(n).cloned().unwrap_or_else(|| Perm::identity(size))
    }

    pub fn is_trivial_at(&self, n: u64) -> bool {
        self.get(n).is_none_or(Perm::is_identity)
    }

    pub fn period(&self) -> u64 {
        self.pattern.len().max(1) as u64
    }

    /// Every index `n >= horizon()` follows the pattern.
    pub fn horizon(&self) -> u64 {
        self.exceptions.keys().next_back().map_or(0, |n| n + 1)
    }

    /// Entry-wise `self_n ∘ other_n`.
    pub fn compose(&self, other: &Tail, size_of: impl Fn(u64) -> usize) -> Tail {
        let period = if self.pattern.is_empty() && other.pattern.is_empty() {
            0
        } else {
            num_integer::lcm(self.period(), other.period())
        };
        // pattern indices are absolute residues, so entry i of the new pattern is index i itself;
        // an empty pattern contributes nothing (its degree along the class is unknown here)
        let pattern = (0..period)
            .map(|i| match (self.pattern_at(i), other.pattern_at(i)) {
                (Some(a), Some(b)) => a.compose(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!("period is zero when both patterns are empty"),
            })
            .collect();
        let mut exceptions = BTreeMap::new();
        for &n in self.exceptions.keys().chain(other.exceptions.keys()) {
            let size = size_of(n);
            exceptions.insert(n, self.entry(n, size).compose(&other.entry(n, size)));
        }
        Tail {
            exceptions,
            pattern,
        }
        .normalized()
    }

    pub fn inverse(&self) -> Tail {
        Tail {
            exceptions: self
                .exceptions
                .iter()
                .map(|(&n, p)| (n, p.inverse()))
                .collect(),
            pattern: self.pattern.iter().map(Perm::inverse).collect(),
        }
        .normalized()
    }

    fn pattern_at(&self, i: u64) -> Option<&Perm> {
        if self.pattern.is_empty() {
            None
        } else {
            Some(&self.pattern[(i % self.pattern.len() as u64) as usize])
        }
    }

    /// Canonical form: minimal period, identity pattern dropped, redundant exceptions removed.
    pub fn normalized(mut self) -> Tail {
        if self.pattern.iter().all(Perm::is_identity) {
            self.pattern.clear();
        } else {
            let len = self.pattern.len();
            let period = (1..=len)
                .filter(|&d| len.is_multiple_of(d))
                .find(|&d| (0..len).all(|i| self.pattern[i] == self.pattern[i % d]))
                .unwrap_or(len);
            self.pattern.truncate(period);
        }
        let pattern = std::mem::take(&mut self.pattern);
        self.exceptions.retain(|&n, perm| {
            if pattern.is_empty() {
                !perm.is_identity()
            } else {
                *perm != pattern[(n % pattern.len() as u64) as usize]
            }
        });
        self.pattern = pattern;
        self
    }

    /// Drops all entries below `from` (they are identity from the tail's point of view).
    pub fn restricted_from(&self, from: u64) -> Tail {
        let mut t = self.clone();
        t.exceptions = t.exceptions.split_off(&from);
        t
    }

    /// Extends each stored permutation to the degree its index requires; fails if
    /// some stored permutation is already larger.
    pub fn fit_degrees(mut self, size_of: impl Fn(u64) -> usize) -> Option<Tail> {
        for (&n, p) in self.exceptions.iter_mut() {
            let size = size_of(n);
            if p.degree() > size {
                return None;
            }
            *p = p.extend(size);
        }
        let len = self.pattern.len() as u64;
        for (i, p) in self.pattern.iter_mut().enumerate() {
            // all indices congruent to i share this entry; take the size at the first one
            // past the exceptions, which the owner guarantees is stable along the class
            let n = first_in_class(
                i as u64,
                len,
                self.exceptions.keys().next_back().map_or(0, |n| n + 1),
            );
            let size = size_of(n);
            if p.degree() > size {
                return None;
            }
            *p = p.extend(size);
        }
        Some(self.normalized())
    }

    /// Indices `n` in `[from, until)` at which the tail is non-trivial.
    pub fn nontrivial_between(&self, from: u64, until: u64) -> impl Iterator<Item = u64> + '_ {
        (from..until).filter(move |&n| !self.is_trivial_at(n))
    }
}

/// Smallest `n >= from` with `n ≡ i (mod len)`.
pub(crate) fn first_in_class(i: u64, len: u64, from: u64) -> u64 {
    if len == 0 {
        return from;
    }
    let r = from % len;
    if r <= i {
        from - r + i
    } else {
        from - r + len + i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str) -> Perm {
        Perm::parse(s, Some(4)).unwrap()
    }

    #[test]
    fn entrywise_product_with_exceptions() {
        let a = Tail::periodic(vec![perm("(0 1 2)")]).with_exception(3, perm("(1 2 3)"));
        let b = Tail::identity().with_exception(5, perm("(0 1 2)"));
        let c = a.compose(&b, |_| 4);
        assert_eq!(c.get(3), Some(&perm("(1 2 3)")));
        assert_eq!(c.get(5), Some(&perm("(0 2 1)")));
        assert_eq!(c.get(100), Some(&perm("(0 1 2)")));
        let id = c.compose(&c.inverse(), |_| 4);
        assert_eq!(id, Tail::identity());
    }

    #[test]
    fn normalization_reduces_period() {
        let t = Tail::periodic(vec![perm("(0 1 2)"), perm("(0 1 2)")])
            .with_exception(2, perm("(0 1 2)"));
        let n = t.normalized();
        assert_eq!(n.pattern.len(), 1);
        assert!(n.exceptions.is_empty());
    }

    #[test]
    fn mixed_periods_use_lcm() {
        let a = Tail::periodic(vec![perm("(0 1 2)"), perm("()")]);
        let b = Tail::periodic(vec![perm("(1 2 3)"), perm("()"), perm("()")]);
        let c = a.compose(&b, |_| 4);
        assert_eq!(c.pattern.len(), 6);
        for n in 0..12 {
            let expect = a.entry(n, 4).compose(&b.entry(n, 4));
            assert_eq!(c.entry(n, 4), expect);
        }
    }

    #[test]
    fn class_representatives() {
        assert_eq!(first_in_class(1, 3, 7), 7);
        assert_eq!(first_in_class(0, 3, 7), 9);
        assert_eq!(first_in_class(2, 3, 6), 8);
    }
}
