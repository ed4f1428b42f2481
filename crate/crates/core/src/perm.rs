//! Permutations of `{0, .., n-1}` and cycle notation.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("malformed cycle notation `{0}`")]
    Syntax(String),
    #[error("point {point} repeated in cycle notation `{text}`")]
    Repeated { point: i64, text: String },
    #[error("point {point} outside degree {degree}")]
    OutOfRange { point: i64, degree: usize },
    #[error("image list is not a bijection")]
    NotBijective,
    #[error("group generated exceeds the bound of {0} elements")]
    TooLarge(usize),
}

/// A permutation stored by images: `self.apply(i) = images[i]`.
///
/// Composition follows function notation: `a.compose(&b)` applies `b` first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen.get_mut(i as usize).ok_or(PermError::NotBijective)?;
            if *slot {
                return Err(PermError::NotBijective);
            }
            *slot = true;
        }
        Ok(Perm { images })
    }

    pub fn from_cycles(degree: usize, cycles: &[Vec<i64>]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                for x in [a, b] {
                    if x < 0 || x as usize >= degree {
                        return Err(PermError::OutOfRange { point: x, degree });
                    }
                }
                images[a as usize] = b as u32;
            }
        }
        Perm::from_images(images)
    }

    /// Parses cycle notation such as `(0 1 2)(3 4)`; the degree defaults to one more
    /// than the largest point mentioned.
    pub fn parse(text: &str, degree: Option<usize>) -> Result<Self, PermError> {
        let cycles = parse_cycles(text)?;
        let needed = cycles
            .iter()
            .flatten()
            .map(|&x| x + 1)
            .max()
            .unwrap_or(0)
            .max(0) as usize;
        Perm::from_cycles(degree.unwrap_or(needed), &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// `self ∘ other`, i.e. `other` is applied first. Degrees must agree.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(
            self.degree(),
            other.degree(),
            "composing permutations of different degree"
        );
        Perm {
            images: other
                .images
                .iter()
                .map(|&i| self.images[i as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn support_len(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &j)| *i as u32 != j)
            .count()
    }

    /// Non-trivial cycles, each starting at its smallest point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn order(&self) -> usize {
        self.cycles()
            .iter()
            .map(|c| c.len())
            .fold(1, num_integer::lcm)
    }

    /// Extends to a larger degree, fixing the new points.
    pub fn extend(&self, degree: usize) -> Perm {
        let mut images = self.images.clone();
        images.extend(self.degree() as u32..degree as u32);
        Perm { images }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}[{}]", self.degree())
    }
}

/// Serialized as cycle notation; the degree is inferred on read.
impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Perm::parse(&s, None).map_err(serde::de::Error::custom)
    }
}

/// Parses `(a b c)(d e)` into cycles over arbitrary integers. Commas are accepted
/// as separators, and `()` denotes the identity.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<i64>>, PermError> {
    let mut cycles = Vec::new();
    let mut seen = HashSet::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner_start = rest
            .strip_prefix('(')
            .ok_or_else(|| PermError::Syntax(text.to_string()))?;
        let close = inner_start
            .find(')')
            .ok_or_else(|| PermError::Syntax(text.to_string()))?;
        let body = &inner_start[..close];
        let mut cycle = Vec::new();
        for tok in body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let x: i64 = tok
                .parse()
                .map_err(|_| PermError::Syntax(text.to_string()))?;
            if !seen.insert(x) {
                return Err(PermError::Repeated {
                    point: x,
                    text: text.to_string(),
                });
            }
            cycle.push(x);
        }
        if cycle.len() > 1 {
            cycles.push(cycle);
        }
        rest = inner_start[close + 1..].trim_start();
    }
    Ok(cycles)
}

/// Enumerates the group generated by `gens` (all of the given degree), sorted,
/// failing once more than `bound` elements appear.
pub fn generate_group(degree: usize, gens: &[Perm], bound: usize) -> Result<Vec<Perm>, PermError> {
    let id = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = s.compose(&g);
            if seen.insert(h.clone()) {
                if seen.len() > bound {
                    return Err(PermError::TooLarge(bound));
                }
                queue.push_back(h);
            }
        }
    }
    let mut all: Vec<Perm> = seen.into_iter().collect();
    all.sort();
    Ok(all)
}
