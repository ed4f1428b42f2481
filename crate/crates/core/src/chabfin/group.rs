use std::collections::{HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::ChabError;
use crate::perm::{generate_group, Perm};

/// Default cap on group order for lattice work.
pub const DEFAULT_ORDER_BOUND: usize = 200;

/// A finite group given by its multiplication table. Element `0` is the identity.
///
/// For groups built from permutations, `a * b` is the composition `a ∘ b`
/// (`b` acts first), matching [`Perm::compose`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inverses: Vec<u32>,
    labels: Vec<String>,
    generators: Vec<u32>,
    perms: Option<Vec<Perm>>,
}

/// Group input as read from JSON: permutation generators or an explicit table.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupInput {
    Generators {
        generators: Vec<String>,
        #[serde(default)]
        degree: Option<usize>,
    },
    Table {
        table: Vec<Vec<u32>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
}

impl GroupInput {
    pub fn build(&self, bound: usize) -> Result<FiniteGroup, ChabError> {
        match self {
            GroupInput::Generators { generators, degree } => {
                let perms = generators
                    .iter()
                    .map(|g| Perm::parse(g, None))
                    .collect::<Result<Vec<_>, _>>()?;
                let n = perms
                    .iter()
                    .map(Perm::degree)
                    .chain(*degree)
                    .max()
                    .unwrap_or(1);
                let perms: Vec<Perm> = perms.iter().map(|g| g.extend(n)).collect();
                FiniteGroup::from_perms(n, &perms, bound)
            }
            GroupInput::Table { table, labels } => {
                if table.len() > bound {
                    return Err(ChabError::TooLarge {
                        order: table.len(),
                        bound,
                    });
                }
                FiniteGroup::from_table(table.clone(), labels.clone())
            }
        }
    }
}

impl FiniteGroup {
    /// The group generated by `gens` acting on `0..degree`.
    pub fn from_perms(degree: usize, gens: &[Perm], bound: usize) -> Result<Self, ChabError> {
        let degree = degree.max(1);
        let gens: Vec<Perm> = gens.iter().map(|g| g.extend(degree)).collect();
        let elements = generate_group(degree, &gens, bound).map_err(|_| ChabError::TooLarge {
            order: bound + 1,
            bound,
        })?;
        let index: HashMap<&Perm, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g, i as u32))
            .collect();
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                table.push(index[&a.compose(b)]);
            }
        }
        let inverses = elements.iter().map(|g| index[&g.inverse()]).collect();
        let labels = elements.iter().map(Perm::to_string).collect();
        let mut generators: Vec<u32> = gens.iter().map(|g| index[g]).filter(|&g| g != 0).collect();
        generators.sort_unstable();
        generators.dedup();
        Ok(FiniteGroup {
            order: n,
            table,
            inverses,
            labels,
            generators,
            perms: Some(elements),
        })
    }

    /// Validates `table` as a group law with identity `0`.
    pub fn from_table(
        table: Vec<Vec<u32>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, ChabError> {
        let n = table.len();
        let bad = |msg: String| Err(ChabError::InvalidGroup(msg));
        if n == 0 {
            return bad("empty table".into());
        }
        if table.iter().any(|row| row.len() != n) {
            return bad("table is not square".into());
        }
        if table.iter().flatten().any(|&x| x as usize >= n) {
            return bad("table entry out of range".into());
        }
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            if table[0][i] != i as u32 || table[i][0] != i as u32 {
                return bad("element 0 is not the identity".into());
            }
        }
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            let mut row = FixedBitSet::with_capacity(n);
            let mut col = FixedBitSet::with_capacity(n);
            for j in 0..n {
                row.insert(table[i][j] as usize);
                col.insert(table[j][i] as usize);
            }
            if row.count_ones(..) != n || col.count_ones(..) != n {
                return bad(format!(
                    "element {i} has no inverse (row or column repeats)"
                ));
            }
        }
        let labels = match labels {
            Some(l) if l.len() != n => return bad("label count differs from order".into()),
            Some(l) => l,
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        let flat: Vec<u32> = table.into_iter().flatten().collect();
        let inverses = (0..n)
            .map(|i| (0..n).find(|&j| flat[i * n + j] == 0).unwrap() as u32)
            .collect();
        let mut g = FiniteGroup {
            order: n,
            table: flat,
            inverses,
            labels,
            generators: Vec::new(),
            perms: None,
        };
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                let ab = g.mul(a, b);
                for c in 0..n as u32 {
                    if g.mul(ab, c) != g.mul(a, g.mul(b, c)) {
                        return bad(format!("not associative: ({a}*{b})*{c} != {a}*({b}*{c})"));
                    }
                }
            }
        }
        g.generators = g.greedy_generators();
        Ok(g)
    }

    /// `Z/n`.
    pub fn cyclic(n: usize) -> Self {
        Self::metacyclic(n, 1, 1, 0)
    }

    /// `⟨x, y | x^m, y^n = x^t, y x y^-1 = x^r⟩`, elements `x^i y^j`.
    ///
    /// Requires `r^n ≡ 1` and `r t ≡ t (mod m)`.
    pub fn metacyclic(m: usize, n: usize, r: usize, t: usize) -> Self {
        let order = m * n;
        let mut rpow = vec![1usize % m.max(1); n];
        for j in 1..n {
            rpow[j] = rpow[j - 1] * r % m;
        }
        assert_eq!(rpow[n - 1] * r % m, 1 % m, "r^n must be 1 mod m");
        assert_eq!(r * t % m, t % m, "x^t must be central");
        let idx = |i: usize, j: usize| (j * m + i) as u32;
        let mut table = vec![vec![0u32; order]; order];
        for (a, row) in table.iter_mut().enumerate() {
            let (i, j) = (a % m, a / m);
            for (b, cell) in row.iter_mut().enumerate() {
                let (k, l) = (b % m, b / m);
                let mut x = i + rpow[j] * k;
                let mut y = j + l;
                if y >= n {
                    y -= n;
                    x += t;
                }
                *cell = idx(x % m, y);
            }
        }
        let labels = (0..order)
            .map(|a| {
                let (i, j) = (a % m, a / m);
                match (i, j) {
                    (0, 0) => "1".to_string(),
                    (i, 0) => format!("x^{i}"),
                    (0, j) => format!("y^{j}"),
                    (i, j) => format!("x^{i}y^{j}"),
                }
            })
            .collect();
        Self::from_table(table, Some(labels)).expect("metacyclic presentation is a group")
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let (na, nb) = (a.order, b.order);
        let n = na * nb;
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        (a.mul((x / nb) as u32, (y / nb) as u32) as usize * nb
                            + b.mul((x % nb) as u32, (y % nb) as u32) as usize)
                            as u32
                    })
                    .collect()
            })
            .collect();
        let labels = (0..n)
            .map(|x| format!("({},{})", a.labels[x / nb], b.labels[x % nb]))
            .collect();
        Self::from_table(table, Some(labels)).expect("direct product is a group")
    }

    /// `N ⋊ Z/k` where the generator of `Z/k` acts on `N` by the automorphism `auto`.
    pub fn semidirect_cyclic(
        normal: &FiniteGroup,
        auto: &[u32],
        k: usize,
    ) -> Result<Self, ChabError> {
        let nn = normal.order;
        if auto.len() != nn {
            return Err(ChabError::InvalidGroup(
                "automorphism has the wrong length".into(),
            ));
        }
        let mut powers = vec![(0..nn as u32).collect::<Vec<u32>>()];
        for j in 1..=k {
            let prev = &powers[j - 1];
            powers.push(prev.iter().map(|&x| auto[x as usize]).collect());
        }
        if powers[k] != powers[0] {
            return Err(ChabError::InvalidGroup(format!(
                "automorphism does not have order dividing {k}"
            )));
        }
        for a in 0..nn as u32 {
            for b in 0..nn as u32 {
                if auto[normal.mul(a, b) as usize] != normal.mul(auto[a as usize], auto[b as usize])
                {
                    return Err(ChabError::InvalidGroup("map is not a homomorphism".into()));
                }
            }
        }
        let n = nn * k;
        let table = (0..n)
            .map(|x| {
                let (a, i) = (x % nn, x / nn);
                (0..n)
                    .map(|y| {
                        let (b, j) = (y % nn, y / nn);
                        let c = normal.mul(a as u32, powers[i][b]);
                        ((i + j) % k * nn + c as usize) as u32
                    })
                    .collect()
            })
            .collect();
        let labels = (0..n)
            .map(|x| format!("({},c^{})", normal.labels[x % nn], x / nn))
            .collect();
        Self::from_table(table, Some(labels))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    /// `g h g^-1`.
    pub fn conj(&self, g: u32, h: u32) -> u32 {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn label(&self, a: u32) -> &str {
        &self.labels[a as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    /// The underlying permutations when the group was built from generators.
    pub fn perms(&self) -> Option<&[Perm]> {
        self.perms.as_deref()
    }

    /// Looks an element up by label, by cycle notation (permutation groups), or by index.
    pub fn element(&self, text: &str) -> Option<u32> {
        let text = text.trim();
        if let Some(i) = self.labels.iter().position(|l| l == text) {
            return Some(i as u32);
        }
        if let Some(perms) = &self.perms {
            if let Ok(p) = Perm::parse(text, None) {
                let deg = perms[0].degree();
                if p.degree() <= deg {
                    let p = p.extend(deg);
                    return perms.binary_search(&p).ok().map(|i| i as u32);
                }
                return None;
            }
        }
        text.parse::<u32>()
            .ok()
            .filter(|&i| (i as usize) < self.order)
    }

    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|&a| {
            self.generators
                .iter()
                .all(|&b| self.mul(a, b) == self.mul(b, a))
        })
    }

    pub fn trivial(&self) -> Subgroup {
        let mut bits = FixedBitSet::with_capacity(self.order);
        bits.insert(0);
        Subgroup { bits }
    }

    pub fn whole(&self) -> Subgroup {
        let mut bits = FixedBitSet::with_capacity(self.order);
        bits.insert_range(..);
        Subgroup { bits }
    }

    /// The subgroup generated by `gens`.
    pub fn generate(&self, gens: &[u32]) -> Subgroup {
        let mut bits = FixedBitSet::with_capacity(self.order);
        bits.insert(0);
        let gens: Vec<u32> = gens.iter().copied().filter(|&g| g != 0).collect();
        let mut queue = VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for &s in &gens {
                let y = self.mul(x, s);
                if !bits.contains(y as usize) {
                    bits.insert(y as usize);
                    queue.push_back(y);
                }
            }
        }
        Subgroup { bits }
    }

    /// `⟨H, extra⟩` where `h_gens` generates `H`.
    pub fn extend_subgroup(&self, h: &Subgroup, h_gens: &[u32], extra: &[u32]) -> Subgroup {
        if extra.iter().all(|&g| h.contains(g)) {
            return h.clone();
        }
        let mut gens = h_gens.to_vec();
        gens.extend_from_slice(extra);
        self.generate(&gens)
    }

    /// A small generating set of `h`, chosen greedily by element index.
    pub fn generators_of(&self, h: &Subgroup) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut cur = self.trivial();
        // Prefer high-order elements: they cover more of `h` per generator.
        let mut cands: Vec<u32> = h.elements().collect();
        cands.sort_by_key(|&x| (std::cmp::Reverse(self.element_order(x)), x));
        for x in cands {
            if cur == *h {
                break;
            }
            if !cur.contains(x) {
                gens.push(x);
                cur = self.generate(&gens);
            }
        }
        gens
    }

    fn greedy_generators(&self) -> Vec<u32> {
        let whole = self.whole();
        self.generators_of(&whole)
    }

    /// `g H g^-1`.
    pub fn conjugate(&self, g: u32, h: &Subgroup) -> Subgroup {
        let mut bits = FixedBitSet::with_capacity(self.order);
        for x in h.elements() {
            bits.insert(self.conj(g, x) as usize);
        }
        Subgroup { bits }
    }

    /// Whether `h` is normalized by every element of `ambient` (`h ≤ ambient` assumed).
    pub fn is_normal_in(&self, h: &Subgroup, ambient: &Subgroup) -> bool {
        let gens = self.generators_of(ambient);
        gens.iter()
            .all(|&g| h.elements().all(|x| h.contains(self.conj(g, x))))
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.generators
            .iter()
            .all(|&g| h.elements().all(|x| h.contains(self.conj(g, x))))
    }

    /// The set product `A B` as a bitset.
    pub fn set_product(&self, a: &Subgroup, b: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.order);
        for x in a.elements() {
            for y in b.ones() {
                out.insert(self.mul(x, y as u32) as usize);
            }
        }
        out
    }

    /// Builds a subgroup from a bitset after checking closure.
    pub fn subgroup_from_bits(&self, bits: FixedBitSet) -> Result<Subgroup, ChabError> {
        let s = Subgroup { bits };
        if !s.contains(0) {
            return Err(ChabError::Precondition("subset misses the identity".into()));
        }
        let els: Vec<u32> = s.elements().collect();
        for &a in &els {
            for &b in &els {
                if !s.contains(self.mul(a, b)) {
                    return Err(ChabError::Precondition(format!(
                        "subset is not closed: {} * {}",
                        self.label(a),
                        self.label(b)
                    )));
                }
            }
        }
        Ok(s)
    }

    /// Parses element descriptions and returns the subgroup they generate.
    pub fn parse_subgroup(&self, gens: &[String]) -> Result<Subgroup, ChabError> {
        let ids = gens
            .iter()
            .map(|t| {
                self.element(t)
                    .ok_or_else(|| ChabError::Parse(format!("unknown element `{t}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.generate(&ids))
    }

    pub fn describe(&self, h: &Subgroup) -> SubgroupReport {
        SubgroupReport {
            order: h.order(),
            generators: self
                .generators_of(h)
                .iter()
                .map(|&g| self.label(g).to_string())
                .collect(),
            elements: h.elements().collect(),
        }
    }
}

/// Serializable summary of a subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupReport {
    pub order: usize,
    pub generators: Vec<String>,
    pub elements: Vec<u32>,
}

/// A subgroup stored as a bitset over its parent's elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    bits: FixedBitSet,
}

impl Subgroup {
    /// Wraps a bitset without checking closure; see [`FiniteGroup::subgroup_from_bits`].
    pub fn from_bits_unchecked(bits: FixedBitSet) -> Self {
        Subgroup { bits }
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn order(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn contains(&self, g: u32) -> bool {
        self.bits.contains(g as usize)
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.ones().map(|i| i as u32)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Subgroup { bits }
    }

    /// Canonical sort key: order first, then elements.
    pub fn sort_key(&self) -> (usize, Vec<u32>) {
        (self.order(), self.elements().collect())
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements()).finish()
    }
}
