use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::{ChabError, FiniteGroup, Subgroup};

/// All subgroups of a group, sorted by `(order, elements)`, with their conjugacy classes.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    subgroups: Vec<Subgroup>,
    index: HashMap<Subgroup, usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

/// Every subgroup of `g`, found by repeatedly joining known subgroups with cyclic ones.
pub fn subgroup_lattice(g: &FiniteGroup, bound: usize) -> Result<Vec<Subgroup>, ChabError> {
    if g.order() > bound {
        return Err(ChabError::TooLarge {
            order: g.order(),
            bound,
        });
    }
    // One generator per distinct cyclic subgroup.
    let mut cyclic: Vec<(u32, Subgroup)> = Vec::new();
    let mut seen_cyclic = HashSet::new();
    for x in 0..g.order() as u32 {
        let c = g.generate(&[x]);
        if seen_cyclic.insert(c.clone()) {
            cyclic.push((x, c));
        }
    }
    let trivial = g.trivial();
    let mut found: HashMap<Subgroup, Vec<u32>> = HashMap::from([(trivial.clone(), vec![])]);
    let mut layer = vec![(trivial, vec![])];
    while !layer.is_empty() {
        let joins: Vec<(Subgroup, Vec<u32>)> = layer
            .par_iter()
            .flat_map_iter(|(h, gens)| {
                cyclic
                    .iter()
                    .filter(|(x, _)| !h.contains(*x))
                    .map(move |(x, _)| {
                        let mut gens = gens.clone();
                        gens.push(*x);
                        (g.generate(&gens), gens)
                    })
            })
            .collect();
        let mut next = Vec::new();
        for (k, gens) in joins {
            if !found.contains_key(&k) {
                found.insert(k.clone(), gens.clone());
                next.push((k, gens));
            }
        }
        layer = next;
    }
    let mut all: Vec<Subgroup> = found.into_keys().collect();
    all.sort_by_cached_key(Subgroup::sort_key);
    Ok(all)
}

impl SubgroupLattice {
    pub fn new(g: &FiniteGroup, bound: usize) -> Result<Self, ChabError> {
        let subgroups = subgroup_lattice(g, bound)?;
        let index: HashMap<Subgroup, usize> = subgroups
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, h)| (h, i))
            .collect();
        let mut class_of = vec![usize::MAX; subgroups.len()];
        let mut classes = Vec::new();
        for i in 0..subgroups.len() {
            if class_of[i] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = vec![i];
            class_of[i] = c;
            let mut k = 0;
            while k < members.len() {
                let h = &subgroups[members[k]];
                for &s in g.generators() {
                    let j = index[&g.conjugate(s, h)];
                    if class_of[j] == usize::MAX {
                        class_of[j] = c;
                        members.push(j);
                    }
                }
                k += 1;
            }
            members.sort_unstable();
            classes.push(members);
        }
        Ok(SubgroupLattice {
            subgroups,
            index,
            classes,
            class_of,
        })
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn get(&self, i: usize) -> &Subgroup {
        &self.subgroups[i]
    }

    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        self.index.get(h).copied()
    }

    /// Conjugacy classes as sorted index lists, ordered by their first member.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// Pairs `(i, j)` with `H_i < H_j` maximal, i.e. the Hasse diagram.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.subgroups.len();
        let below =
            |i: usize, j: usize| i != j && self.subgroups[i].is_subgroup_of(&self.subgroups[j]);
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if below(i, j) && !(0..n).any(|k| below(i, k) && below(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn perms(gens: &[&str], degree: usize) -> FiniteGroup {
        let gens: Vec<Perm> = gens
            .iter()
            .map(|g| Perm::parse(g, Some(degree)).unwrap())
            .collect();
        FiniteGroup::from_perms(degree, &gens, 200).unwrap()
    }

    #[test]
    fn cyclic_four() {
        let l = SubgroupLattice::new(&FiniteGroup::cyclic(4), 200).unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(l.classes().len(), 3);
        assert_eq!(l.covers(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn small_counts() {
        let s4 = perms(&["(0 1 2 3)", "(0 1)"], 4);
        let l = SubgroupLattice::new(&s4, 200).unwrap();
        assert_eq!((l.len(), l.classes().len()), (30, 11));
        let q8 = FiniteGroup::metacyclic(4, 2, 3, 2);
        let l = SubgroupLattice::new(&q8, 200).unwrap();
        assert_eq!((l.len(), l.classes().len()), (6, 6));
        let a4 = perms(&["(0 1 2)", "(1 2 3)"], 4);
        let l = SubgroupLattice::new(&a4, 200).unwrap();
        assert_eq!((l.len(), l.classes().len()), (10, 5));
    }

    #[test]
    fn order_cap() {
        let s4 = perms(&["(0 1 2 3)", "(0 1)"], 4);
        assert_eq!(
            subgroup_lattice(&s4, 20).unwrap_err(),
            ChabError::TooLarge {
                order: 24,
                bound: 20
            }
        );
    }
}
