//! Independent brute-force oracles, used to cross-check the lattice and saturation code.
//!
//! These enumerate subsets directly and share nothing with [`super::lattice`] or
//! [`super::saturation`] beyond the multiplication table.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{ChabError, FiniteGroup};

/// Largest order accepted by [`brute_force_subgroups`]: subsets are enumerated as `u32` masks.
pub const BRUTE_FORCE_MAX_ORDER: usize = 25;

/// Every subset of `g` containing the identity and closed under products, as sorted element lists.
pub fn brute_force_subgroups(g: &FiniteGroup) -> Result<Vec<Vec<u32>>, ChabError> {
    let n = g.order();
    if n > BRUTE_FORCE_MAX_ORDER {
        return Err(ChabError::TooLarge {
            order: n,
            bound: BRUTE_FORCE_MAX_ORDER,
        });
    }
    // Bit `i` of a mask stands for element `i`; bit 0 (the identity) is always set.
    let table: Vec<Vec<u32>> = (0..n as u32)
        .map(|a| (0..n as u32).map(|b| g.mul(a, b)).collect())
        .collect();
    let closed = |mask: u32| {
        let mut a_bits = mask;
        while a_bits != 0 {
            let a = a_bits.trailing_zeros() as usize;
            a_bits &= a_bits - 1;
            let mut b_bits = mask;
            while b_bits != 0 {
                let b = b_bits.trailing_zeros() as usize;
                b_bits &= b_bits - 1;
                if mask >> table[a][b] & 1 == 0 {
                    return false;
                }
            }
        }
        true
    };
    let free = (n - 1) as u32;
    let mut masks: Vec<u32> = (0..1u64 << free)
        .into_par_iter()
        .map(|m| ((m as u32) << 1) | 1)
        .filter(|&m| closed(m))
        .collect();
    masks.sort_unstable();
    let mut out: Vec<Vec<u32>> = masks
        .into_iter()
        .map(|m| (0..n as u32).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    Ok(out)
}

/// Number of orbits of conjugation by every element on `subgroups`.
pub fn brute_force_class_count(g: &FiniteGroup, subgroups: &[Vec<u32>]) -> usize {
    let mut classes: BTreeSet<BTreeSet<Vec<u32>>> = BTreeSet::new();
    for h in subgroups {
        let orbit: BTreeSet<Vec<u32>> = (0..g.order() as u32)
            .map(|x| {
                let mut c: Vec<u32> = h.iter().map(|&y| g.conj(x, y)).collect();
                c.sort_unstable();
                c
            })
            .collect();
        classes.insert(orbit);
    }
    classes.len()
}

/// `[H]_U` inside `ambient`, computed directly from the definition: the set of
/// `k` in `ambient` such that, for every left coset `gU`, the coset `kgU` lies in
/// the `H`-orbit of `gU`. Cosets and orbits are materialized as element sets.
pub fn brute_force_saturation(g: &FiniteGroup, ambient: &[u32], u: &[u32], h: &[u32]) -> Vec<u32> {
    let coset = |x: u32| -> BTreeSet<u32> { u.iter().map(|&y| g.mul(x, y)).collect() };
    let cosets: BTreeSet<BTreeSet<u32>> = ambient.iter().map(|&x| coset(x)).collect();
    let orbit = |c: &BTreeSet<u32>| -> BTreeSet<BTreeSet<u32>> {
        h.iter()
            .map(|&k| c.iter().map(|&x| g.mul(k, x)).collect())
            .collect()
    };
    ambient
        .iter()
        .copied()
        .filter(|&k| {
            cosets.iter().all(|c| {
                let moved: BTreeSet<u32> = c.iter().map(|&x| g.mul(k, x)).collect();
                orbit(c).contains(&moved)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    #[test]
    fn klein_and_cyclic() {
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(brute_force_subgroups(&z4).unwrap().len(), 3);
        let gens = [
            Perm::parse("(0 1)", None).unwrap(),
            Perm::parse("(2 3)", None).unwrap(),
        ];
        let v = FiniteGroup::from_perms(4, &gens, 10).unwrap();
        let subs = brute_force_subgroups(&v).unwrap();
        assert_eq!(subs.len(), 5);
        assert_eq!(brute_force_class_count(&v, &subs), 5);
    }

    #[test]
    fn s3_saturation_by_definition() {
        let gens = [
            Perm::parse("(0 1 2)", None).unwrap(),
            Perm::parse("(0 1)", None).unwrap(),
        ];
        let s3 = FiniteGroup::from_perms(3, &gens, 10).unwrap();
        let all: Vec<u32> = (0..6).collect();
        let t = s3.element("(0 1)").unwrap();
        let r = s3.element("(0 1 2)").unwrap();
        let a3 = vec![0, r, s3.mul(r, r)];
        let mut a3s = a3.clone();
        a3s.sort_unstable();
        // A3 is transitive on S3/⟨(0 1)⟩, so everything preserves the single orbit.
        assert_eq!(brute_force_saturation(&s3, &all, &[0, t], &a3), all);
        assert_eq!(brute_force_saturation(&s3, &all, &a3, &[0]), a3s);
    }
}
