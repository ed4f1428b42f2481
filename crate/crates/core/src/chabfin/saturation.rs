use fixedbitset::FixedBitSet;

use super::{ChabError, FiniteGroup, Subgroup};

/// Left cosets `gU` of `u` inside `ambient`: a coset id per element (`usize::MAX`
/// outside `ambient`) and one representative per coset.
pub fn left_cosets(g: &FiniteGroup, ambient: &Subgroup, u: &Subgroup) -> (Vec<usize>, Vec<u32>) {
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in ambient.elements() {
        if coset_of[x as usize] != usize::MAX {
            continue;
        }
        for y in u.elements() {
            coset_of[g.mul(x, y) as usize] = reps.len();
        }
        reps.push(x);
    }
    (coset_of, reps)
}

/// The partition of `ambient / U` into `H`-orbits, as a block id per coset.
pub fn orbit_partition(
    g: &FiniteGroup,
    ambient: &Subgroup,
    u: &Subgroup,
    h: &Subgroup,
) -> Vec<usize> {
    let (coset_of, reps) = left_cosets(g, ambient, u);
    let mut block = vec![usize::MAX; reps.len()];
    let mut next = 0;
    for c in 0..reps.len() {
        if block[c] != usize::MAX {
            continue;
        }
        for k in h.elements() {
            block[coset_of[g.mul(k, reps[c]) as usize]] = next;
        }
        next += 1;
    }
    block
}

/// Elements of `ambient` mapping every block of `partition` (indexed like
/// [`left_cosets`]) onto itself.
pub fn partition_fixer(
    g: &FiniteGroup,
    ambient: &Subgroup,
    u: &Subgroup,
    partition: &[usize],
) -> Subgroup {
    let (coset_of, reps) = left_cosets(g, ambient, u);
    assert_eq!(partition.len(), reps.len(), "one block id per coset");
    let mut bits = FixedBitSet::with_capacity(g.order());
    for k in ambient.elements() {
        let keeps = reps
            .iter()
            .enumerate()
            .all(|(c, &r)| partition[coset_of[g.mul(k, r) as usize]] == partition[c]);
        if keeps {
            bits.insert(k as usize);
        }
    }
    Subgroup::from_bits_unchecked(bits)
}

/// `[H]_U`: the elements whose action on `G/U` preserves every `H`-orbit.
pub fn saturation_orbit(g: &FiniteGroup, u: &Subgroup, h: &Subgroup) -> Subgroup {
    saturation_orbit_in(g, &g.whole(), u, h)
}

/// [`saturation_orbit`] computed inside the subgroup `ambient` (with `U, H ≤ ambient`).
pub fn saturation_orbit_in(
    g: &FiniteGroup,
    ambient: &Subgroup,
    u: &Subgroup,
    h: &Subgroup,
) -> Subgroup {
    let partition = orbit_partition(g, ambient, u, h);
    partition_fixer(g, ambient, u, &partition)
}

/// `[H]_U` as the intersection of the sets `H gUg^-1` over `g`.
pub fn saturation_formula(g: &FiniteGroup, u: &Subgroup, h: &Subgroup) -> Subgroup {
    saturation_formula_in(g, &g.whole(), u, h)
}

/// [`saturation_formula`] with `g` ranging over `ambient`.
pub fn saturation_formula_in(
    g: &FiniteGroup,
    ambient: &Subgroup,
    u: &Subgroup,
    h: &Subgroup,
) -> Subgroup {
    let mut acc = ambient.bits().clone();
    // gUg^-1 depends only on the coset gU.
    let (_, reps) = left_cosets(g, ambient, u);
    for x in reps {
        let mut conj = FixedBitSet::with_capacity(g.order());
        for y in u.elements() {
            conj.insert(g.conj(x, y) as usize);
        }
        acc.intersect_with(&g.set_product(h, &conj));
    }
    Subgroup::from_bits_unchecked(acc)
}

pub fn is_saturated(g: &FiniteGroup, u: &Subgroup, h: &Subgroup) -> bool {
    saturation_orbit(g, u, h) == *h
}

pub fn is_saturated_in(g: &FiniteGroup, ambient: &Subgroup, u: &Subgroup, h: &Subgroup) -> bool {
    saturation_orbit_in(g, ambient, u, h) == *h
}

/// A chain `G_1 ≤ .. ≤ G_N = G` with `U_1 ⊇ .. ⊇ U_N = {1}` and `U_i ≤ G_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    levels: Vec<Subgroup>,
    compacts: Vec<Subgroup>,
}

impl Tower {
    pub fn new(
        g: &FiniteGroup,
        levels: Vec<Subgroup>,
        compacts: Vec<Subgroup>,
    ) -> Result<Self, ChabError> {
        let bad = |msg: String| Err(ChabError::InvalidTower(msg));
        if levels.is_empty() || levels.len() != compacts.len() {
            return bad("need the same positive number of levels and compact subgroups".into());
        }
        for (i, w) in levels.windows(2).enumerate() {
            if !w[0].is_subgroup_of(&w[1]) {
                return bad(format!("G_{} is not contained in G_{}", i + 1, i + 2));
            }
        }
        for (i, w) in compacts.windows(2).enumerate() {
            if !w[1].is_subgroup_of(&w[0]) {
                return bad(format!("U_{} is not contained in U_{}", i + 2, i + 1));
            }
        }
        for (i, (gi, ui)) in levels.iter().zip(&compacts).enumerate() {
            if !ui.is_subgroup_of(gi) {
                return bad(format!("U_{} is not contained in G_{}", i + 1, i + 1));
            }
        }
        if *levels.last().unwrap() != g.whole() {
            return bad("the top level must be the whole group".into());
        }
        if compacts.last().unwrap().order() != 1 {
            return bad("the last compact subgroup must be trivial".into());
        }
        Ok(Tower { levels, compacts })
    }

    /// `N`.
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// `G_n`, 1-based.
    pub fn level(&self, n: usize) -> &Subgroup {
        &self.levels[n - 1]
    }

    /// `U_n`, 1-based.
    pub fn compact(&self, n: usize) -> &Subgroup {
        &self.compacts[n - 1]
    }

    fn check_index(&self, n: usize) -> Result<(), ChabError> {
        if n == 0 || n > self.height() {
            return Err(ChabError::Precondition(format!(
                "level {n} outside 1..={}",
                self.height()
            )));
        }
        Ok(())
    }
}

/// `λ_n(H) = [H ∩ G_n]_{U_n}` with the saturation taken inside `G_n`.
pub fn trunc_saturation(
    g: &FiniteGroup,
    tower: &Tower,
    n: usize,
    h: &Subgroup,
) -> Result<Subgroup, ChabError> {
    tower.check_index(n)?;
    let gn = tower.level(n);
    Ok(saturation_orbit_in(
        g,
        gn,
        tower.compact(n),
        &h.intersection(gn),
    ))
}

pub(super) fn check_level(tower: &Tower, n: usize) -> Result<(), ChabError> {
    tower.check_index(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chabfin::oracle::brute_force_saturation;
    use crate::perm::Perm;

    fn perms(gens: &[&str], degree: usize) -> FiniteGroup {
        let gens: Vec<Perm> = gens
            .iter()
            .map(|g| Perm::parse(g, Some(degree)).unwrap())
            .collect();
        FiniteGroup::from_perms(degree, &gens, 200).unwrap()
    }

    fn sub(g: &FiniteGroup, gens: &[&str]) -> Subgroup {
        let gens: Vec<String> = gens.iter().map(|s| s.to_string()).collect();
        g.parse_subgroup(&gens).unwrap()
    }

    #[test]
    fn s3_examples() {
        let s3 = perms(&["(0 1 2)", "(0 1)"], 3);
        let u = sub(&s3, &["(0 1)"]);
        let a3 = sub(&s3, &["(0 1 2)"]);
        let one = s3.trivial();
        for sat in [saturation_orbit, saturation_formula] {
            assert_eq!(sat(&s3, &u, &a3), s3.whole());
            assert_eq!(sat(&s3, &a3, &one), a3);
            assert_eq!(sat(&s3, &one, &u), u);
        }
        assert!(is_saturated(&s3, &one, &one));
        assert!(!is_saturated(&s3, &u, &a3));
        assert!(is_saturated(&s3, &u, &s3.whole()));
    }

    #[test]
    fn tower_d4_in_s4() {
        let s4 = perms(&["(0 1 2 3)", "(0 1)"], 4);
        let d4 = sub(&s4, &["(0 1 2 3)", "(0 2)"]);
        let z = sub(&s4, &["(0 2)(1 3)"]);
        let a4 = sub(&s4, &["(0 1 2)", "(1 2 3)"]);
        let tower = Tower::new(
            &s4,
            vec![d4.clone(), s4.whole()],
            vec![z.clone(), s4.trivial()],
        )
        .unwrap();
        let got = trunc_saturation(&s4, &tower, 1, &a4).unwrap();
        let ambient: Vec<u32> = d4.elements().collect();
        let expected = brute_force_saturation(
            &s4,
            &ambient,
            &z.elements().collect::<Vec<_>>(),
            &a4.intersection(&d4).elements().collect::<Vec<_>>(),
        );
        assert_eq!(got.elements().collect::<Vec<_>>(), expected);
        // A4 ∩ D4 is the normal Klein group, which contains Z(D4): it is already saturated.
        assert_eq!(got, a4.intersection(&d4));
        assert_eq!(trunc_saturation(&s4, &tower, 2, &a4).unwrap(), a4);
        assert_eq!(trunc_saturation(&s4, &tower, 1, &s4.whole()).unwrap(), d4);
        assert!(trunc_saturation(&s4, &tower, 3, &a4).is_err());
    }

    #[test]
    fn tower_validation() {
        let s3 = perms(&["(0 1 2)", "(0 1)"], 3);
        let u = sub(&s3, &["(0 1)"]);
        let a3 = sub(&s3, &["(0 1 2)"]);
        assert!(Tower::new(
            &s3,
            vec![a3.clone(), s3.whole()],
            vec![u.clone(), s3.trivial()]
        )
        .is_err());
        assert!(Tower::new(&s3, vec![s3.whole()], vec![u]).is_err());
        assert!(Tower::new(&s3, vec![a3.clone(), s3.whole()], vec![a3, s3.trivial()]).is_ok());
    }
}
