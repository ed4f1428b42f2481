use std::collections::{BTreeMap, BTreeSet};

use chablab_core::chabfin::corpus::small_groups;
use chablab_core::chabfin::oracle::{brute_force_class_count, brute_force_subgroups};
use chablab_core::chabfin::*;
use rayon::prelude::*;

fn corpus() -> Vec<(String, FiniteGroup, SubgroupLattice)> {
    small_groups()
        .into_par_iter()
        .map(|e| {
            let g = e.build().unwrap();
            let l = SubgroupLattice::new(&g, DEFAULT_ORDER_BOUND).unwrap();
            (e.name, g, l)
        })
        .collect()
}

/// Isomorphism invariants strong enough to separate groups of order <= 24.
fn invariants(g: &FiniteGroup, l: &SubgroupLattice) -> Vec<usize> {
    let n = g.order() as u32;
    let mut v = vec![g.order()];
    let mut orders = BTreeMap::new();
    for x in 0..n {
        *orders.entry(g.element_order(x)).or_insert(0usize) += 1;
    }
    v.extend(orders.into_iter().flat_map(|(k, c)| [k, c]));
    v.push(usize::MAX);
    let center = (0..n)
        .filter(|&x| (0..n).all(|y| g.mul(x, y) == g.mul(y, x)))
        .count();
    let commutators: Vec<u32> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| g.mul(g.mul(x, y), g.mul(g.inv(x), g.inv(y))))
        .collect();
    let derived = g.generate(&commutators).order();
    let normal = l.subgroups().iter().filter(|h| g.is_normal(h)).count();
    let mut sub_orders = BTreeMap::new();
    for members in l.classes() {
        *sub_orders
            .entry((l.get(members[0]).order(), members.len()))
            .or_insert(0usize) += 1;
    }
    v.extend([
        center,
        derived,
        l.len(),
        l.classes().len(),
        normal,
        usize::MAX,
    ]);
    v.extend(sub_orders.into_iter().flat_map(|((o, s), c)| [o, s, c]));
    v
}

#[test]
fn corpus_is_complete_and_irredundant() {
    let groups = corpus();
    assert_eq!(groups.len(), 74);
    let expected = [
        1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15,
    ];
    for (k, &count) in expected.iter().enumerate() {
        let have: Vec<&str> = groups
            .iter()
            .filter(|(_, g, _)| g.order() == k + 1)
            .map(|(n, _, _)| n.as_str())
            .collect();
        assert_eq!(have.len(), count, "order {}: {have:?}", k + 1);
    }
    let mut seen: BTreeMap<Vec<usize>, &str> = BTreeMap::new();
    for (name, g, l) in &groups {
        if let Some(other) = seen.insert(invariants(g, l), name) {
            panic!("{name} and {other} share all invariants");
        }
    }
}

#[test]
fn lattice_matches_brute_force() {
    for (name, g, l) in corpus() {
        let brute = brute_force_subgroups(&g).unwrap();
        let mine: Vec<Vec<u32>> = l
            .subgroups()
            .iter()
            .map(|h| h.elements().collect())
            .collect();
        assert_eq!(mine, brute, "{name}");
        assert_eq!(
            l.classes().len(),
            brute_force_class_count(&g, &brute),
            "{name}"
        );
    }
}

/// Runs `check` over all pairs `(U, H)` of every corpus group, in parallel.
fn all_pairs(
    check: impl Fn(&FiniteGroup, &SubgroupLattice, &Subgroup, &Subgroup) -> Result<(), String> + Sync,
) {
    let failures: Vec<String> = corpus()
        .par_iter()
        .flat_map_iter(|(name, g, l)| {
            let check = &check;
            l.subgroups().iter().flat_map(move |u| {
                l.subgroups()
                    .iter()
                    .filter_map(move |h| check(g, l, u, h).err().map(|e| format!("{name}: {e}")))
            })
        })
        .collect();
    assert!(
        failures.is_empty(),
        "{} failures, first: {}",
        failures.len(),
        failures[0]
    );
}

#[test]
fn orbit_definition_equals_intersection_formula() {
    all_pairs(|g, _, u, h| {
        let a = saturation_orbit(g, u, h);
        let b = saturation_formula(g, u, h);
        (a == b)
            .then_some(())
            .ok_or_else(|| format!("U={u:?} H={h:?}: {a:?} vs {b:?}"))
    });
}

#[test]
fn saturation_is_an_idempotent_closure() {
    all_pairs(|g, l, u, h| {
        let s = saturation_orbit(g, u, h);
        if l.index_of(&s).is_none() {
            return Err(format!("[H]_U is not a subgroup for U={u:?} H={h:?}"));
        }
        if !h.is_subgroup_of(&s) {
            return Err(format!("H not in [H]_U for U={u:?} H={h:?}"));
        }
        if saturation_orbit(g, u, &s) != s {
            return Err(format!("not idempotent for U={u:?} H={h:?}"));
        }
        Ok(())
    });
}

#[test]
fn normal_case_is_product() {
    all_pairs(|g, _, u, h| {
        if !g.is_normal(u) {
            return Ok(());
        }
        let hu = g.set_product(h, u.bits());
        (saturation_orbit(g, u, h).bits() == &hu)
            .then_some(())
            .ok_or_else(|| format!("[H]_U != HU for U={u:?} H={h:?}"))
    });
}

#[test]
fn saturation_is_equivariant() {
    all_pairs(|g, _, u, h| {
        let s = saturation_orbit(g, u, h);
        for x in 0..g.order() as u32 {
            if saturation_orbit(g, u, &g.conjugate(x, h)) != g.conjugate(x, &s) {
                return Err(format!("x={x} U={u:?} H={h:?}"));
            }
        }
        Ok(())
    });
}

/// Restricted growth strings: every set partition of `0..m`.
fn set_partitions(m: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, m: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            rec(cur, m, max.max(b), out);
            cur.pop();
        }
    }
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    rec(&mut vec![0], m, 0, &mut out);
    out
}

#[test]
fn saturated_subgroups_are_partition_fixers() {
    for (name, g, l) in corpus() {
        for u in l.subgroups() {
            let whole = g.whole();
            let cosets = g.order() / u.order();
            let saturated: BTreeSet<&Subgroup> = l
                .subgroups()
                .iter()
                .filter(|h| is_saturated(&g, u, h))
                .collect();
            // Every saturated H fixes its own orbit partition.
            for h in l.subgroups() {
                let p = orbit_partition(&g, &whole, u, h);
                assert_eq!(
                    partition_fixer(&g, &whole, u, &p),
                    saturation_orbit(&g, u, h),
                    "{name}"
                );
            }
            // Every partition fixer is saturated (checked exhaustively for small G/U).
            if cosets <= 8 {
                let fixers: BTreeSet<Subgroup> = set_partitions(cosets)
                    .iter()
                    .map(|p| partition_fixer(&g, &whole, u, p))
                    .collect();
                assert!(fixers.iter().all(|f| saturated.contains(f)), "{name}");
                assert_eq!(fixers.len(), saturated.len(), "{name}");
            }
        }
    }
}

#[test]
fn towers_with_simple_quotients() {
    // A4 / V4 ≅ C3 and S4 / A4 ≅ C2 have no proper non-trivial subgroups, so the
    // only saturated subgroups at those levels are U_n and G_n, and every
    // invariant measure on saturated subgroups lives on {U_n, G_n}.
    let groups = corpus();
    let (_, s4, l) = groups.iter().find(|(n, _, _)| n == "S4").unwrap();
    let sub = |gens: &[&str]| {
        s4.parse_subgroup(&gens.iter().map(|s| s.to_string()).collect::<Vec<_>>())
            .unwrap()
    };
    let a4 = sub(&["(0 1 2)", "(1 2 3)"]);
    let v4 = sub(&["(0 1)(2 3)", "(0 2)(1 3)"]);
    let towers = [
        Tower::new(
            s4,
            vec![a4.clone(), s4.whole()],
            vec![v4.clone(), s4.trivial()],
        )
        .unwrap(),
        Tower::new(
            s4,
            vec![s4.whole(), s4.whole()],
            vec![a4.clone(), s4.trivial()],
        )
        .unwrap(),
    ];
    for tower in &towers {
        let (gn, un) = (tower.level(1), tower.compact(1));
        let saturated: Vec<&Subgroup> = l
            .subgroups()
            .iter()
            .filter(|h| h.is_subgroup_of(gn) && is_saturated_in(s4, gn, un, h))
            .collect();
        assert_eq!(saturated, vec![un, gn]);
        for h in l.subgroups() {
            let image = trunc_saturation(s4, tower, 1, h).unwrap();
            assert!(image == *un || image == *gn);
            assert_eq!(trunc_saturation(s4, tower, 2, h).unwrap(), *h);
        }
        let q = Quotient::new(s4, gn, un).unwrap();
        let ql = SubgroupLattice::new(&q.group, 200).unwrap();
        for mu in irs_vertices(&ql) {
            let pushed = saturated_push(s4, tower, 1, &mu).unwrap();
            assert!(pushed.support_saturated);
            assert!(pushed.pushed.support().all(|h| h == un || h == gn));
            assert_eq!(pushed.pushed, pushed.lifted);
        }
    }
}
