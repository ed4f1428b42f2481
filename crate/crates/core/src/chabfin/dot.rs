use std::fmt::Write;

use super::saturation::saturation_orbit;
use super::{FiniteGroup, Subgroup, SubgroupLattice};

/// Graphviz rendering of the subgroup lattice (Hasse diagram). With `u` given,
/// dashed edges `H → [H]_U` are added for unsaturated `H` and saturated
/// subgroups are drawn with a double border.
pub fn lattice_dot(g: &FiniteGroup, lattice: &SubgroupLattice, u: Option<&Subgroup>) -> String {
    let mut out = String::from("digraph subgroups {\n  rankdir=BT;\n  node [shape=box];\n");
    let sat: Option<Vec<usize>> = u.map(|u| {
        lattice
            .subgroups()
            .iter()
            .map(|h| {
                lattice
                    .index_of(&saturation_orbit(g, u, h))
                    .expect("saturations are subgroups")
            })
            .collect()
    });
    for (i, h) in lattice.subgroups().iter().enumerate() {
        let gens: Vec<&str> = g.generators_of(h).iter().map(|&x| g.label(x)).collect();
        let gens = if gens.is_empty() {
            "1".to_string()
        } else {
            gens.join(", ")
        };
        let extra = match &sat {
            Some(s) if s[i] == i => ", peripheries=2",
            _ => "",
        };
        writeln!(
            out,
            "  H{i} [label=\"H{i} |{}| class {}\\n<{}>\"{extra}];",
            h.order(),
            lattice.class_of(i),
            gens.replace('"', "'")
        )
        .unwrap();
    }
    for (i, j) in lattice.covers() {
        writeln!(out, "  H{i} -> H{j};").unwrap();
    }
    if let Some(s) = sat {
        for (i, &j) in s.iter().enumerate() {
            if i != j {
                writeln!(out, "  H{i} -> H{j} [style=dashed, color=blue];").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z4_with_saturation_edges() {
        let z4 = FiniteGroup::cyclic(4);
        let l = SubgroupLattice::new(&z4, 200).unwrap();
        let u = l.get(1).clone();
        let dot = lattice_dot(&z4, &l, Some(&u));
        assert!(dot.contains("H0 -> H1;"));
        assert!(dot.contains("H0 -> H1 [style=dashed"));
        assert!(dot.contains("H2 [label=\"H2 |4|"));
        assert_eq!(dot, lattice_dot(&z4, &l, Some(&u)));
    }
}
