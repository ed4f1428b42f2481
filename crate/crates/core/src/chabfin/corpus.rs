//! One representative of every isomorphism class of groups of order at most 24,
//! each given by permutation generators.

use serde::Serialize;

use super::{ChabError, FiniteGroup};
use crate::perm::Perm;

#[derive(Clone, Debug, Serialize)]
pub struct CorpusEntry {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Perm>,
}

impl CorpusEntry {
    pub fn build(&self) -> Result<FiniteGroup, ChabError> {
        FiniteGroup::from_perms(self.degree, &self.generators, 10_000)
    }
}

/// Generators of the left regular representation of `g` (degree `|G|`).
fn regular(name: &str, g: &FiniteGroup) -> CorpusEntry {
    let n = g.order();
    let generators = g
        .generators()
        .iter()
        .map(|&s| {
            Perm::from_images((0..n as u32).map(|x| g.mul(s, x)).collect())
                .expect("rows are permutations")
        })
        .collect();
    CorpusEntry {
        name: name.into(),
        degree: n,
        generators,
    }
}

fn explicit(name: &str, degree: usize, gens: &[&str]) -> CorpusEntry {
    CorpusEntry {
        name: name.into(),
        degree,
        generators: gens
            .iter()
            .map(|g| Perm::parse(g, Some(degree)).expect("corpus generators parse"))
            .collect(),
    }
}

fn c(n: usize) -> FiniteGroup {
    FiniteGroup::cyclic(n)
}

fn x(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
    FiniteGroup::direct_product(a, b)
}

fn dihedral(m: usize) -> FiniteGroup {
    FiniteGroup::metacyclic(m, 2, m - 1, 0)
}

fn dicyclic(m: usize) -> FiniteGroup {
    FiniteGroup::metacyclic(2 * m, 2, 2 * m - 1, m)
}

/// `(C4 × C2) ⋊ C2` where the generator fixes `a` and sends `b ↦ a^2 b` (`pauli = true`),
/// or fixes `b` and sends `a ↦ ab`.
fn c4c2_ext(pauli: bool) -> FiniteGroup {
    let n = x(&c(4), &c(2));
    // Element (i, j) has index 2i + j; a = (1, 0), b = (0, 1).
    let auto: Vec<u32> = (0..8u32)
        .map(|e| {
            let (i, j) = (e / 2, e % 2);
            let (i2, j2) = if pauli {
                ((i + 2 * j) % 4, j)
            } else {
                (i, (j + i) % 2)
            };
            2 * i2 + j2
        })
        .collect();
    FiniteGroup::semidirect_cyclic(&n, &auto, 2).expect("automorphism of C4 x C2")
}

/// `SL(2, 3)` acting on the eight non-zero vectors of `F_3^2`.
fn sl23() -> CorpusEntry {
    let vecs: Vec<(u32, u32)> = (0..9)
        .map(|i| (i / 3, i % 3))
        .filter(|&v| v != (0, 0))
        .collect();
    let act = |m: [[u32; 2]; 2]| {
        let images = vecs
            .iter()
            .map(|&(a, b)| {
                let w = (
                    (m[0][0] * a + m[0][1] * b) % 3,
                    (m[1][0] * a + m[1][1] * b) % 3,
                );
                vecs.iter().position(|&v| v == w).unwrap() as u32
            })
            .collect();
        Perm::from_images(images).unwrap()
    };
    CorpusEntry {
        name: "SL(2,3)".into(),
        degree: 8,
        generators: vec![act([[1, 1], [0, 1]]), act([[1, 0], [1, 1]])],
    }
}

/// The 74 groups of order `1..=24`, ordered by order.
pub fn small_groups() -> Vec<CorpusEntry> {
    let v4 = x(&c(2), &c(2));
    let s3 = dihedral(3);
    let d4 = dihedral(4);
    let q8 = dicyclic(2);
    let a4 = explicit("A4", 4, &["(0 1 2)", "(1 2 3)"]).build().unwrap();
    vec![
        regular("C1", &c(1)),
        regular("C2", &c(2)),
        regular("C3", &c(3)),
        regular("C4", &c(4)),
        regular("C2^2", &v4),
        regular("C5", &c(5)),
        regular("C6", &c(6)),
        explicit("S3", 3, &["(0 1 2)", "(0 1)"]),
        regular("C7", &c(7)),
        regular("C8", &c(8)),
        regular("C4xC2", &x(&c(4), &c(2))),
        regular("C2^3", &x(&v4, &c(2))),
        explicit("D4", 4, &["(0 1 2 3)", "(0 2)"]),
        regular("Q8", &q8),
        regular("C9", &c(9)),
        regular("C3^2", &x(&c(3), &c(3))),
        regular("C10", &c(10)),
        regular("D5", &dihedral(5)),
        regular("C11", &c(11)),
        regular("C12", &c(12)),
        regular("C6xC2", &x(&c(6), &c(2))),
        regular("D6", &dihedral(6)),
        explicit("A4", 4, &["(0 1 2)", "(1 2 3)"]),
        regular("Dic3", &dicyclic(3)),
        regular("C13", &c(13)),
        regular("C14", &c(14)),
        regular("D7", &dihedral(7)),
        regular("C15", &c(15)),
        regular("C16", &c(16)),
        regular("C4^2", &x(&c(4), &c(4))),
        regular("C8xC2", &x(&c(8), &c(2))),
        regular("C4xC2^2", &x(&x(&c(4), &c(2)), &c(2))),
        regular("C2^4", &x(&v4, &v4)),
        regular("D8", &dihedral(8)),
        regular("Q16", &dicyclic(4)),
        regular("SD16", &FiniteGroup::metacyclic(8, 2, 3, 0)),
        regular("M16", &FiniteGroup::metacyclic(8, 2, 5, 0)),
        regular("C4:C4", &FiniteGroup::metacyclic(4, 4, 3, 0)),
        regular("D4xC2", &x(&d4, &c(2))),
        regular("Q8xC2", &x(&q8, &c(2))),
        regular("C2^2:C4", &c4c2_ext(false)),
        regular("C4oD4", &c4c2_ext(true)),
        regular("C17", &c(17)),
        regular("C18", &c(18)),
        regular("C6xC3", &x(&c(6), &c(3))),
        regular("D9", &dihedral(9)),
        regular("S3xC3", &x(&s3, &c(3))),
        explicit("C3^2:C2", 6, &["(0 1 2)", "(3 4 5)", "(1 2)(4 5)"]),
        regular("C19", &c(19)),
        regular("C20", &c(20)),
        regular("C10xC2", &x(&c(10), &c(2))),
        regular("D10", &dihedral(10)),
        regular("Dic5", &dicyclic(5)),
        regular("F20", &FiniteGroup::metacyclic(5, 4, 2, 0)),
        regular("C21", &c(21)),
        regular("C7:C3", &FiniteGroup::metacyclic(7, 3, 2, 0)),
        regular("C22", &c(22)),
        regular("D11", &dihedral(11)),
        regular("C23", &c(23)),
        regular("C24", &c(24)),
        regular("C12xC2", &x(&c(12), &c(2))),
        regular("C6xC2^2", &x(&x(&c(6), &c(2)), &c(2))),
        explicit("S4", 4, &["(0 1 2 3)", "(0 1)"]),
        sl23(),
        regular("D12", &dihedral(12)),
        regular("Dic6", &dicyclic(6)),
        regular("C3:C8", &FiniteGroup::metacyclic(3, 8, 2, 0)),
        regular("C4xS3", &x(&c(4), &s3)),
        regular("C2xDic3", &x(&c(2), &dicyclic(3))),
        explicit("C3:D4", 7, &["(0 1 2)", "(3 4 5 6)(1 2)", "(3 5)"]),
        regular("C3xD4", &x(&c(3), &d4)),
        regular("C3xQ8", &x(&c(3), &q8)),
        regular("C2xA4", &x(&c(2), &a4)),
        regular("C2^2xS3", &x(&v4, &s3)),
    ]
}
