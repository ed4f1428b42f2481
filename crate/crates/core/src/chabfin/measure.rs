//! Uniformly recurrent and invariant random subgroups of a finite group.
//!
//! For finite `G` the space of subgroups is discrete, so the definitions degenerate:
//! a URS is a single conjugacy class of subgroups, and the ergodic IRS's are the
//! uniform measures on those classes. These are deliberately literal readings and
//! say nothing about non-discrete groups.

use std::collections::BTreeMap;

use num_traits::One;
use serde::Serialize;

use super::saturation::{check_level, is_saturated_in, trunc_saturation, Tower};
use super::{ChabError, FiniteGroup, Subgroup, SubgroupLattice};
use crate::exactnum::ExactRational;

/// A probability measure on the subgroups of a group, with exact rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantMeasure {
    weights: BTreeMap<Subgroup, ExactRational>,
}

impl InvariantMeasure {
    /// Drops zero weights; fails on negative weights or a total other than `1`.
    pub fn new(
        weights: impl IntoIterator<Item = (Subgroup, ExactRational)>,
    ) -> Result<Self, ChabError> {
        let mut map: BTreeMap<Subgroup, ExactRational> = BTreeMap::new();
        for (h, w) in weights {
            if w < ExactRational::zero() {
                return Err(ChabError::InvalidMeasure(format!("negative weight {w}")));
            }
            let entry = map.entry(h).or_insert_with(ExactRational::zero);
            *entry = &*entry + &w;
        }
        map.retain(|_, w| !w.is_zero());
        let total = map.values().fold(ExactRational::zero(), |a, w| &a + w);
        if total != ExactRational::from_int(1) {
            return Err(ChabError::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(InvariantMeasure { weights: map })
    }

    pub fn dirac(h: Subgroup) -> Self {
        InvariantMeasure {
            weights: BTreeMap::from([(h, ExactRational::from_int(1))]),
        }
    }

    /// The uniform measure on `class`.
    pub fn uniform(class: &[Subgroup]) -> Result<Self, ChabError> {
        let w = ExactRational::new(One::one(), (class.len() as i64).into())
            .map_err(|_| ChabError::InvalidMeasure("empty class".into()))?;
        Self::new(class.iter().map(|h| (h.clone(), w.clone())))
    }

    pub fn weights(&self) -> &BTreeMap<Subgroup, ExactRational> {
        &self.weights
    }

    pub fn weight(&self, h: &Subgroup) -> ExactRational {
        self.weights
            .get(h)
            .cloned()
            .unwrap_or_else(ExactRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Subgroup> {
        self.weights.keys()
    }

    /// Whether the weights are constant under conjugation by `acting`.
    pub fn is_invariant(&self, g: &FiniteGroup, acting: &Subgroup) -> bool {
        let gens = g.generators_of(acting);
        self.weights
            .iter()
            .all(|(h, w)| gens.iter().all(|&s| self.weight(&g.conjugate(s, h)) == *w))
    }

    /// Image measure under `f`.
    pub fn push_forward<E>(
        &self,
        mut f: impl FnMut(&Subgroup) -> Result<Subgroup, E>,
    ) -> Result<Self, E> {
        let mut out: BTreeMap<Subgroup, ExactRational> = BTreeMap::new();
        for (h, w) in &self.weights {
            let entry = out.entry(f(h)?).or_insert_with(ExactRational::zero);
            *entry = &*entry + w;
        }
        Ok(InvariantMeasure { weights: out })
    }

    pub fn report(&self, g: &FiniteGroup) -> MeasureReport {
        MeasureReport {
            atoms: self
                .weights
                .iter()
                .map(|(h, w)| MeasureAtom {
                    subgroup: g.describe(h),
                    weight: w.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureAtom {
    pub subgroup: super::SubgroupReport,
    pub weight: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub atoms: Vec<MeasureAtom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UrsKind {
    /// The class `{{1}}`.
    Trivial,
    /// The class `{G}`.
    Whole,
    Proper,
}

/// One URS: a conjugacy class of subgroups, by lattice index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Urs {
    pub members: Vec<usize>,
    pub kind: UrsKind,
}

/// All URS's of `g`, i.e. its conjugacy classes of subgroups, in lattice order.
pub fn urs_list(g: &FiniteGroup, lattice: &SubgroupLattice) -> Vec<Urs> {
    lattice
        .classes()
        .iter()
        .map(|members| {
            let h = lattice.get(members[0]);
            let kind = if h.order() == 1 {
                UrsKind::Trivial
            } else if h.order() == g.order() {
                UrsKind::Whole
            } else {
                UrsKind::Proper
            };
            Urs {
                members: members.clone(),
                kind,
            }
        })
        .collect()
}

/// The extreme points of the IRS polytope: one uniform measure per conjugacy class.
pub fn irs_vertices(lattice: &SubgroupLattice) -> Vec<InvariantMeasure> {
    lattice
        .classes()
        .iter()
        .map(|members| {
            let class: Vec<Subgroup> = members.iter().map(|&i| lattice.get(i).clone()).collect();
            InvariantMeasure::uniform(&class).expect("classes are non-empty")
        })
        .collect()
}

/// `K / U` for `U` normal in `K ≤ G`, with the projection from `K`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FiniteGroup,
    /// Coset index of each element of `G` (`usize::MAX` outside `K`).
    pub projection: Vec<usize>,
    ambient: Subgroup,
}

impl Quotient {
    pub fn new(g: &FiniteGroup, ambient: &Subgroup, u: &Subgroup) -> Result<Self, ChabError> {
        if !u.is_subgroup_of(ambient) || !g.is_normal_in(u, ambient) {
            return Err(ChabError::NotNormal(format!(
                "subgroup of order {} is not normal in the subgroup of order {}",
                u.order(),
                ambient.order()
            )));
        }
        let (projection, reps) = super::saturation::left_cosets(g, ambient, u);
        let table = reps
            .iter()
            .map(|&a| {
                reps.iter()
                    .map(|&b| projection[g.mul(a, b) as usize] as u32)
                    .collect()
            })
            .collect();
        let labels = reps.iter().map(|&r| format!("{}U", g.label(r))).collect();
        let group = FiniteGroup::from_table(table, Some(labels))?;
        Ok(Quotient {
            group,
            projection,
            ambient: ambient.clone(),
        })
    }

    /// The preimage of a subgroup of the quotient.
    pub fn preimage(&self, g: &FiniteGroup, k: &Subgroup) -> Subgroup {
        let mut bits = fixedbitset::FixedBitSet::with_capacity(g.order());
        for x in self.ambient.elements() {
            if k.contains(self.projection[x as usize] as u32) {
                bits.insert(x as usize);
            }
        }
        Subgroup::from_bits_unchecked(bits)
    }

    /// The image of a subgroup of the ambient group.
    pub fn image(&self, h: &Subgroup) -> Subgroup {
        let mut bits = fixedbitset::FixedBitSet::with_capacity(self.group.order());
        for x in h.elements() {
            bits.insert(self.projection[x as usize]);
        }
        Subgroup::from_bits_unchecked(bits)
    }
}

/// Result of [`saturated_push`].
#[derive(Clone, Debug)]
pub struct PushResult {
    pub quotient: Quotient,
    /// The input measure carried to `U_n`-saturated subgroups of `G_n`.
    pub lifted: InvariantMeasure,
    /// `λ_n` applied to the lifted measure.
    pub pushed: InvariantMeasure,
    /// Every subgroup in the support of `pushed` is `U_n`-saturated in `G_n`.
    pub support_saturated: bool,
}

/// Identifies an IRS of `G_n / U_n` with a `G_n`-invariant measure on
/// `U_n`-saturated subgroups of `G_n` (by taking preimages) and pushes it along `λ_n`.
pub fn saturated_push(
    g: &FiniteGroup,
    tower: &Tower,
    n: usize,
    mu: &InvariantMeasure,
) -> Result<PushResult, ChabError> {
    check_level(tower, n)?;
    let (gn, un) = (tower.level(n), tower.compact(n));
    let quotient = Quotient::new(g, gn, un)?;
    let q = &quotient.group;
    if !mu.is_invariant(q, &q.whole()) {
        return Err(ChabError::InvalidMeasure(
            "measure is not invariant under the quotient".into(),
        ));
    }
    for k in mu.support() {
        if k.bits().len() != q.order() {
            return Err(ChabError::InvalidMeasure(
                "measure does not live on the quotient".into(),
            ));
        }
        q.subgroup_from_bits(k.bits().clone())?;
    }
    let lifted = mu.push_forward(|k| Ok::<_, ChabError>(quotient.preimage(g, k)))?;
    let pushed = lifted.push_forward(|h| trunc_saturation(g, tower, n, h))?;
    let support_saturated = pushed.support().all(|h| is_saturated_in(g, gn, un, h));
    Ok(PushResult {
        quotient,
        lifted,
        pushed,
        support_saturated,
    })
}

/// The inverse identification: a measure on `U_n`-saturated subgroups of `G_n`
/// to a measure on subgroups of `G_n / U_n`.
pub fn saturated_pull(
    g: &FiniteGroup,
    tower: &Tower,
    n: usize,
    mu: &InvariantMeasure,
) -> Result<InvariantMeasure, ChabError> {
    check_level(tower, n)?;
    let (gn, un) = (tower.level(n), tower.compact(n));
    let quotient = Quotient::new(g, gn, un)?;
    mu.push_forward(|h| {
        if !h.is_subgroup_of(gn) || !is_saturated_in(g, gn, un, h) {
            return Err(ChabError::InvalidMeasure("support is not saturated".into()));
        }
        Ok(quotient.image(h))
    })
}
