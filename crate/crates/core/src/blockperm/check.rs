//! The splitting check for `G_n / U_n`: on products of a generator set, the
//! restriction map to `Z_{<k_n}` is multiplicative, lands in the even
//! permutations, and vanishes exactly on `U_n`.

use std::sync::Arc;

use serde::Serialize;

use super::{BlockError, BlockFamily, BlockPermElement, Finitary};
use crate::perm::Perm;
use crate::tail::Tail;

/// Twelve elements of `G` for [`BlockFamily::uniform_alternating`]`(3)`: block
/// rotations at blocks 0..3, two periodic tails, and six even finitary permutations
/// (some straddling cutpoints, one reaching into negative integers).
pub fn splitting_generators(
    family: &Arc<BlockFamily>,
) -> Result<Vec<(String, BlockPermElement)>, BlockError> {
    let rot = Perm::from_images(vec![1, 2, 0])?;
    let rot2 = Perm::from_images(vec![2, 0, 1])?;
    let mut gens = Vec::new();
    for n in 0..4u64 {
        let tail = Tail::identity().with_exception(n, rot.clone());
        gens.push((
            format!("d{n}"),
            BlockPermElement::from_tail(family.clone(), tail)?,
        ));
    }
    gens.push((
        "r".into(),
        BlockPermElement::from_tail(family.clone(), Tail::periodic(vec![rot.clone()]))?,
    ));
    gens.push((
        "r'".into(),
        BlockPermElement::from_tail(family.clone(), Tail::periodic(vec![rot, rot2]))?,
    ));
    for cycles in [
        "(2 3 4)",
        "(5 6 7)",
        "(0 3)(1 4)",
        "(4 7 10)",
        "(-2 -1 0)",
        "(1 2)(9 10)",
    ] {
        let w = Finitary::parse(cycles)?;
        gens.push((
            cycles.to_string(),
            BlockPermElement::finitary(family.clone(), w)?,
        ));
    }
    Ok(gens)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SplittingReport {
    pub generators: usize,
    pub max_length: usize,
    pub products: usize,
    /// `(product, level)` instances with every factor in `G_n`.
    pub instances: usize,
    pub homomorphism_failures: Vec<String>,
    pub kernel_failures: Vec<String>,
    pub odd_images: Vec<String>,
}

impl SplittingReport {
    pub fn passed(&self) -> bool {
        self.homomorphism_failures.is_empty()
            && self.kernel_failures.is_empty()
            && self.odd_images.is_empty()
    }
}

/// Checks every product of at most `max_length` generators at levels `0..levels`.
/// Kernel membership is decided pointwise (fixing all of `Z_{<k_n}`), independently
/// of the quotient map.
pub fn splitting_check(
    gens: &[(String, BlockPermElement)],
    max_length: usize,
    levels: u64,
) -> Result<SplittingReport, BlockError> {
    let mut report = SplittingReport {
        generators: gens.len(),
        max_length,
        ..Default::default()
    };
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_length {
        let mut next = Vec::new();
        for word in &frontier {
            for i in 0..gens.len() {
                let mut w = word.clone();
                w.push(i);
                check_product(gens, &w, levels, &mut report)?;
                next.push(w);
            }
        }
        frontier = next;
    }
    Ok(report)
}

fn check_product(
    gens: &[(String, BlockPermElement)],
    word: &[usize],
    levels: u64,
    report: &mut SplittingReport,
) -> Result<(), BlockError> {
    report.products += 1;
    let factors: Vec<&BlockPermElement> = word.iter().map(|&i| &gens[i].1).collect();
    let mut g = factors[0].clone();
    for f in &factors[1..] {
        g = g.compose(f)?;
    }
    let name = || {
        word.iter()
            .map(|&i| gens[i].0.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    };
    for n in 0..levels {
        let mut all_in = true;
        for f in &factors {
            all_in &= f.in_gn(n)?;
        }
        if !all_in {
            continue;
        }
        report.instances += 1;
        let mut expected = Finitary::identity();
        for f in &factors {
            expected = expected.compose(&f.quotient(n)?);
        }
        let q = g.quotient(n)?;
        if q != expected {
            report
                .homomorphism_failures
                .push(format!("{} at n = {n}", name()));
        }
        if !q.is_even() {
            report.odd_images.push(format!("{} at n = {n}", name()));
        }
        let kn = g.family().cutpoint(n);
        let lo = g.window().bounds().map_or(0, |(lo, _)| lo).min(0);
        let fixes_below = (lo..kn).all(|x| g.apply(x) == x);
        if fixes_below != q.is_identity() || fixes_below != g.neighborhood_member(n)? {
            report
                .kernel_failures
                .push(format!("{} at n = {n}", name()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_products_split() {
        let family = Arc::new(BlockFamily::uniform_alternating(3).unwrap());
        let gens = splitting_generators(&family).unwrap();
        assert_eq!(gens.len(), 12);
        assert!(gens.iter().all(|(_, g)| g.in_g()));
        let report = splitting_check(&gens, 2, 5).unwrap();
        assert_eq!(report.products, 12 + 144);
        assert!(report.passed(), "{report:?}");
        assert!(report.instances > report.products);
    }
}
