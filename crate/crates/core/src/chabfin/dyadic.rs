//! `U`-saturation in `G = Z[1/2] ⋊ {±1}` with `U = {±1}`, handled symbolically.
//!
//! Elements are pairs `(t, s)` with `t` dyadic and `s = ±1`, multiplied by
//! `(t, s)(t', s') = (t + s t', s s')`. For `H = 2^-n Z` every conjugate
//! `gUg^-1` with `g = (b, σ)` is `{(0, 1), (2b, -1)}`, so `H gUg^-1` has
//! translation part `H` and reflection part `H + 2b`. Two values `b, b'` with
//! `2b - 2b' ∉ H` make the reflection parts disjoint, leaving `[H]_U = H`.
//! For `H = Z[1/2]` instead `H + 2b = H` for every `b`, so `[H]_U = G`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::exactnum::{PScalar, Prime, Valuation};

const INITIAL_NUMERATOR_BOUND: i64 = 16;
const INITIAL_EXPONENT_BOUND: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    pub t: PScalar,
    pub s: i8,
}

impl Dyadic {
    pub fn new(t: PScalar, s: i8) -> Self {
        assert!(s == 1 || s == -1);
        Dyadic { t, s }
    }

    pub fn identity() -> Self {
        Dyadic::new(PScalar::zero(two()), 1)
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        let st = if self.s == 1 {
            other.t.clone()
        } else {
            -&other.t
        };
        Dyadic::new(&self.t + &st, self.s * other.s)
    }

    pub fn inverse(&self) -> Dyadic {
        // (t, s)^-1 = (-s t, s).
        let t = if self.s == 1 {
            -&self.t
        } else {
            self.t.clone()
        };
        Dyadic::new(t, self.s)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {})",
            fmt_dyadic(&self.t),
            if self.s == 1 { "+1" } else { "-1" }
        )
    }
}

fn two() -> Prime {
    Prime::new(2).unwrap()
}

/// `m/2^e` as a plain fraction.
pub fn fmt_dyadic(x: &PScalar) -> String {
    x.to_rational().to_string()
}

/// Whether `x ∈ 2^-n Z`.
fn in_h(x: &PScalar, n: u32) -> bool {
    match x.valuation() {
        Valuation::Infinite => true,
        Valuation::Finite(v) => v >= -(n as i64),
    }
}

/// Dyadics `m / 2^e` with `|m| ≤ num_bound`, `0 ≤ e ≤ exp_bound`, deduplicated, in
/// order of increasing denominator, then `|m|`, then sign.
fn candidates(num_bound: i64, exp_bound: u32) -> Vec<PScalar> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for e in 0..=exp_bound {
        for a in 0..=num_bound {
            for m in [a, -a] {
                let x = PScalar::new(two(), BigInt::from(m), -(e as i64));
                if seen.insert(x.clone()) {
                    out.push(x);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SaturatedRow {
    pub n: u32,
    /// `H_n = 2^-n Z`.
    pub subgroup: String,
    pub saturated: bool,
    pub b: String,
    pub b_prime: String,
    /// The reflections `(2b, -1)` and `(2b', -1)` of the two conjugates of `U`.
    pub conjugates: [String; 2],
    pub difference: String,
    /// Search bounds in force when the witness was found.
    pub numerator_bound: i64,
    pub exponent_bound: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullRow {
    pub subgroup: String,
    pub saturation_is_whole_group: bool,
    /// Number of values `b` for which `H + 2b = H` was confirmed.
    pub checked: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicReport {
    pub rows: Vec<SaturatedRow>,
    pub full: FullRow,
}

impl DyadicReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.saturated) && self.full.saturation_is_whole_group
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("G = Z[1/2] x| {+1,-1}, U = {+1,-1}\n");
        for r in &self.rows {
            out.push_str(&format!(
                "[H_{n}]_U = H_{n}: {} (H_{n} = {}; witness b = {}, b' = {}; 2b - 2b' = {} not in H_{n})\n",
                if r.saturated { "yes" } else { "NO" },
                r.subgroup,
                r.b,
                r.b_prime,
                r.difference,
                n = r.n,
            ));
        }
        out.push_str(&format!(
            "[Z[1/2]]_U = G: {} (H + 2b = H checked for {} values of b)\n",
            if self.full.saturation_is_whole_group {
                "yes"
            } else {
                "NO"
            },
            self.full.checked
        ));
        out
    }
}

/// Verifies `[H_n]_U = H_n` for `n = 1..=n_max` and `[Z[1/2]]_U = G`.
pub fn dyadic_counterexample(n_max: u32) -> DyadicReport {
    let u_reflection = Dyadic::new(PScalar::zero(two()), -1);
    // The reflection in g U g^-1, computed by multiplying out rather than by formula.
    let conjugate = |b: &PScalar| {
        let g = Dyadic::new(b.clone(), 1);
        g.mul(&u_reflection).mul(&g.inverse())
    };
    let mut rows = Vec::new();
    for n in 1..=n_max.max(1) {
        let (mut num_bound, mut exp_bound) = (INITIAL_NUMERATOR_BOUND, INITIAL_EXPONENT_BOUND);
        let row = loop {
            let cands = candidates(num_bound, exp_bound);
            let found = cands.iter().enumerate().find_map(|(i, b)| {
                let cb = conjugate(b);
                cands[i + 1..].iter().find_map(|b2| {
                    let cb2 = conjugate(b2);
                    // Translation parts of both conjugates are trivial, so the intersection's
                    // translation part is H; the reflection parts H + cb.t and H + cb2.t are
                    // disjoint exactly when their difference leaves H.
                    let diff = &cb.t - &cb2.t;
                    (cb.s == -1 && cb2.s == -1 && !in_h(&diff, n))
                        .then(|| (b.clone(), b2.clone(), cb.clone(), cb2, diff))
                })
            });
            match found {
                Some((b, b2, cb, cb2, diff)) => {
                    break SaturatedRow {
                        n,
                        subgroup: format!("2^-{n} Z"),
                        saturated: true,
                        b: fmt_dyadic(&b),
                        b_prime: fmt_dyadic(&b2),
                        conjugates: [cb.to_string(), cb2.to_string()],
                        difference: fmt_dyadic(&diff),
                        numerator_bound: num_bound,
                        exponent_bound: exp_bound,
                    };
                }
                None => {
                    num_bound *= 2;
                    exp_bound *= 2;
                }
            }
        };
        rows.push(row);
    }
    // H = Z[1/2]: for every b and every reflection (c, -1), the element
    // (c, -1) (2b, -1)^-1 is a translation, hence lies in H; so (c, -1) ∈ H gUg^-1.
    let cands = candidates(INITIAL_NUMERATOR_BOUND, INITIAL_EXPONENT_BOUND);
    let reflections: Vec<Dyadic> = candidates(4, 3)
        .into_iter()
        .map(|c| Dyadic::new(c, -1))
        .collect();
    let whole = cands.iter().all(|b| {
        let c = conjugate(b);
        reflections.iter().all(|r| r.mul(&c.inverse()).s == 1)
    });
    DyadicReport {
        rows,
        full: FullRow {
            subgroup: "Z[1/2]".into(),
            saturation_is_whole_group: whole,
            checked: cands.len(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law() {
        let p = two();
        let g = Dyadic::new(PScalar::new(p, 3, -2), -1);
        let h = Dyadic::new(PScalar::new(p, 1, -1), 1);
        assert_eq!(g.mul(&g.inverse()), Dyadic::identity());
        assert_eq!(g.mul(&h).mul(&g), g.mul(&h.mul(&g)));
        // (b, 1)(0, -1)(b, 1)^-1 = (2b, -1).
        let b = Dyadic::new(PScalar::new(p, 5, -3), 1);
        let c = b.mul(&Dyadic::new(PScalar::zero(p), -1)).mul(&b.inverse());
        assert_eq!(c, Dyadic::new(PScalar::new(p, 5, -2), -1));
    }

    #[test]
    fn witnesses() {
        let r = dyadic_counterexample(6);
        assert!(r.all_pass());
        assert_eq!(r.rows.len(), 6);
        // b' = 1/4 gives 2b - 2b' = -1/2 ∈ (1/2)Z, so the search moves on to 1/8.
        assert_eq!(
            (r.rows[0].b.as_str(), r.rows[0].b_prime.as_str()),
            ("0", "1/8")
        );
        assert_eq!(r.rows[0].difference, "-1/4");
        // n = 5 needs b' = 1/128, beyond the initial exponent bound.
        assert_eq!(r.rows[4].b_prime, "1/128");
        assert_eq!(r.rows[4].exponent_bound, 12);
        assert!(r.to_text().contains("[Z[1/2]]_U = G: yes"));
    }
}
