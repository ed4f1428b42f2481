//! Words over named generators, and the built-in generators of `Λ_p`.
//!
//! A word `x1^e1 x2^e2 ... xk^ek` evaluates to `x1^e1 ∘ x2^e2 ∘ ... ∘ xk^ek`,
//! so the rightmost letter acts first.

use std::collections::BTreeMap;
use std::fmt;

use super::{AffineLaw, AffinePiece, PLMap, PlError};
use crate::exactnum::{Ball, PScalar, Prime};

/// Name of the adding machine `x ↦ x + 1` on `Z_p` in the built-in table.
pub const ALPHA: &str = "a";

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub letters: Vec<(String, i64)>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn new(letters: Vec<(String, i64)>) -> Self {
        Word { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Parses whitespace-separated `gen` or `gen^exp` tokens. `line` is used in diagnostics.
    pub fn parse_line(text: &str, line: usize) -> Result<Word, PlError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let bad = || PlError::WordSyntax {
                line,
                token: token.to_string(),
            };
            let (name, exp) = match token.split_once('^') {
                Some((name, exp)) => (name, exp.parse::<i64>().map_err(|_| bad())?),
                None => (token, 1),
            };
            let mut chars = name.chars();
            let valid = chars
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(bad());
            }
            if exp != 0 {
                letters.push((name.to_string(), exp));
            }
        }
        Ok(Word { letters })
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|(g, e)| (g.clone(), -e))
                .collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word { letters }
    }

    /// `[x, y] = x y x^-1 y^-1`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    /// Sum of the exponents carried by generator `name`.
    pub fn exponent_sum(&self, name: &str) -> i64 {
        self.letters
            .iter()
            .filter(|(g, _)| g == name)
            .map(|(_, e)| e)
            .sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, (g, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Parses a word file: one word per line; blank lines and `#` comments are skipped,
/// and a line reading `1` is the empty word.
pub fn parse_words(text: &str) -> Result<Vec<Word>, PlError> {
    Ok(parse_numbered_words(text)?
        .into_iter()
        .map(|(_, w)| w)
        .collect())
}

/// [`parse_words`], keeping the 1-based line number of each word.
pub fn parse_numbered_words(text: &str) -> Result<Vec<(usize, Word)>, PlError> {
    let mut words = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "1" {
            words.push((i + 1, Word::empty()));
            continue;
        }
        words.push((i + 1, Word::parse_line(line, i + 1)?));
    }
    Ok(words)
}

/// Named generators with cached inverses.
#[derive(Clone, Debug)]
pub struct GeneratorTable {
    prime: Prime,
    gens: BTreeMap<String, (PLMap, PLMap)>,
}

impl GeneratorTable {
    pub fn new(prime: Prime) -> Self {
        GeneratorTable {
            prime,
            gens: BTreeMap::new(),
        }
    }

    /// The generators `s`, `t` of `V_p` and the adding machine `a` of `Λ_p`.
    ///
    /// - `s` exchanges the prefixes `0` and `1`;
    /// - `t` sends the prefixes `0, 1, .., p-2, (p-1)0, .., (p-1)(p-1)` in order onto
    ///   `00, .., 0(p-1), 1, .., p-1`;
    /// - `a` is `x ↦ x + 1` on `Z_p`.
    pub fn lambda(prime: Prime) -> Self {
        let p = prime.get() as i64;
        let prefix = |digits: &[i64]| {
            let r: i64 = digits.iter().rev().fold(0, |acc, d| acc * p + d);
            Ball::new(&PScalar::from_int(prime, r), digits.len() as i64)
        };
        let s = [(prefix(&[0]), prefix(&[1])), (prefix(&[1]), prefix(&[0]))];
        let mut from: Vec<Ball> = (0..p - 1).map(|d| prefix(&[d])).collect();
        from.extend((0..p).map(|d| prefix(&[p - 1, d])));
        let mut to: Vec<Ball> = (0..p).map(|d| prefix(&[0, d])).collect();
        to.extend((1..p).map(|d| prefix(&[d])));
        let t: Vec<(Ball, Ball)> = from.into_iter().zip(to).collect();

        let mut table = GeneratorTable::new(prime);
        let to_map = |pairs: &[(Ball, Ball)]| {
            PLMap::canonicalize(
                prime,
                pairs.iter().map(|(a, b)| prefix_piece(a, b)).collect(),
            )
            .expect("built-in generators are bijections")
        };
        table.insert("s", to_map(&s)).unwrap();
        table.insert("t", to_map(&t)).unwrap();
        let alpha = PLMap::canonicalize(
            prime,
            vec![AffinePiece::new(
                Ball::centered(prime, 0),
                AffineLaw::translation(PScalar::one(prime)),
            )],
        )
        .expect("translation is a bijection");
        table.insert(ALPHA, alpha).unwrap();
        table
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn insert(&mut self, name: &str, map: PLMap) -> Result<(), PlError> {
        self.prime.check(map.prime())?;
        let inv = map.invert();
        self.gens.insert(name.to_string(), (map, inv));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&PLMap> {
        self.gens.get(name).map(|(g, _)| g)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gens.keys().map(String::as_str)
    }

    fn power(&self, name: &str, exp: i64, line: usize) -> Result<PLMap, PlError> {
        let (g, inv) = self
            .gens
            .get(name)
            .ok_or_else(|| PlError::UnknownGenerator {
                line,
                name: name.to_string(),
            })?;
        let base = if exp < 0 { inv } else { g };
        let mut acc = PLMap::identity(self.prime);
        for _ in 0..exp.unsigned_abs() {
            acc = acc.compose(base)?;
        }
        Ok(acc)
    }
}

/// The prefix substitution `x ↦ p^m (x - r) + c` carrying `from` onto `to`.
pub fn prefix_piece(from: &Ball, to: &Ball) -> AffinePiece {
    let m = to.level() - from.level();
    let b = to.residue() - &from.residue().shift(m);
    AffinePiece::new(
        from.clone(),
        AffineLaw {
            slope_exp: m,
            translation: b,
        },
    )
}

pub fn evaluate_word(table: &GeneratorTable, word: &Word) -> Result<PLMap, PlError> {
    evaluate_word_at(table, word, 0)
}

/// [`evaluate_word`], citing `line` when a generator is unknown.
pub fn evaluate_word_at(
    table: &GeneratorTable,
    word: &Word,
    line: usize,
) -> Result<PLMap, PlError> {
    let mut acc = PLMap::identity(table.prime);
    for (name, exp) in &word.letters {
        acc = acc.compose(&table.power(name, *exp, line)?)?;
    }
    Ok(acc)
}

/// Exponent sum of the adding machine: the `Z`-valued index of a `Λ_p` word.
pub fn index_of_word(word: &Word) -> i64 {
    word.exponent_sum(ALPHA)
}

#[cfg(test)]
mod tests {
    use super::super::analysis::{in_lambda_p, in_vp};
    use super::*;

    fn prime(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse_line(s, 1).unwrap()
    }

    #[test]
    fn parsing_and_diagnostics() {
        assert_eq!(w("a^2 s t^-1").to_string(), "a^2 s t^-1");
        assert_eq!(w("a^0"), Word::empty());
        assert_eq!(
            parse_words("a\n\n# comment\ns^-1 b^x\n"),
            Err(PlError::WordSyntax {
                line: 4,
                token: "b^x".into()
            })
        );
        let table = GeneratorTable::lambda(prime(2));
        let err = evaluate_word_at(&table, &w("zz"), 7).unwrap_err();
        assert_eq!(
            err,
            PlError::UnknownGenerator {
                line: 7,
                name: "zz".into()
            }
        );
    }

    #[test]
    fn builtin_generators() {
        for p in [2, 3, 5] {
            let table = GeneratorTable::lambda(prime(p));
            for name in ["s", "t"] {
                let g = table.get(name).unwrap();
                assert!(in_lambda_p(g));
                assert!(in_vp(g).unwrap(), "{name} for p={p}");
            }
            let a = table.get(ALPHA).unwrap();
            assert!(!in_vp(a).unwrap());
            let a2 = evaluate_word(&table, &w("a^2")).unwrap();
            assert_eq!(a2.pieces().len(), 1);
            assert_eq!(
                a2.pieces()[0].translation(),
                &PScalar::from_int(prime(p), 2)
            );
            assert!(evaluate_word(&table, &Word::empty()).unwrap().is_identity());
        }
    }

    #[test]
    fn commutator_index_vanishes() {
        let table = GeneratorTable::lambda(prime(3));
        let c = Word::commutator(&w("s t"), &w("a"));
        assert_eq!(index_of_word(&c), 0);
        assert_eq!(index_of_word(&w("a^3")), 3);
        let g = evaluate_word(&table, &c).unwrap();
        let back = evaluate_word(&table, &c.inverse()).unwrap();
        assert!(g.compose(&back).unwrap().is_identity());
    }

    #[test]
    fn swap_squares_to_identity() {
        let table = GeneratorTable::lambda(prime(2));
        assert!(evaluate_word(&table, &w("s s")).unwrap().is_identity());
    }
}
