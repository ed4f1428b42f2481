use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::PathBuf;

use chablab_core::exactnum::Prime;
use chablab_core::plgroup::{
    evaluate_word_at, fixed_points, in_gamma_p, in_lambda_p, in_vp, index_of_word,
    parse_numbered_words, support, FixedPoints, GeneratorTable, PLMap, Support, Word,
};
use chablab_core::sample::random_word;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Failure;
use crate::output::{render, verdict, Outcome};
use crate::{read_file, Context};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Word file: one word per line, tokens `gen` or `gen^exp`; `1` is the empty word.
    words: Option<PathBuf>,
    /// JSON object mapping extra generator names to maps (added to the built-in `s`, `t`, `a`).
    #[arg(long)]
    generators: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Also evaluate this many random words over `s`, `t`, `a`.
    #[arg(long, default_value_t = 0)]
    random: usize,
    /// Maximum length of random words.
    #[arg(long, default_value_t = 8)]
    max_len: usize,
}

#[derive(Serialize)]
struct Membership {
    gamma_p: bool,
    lambda_p: bool,
    /// Only defined for maps supported in `Z_p`.
    v_p: Option<bool>,
}

#[derive(Serialize)]
struct WordReport {
    /// Line in the word file, absent for random words.
    line: Option<usize>,
    word: String,
    map: PLMap,
    support: Support,
    fixed_points: FixedPoints,
    membership: Membership,
    /// Exponent sum of the adding machine `a`.
    index: i64,
    /// Canonical form is a fixed point of canonicalization and `f ∘ f⁻¹ = id`.
    consistent: bool,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    p: Prime,
    passed: bool,
    words: Vec<WordReport>,
}

pub fn run(ctx: &Context, args: Args) -> Result<Outcome, Failure> {
    let prime = Prime::new(args.p).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut table = GeneratorTable::lambda(prime);
    if let Some(path) = &args.generators {
        let extra: BTreeMap<String, PLMap> =
            serde_json::from_str(&read_file(path)?).map_err(|e| Failure::from(e).in_file(path))?;
        for (name, map) in extra {
            table
                .insert(&name, map)
                .map_err(|e| Failure::from(e).in_file(path))?;
        }
    }
    let mut words: Vec<(Option<usize>, Word)> = Vec::new();
    if let Some(path) = &args.words {
        let parsed =
            parse_numbered_words(&read_file(path)?).map_err(|e| Failure::from(e).in_file(path))?;
        words.extend(parsed.into_iter().map(|(line, w)| (Some(line), w)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    words.extend(
        (0..args.random).map(|_| (None, random_word(&mut rng, &["s", "t", "a"], args.max_len))),
    );
    if words.is_empty() {
        return Err(Failure::Usage(
            "no words: give a word file or --random N".into(),
        ));
    }

    let mut reports = Vec::with_capacity(words.len());
    for (line, word) in words {
        let map =
            evaluate_word_at(&table, &word, line.unwrap_or(0)).map_err(|e| match &args.words {
                Some(path) => Failure::from(e).in_file(path),
                None => Failure::from(e),
            })?;
        let consistent = PLMap::canonicalize(prime, map.pieces().to_vec()).as_ref() == Ok(&map)
            && map.compose(&map.invert())?.is_identity();
        let lambda_p = in_lambda_p(&map);
        reports.push(WordReport {
            line,
            word: word.to_string(),
            support: support(&map),
            fixed_points: fixed_points(&map),
            membership: Membership {
                gamma_p: in_gamma_p(&map),
                lambda_p,
                v_p: if lambda_p { Some(in_vp(&map)?) } else { None },
            },
            index: index_of_word(&word),
            consistent,
            map,
        });
    }
    let passed = reports.iter().all(|r| r.consistent);
    let report = Report {
        command: "eval",
        p: prime,
        passed,
        words: reports,
    };
    render(ctx, &report, passed, || text(&report))
}

fn text(report: &Report) -> String {
    let mut out = String::new();
    for w in &report.words {
        writeln!(out, "word: {}", w.word).unwrap();
        writeln!(out, "  map: {}", w.map).unwrap();
        let isolated: Vec<String> = w
            .fixed_points
            .isolated
            .iter()
            .map(ToString::to_string)
            .collect();
        writeln!(out, "  isolated fixed points: [{}]", isolated.join(", ")).unwrap();
        let v_p = w
            .membership
            .v_p
            .map_or("n/a".to_string(), |b| b.to_string());
        writeln!(
            out,
            "  gamma_p: {}  lambda_p: {}  v_p: {}  index: {}",
            w.membership.gamma_p, w.membership.lambda_p, v_p, w.index
        )
        .unwrap();
    }
    writeln!(
        out,
        "summary: {} ({} words)",
        verdict(report.passed),
        report.words.len()
    )
    .unwrap();
    out
}
