//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//! Runs without the libtest harness so the report reads top to bottom.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use chablab_core::blockperm::{
    parity_correction_search, splitting_check, splitting_generators, BlockFamily, BlockPermElement,
    Finitary,
};
use chablab_core::chabfin::corpus::small_groups;
use chablab_core::chabfin::oracle::{brute_force_class_count, brute_force_subgroups};
use chablab_core::chabfin::{
    dyadic_counterexample, saturation_formula, saturation_orbit, FiniteGroup, Subgroup,
    SubgroupLattice, DEFAULT_ORDER_BOUND,
};
use chablab_core::exactnum::{Ball, ExactRational, PScalar, Prime};
use chablab_core::perm::Perm;
use chablab_core::plgroup::{
    evaluate_word, fixed_points, germ_trivial_at, index_of_word, make_alt_family, AffineLaw,
    AffinePiece, EventualRule, GeneratorTable, NeighborhoodLevel, PLMap, Word,
};
use chablab_core::sample::{
    random_gf_element, random_neighborhood_element, random_point_in, random_rational, random_word,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            "saturation: orbit and formula definitions agree on the corpus",
            criterion_1,
        ),
        (
            "saturation: idempotence, normal case, equivariance on the corpus",
            criterion_2,
        ),
        (
            "dyadic example: H_n saturated for n = 1..6, limit not saturated",
            criterion_3,
        ),
        (
            "PL kernel algebra on random word triples, p = 2, 3, 5",
            criterion_4,
        ),
        (
            "fixed-point dichotomy on random Lambda_p words and the 3-piece map",
            criterion_5,
        ),
        (
            "index consistency: words of length <= 6 over s, t, a (p = 2)",
            criterion_6,
        ),
        (
            "G_F neighbourhoods and truncation levels (p = 2, F_n = Alt(4))",
            criterion_7,
        ),
        (
            "block splitting: quotient homomorphism, kernel U_n, parity exclusion",
            criterion_8,
        ),
        ("lattice counts S4, Q8, A4 against brute force", criterion_9),
        (
            "CLI determinism across runs and thread counts",
            criterion_10,
        ),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        all &= o.passed;
        println!(
            "criterion {:>2} {:<4} {name} [{:.1}s] {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}

fn corpus() -> Vec<(String, FiniteGroup, SubgroupLattice)> {
    small_groups()
        .into_par_iter()
        .map(|e| {
            let g = e.build().expect("corpus groups build");
            let l = SubgroupLattice::new(&g, DEFAULT_ORDER_BOUND).expect("corpus groups are small");
            (e.name, g, l)
        })
        .collect()
}

/// Runs `check` on every pair `(U, H)` of every corpus group; returns (pairs, failures).
fn all_pairs(
    groups: &[(String, FiniteGroup, SubgroupLattice)],
    check: impl Fn(&FiniteGroup, &SubgroupLattice, &Subgroup, &Subgroup) -> bool + Sync,
) -> (usize, Vec<String>) {
    let results: Vec<(usize, Vec<String>)> = groups
        .par_iter()
        .map(|(name, g, l)| {
            let mut fails = Vec::new();
            for (i, u) in l.subgroups().iter().enumerate() {
                for (j, h) in l.subgroups().iter().enumerate() {
                    if !check(g, l, u, h) {
                        fails.push(format!("{name}: U=H{i} H=H{j}"));
                    }
                }
            }
            (l.len() * l.len(), fails)
        })
        .collect();
    let pairs = results.iter().map(|r| r.0).sum();
    (pairs, results.into_iter().flat_map(|r| r.1).collect())
}

fn criterion_1() -> Outcome {
    let groups = corpus();
    let (pairs, fails) = all_pairs(&groups, |g, _, u, h| {
        saturation_orbit(g, u, h) == saturation_formula(g, u, h)
    });
    outcome(
        fails.is_empty() && groups.len() == 74,
        format!(
            "{} groups, {pairs} pairs, {} mismatches {:?}",
            groups.len(),
            fails.len(),
            fails.first()
        ),
    )
}

fn criterion_2() -> Outcome {
    let groups = corpus();
    let (pairs, fails) = all_pairs(&groups, |g, _, u, h| {
        let sat = saturation_orbit(g, u, h);
        let idempotent = saturation_orbit(g, u, &sat) == sat && h.is_subgroup_of(&sat);
        let normal_case = !g.is_normal(u) || sat.bits() == &g.set_product(h, u.bits());
        let equivariant = (0..g.order() as u32).all(|x| {
            let conj_h = g.conjugate(x, h);
            saturation_orbit(g, u, &conj_h) == g.conjugate(x, &sat)
        });
        idempotent && normal_case && equivariant
    });
    outcome(
        fails.is_empty(),
        format!(
            "{pairs} pairs, {} failures {:?}",
            fails.len(),
            fails.first()
        ),
    )
}

fn dyadic(s: &str) -> ExactRational {
    match s.split_once('/') {
        Some((a, b)) => {
            ExactRational::new(a.parse::<BigInt>().unwrap(), b.parse::<BigInt>().unwrap()).unwrap()
        }
        None => ExactRational::from_bigint(s.parse::<BigInt>().unwrap()),
    }
}

fn criterion_3() -> Outcome {
    let report = dyadic_counterexample(6);
    let text = report.to_text();
    let two = Prime::new(2).unwrap();
    // Recheck each witness with plain rationals: 2b - 2b' has 2-adic valuation below -n.
    let witnesses_ok = report.rows.iter().all(|r| {
        let diff = &(&dyadic(&r.b) - &dyadic(&r.b_prime)) * &ExactRational::from_int(2);
        match diff.valuation(two).finite() {
            Some(v) => v < -(r.n as i64) && diff == dyadic(&r.difference),
            None => false,
        }
    });
    let claims = (1..=6).all(|n| text.contains(&format!("[H_{n}]_U = H_{n}: yes")))
        && text.contains("[Z[1/2]]_U = G: yes");
    let passed = report.all_pass() && report.rows.len() == 6 && witnesses_ok && claims;
    let w: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("n={}:({},{})", r.n, r.b, r.b_prime))
        .collect();
    outcome(passed, format!("witnesses {}", w.join(" ")))
}

/// Random rationals, half of them inside pieces of the given maps.
fn probe_points(rng: &mut ChaCha8Rng, maps: &[&PLMap], count: usize) -> Vec<ExactRational> {
    let p = maps[0].prime();
    let balls: Vec<&Ball> = maps
        .iter()
        .flat_map(|m| m.pieces().iter().map(AffinePiece::domain))
        .collect();
    (0..count)
        .map(|i| {
            if i % 2 == 0 || balls.is_empty() {
                random_rational(rng, p)
            } else {
                let b = balls[rng.gen_range(0..balls.len())];
                random_point_in(rng, b)
            }
        })
        .collect()
}

/// `w` with a cancelling pair `x^e x^-e` inserted: the same group element.
fn padded(rng: &mut ChaCha8Rng, w: &Word) -> Word {
    let mut letters = w.letters.clone();
    let name = ["s", "t", "a"][rng.gen_range(0..3)].to_string();
    let at = rng.gen_range(0..=letters.len());
    letters.splice(at..at, [(name.clone(), 1), (name, -1)]);
    Word::new(letters)
}

fn criterion_4() -> Outcome {
    const PAIRS: usize = 10_000;
    let mut notes = Vec::new();
    let mut passed = true;
    for p in [2u32, 3, 5] {
        let prime = Prime::new(p).unwrap();
        let table = GeneratorTable::lambda(prime);
        let results: Vec<Result<bool, String>> = (0..PAIRS)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(((p as u64) << 32) | i as u64);
                let u = random_word(&mut rng, &["s", "t", "a"], 12);
                // every fourth pair is equal by construction
                let v = if i % 4 == 0 {
                    padded(&mut rng, &u)
                } else {
                    random_word(&mut rng, &["s", "t", "a"], 12)
                };
                let w = random_word(&mut rng, &["s", "t", "a"], 12);
                let ev = |x: &Word| evaluate_word(&table, x).map_err(|e| format!("{x}: {e}"));
                let (f, g, h) = (ev(&u)?, ev(&v)?, ev(&w)?);
                let err = |e: chablab_core::plgroup::PlError| e.to_string();
                let assoc = f.compose(&g).map_err(err)?.compose(&h).map_err(err)?
                    == f.compose(&g.compose(&h).map_err(err)?).map_err(err)?;
                let inverse = f.compose(&f.invert()).map_err(err)?.is_identity()
                    && f.invert().compose(&f).map_err(err)?.is_identity()
                    && ev(&u.inverse())? == f.invert();
                let idempotent = PLMap::canonicalize(prime, f.pieces().to_vec()).as_ref() == Ok(&f);
                let diff = f.invert().compose(&g).map_err(err)?;
                let points = probe_points(&mut rng, &[&f, &g, &diff], 100);
                let agree = points.iter().all(|x| f.apply(x) == g.apply(x));
                let equal_by_construction = i % 4 != 0 || f == g;
                if !(assoc && inverse && idempotent && (f == g) == agree && equal_by_construction) {
                    return Err(format!("p={p} u={u} v={v} w={w}"));
                }
                Ok(f == g)
            })
            .collect();
        let fails: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
        let equal = results.iter().filter(|r| matches!(r, Ok(true))).count();
        passed &= fails.is_empty();
        notes.push(format!(
            "p={p}: {PAIRS} triples, {equal} equal pairs, {} failures",
            fails.len()
        ));
        if let Some(f) = fails.first() {
            notes.push(format!("first: {f}"));
        }
    }
    outcome(passed, notes.join("; "))
}

/// Sampling oracle: whether `f` fixes every probe point close to `x` (p-adically).
fn germ_looks_trivial(f: &PLMap, x: &ExactRational, rng: &mut ChaCha8Rng) -> bool {
    let p = f.prime();
    (20..26).all(|k| {
        let ball = Ball::new(&PScalar::zero(p), k);
        let y = x + &random_point_in(rng, &ball);
        f.apply(&y) == y
    })
}

/// Fixed rationals of `f` found without its fixed-point report: random probes, plus
/// the solution of `p^m x + b = x` for each piece's law read off by evaluating `f`.
fn sampled_fixed_points(f: &PLMap, rng: &mut ChaCha8Rng) -> Vec<ExactRational> {
    let mut xs = probe_points(rng, &[f], 40);
    for piece in f.pieces() {
        // recover the affine law from two values: slope = (f(y) - f(x)) / (y - x)
        let x0 = piece.domain().residue().to_rational();
        let x1 = random_point_in(rng, piece.domain());
        if x0 == x1 {
            continue;
        }
        let slope = &(&f.apply(&x1) - &f.apply(&x0)) / &(&x1 - &x0);
        let one = ExactRational::from_int(1);
        if slope != one {
            let b = &f.apply(&x0) - &(&slope * &x0);
            xs.push(&b / &(&one - &slope));
        }
    }
    xs.into_iter().filter(|x| f.apply(x) == *x).collect()
}

fn classify_all(f: &PLMap, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let fp = fixed_points(f);
    let found = sampled_fixed_points(f, rng);
    for x in &found {
        let isolated = fp.isolated.contains(x);
        let germ = germ_trivial_at(f, x);
        if isolated == germ || germ != germ_looks_trivial(f, x, rng) {
            return Err(format!("{x}: isolated {isolated}, germ trivial {germ}"));
        }
    }
    for x in &fp.isolated {
        if f.apply(x) != *x || germ_trivial_at(f, x) {
            return Err(format!(
                "reported isolated point {x} is not an isolated fixed point"
            ));
        }
    }
    Ok(found.len())
}

fn three_piece_map() -> PLMap {
    let p = Prime::new(2).unwrap();
    let s = |m: i64, e: i64| PScalar::new(p, m, e);
    PLMap::canonicalize(
        p,
        vec![
            AffinePiece::new(
                Ball::new(&s(0, 0), 1),
                AffineLaw {
                    slope_exp: 1,
                    translation: s(0, 0),
                },
            ),
            AffinePiece::new(Ball::new(&s(1, 0), 2), AffineLaw::translation(s(1, 0))),
            AffinePiece::new(
                Ball::new(&s(3, 0), 2),
                AffineLaw {
                    slope_exp: -1,
                    translation: s(-1, -1),
                },
            ),
        ],
    )
    .expect("the 3-piece map is a bijection")
}

fn criterion_5() -> Outcome {
    const WORDS: usize = 1000;
    let mut notes = Vec::new();
    let mut passed = true;
    for p in [2u32, 3, 5] {
        let table = GeneratorTable::lambda(Prime::new(p).unwrap());
        let results: Vec<Result<usize, String>> = (0..WORDS)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(((p as u64) << 40) | i as u64);
                let w = random_word(&mut rng, &["s", "t", "a"], 10);
                let f = evaluate_word(&table, &w).map_err(|e| e.to_string())?;
                classify_all(&f, &mut rng).map_err(|e| format!("{w}: {e}"))
            })
            .collect();
        let fails: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
        let points: usize = results.iter().filter_map(|r| r.as_ref().ok()).sum();
        passed &= fails.is_empty();
        notes.push(format!(
            "p={p}: {WORDS} words, {points} fixed points, {} misclassified",
            fails.len()
        ));
    }
    let f = three_piece_map();
    let isolated = fixed_points(&f).isolated;
    let expected = vec![ExactRational::from_int(-1), ExactRational::from_int(0)];
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let example_ok = isolated == expected && classify_all(&f, &mut rng).is_ok();
    passed &= example_ok;
    let shown: Vec<String> = isolated.iter().map(ToString::to_string).collect();
    notes.push(format!("3-piece isolated set {{{}}}", shown.join(", ")));
    outcome(passed, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let table = GeneratorTable::lambda(Prime::new(2).unwrap());
    let letters: Vec<(String, i64)> = ["s", "t", "a"]
        .iter()
        .flat_map(|g| [(g.to_string(), 1), (g.to_string(), -1)])
        .collect();
    let mut words = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..6 {
        layer = layer
            .iter()
            .flat_map(|w| {
                letters
                    .iter()
                    .map(move |l| Word::new([w.letters.clone(), vec![l.clone()]].concat()))
            })
            .collect();
        words.extend(layer.iter().cloned());
    }
    let evaluated: Vec<(PLMap, i64)> = words
        .par_iter()
        .map(|w| {
            (
                evaluate_word(&table, w).expect("short words evaluate"),
                index_of_word(w),
            )
        })
        .collect();
    // equal canonical forms must carry equal indices; one index per form covers all pairs
    let mut seen: HashMap<&PLMap, i64> = HashMap::new();
    let mut conflicts = 0usize;
    for (map, index) in &evaluated {
        match seen.get(map) {
            Some(&other) if other != *index => conflicts += 1,
            Some(_) => {}
            None => {
                seen.insert(map, *index);
            }
        }
    }
    outcome(
        conflicts == 0,
        format!(
            "{} words, {} distinct elements, {conflicts} conflicting pairs",
            words.len(),
            seen.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let prime = Prime::new(2).unwrap();
    let family = Arc::new(
        make_alt_family(prime, &[2], EventualRule::Periodic { period: 1 }).expect("Alt(4) family"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let members = (0..100)
        .filter(|i| {
            let n = (i % 10) as u64;
            let u = random_neighborhood_element(&mut rng, &family, n).expect("random u_n");
            u.neighborhood_member(n).expect("membership is decidable")
        })
        .count();
    let (mut monotone, mut guaranteed, mut beyond_eight) = (0, 0, 0);
    let mut profiles = Vec::new();
    for _ in 0..20 {
        let g = random_gf_element(&mut rng, &family, 6).expect("random element");
        let levels: Vec<NeighborhoodLevel> = (1..=8)
            .map(|d| {
                g.truncate_to_ball(-d)
                    .expect("truncation below the level")
                    .level
            })
            .collect();
        monotone += levels.windows(2).all(|w| w[0] <= w[1]) as usize;
        guaranteed += levels
            .iter()
            .zip(1..=8u64)
            .all(|(l, d)| *l >= NeighborhoodLevel::Finite(d - 1)) as usize;
        beyond_eight += (levels[7] > NeighborhoodLevel::Finite(8)) as usize;
        profiles.push(levels[7]);
    }
    let m8: Vec<String> = profiles
        .iter()
        .map(|l| match l {
            NeighborhoodLevel::Finite(m) => m.to_string(),
            other => format!("{other:?}"),
        })
        .collect();
    outcome(
        members == 100 && monotone == 20 && guaranteed == 20 && beyond_eight == 20,
        format!(
            "u_n members {members}/100; M nondecreasing {monotone}/20; M >= -k-1 {guaranteed}/20; \
             M > 8 at k = -8 {beyond_eight}/20 (M at k = -8: {})",
            m8.join(",")
        ),
    )
}

fn criterion_8() -> Outcome {
    let family = Arc::new(BlockFamily::uniform_alternating(3).expect("Alt(3) blocks"));
    let gens = splitting_generators(&family).expect("generators");
    let report = splitting_check(&gens, 3, 6).expect("splitting check runs");
    let t = BlockPermElement::finitary(family.clone(), Finitary::parse("(0 1)").unwrap()).unwrap();
    let no_correction = (0..=4).all(|b| {
        parity_correction_search(&t, b)
            .expect("search runs")
            .is_none()
    });
    // sanity: an even permutation needs no correction at all
    let even = BlockPermElement::finitary(family, Finitary::parse("(0 1 2)").unwrap()).unwrap();
    let even_ok = parity_correction_search(&even, 0).unwrap() == Some(Vec::<Perm>::new());
    outcome(
        report.passed() && gens.len() == 12 && !t.in_g() && no_correction && even_ok,
        format!(
            "{} products, {} level checks, {} failures; (0 1) in G: {}, correction found: {}",
            report.products,
            report.instances,
            report.homomorphism_failures.len()
                + report.kernel_failures.len()
                + report.odd_images.len(),
            t.in_g(),
            !no_correction
        ),
    )
}

fn criterion_9() -> Outcome {
    let perms = |gens: &[&str], degree| {
        let gens: Vec<Perm> = gens
            .iter()
            .map(|g| Perm::parse(g, Some(degree)).unwrap())
            .collect();
        FiniteGroup::from_perms(degree, &gens, DEFAULT_ORDER_BOUND).unwrap()
    };
    let cases = [
        ("S4", perms(&["(0 1 2 3)", "(0 1)"], 4), 30, 11),
        ("Q8", FiniteGroup::metacyclic(4, 2, 3, 2), 6, 6),
        ("A4", perms(&["(0 1 2)", "(1 2 3)"], 4), 10, 5),
    ];
    let mut passed = true;
    let mut notes = Vec::new();
    for (name, g, subgroups, classes) in cases {
        let l = SubgroupLattice::new(&g, DEFAULT_ORDER_BOUND).unwrap();
        let brute = brute_force_subgroups(&g).unwrap();
        let brute_classes = brute_force_class_count(&g, &brute);
        let mine: Vec<Vec<u32>> = l
            .subgroups()
            .iter()
            .map(|h| h.elements().collect())
            .collect();
        let ok = mine == brute
            && l.len() == subgroups
            && l.classes().len() == classes
            && brute_classes == classes;
        passed &= ok;
        notes.push(format!(
            "{name} {}/{} (brute force {}/{})",
            l.len(),
            l.classes().len(),
            brute.len(),
            brute_classes
        ));
    }
    outcome(passed, notes.join(", "))
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chablab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn run_cli(args: &[String], threads: usize) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_chablab"))
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .expect("the binary runs");
    (out.stdout, out.status.code())
}

fn criterion_10() -> Outcome {
    let dir = scratch_dir();
    let words = write(&dir, "words.txt", "a^2\n1\ns t^-1 a\nt^2 s a^-1 t\n");
    let group = write(&dir, "s4.json", r#"{"generators": ["(0 1 2 3)", "(0 1)"]}"#);
    let tower = write(
        &dir,
        "tower.json",
        r#"{"levels": [["(0 1 2 3)", "(0 2)"], ["(0 1 2 3)", "(0 1)"]], "compacts": [["(0 2)(1 3)"], []]}"#,
    );
    let family = write(
        &dir,
        "family.json",
        r#"{"p": 2, "entries": [{"depth": 2, "generators": ["(0 1 2)", "(0 1 3)"]}], "eventual": {"rule": "periodic", "period": 1}}"#,
    );
    let elements = write(
        &dir,
        "bp.json",
        r#"[{"window": "(0 1)"}, {"window": "(0 1 3)", "tail": {"pattern": ["(0 1 2)"]}}]"#,
    );
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<String>>();
    let commands = vec![
        s(&["--seed", "3", "eval", &words, "--random", "20"]),
        s(&[
            "--seed", "3", "--format", "text", "eval", &words, "--random", "20",
        ]),
        s(&[
            "chab",
            &group,
            "--saturation-table",
            "--urs",
            "--irs",
            "--tower",
            &tower,
        ]),
        s(&[
            "--format",
            "text",
            "chab",
            &group,
            "--saturation-table",
            "--urs",
            "--irs",
        ]),
        s(&["--format", "dot", "chab", &group, "--u-gen", "(0 1)"]),
        s(&[
            "--seed",
            "11",
            "gf",
            &family,
            "--random",
            "6",
            "--truncate=-1,-3,-8",
            "--nbhd",
            "2",
        ]),
        s(&["dyadic", "--nmax", "6"]),
        s(&["--format", "text", "dyadic"]),
        s(&["bp", &elements, "--correction", "3", "--level", "1"]),
        s(&["bp", "--splitting"]),
    ];
    let mut mismatches = Vec::new();
    let mut bad_status = Vec::new();
    for args in &commands {
        let reference = run_cli(args, 1);
        if reference.1 != Some(0) || reference.0.is_empty() {
            bad_status.push(args.join(" "));
        }
        for threads in [1, 4, 8] {
            if run_cli(args, threads) != reference {
                mismatches.push(format!("{} (threads {threads})", args.join(" ")));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        mismatches.is_empty() && bad_status.is_empty(),
        format!(
            "{} commands x 4 runs; {} differ; {} exited non-zero {:?}",
            commands.len(),
            mismatches.len(),
            bad_status.len(),
            mismatches.first().or(bad_status.first())
        ),
    )
}
