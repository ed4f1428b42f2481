use std::fmt::Write;
use std::path::PathBuf;
use std::sync::Arc;

use chablab_core::exactnum::Ball;
use chablab_core::plgroup::{
    FamilySpec, GfCandidate, GfElement, NeighborhoodLevel, PLMap, PlError,
};
use chablab_core::sample::random_gf_element;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Failure;
use crate::output::{render, verdict, Outcome};
use crate::{read_file, Context};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Family file (JSON): prime, entries with depths and generators, eventual rule.
    family: PathBuf,
    /// Element file (JSON): one element `{"level", "head", "tail"}` or a list of them.
    elements: Option<PathBuf>,
    /// Truncate to the ball `p^{k+1} Z_p` (comma-separated list of `k` values allowed).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    truncate: Vec<i64>,
    /// Test membership in the neighbourhood `V_N` of the identity.
    #[arg(long)]
    nbhd: Option<u64>,
    /// Also examine this many random elements (a `Λ_p` word on `Z_p` times a random tail).
    #[arg(long, default_value_t = 0)]
    random: usize,
    /// Maximum word length of random heads.
    #[arg(long, default_value_t = 6)]
    max_len: usize,
}

#[derive(Serialize)]
struct NbhdReport {
    n: u64,
    member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<String>,
}

#[derive(Serialize)]
struct TruncationReport {
    k: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated: Option<PLMap>,
    /// Largest `M` with the residual in `V_M`.
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<NeighborhoodLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    guaranteed: Option<u64>,
    /// Why truncation is unavailable at this `k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    unavailable: Option<String>,
}

#[derive(Serialize)]
struct ElementReport {
    source: String,
    member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    element: Option<GfCandidate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_neighborhood_level: Option<NeighborhoodLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nbhd: Option<NbhdReport>,
    truncations: Vec<TruncationReport>,
    /// Truncation levels reach their guarantee and do not decrease as `k` decreases.
    truncations_ok: bool,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    passed: bool,
    elements: Vec<ElementReport>,
}

pub fn run(ctx: &Context, args: Args) -> Result<Outcome, Failure> {
    let family: FamilySpec = serde_json::from_str(&read_file(&args.family)?)
        .map_err(|e| Failure::from(e).in_file(&args.family))?;
    let family = Arc::new(family);
    let mut candidates: Vec<(String, Result<GfElement, String>)> = Vec::new();
    if let Some(path) = &args.elements {
        let list: Vec<GfCandidate> = crate::read_one_or_many(path)?;
        for (i, cand) in list.into_iter().enumerate() {
            let built = match GfElement::from_candidate(family.clone(), cand) {
                Ok(g) => Ok(g),
                Err(PlError::NotMember(why)) => Err(why),
                Err(e) => return Err(Failure::from(e).in_file(path)),
            };
            candidates.push((format!("element {i}"), built));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for i in 0..args.random {
        candidates.push((
            format!("random {i}"),
            Ok(random_gf_element(&mut rng, &family, args.max_len)?),
        ));
    }
    if candidates.is_empty() {
        return Err(Failure::Usage(
            "no elements: give an element file or --random N".into(),
        ));
    }
    // most negative k last, so levels should be nondecreasing along the list
    let mut ks = args.truncate.clone();
    ks.sort_unstable_by(|a, b| b.cmp(a));
    ks.dedup();

    let mut reports = Vec::new();
    for (source, built) in candidates {
        let g = match built {
            Err(why) => {
                reports.push(ElementReport {
                    source,
                    member: false,
                    reason: Some(why),
                    element: None,
                    max_neighborhood_level: None,
                    nbhd: None,
                    truncations: Vec::new(),
                    truncations_ok: true,
                });
                continue;
            }
            Ok(g) => g,
        };
        let nbhd = match args.nbhd {
            None => None,
            Some(n) => {
                let member = g.neighborhood_member(n)?;
                NbhdReport {
                    n,
                    member,
                    violation: (!member).then(|| nbhd_violation(&g, n)),
                }
                .into()
            }
        };
        let truncations = ks
            .iter()
            .map(|&k| truncation(&g, k))
            .collect::<Result<Vec<_>, _>>()?;
        reports.push(ElementReport {
            source,
            member: true,
            reason: None,
            element: Some(g.to_candidate()),
            max_neighborhood_level: Some(g.max_neighborhood_level()?),
            nbhd,
            truncations_ok: truncations_ok(&truncations),
            truncations,
        });
    }
    let passed = reports.iter().all(|r| r.truncations_ok);
    let report = Report {
        command: "gf",
        passed,
        elements: reports,
    };
    render(ctx, &report, passed, || text(&report))
}

fn truncation(g: &GfElement, k: i64) -> Result<TruncationReport, Failure> {
    match g.truncate_to_ball(k) {
        Ok(t) => Ok(TruncationReport {
            k,
            truncated: Some(t.truncated.head().clone()),
            level: Some(t.level),
            guaranteed: t.guaranteed,
            unavailable: None,
        }),
        Err(PlError::Precondition(why)) => Ok(TruncationReport {
            k,
            truncated: None,
            level: None,
            guaranteed: None,
            unavailable: Some(why),
        }),
        Err(e) => Err(e.into()),
    }
}

fn truncations_ok(ts: &[TruncationReport]) -> bool {
    let reached = ts.iter().all(|t| match (t.level, t.guaranteed) {
        (Some(level), Some(m)) => level >= NeighborhoodLevel::Finite(m),
        _ => true,
    });
    let levels: Vec<NeighborhoodLevel> = ts.iter().filter_map(|t| t.level).collect();
    reached && levels.windows(2).all(|w| w[0] <= w[1])
}

/// Where `g` fails to lie in `V_n`: a head piece meeting `p^{-n} Z_p`, or an
/// annulus on which `g` does not act through `F_k`.
fn nbhd_violation(g: &GfElement, n: u64) -> String {
    let family = g.family();
    let p = family.prime();
    let inner = Ball::centered(p, -(n as i64));
    if let Some(piece) = g
        .head()
        .pieces()
        .iter()
        .find(|pc| !pc.domain().disjoint(&inner))
    {
        return format!("moves the ball {} inside p^-{n}·Z_p", piece.domain());
    }
    for k in g.level()..n {
        if !g.tail().is_trivial_at(k) {
            return format!("acts non-trivially on X_{k} inside p^-{n}·Z_p");
        }
    }
    for k in n..g.level() {
        match g.annulus_action(k) {
            None => return format!("does not permute the balls of X_{k}"),
            Some(perm) if !family.contains(k, &perm).unwrap_or(false) => {
                return format!("acts on X_{k} by {perm}, which is not in F_{k}")
            }
            _ => {}
        }
    }
    "acts outside the allowed groups on some annulus".into()
}

fn text(r: &Report) -> String {
    let mut out = String::new();
    for e in &r.elements {
        if !e.member {
            writeln!(
                out,
                "{}: not in G_F ({})",
                e.source,
                e.reason.as_deref().unwrap_or("")
            )
            .unwrap();
            continue;
        }
        let level = match e.max_neighborhood_level {
            Some(NeighborhoodLevel::Finite(m)) => format!("V_{m}"),
            Some(NeighborhoodLevel::Unbounded) => "every V_N".into(),
            _ => "no V_N".into(),
        };
        writeln!(out, "{}: in G_F, lies in {level}", e.source).unwrap();
        if let Some(nb) = &e.nbhd {
            match &nb.violation {
                None => writeln!(out, "  V_{}: member", nb.n).unwrap(),
                Some(v) => writeln!(out, "  V_{}: not a member ({v})", nb.n).unwrap(),
            }
        }
        for t in &e.truncations {
            match (&t.level, &t.unavailable) {
                (Some(level), _) => {
                    let m = match level {
                        NeighborhoodLevel::Finite(m) => m.to_string(),
                        NeighborhoodLevel::Unbounded => "inf".into(),
                        NeighborhoodLevel::None => "none".into(),
                    };
                    let guaranteed = t.guaranteed.map_or("-".into(), |g| g.to_string());
                    writeln!(
                        out,
                        "  truncate k = {}: M = {m} (guaranteed {guaranteed})",
                        t.k
                    )
                    .unwrap();
                }
                (None, Some(why)) => {
                    writeln!(out, "  truncate k = {}: unavailable ({why})", t.k).unwrap()
                }
                _ => {}
            }
        }
    }
    writeln!(out, "summary: {}", verdict(r.passed)).unwrap();
    out
}
