use std::fmt::Write;
use std::path::PathBuf;
use std::sync::Arc;

use chablab_core::blockperm::{
    parity_correction_search, splitting_check, splitting_generators, BlockCandidate, BlockFamily,
    BlockPermElement, Finitary, SplittingReport,
};
use chablab_core::perm::Perm;
use serde::Serialize;

use crate::error::Failure;
use crate::output::{render, verdict, Outcome};
use crate::{read_file, Context};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Block family file (JSON). Defaults to blocks of length 3 carrying Alt(3).
    #[arg(long)]
    family: Option<PathBuf>,
    /// Element file (JSON): `{"window": "(0 1 2)", "tail": {...}}` or a list of them.
    elements: Option<PathBuf>,
    /// Level `n` for `G_n` membership, the quotient `G_n / U_n` and `U_n` membership.
    #[arg(long, default_value_t = 0)]
    level: u64,
    /// Search parity corrections over the first B blocks.
    #[arg(long)]
    correction: Option<u64>,
    /// Check the quotient maps on all short products of twelve generators
    /// (default family only).
    #[arg(long)]
    splitting: bool,
    /// Longest product in the splitting check.
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    /// Levels `0..levels` in the splitting check.
    #[arg(long, default_value_t = 6)]
    levels: u64,
}

#[derive(Serialize)]
struct ElementReport {
    element: BlockPermElement,
    in_g: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    in_gn: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient: Option<Finitary>,
    in_un: bool,
    /// `Some(None)`: searched and nothing found.
    #[serde(skip_serializing_if = "Option::is_none")]
    correction: Option<Option<Vec<Perm>>>,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    passed: bool,
    level: u64,
    elements: Vec<ElementReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    splitting: Option<SplittingReport>,
}

pub fn run(ctx: &Context, args: Args) -> Result<Outcome, Failure> {
    let family = match &args.family {
        Some(path) => {
            let f: BlockFamily = serde_json::from_str(&read_file(path)?)
                .map_err(|e| Failure::from(e).in_file(path))?;
            f
        }
        None => BlockFamily::uniform_alternating(3)?,
    };
    let family = Arc::new(family);
    let mut elements = Vec::new();
    if let Some(path) = &args.elements {
        let list: Vec<BlockCandidate> = crate::read_one_or_many(path)?;
        for cand in list {
            let g = BlockPermElement::from_candidate(family.clone(), cand)
                .map_err(|e| Failure::from(e).in_file(path))?;
            elements.push(element_report(&g, &args)?);
        }
    }
    let splitting = if args.splitting {
        if args.family.is_some() {
            return Err(Failure::Usage(
                "--splitting uses the default family; drop --family".into(),
            ));
        }
        let gens = splitting_generators(&family)?;
        Some(splitting_check(&gens, args.max_len, args.levels)?)
    } else {
        None
    };
    if elements.is_empty() && splitting.is_none() {
        return Err(Failure::Usage(
            "nothing to do: give an element file or --splitting".into(),
        ));
    }
    let passed = splitting.as_ref().is_none_or(SplittingReport::passed);
    let report = Report {
        command: "bp",
        passed,
        level: args.level,
        elements,
        splitting,
    };
    render(ctx, &report, passed, || text(&report))
}

fn element_report(g: &BlockPermElement, args: &Args) -> Result<ElementReport, Failure> {
    let in_g = g.in_g();
    let in_gn = if in_g {
        Some(g.in_gn(args.level)?)
    } else {
        None
    };
    let quotient = if in_gn == Some(true) {
        Some(g.quotient(args.level)?)
    } else {
        None
    };
    let correction = match args.correction {
        Some(blocks) => Some(parity_correction_search(g, blocks)?),
        None => None,
    };
    Ok(ElementReport {
        element: g.clone(),
        in_g,
        in_gn,
        quotient,
        in_un: g.neighborhood_member(args.level)?,
        correction,
    })
}

fn text(r: &Report) -> String {
    let mut out = String::new();
    let n = r.level;
    for (i, e) in r.elements.iter().enumerate() {
        let cand = e.element.to_candidate();
        writeln!(out, "element {i}: window {}", cand.window).unwrap();
        writeln!(
            out,
            "  in G: {}  in G_{n}: {}  in U_{n}: {}",
            e.in_g,
            e.in_gn.map_or("n/a".into(), |b| b.to_string()),
            e.in_un
        )
        .unwrap();
        if let Some(q) = &e.quotient {
            writeln!(out, "  image in G_{n}/U_{n}: {q}").unwrap();
        }
        match &e.correction {
            Some(Some(us)) => {
                let us: Vec<String> = us.iter().map(ToString::to_string).collect();
                writeln!(out, "  parity correction: {}", us.join(" ")).unwrap();
            }
            Some(None) => writeln!(
                out,
                "  parity correction: none exists in the searched range"
            )
            .unwrap(),
            None => {}
        }
    }
    if let Some(s) = &r.splitting {
        writeln!(
            out,
            "splitting: {} products of <= {} of {} generators, {} (product, level) checks: homomorphism failures {}, kernel failures {}, odd images {}",
            s.products,
            s.max_length,
            s.generators,
            s.instances,
            s.homomorphism_failures.len(),
            s.kernel_failures.len(),
            s.odd_images.len()
        )
        .unwrap();
    }
    writeln!(out, "summary: {}", verdict(r.passed)).unwrap();
    out
}
