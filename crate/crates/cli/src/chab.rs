use std::fmt::Write;
use std::path::PathBuf;

use chablab_core::chabfin::{
    irs_vertices, lattice_dot, saturated_pull, saturated_push, saturation_formula,
    saturation_orbit, trunc_saturation, urs_list, FiniteGroup, GroupInput, MeasureReport, Quotient,
    Subgroup, SubgroupLattice, SubgroupReport, Tower, UrsKind, DEFAULT_ORDER_BOUND,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Failure;
use crate::output::{verdict, Outcome};
use crate::{read_file, Context, Format};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Group file (JSON): `{"generators": ["(0 1 2)", ...]}` or `{"table": [[...], ...]}`.
    group: PathBuf,
    /// Largest group order accepted.
    #[arg(long, default_value_t = DEFAULT_ORDER_BOUND)]
    bound: usize,
    /// Tabulate `[H]_U` for every subgroup `H`, computed both as an orbit stabilizer
    /// and as an intersection of products, and compare them.
    #[arg(long)]
    saturation_table: bool,
    /// A generator of `U` (repeatable). Without it the table runs over one `U` per
    /// conjugacy class.
    #[arg(long = "u-gen")]
    u_gens: Vec<String>,
    /// List the URS's (conjugacy classes of subgroups).
    #[arg(long)]
    urs: bool,
    /// List the extreme points of the IRS polytope.
    #[arg(long)]
    irs: bool,
    /// Tower file (JSON): `{"levels": [[gens], ...], "compacts": [[gens], ...]}`.
    #[arg(long)]
    tower: Option<PathBuf>,
}

#[derive(Deserialize)]
struct TowerInput {
    levels: Vec<Vec<String>>,
    compacts: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct Listed {
    index: usize,
    class: usize,
    #[serde(flatten)]
    subgroup: SubgroupReport,
}

#[derive(Serialize)]
struct SaturationRow {
    u: usize,
    h: usize,
    saturation: usize,
    saturated: bool,
    /// Both definitions agree.
    agree: bool,
}

#[derive(Serialize)]
struct UrsRow {
    class: usize,
    kind: UrsKind,
    members: Vec<usize>,
}

#[derive(Serialize)]
struct IrsRow {
    class: usize,
    /// Subgroup index and weight of each atom.
    atoms: Vec<(usize, String)>,
}

#[derive(Serialize)]
struct PushRow {
    /// The pushed IRS vertex of `G_n / U_n`.
    quotient_class: usize,
    pushed: MeasureReport,
    support_saturated: bool,
    pull_recovers_input: bool,
}

#[derive(Serialize)]
struct LevelReport {
    n: usize,
    level: usize,
    compact: usize,
    /// `λ_n(H)` for every subgroup `H`, by index.
    lambda: Vec<usize>,
    /// Every `λ_n(H)` is `U_n`-saturated in `G_n`.
    images_saturated: bool,
    /// Saturated pushes of the quotient's IRS vertices; absent when `U_n` is not normal in `G_n`.
    pushes: Option<Vec<PushRow>>,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    passed: bool,
    order: usize,
    subgroup_count: usize,
    class_count: usize,
    subgroups: Vec<Listed>,
    #[serde(skip_serializing_if = "Option::is_none")]
    saturation_table: Option<Vec<SaturationRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    urs: Option<Vec<UrsRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    irs: Option<Vec<IrsRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tower: Option<Vec<LevelReport>>,
}

fn index(lattice: &SubgroupLattice, h: &Subgroup) -> usize {
    lattice
        .index_of(h)
        .expect("results are subgroups of the lattice")
}

fn parse_subgroup(g: &FiniteGroup, gens: &[String]) -> Result<Subgroup, Failure> {
    Ok(g.parse_subgroup(gens)?)
}

pub fn run(ctx: &Context, args: Args) -> Result<Outcome, Failure> {
    let input: GroupInput = serde_json::from_str(&read_file(&args.group)?)
        .map_err(|e| Failure::from(e).in_file(&args.group))?;
    let g = input
        .build(args.bound)
        .map_err(|e| Failure::from(e).in_file(&args.group))?;
    let lattice = SubgroupLattice::new(&g, args.bound)?;
    let chosen_u = if args.u_gens.is_empty() {
        None
    } else {
        Some(parse_subgroup(&g, &args.u_gens)?)
    };

    if ctx.format == Format::Dot {
        return Ok(Outcome {
            text: lattice_dot(&g, &lattice, chosen_u.as_ref()),
            passed: true,
        });
    }

    let subgroups = lattice
        .subgroups()
        .iter()
        .enumerate()
        .map(|(i, h)| Listed {
            index: i,
            class: lattice.class_of(i),
            subgroup: g.describe(h),
        })
        .collect();
    let mut passed = true;

    let saturation_table = args.saturation_table.then(|| {
        let us: Vec<usize> = match &chosen_u {
            Some(u) => vec![index(&lattice, u)],
            None => lattice.classes().iter().map(|c| c[0]).collect(),
        };
        let pairs: Vec<(usize, usize)> = us
            .iter()
            .flat_map(|&u| (0..lattice.len()).map(move |h| (u, h)))
            .collect();
        let rows: Vec<SaturationRow> = pairs
            .par_iter()
            .map(|&(u, h)| {
                let (us, hs) = (lattice.get(u), lattice.get(h));
                let orbit = saturation_orbit(&g, us, hs);
                let formula = saturation_formula(&g, us, hs);
                SaturationRow {
                    u,
                    h,
                    saturation: index(&lattice, &orbit),
                    saturated: orbit == *hs,
                    agree: orbit == formula,
                }
            })
            .collect();
        passed &= rows.iter().all(|r| r.agree);
        rows
    });

    let urs = args.urs.then(|| {
        urs_list(&g, &lattice)
            .into_iter()
            .enumerate()
            .map(|(class, u)| UrsRow {
                class,
                kind: u.kind,
                members: u.members,
            })
            .collect()
    });

    let irs = args.irs.then(|| {
        irs_vertices(&lattice)
            .into_iter()
            .enumerate()
            .map(|(class, mu)| {
                let mut atoms: Vec<(usize, String)> = mu
                    .weights()
                    .iter()
                    .map(|(h, w)| (index(&lattice, h), w.to_string()))
                    .collect();
                atoms.sort();
                IrsRow { class, atoms }
            })
            .collect()
    });

    let tower = match &args.tower {
        None => None,
        Some(path) => {
            let t: TowerInput = serde_json::from_str(&read_file(path)?)
                .map_err(|e| Failure::from(e).in_file(path))?;
            let levels = t
                .levels
                .iter()
                .map(|gens| parse_subgroup(&g, gens))
                .collect::<Result<_, _>>()?;
            let compacts = t
                .compacts
                .iter()
                .map(|gens| parse_subgroup(&g, gens))
                .collect::<Result<_, _>>()?;
            let tower =
                Tower::new(&g, levels, compacts).map_err(|e| Failure::from(e).in_file(path))?;
            let reports = tower_report(&g, &lattice, &tower, args.bound)?;
            passed &= reports.iter().all(|r| {
                r.images_saturated
                    && r.pushes
                        .iter()
                        .flatten()
                        .all(|p| p.support_saturated && p.pull_recovers_input)
            });
            Some(reports)
        }
    };

    let report = Report {
        command: "chab",
        passed,
        order: g.order(),
        subgroup_count: lattice.len(),
        class_count: lattice.classes().len(),
        subgroups,
        saturation_table,
        urs,
        irs,
        tower,
    };
    let text = match ctx.format {
        Format::Json => crate::output::json(&report),
        _ => text(&report),
    };
    Ok(Outcome { text, passed })
}

fn tower_report(
    g: &FiniteGroup,
    lattice: &SubgroupLattice,
    tower: &Tower,
    bound: usize,
) -> Result<Vec<LevelReport>, Failure> {
    let mut out = Vec::new();
    for n in 1..=tower.height() {
        let (gn, un) = (tower.level(n), tower.compact(n));
        let images = lattice
            .subgroups()
            .par_iter()
            .map(|h| trunc_saturation(g, tower, n, h))
            .collect::<Result<Vec<_>, _>>()?;
        let images_saturated = images
            .iter()
            .all(|h| chablab_core::chabfin::is_saturated_in(g, gn, un, h));
        let pushes = match Quotient::new(g, gn, un) {
            Err(_) => None,
            Ok(q) => {
                let q_lattice = SubgroupLattice::new(&q.group, bound)?;
                let mut rows = Vec::new();
                for (class, mu) in irs_vertices(&q_lattice).into_iter().enumerate() {
                    let push = saturated_push(g, tower, n, &mu)?;
                    let back = saturated_pull(g, tower, n, &push.pushed)?;
                    rows.push(PushRow {
                        quotient_class: class,
                        pushed: push.pushed.report(g),
                        support_saturated: push.support_saturated,
                        pull_recovers_input: back == mu,
                    });
                }
                Some(rows)
            }
        };
        out.push(LevelReport {
            n,
            level: index(lattice, gn),
            compact: index(lattice, un),
            lambda: images.iter().map(|h| index(lattice, h)).collect(),
            images_saturated,
            pushes,
        });
    }
    Ok(out)
}

fn text(r: &Report) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "order {}: {} subgroups in {} conjugacy classes",
        r.order, r.subgroup_count, r.class_count
    )
    .unwrap();
    for s in &r.subgroups {
        let gens = if s.subgroup.generators.is_empty() {
            "1".to_string()
        } else {
            s.subgroup.generators.join(", ")
        };
        writeln!(
            out,
            "  H{} |{}| class {}: <{}>",
            s.index, s.subgroup.order, s.class, gens
        )
        .unwrap();
    }
    if let Some(rows) = &r.saturation_table {
        writeln!(
            out,
            "saturation table ([H]_U, saturated, definitions agree):"
        )
        .unwrap();
        for row in rows {
            writeln!(
                out,
                "  U=H{} H=H{} -> H{} {} {}",
                row.u,
                row.h,
                row.saturation,
                if row.saturated {
                    "saturated"
                } else {
                    "not-saturated"
                },
                if row.agree { "agree" } else { "DISAGREE" }
            )
            .unwrap();
        }
    }
    if let Some(rows) = &r.urs {
        writeln!(out, "URS ({}):", rows.len()).unwrap();
        for u in rows {
            let members: Vec<String> = u.members.iter().map(|m| format!("H{m}")).collect();
            writeln!(
                out,
                "  class {} {:?}: {}",
                u.class,
                u.kind,
                members.join(" ")
            )
            .unwrap();
        }
    }
    if let Some(rows) = &r.irs {
        writeln!(out, "IRS vertices ({}):", rows.len()).unwrap();
        for v in rows {
            let atoms: Vec<String> = v.atoms.iter().map(|(h, w)| format!("{w}*H{h}")).collect();
            writeln!(out, "  class {}: {}", v.class, atoms.join(" + ")).unwrap();
        }
    }
    if let Some(levels) = &r.tower {
        for l in levels {
            let lambda: Vec<String> = l
                .lambda
                .iter()
                .enumerate()
                .map(|(h, i)| format!("H{h}->H{i}"))
                .collect();
            writeln!(
                out,
                "level {} (G_n = H{}, U_n = H{}): {}",
                l.n,
                l.level,
                l.compact,
                lambda.join(" ")
            )
            .unwrap();
            writeln!(out, "  images saturated: {}", l.images_saturated).unwrap();
            match &l.pushes {
                None => writeln!(out, "  U_n not normal in G_n: no quotient pushes").unwrap(),
                Some(p) => writeln!(
                    out,
                    "  quotient IRS vertices pushed: {}, all saturated and recovered: {}",
                    p.len(),
                    p.iter()
                        .all(|x| x.support_saturated && x.pull_recovers_input)
                )
                .unwrap(),
            }
        }
    }
    writeln!(out, "summary: {}", verdict(r.passed)).unwrap();
    out
}
