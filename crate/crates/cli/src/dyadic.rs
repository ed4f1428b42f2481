use chablab_core::chabfin::dyadic_counterexample;
use serde::Serialize;

use crate::error::Failure;
use crate::output::{render, verdict, Outcome};
use crate::Context;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Check H_n for n = 1..=nmax.
    #[arg(long, default_value_t = 6)]
    nmax: u32,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    passed: bool,
    #[serde(flatten)]
    report: &'a chablab_core::chabfin::DyadicReport,
}

pub fn run(ctx: &Context, args: Args) -> Result<Outcome, Failure> {
    if args.nmax == 0 {
        return Err(Failure::Usage("--nmax must be at least 1".into()));
    }
    let report = dyadic_counterexample(args.nmax);
    let passed = report.all_pass();
    render(
        ctx,
        &Report {
            command: "dyadic",
            passed,
            report: &report,
        },
        passed,
        || format!("{}summary: {}\n", report.to_text(), verdict(passed)),
    )
}
