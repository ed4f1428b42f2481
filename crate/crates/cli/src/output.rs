use serde::Serialize;

use crate::error::Failure;
use crate::{Context, Format};

/// What a command prints, and whether all its checks passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

/// Pretty JSON with a trailing newline. Maps inside reports are `BTreeMap`s or
/// structs, so key order is fixed.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Renders `report` as JSON, or as `text()` for `--format text`.
pub fn render<T: Serialize>(
    ctx: &Context,
    report: &T,
    passed: bool,
    text: impl FnOnce() -> String,
) -> Result<Outcome, Failure> {
    let text = match ctx.format {
        Format::Json => json(report),
        Format::Text => text(),
        Format::Dot => {
            return Err(Failure::Usage(
                "--format dot is only available for `chab`".into(),
            ))
        }
    };
    Ok(Outcome { text, passed })
}

pub fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}
