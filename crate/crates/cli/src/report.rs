use std::io::Write;

use pointdata::model::CompatFinding;
use serde_json::Value;

/// Findings as JSON lines on standard output.
pub fn findings(findings: &[CompatFinding]) {
    let mut out = std::io::stdout().lock();
    for f in findings {
        let _ = writeln!(out, "{}", f.to_json_line());
    }
}

/// One JSON object on its own line on standard output.
pub fn json_line(value: &Value) {
    let _ = writeln!(std::io::stdout().lock(), "{value}");
}

pub fn warn(message: impl std::fmt::Display) {
    eprintln!("warning: {message}");
}

pub fn error(message: impl std::fmt::Display) {
    eprintln!("error: {message}");
}

/// Variant name of an error enum, e.g. `RankDeficient`.
pub fn kind_of(e: &impl std::fmt::Debug) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric() && c != '_')
        .next()
        .unwrap_or_default()
        .to_string()
}
