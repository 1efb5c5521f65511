//! The `--machine` JSON block appended after the text report.

use serde_json::{json, Value};
use tanglefloer::homology::{AbelianGroup, Homology, LaurentModule};

use crate::Failure;

pub const MARKER: &str = "--- machine ---";

pub fn group(g: &AbelianGroup) -> Value {
    json!({
        "free_rank": g.free_rank,
        "torsion": g.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
    })
}

/// One entry per degree, highest first, mirroring the `H_<k>` lines.
pub fn homology(h: &Homology) -> Value {
    Value::Array(
        h.groups
            .iter()
            .rev()
            .map(|(k, g)| {
                let mut v = group(g);
                v["degree"] = json!(k);
                v
            })
            .collect(),
    )
}

pub fn laurent(m: &std::collections::BTreeMap<i64, LaurentModule>) -> Value {
    Value::Array(
        m.iter()
            .rev()
            .map(|(k, g)| {
                json!({
                    "degree": k,
                    "free_rank": g.free_rank,
                    "torsion": g.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

pub fn bare(command: &str) -> Value {
    json!({ "command": command })
}

pub fn failure(command: &str, f: &Failure) -> Value {
    json!({ "command": command, "error": f.message })
}

pub fn render(mut block: Value, exit_code: i32) -> String {
    block["exit_code"] = json!(exit_code);
    let body = serde_json::to_string_pretty(&block).expect("JSON values serialize");
    format!("{MARKER}\n{body}\n")
}

/// The JSON block of a captured stdout, if any.
pub fn extract(stdout: &str) -> Option<Value> {
    let (_, rest) = stdout.split_once(&format!("{MARKER}\n"))?;
    serde_json::from_str(rest).ok()
}
