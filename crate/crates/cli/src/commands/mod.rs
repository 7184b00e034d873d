pub mod clicks;
pub mod hom_scan;
pub mod mgf;
pub mod nctest;
pub mod reconstruct;
pub mod surface;
pub mod tmsv_scan;

use std::collections::BTreeMap;

use essq::Warning;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Global;

/// Resolved configuration echoed into every JSON artifact.
pub fn config<A: Serialize>(command: &str, g: &Global, args: &A, extra: Value) -> Value {
    json!({
        "command": command,
        "global": {
            "state": g.state,
            "out": g.out,
            "seed": g.seed,
            "cutoff": g.cutoff,
            "no_timestamp": g.no_timestamp,
        },
        "args": args,
        "resolved": extra,
    })
}

/// Distinct warnings with occurrence counts.
#[derive(Default)]
pub struct WarningLog(BTreeMap<String, (Value, usize)>);

impl WarningLog {
    pub fn extend<'a>(&mut self, ws: impl IntoIterator<Item = &'a Warning>) {
        for w in ws {
            let v = serde_json::to_value(w).unwrap_or(Value::Null);
            let key = v.get("warning").and_then(Value::as_str).unwrap_or("").to_string();
            self.0.entry(key).or_insert((v, 0)).1 += 1;
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.0
                .values()
                .map(|(v, n)| json!({"first": v, "count": n}))
                .collect(),
        )
    }

    pub fn report(&self) {
        for (kind, (_, n)) in &self.0 {
            eprintln!("essq: warning: {kind} ({n}x)");
        }
    }
}
