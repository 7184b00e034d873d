use essq::{second_order_det, MeasurementDirection, C64};
use serde_json::json;

use super::{config, WarningLog};
use crate::args::{Global, HomScanArgs};
use crate::util::{build_state, num, parse_list, state_request, write_json, CliResult, Csv};

/// `det = M(0) M(2t) - M(t)^2` for the points `(0, 0)` and `(t, 0)` along the
/// direction set by the transmissivity.
pub fn run(g: &Global, a: &HomScanArgs) -> CliResult<()> {
    let req = state_request(g.state.as_deref(), Some(r#"{"kind":"hom_input"}"#), g.cutoff)?;
    let state = build_state(&req)?;
    let t2s = parse_list(&a.t2)?;
    let ts = match &a.t {
        Some(s) => parse_list(s)?,
        None => vec![2f64.sqrt(), 3f64.sqrt(), 2.0],
    };
    let mut log = WarningLog::default();
    log.extend(state.warnings());

    let mut csv = Csv::create(g.out.join("hom_scan.csv"), &["T2", "t", "det"], !g.no_timestamp)?;
    let mut negative = 0usize;
    for &t in &ts {
        for &t2 in &t2s {
            let dir = MeasurementDirection::from_transmissivity(t2)?;
            let det = second_order_det(&state, &dir, C64::new(t, 0.0), 0.0, C64::new(0.0, 0.0), 0.0)?;
            if det < 0.0 {
                negative += 1;
            }
            csv.row(&[t2, t, det].map(num))?;
        }
    }
    csv.finish()?;
    log.report();
    write_json(
        g.out.join("hom_scan.json"),
        &json!({
            "config": config("hom-scan", g, a, json!({ "state": req, "t": ts, "T2": t2s })),
            "rows": ts.len() * t2s.len(),
            "negative_rows": negative,
            "warnings": log.to_json(),
        }),
    )
}
