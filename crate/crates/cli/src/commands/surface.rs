use essq::mgf::sphere_grid;
use essq::surface_map;
use serde_json::json;

use super::{config, WarningLog};
use crate::args::{Global, SurfaceArgs};
use crate::util::{build_state, invalid, num, parse_complex, state_request, write_json, CliResult, Csv};

pub fn run(g: &Global, a: &SurfaceArgs) -> CliResult<()> {
    let req = state_request(g.state.as_deref(), None, g.cutoff)?;
    let state = build_state(&req)?;
    if a.n_theta < 2 || a.n_phi < 1 {
        return Err(invalid("surface grid needs n_theta >= 2 and n_phi >= 1"));
    }
    let t = parse_complex(&a.t)?;
    let samples = surface_map(&state, t, a.tau, &sphere_grid(a.n_theta, a.n_phi))?;
    let mut log = WarningLog::default();
    log.extend(state.warnings());

    let mut header = super::mgf::HEADER.to_vec();
    header.extend(["mapped_x", "mapped_y", "mapped_z"]);
    let mut csv = Csv::create(g.out.join("surface.csv"), &header, !g.no_timestamp)?;
    for s in &samples {
        let [ex, ey, ez] = s.e;
        let [mx, my, mz] = s.mapped;
        csv.row(&[ex, ey, ez, t.re, t.im, a.tau, s.value.re, s.value.im, mx, my, mz].map(num))?;
    }
    csv.finish()?;
    log.report();
    let max_abs = samples.iter().map(|s| s.value.norm()).fold(0.0, f64::max);
    write_json(
        g.out.join("surface.json"),
        &json!({
            "config": config("surface", g, a, json!({ "state": req, "t": [t.re, t.im] })),
            "rows": samples.len(),
            "max_abs_value": max_abs,
            "warnings": log.to_json(),
        }),
    )
}
