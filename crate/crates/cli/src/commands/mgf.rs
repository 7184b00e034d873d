use essq::{joint_photon_distribution, mgf_from_distribution, MeasurementDirection, MgfQuery};
use serde_json::json;

use super::{config, WarningLog};
use crate::args::{Global, MgfArgs};
use crate::util::{build_state, num, parse_complex_list, parse_list, parse_vec3, state_request, write_json, CliResult, Csv};

pub const HEADER: [&str; 8] = ["e_x", "e_y", "e_z", "t_re", "t_im", "tau", "M_re", "M_im"];

pub fn run(g: &Global, a: &MgfArgs) -> CliResult<()> {
    let req = state_request(g.state.as_deref(), None, g.cutoff)?;
    let state = build_state(&req)?;
    let dirs = a
        .directions
        .iter()
        .map(|d| Ok(MeasurementDirection::from_vector(parse_vec3(d)?)?))
        .collect::<CliResult<Vec<_>>>()?;
    let ts = parse_complex_list(&a.t)?;
    let taus = parse_list(&a.tau)?;
    let mut log = WarningLog::default();
    log.extend(state.warnings());

    let mut csv = Csv::create(g.out.join("mgf.csv"), &HEADER, !g.no_timestamp)?;
    let mut rows = 0usize;
    for dir in &dirs {
        let dist = joint_photon_distribution(&state, dir)?;
        for &t in &ts {
            for &tau in &taus {
                if a.existence_only && t.re.abs() > tau {
                    continue;
                }
                MgfQuery::new(*dir, t, tau)?;
                let m = mgf_from_distribution(&dist, t, tau);
                log.extend(&m.warnings);
                let e = dir.e();
                csv.row(&[e[0], e[1], e[2], t.re, t.im, tau, m.value.re, m.value.im].map(num))?;
                rows += 1;
            }
        }
    }
    csv.finish()?;
    log.report();
    write_json(
        g.out.join("mgf.json"),
        &json!({
            "config": config("mgf", g, a, json!({ "state": req })),
            "rows": rows,
            "warnings": log.to_json(),
        }),
    )
}
