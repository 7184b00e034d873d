use essq::{
    char_fn_criterion, cross_correlation_det, matrix_verdict, mgf_matrix, second_order_det,
    sylvester_minors, variance_criteria, MeasurementDirection, MgfMatrixSpec, MgfPoint, Verdict,
};
use serde_json::json;

use super::{config, WarningLog};
use crate::args::{Global, NctestArgs};
use crate::util::{build_state, invalid, num, parse_complex, parse_f64, parse_vec3, state_request, write_json, CliResult, Csv};

fn parse_points(s: &str) -> CliResult<Vec<MgfPoint>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (t, tau) = p
                .split_once(':')
                .ok_or_else(|| invalid(format!("point {p:?} is not t:tau")))?;
            Ok(MgfPoint::new(parse_complex(t)?, parse_f64(tau)?))
        })
        .collect()
}

pub fn run(g: &Global, a: &NctestArgs) -> CliResult<()> {
    let req = state_request(g.state.as_deref(), None, g.cutoff)?;
    let state = build_state(&req)?;
    let dir = MeasurementDirection::from_vector(parse_vec3(&a.direction)?)?;
    let points = parse_points(&a.points)?;
    if points.is_empty() {
        return Err(invalid("--points is empty"));
    }
    let k = parse_vec3(&a.k)?;
    let tol = a.tolerance;
    let mut log = WarningLog::default();
    log.extend(state.warnings());

    let spec = MgfMatrixSpec::new(dir, points.clone())?;
    let m = mgf_matrix(&state, &spec)?;
    log.extend(&m.warnings);
    let matrix = matrix_verdict(&m.value, tol)?;
    let minors = sylvester_minors(&m.value);
    let det2 = match points.as_slice() {
        [p, q, ..] => Some(second_order_det(&state, &dir, p.t, p.tau, q.t, q.tau)?),
        _ => None,
    };
    let variances = variance_criteria(&state, &dir)?;
    let cross = cross_correlation_det(&state, &dir)?;
    let charfn = char_fn_criterion(&state, k, tol)?;

    let mut rows: Vec<(&str, f64)> = vec![("matrix_min_eigenvalue", matrix.value)];
    if let Some(d) = det2 {
        rows.push(("second_order_det", d));
    }
    rows.extend([
        ("var_stokes", variances.var_s),
        ("var_photon_number", variances.var_n),
        ("cross_correlation_stokes", cross.stokes),
        ("cross_correlation_photon_number", cross.photon_number),
        ("char_fn", charfn.value),
    ]);
    let mut csv = Csv::create(g.out.join("nctest.csv"), &["criterion", "value", "verdict"], !g.no_timestamp)?;
    for (name, value) in &rows {
        let verdict = Verdict::from_value(*value, tol);
        csv.row(&[name.to_string(), num(*value), verdict.to_string()])?;
    }
    csv.finish()?;
    log.report();

    let entries: Vec<Vec<[f64; 2]>> = m
        .value
        .row_iter()
        .map(|r| r.iter().map(|c| [c.re, c.im]).collect())
        .collect();
    let nonclassical = rows
        .iter()
        .any(|(_, v)| Verdict::from_value(*v, tol) == Verdict::Nonclassical);
    write_json(
        g.out.join("nctest.json"),
        &json!({
            "config": config("nctest", g, a, json!({ "state": req, "direction": dir, "points": points, "k": k })),
            "matrix": { "entries": entries, "report": matrix, "sylvester_minors": minors },
            "second_order_det": det2,
            "variances": variances,
            "cross_correlation": cross,
            "char_fn": charfn,
            "nonclassical": nonclassical,
            "warnings": log.to_json(),
        }),
    )
}
