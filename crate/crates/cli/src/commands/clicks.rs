use essq::{
    click_distribution, click_moment_to_mgf_point, estimate_mgf_from_samples, joint_photon_distribution,
    mgf_closed_form, mgf_from_distribution, moments_from_clicks, sample_clicks, ClickDetectorConfig,
    MeasurementDirection, C64,
};
use serde_json::json;

use super::{config, WarningLog};
use crate::args::{ClicksArgs, Global};
use crate::util::{build_state, num, parse_vec3, state_request, write_json, CliResult, Csv};

pub fn run(g: &Global, a: &ClicksArgs) -> CliResult<()> {
    let req = state_request(g.state.as_deref(), None, g.cutoff)?;
    let state = build_state(&req)?;
    let dir = MeasurementDirection::from_vector(parse_vec3(&a.direction)?)?;
    let cfg_a = ClickDetectorConfig::new(a.da, a.eta_a, a.nu_a, a.eps_a)?;
    let cfg_b = ClickDetectorConfig::new(a.db, a.eta_b, a.nu_b, a.eps_b)?;
    let correct = !a.no_dark_correction;
    let mut log = WarningLog::default();
    log.extend(state.warnings());

    let clicks = click_distribution(&state, &dir, &cfg_a, &cfg_b)?;
    let photons = joint_photon_distribution(&state, &dir)?;
    let ts = !g.no_timestamp;

    let mut csv = Csv::create(g.out.join("clicks.csv"), &["i", "j", "probability"], ts)?;
    for i in 0..=a.da {
        for j in 0..=a.db {
            csv.row(&[i.to_string(), j.to_string(), num(clicks.get(i, j))])?;
        }
    }
    csv.finish()?;

    let samples = a.samples.map(|n| sample_clicks(&clicks, n, g.seed)).transpose()?;
    if let Some(s) = &samples {
        let mut csv = Csv::create(g.out.join("samples.csv"), &["i", "j", "count"], ts)?;
        for i in 0..=a.da {
            for j in 0..=a.db {
                csv.row(&[i.to_string(), j.to_string(), s.counts()[(i, j)].to_string()])?;
            }
        }
        csv.finish()?;
    }

    let mut header = vec!["k", "l", "t", "tau", "mu_raw", "M_ess", "M_pipeline", "M_closed"];
    if samples.is_some() {
        header.extend(["M_estimate", "std_error"]);
    }
    let mut csv = Csv::create(g.out.join("moments.csv"), &header, ts)?;
    let mut table = Vec::new();
    let mut max_dev = 0.0f64;
    for k in 0..=a.da {
        for l in 0..=a.db {
            let (t, tau) = click_moment_to_mgf_point(k, l, &cfg_a, &cfg_b)?;
            let raw = moments_from_clicks(&clicks, k, l, false)?;
            let recovered = moments_from_clicks(&clicks, k, l, correct)?;
            let pipeline = mgf_from_distribution(&photons, C64::new(t, 0.0), tau);
            log.extend(&pipeline.warnings);
            let closed = mgf_closed_form(&req.spec, &dir, C64::new(t, 0.0), tau).ok().map(|c| c.re);
            if correct {
                max_dev = max_dev.max((recovered - pipeline.value.re).abs());
            }
            let mut row = vec![
                k.to_string(),
                l.to_string(),
                num(t),
                num(tau),
                num(raw),
                num(recovered),
                num(pipeline.value.re),
                closed.map(num).unwrap_or_default(),
            ];
            let estimate = match &samples {
                Some(s) => {
                    let est = estimate_mgf_from_samples(s, k, l, &cfg_a, &cfg_b, correct)?;
                    row.extend([num(est.value), num(est.std_error)]);
                    Some(est)
                }
                None => None,
            };
            csv.row(&row)?;
            table.push(json!({
                "k": k, "l": l, "t": t, "tau": tau, "mu_raw": raw, "m_ess": recovered,
                "m_pipeline": pipeline.value.re, "m_closed": closed, "estimate": estimate,
            }));
        }
    }
    csv.finish()?;
    log.report();
    write_json(
        g.out.join("clicks.json"),
        &json!({
            "config": config("clicks", g, a, json!({
                "state": req, "direction": dir, "detector_a": cfg_a, "detector_b": cfg_b,
                "dark_correction": correct,
            })),
            "distribution": clicks,
            "moments": table,
            "max_abs_deviation_recovered_vs_pipeline": if correct { Some(max_dev) } else { None },
            "samples": samples,
            "warnings": log.to_json(),
        }),
    )
}
