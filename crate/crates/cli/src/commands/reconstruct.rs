use std::fs::File;
use std::io::{BufWriter, Write};

use essq::reconstruct::stokes_of;
use essq::{
    classicality_check, invert_to_pess, l1_distance, mgf_imaginary_grid, mgf_imaginary_grid_state,
    pess_mc_oracle, stokes_mean, CoherentEnsemble, Grid3, PessGrid, StateRequest, Window,
};
use serde_json::{json, Value};

use super::{config, WarningLog};
use crate::args::{Global, ReconstructArgs, WindowArg};
use crate::util::{build_state, invalid, out_err, parse_vec3, read_json_arg, state_request, write_json, CliResult};

enum Source {
    Ensemble(CoherentEnsemble),
    State(StateRequest),
}

fn norm3(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Mean Stokes vector and a half-width that covers the source with margin.
fn default_extent(src: &Source) -> CliResult<([f64; 3], f64)> {
    match src {
        Source::Ensemble(CoherentEnsemble::Finite { components }) => {
            let total: f64 = components.iter().map(|c| c.weight).sum();
            let points: Vec<[f64; 3]> = components.iter().map(|c| stokes_of(c.alpha, c.beta)).collect();
            let mut center = [0.0; 3];
            for (c, p) in components.iter().zip(&points) {
                for a in 0..3 {
                    center[a] += c.weight / total * p[a];
                }
            }
            let reach = points
                .iter()
                .map(|p| norm3([p[0] - center[0], p[1] - center[1], p[2] - center[2]]))
                .fold(0.0, f64::max);
            Ok((center, 1.25 * reach + 4.0))
        }
        Source::Ensemble(CoherentEnsemble::Gaussian { alpha, beta, variance }) => {
            let intensity = alpha.norm_sqr() + beta.norm_sqr();
            let spread = (2.0 * variance * intensity + 2.0 * variance * variance).sqrt();
            Ok((stokes_of(*alpha, *beta), (8.0 * spread).max(4.0)))
        }
        Source::State(req) => {
            let state = build_state(req)?;
            let s = stokes_mean(&state);
            Ok((s.s, 1.5 * s.s0 + 4.0))
        }
    }
}

/// Local maxima (26-neighbourhood, periodic edges excluded) above 10% of the peak.
fn peaks(p: &PessGrid) -> Vec<Value> {
    let grid = p.grid();
    let [nx, ny, nz] = grid.shape();
    let peak = p.peak();
    let mut found = Vec::new();
    for flat in 0..grid.len() {
        let i = grid.unravel(flat);
        let v = p.values()[flat];
        if v < 0.1 * peak {
            continue;
        }
        let mut is_max = true;
        'scan: for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                for dz in -1i64..=1 {
                    if (dx, dy, dz) == (0, 0, 0) {
                        continue;
                    }
                    let j = [i[0] as i64 + dx, i[1] as i64 + dy, i[2] as i64 + dz];
                    if j[0] < 0 || j[1] < 0 || j[2] < 0 || j[0] >= nx as i64 || j[1] >= ny as i64 || j[2] >= nz as i64 {
                        continue;
                    }
                    let w = p.at([j[0] as usize, j[1] as usize, j[2] as usize]);
                    let earlier = grid.index([j[0] as usize, j[1] as usize, j[2] as usize]) < flat;
                    if w > v || (w == v && earlier) {
                        is_max = false;
                        break 'scan;
                    }
                }
            }
        }
        if is_max {
            found.push((v, grid.point(i)));
        }
    }
    found.sort_by(|a, b| b.0.total_cmp(&a.0));
    found
        .into_iter()
        .take(16)
        .enumerate()
        .map(|(n, (v, s))| json!({ "label": format!("peak_{}", n + 1), "position": s, "value": v }))
        .collect()
}

pub fn run(g: &Global, a: &ReconstructArgs) -> CliResult<()> {
    let src = match (&a.ensemble, &g.state) {
        (Some(_), Some(_)) => return Err(invalid("give either --ensemble or --state, not both")),
        (None, None) => return Err(invalid("reconstruct needs --ensemble or --state")),
        (Some(e), None) => {
            let ens: CoherentEnsemble = serde_json::from_str(&read_json_arg(e)?)
                .map_err(|e| invalid(format!("ensemble JSON: {e}")))?;
            ens.validate()?;
            Source::Ensemble(ens)
        }
        (None, Some(_)) => {
            let req = state_request(g.state.as_deref(), None, g.cutoff)?;
            if req.spec.is_classical() {
                Source::Ensemble(CoherentEnsemble::from_spec(&req.spec)?)
            } else {
                Source::State(req)
            }
        }
    };
    let (auto_center, auto_hw) = default_extent(&src)?;
    let center = match &a.center {
        Some(c) => parse_vec3(c)?,
        None => auto_center,
    };
    let half_width = a.half_width.unwrap_or(auto_hw);
    let grid = Grid3::cube(center, half_width, a.n)?;
    let tau = a.tau.unwrap_or_else(|| grid.default_tau());
    let window = match a.window {
        WindowArg::Hann => Window::Hann,
        WindowArg::None => Window::None,
    };

    let mgf = match &src {
        Source::Ensemble(ens) => mgf_imaginary_grid(ens, &grid, tau)?,
        Source::State(req) => mgf_imaginary_grid_state(&build_state(req)?, &grid, tau)?,
    };
    let pess = invert_to_pess(&mgf, tau, &grid, window)?;
    let mut log = WarningLog::default();
    log.extend(&pess.warnings);
    let pess = pess.value;

    let oracle = match &src {
        Source::Ensemble(ens) if a.oracle_samples > 0 && !ens.singular() => {
            let mc = pess_mc_oracle(ens, &grid, a.oracle_samples, g.seed)?;
            let outside = match mc.source() {
                essq::reconstruct::PessSource::Histogram { outside_fraction, .. } => *outside_fraction,
                _ => 0.0,
            };
            Some(json!({
                "samples": a.oracle_samples,
                "seed": g.seed,
                "outside_fraction": outside,
                "l1_distance": l1_distance(&pess, &mc)?,
            }))
        }
        _ => None,
    };

    let bin = g.out.join("pess.bin");
    let file = File::create(&bin).map_err(|e| out_err(&bin, e))?;
    pess.write_binary(BufWriter::new(file))?;
    let csv_path = g.out.join("pess.csv");
    let mut w = BufWriter::new(File::create(&csv_path).map_err(|e| out_err(&csv_path, e))?);
    if !g.no_timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(w, "# generated_unix={secs}").map_err(|e| out_err(&csv_path, e))?;
    }
    pess.write_csv(&mut w)?;
    w.flush().map_err(|e| out_err(&csv_path, e))?;

    let peak = pess.peak();
    let classicality = classicality_check(&pess, a.classicality_tol * peak);
    log.report();
    let source_json = match &src {
        Source::Ensemble(e) => json!({ "ensemble": e }),
        Source::State(r) => json!({ "state": r }),
    };
    write_json(
        g.out.join("reconstruct.json"),
        &json!({
            "config": config("reconstruct", g, a, json!({
                "source": source_json, "grid": grid, "tau": tau, "window": window,
            })),
            "pess": pess,
            "riemann_sum": pess.riemann_sum(),
            "peak": peak,
            "min_value": pess.min_value(),
            "min_over_peak": pess.min_value() / peak,
            "boundary_mass": pess.boundary_mass(),
            "peaks": peaks(&pess),
            "classicality": classicality,
            "oracle": oracle,
            "warnings": log.to_json(),
        }),
    )
}
