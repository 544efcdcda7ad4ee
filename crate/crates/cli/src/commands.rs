use rayon::prelude::*;
use serde_json::{json, Value};
use zenodark::application::{
    best_per_winding, evaluate_candidate, prepare_dicke, prepare_dicke_without_loop, rank_order,
    DickeTask,
};
use zenodark::dynamics::{
    holonomic_fidelity, sweep_cell, Allocation, RampProfile, SweepColumn, SweepRow, SweepSettings,
};
use zenodark::fock::{dicke_vector, SectorBasis};
use zenodark::gates::{
    approximate_x, axis_angle, default_generators, find_theta_star, sample_word, EqualAreaPartition,
};
use zenodark::holonomy::{ClosedForm, TransportOptions};
use zenodark::linalg::{projective_distance2, CMat};
use zenodark::model::Model;
use zenodark::subspace::{degeneracy_scan, zeta_states, DarkSpace, Frame, ZenoSpace};
use zenodark::{
    parse_path, ControlParams, HolonomyResult, Method, ModelConfig, PathProgram, SectorConfig,
    Transporter,
};

use crate::args::*;
use crate::error::CliError;
use crate::output::{columns, complex, matrix, matrix2, num, Report, Table};

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Basis(a) => basis(a),
        Command::Zeno(a) => zeno(a),
        Command::Dark(a) => dark(a),
        Command::Degeneracy(a) => degeneracy(a),
        Command::Holonomy(a) => holonomy(a),
        Command::Universality(a) => universality(a),
        Command::SynthX(a) => synth_x(a),
        Command::Dicke(a) => dicke(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn sector(a: &SectorArgs) -> Result<SectorConfig, CliError> {
    Ok(SectorConfig::new(a.n, a.p)?)
}

fn model_config(a: &SectorArgs, g: f64) -> Result<ModelConfig, CliError> {
    Ok(ModelConfig::new(sector(a)?, g)?)
}

fn program(text: &str) -> Result<PathProgram, CliError> {
    parse_path(text).map_err(|e| CliError::path(text, &e))
}

const STATE_COLUMNS: [&str; 6] = ["index", "n_a1", "n_a2", "n_b1", "n_b2", "n_c"];

/// Basis labels followed by `<prefix><k>_re, <prefix><k>_im` for every column.
fn state_table(basis: &SectorBasis, blocks: &[(&str, &CMat)]) -> Table {
    let mut header: Vec<String> = STATE_COLUMNS.iter().map(|s| s.to_string()).collect();
    for (prefix, m) in blocks {
        for k in 1..=m.ncols() {
            header.push(format!("{prefix}{k}_re"));
            header.push(format!("{prefix}{k}_im"));
        }
    }
    let mut t = Table::new(header);
    for (i, s) in basis.states().iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(s.tuple().iter().map(u32::to_string));
        for (_, m) in blocks {
            for z in m.row(i).iter() {
                row.push(num(z.re));
                row.push(num(z.im));
            }
        }
        t.push(row);
    }
    t
}

fn labels(basis: &SectorBasis) -> Value {
    basis.states().iter().map(|s| s.to_string()).collect()
}

fn basis(a: &SectorArgs) -> Result<Report, CliError> {
    let basis = SectorBasis::enumerate(sector(a)?);
    let table = state_table(&basis, &[]);
    let states: Vec<Value> = basis
        .states()
        .iter()
        .map(|s| {
            json!({"n_a1": s.n_a1, "n_a2": s.n_a2, "n_b1": s.n_b1, "n_b2": s.n_b2, "n_c": s.n_c})
        })
        .collect();
    Ok(
        Report::new(table, json!({ "dimension": basis.len(), "states": states }))
            .with("dimension", basis.len()),
    )
}

fn zeno(a: &ZenoArgs) -> Result<Report, CliError> {
    let model = Model::new(model_config(&a.sector, a.g)?);
    let z = ZenoSpace::with_seed(&model, a.seed);
    let basis = model.basis();
    let table = state_table(basis, &[("z", z.columns())]);
    let mut data = json!({
        "dimension": z.dim(),
        "raw_dimension": z.raw_dim,
        "even_dimension": z.frame.n_even,
        "odd_dimension": z.frame.n_odd(),
        "decoupled_dimension": z.decoupled.dim(),
        "aligned_to_reference": z.aligned,
        "states": labels(basis),
        "columns": columns(z.columns()),
        "decoupled": columns(z.decoupled.columns()),
    });
    let mut report_extra = None;
    if let Ok(zeta) = zeta_states(basis) {
        let overlap = zeta.adjoint() * z.columns();
        let dist = z.frame.frame.projector_distance(&Frame::new(zeta));
        data["zeta_overlap"] = matrix(&overlap);
        data["zeta_projector_distance"] = json!(dist);
        report_extra = Some(dist);
    }
    let mut r = Report::new(table, data)
        .with("dimension", z.dim())
        .with("raw_dimension", z.raw_dim);
    if let Some(d) = report_extra {
        r = r.with("zeta_projector_distance", d);
    }
    Ok(r)
}

fn dark(a: &DarkArgs) -> Result<Report, CliError> {
    let space = DarkSpace::new(model_config(&a.sector, a.g)?);
    let params = ControlParams::new(a.theta, a.phi_a, a.phi_b).with_omega(a.omega);
    let d = space.dark_frame(&params);
    let basis = space.model().basis();
    let table = state_table(basis, &[("d", d.frame.columns())]);
    let data = json!({
        "dimension": d.dimension,
        "at_boundary": d.at_boundary,
        "gauge_fixed": d.gauge_fixed,
        "states": labels(basis),
        "columns": columns(d.frame.columns()),
        "zeno_coefficients": columns(&d.coefficients),
    });
    Ok(Report::new(table, data)
        .with("dimension", d.dimension)
        .with("gauge_fixed", d.gauge_fixed))
}

fn degeneracy(a: &DegeneracyArgs) -> Result<Report, CliError> {
    let rows = degeneracy_scan(a.n_max, a.p_max, a.seed);
    let mut t = Table::new([
        "n",
        "p",
        "basis_dim",
        "raw_zeno_dim",
        "zeno_dim",
        "zero_energy_dim",
        "full_kernel_dim",
        "dark_dim",
    ]);
    let mut data = Vec::new();
    for r in &rows {
        t.push(
            [
                r.n as usize,
                r.p as usize,
                r.basis_dim,
                r.raw_zeno_dim,
                r.zeno_dim,
                r.zero_energy_dim,
                r.full_kernel_dim,
                r.dark_dim,
            ]
            .iter()
            .map(usize::to_string)
            .collect(),
        );
        data.push(json!({
            "n": r.n, "p": r.p, "basis_dim": r.basis_dim, "raw_zeno_dim": r.raw_zeno_dim,
            "zeno_dim": r.zeno_dim, "zero_energy_dim": r.zero_energy_dim,
            "full_kernel_dim": r.full_kernel_dim, "dark_dim": r.dark_dim,
        }));
    }
    let degenerate = rows
        .iter()
        .filter(|r| r.p > 1)
        .all(|r| r.zero_energy_dim >= 2 && r.full_kernel_dim >= 2);
    Ok(Report::new(t, Value::Array(data)).with("degenerate_for_all_p_above_1", degenerate))
}

fn holonomy_json(r: &HolonomyResult) -> Value {
    json!({
        "u": matrix2(&r.u),
        "steps_used": r.steps_used,
        "est_error": r.est_error,
        "unitarity_deviation": r.unitarity_deviation(),
    })
}

fn holonomy(a: &HolonomyArgs) -> Result<Report, CliError> {
    let path = program(&a.path)?;
    let config = model_config(&a.sector, 1.0)?;
    let opts = TransportOptions {
        initial_steps: a.transport.initial_steps,
        max_steps: a.transport.max_steps,
        tolerance: a.transport.tolerance,
        extrapolate: true,
        gauge_seed: a.transport.gauge_seed,
    };
    let transported = match a.method {
        MethodArg::Transport | MethodArg::Both => {
            Some(Transporter::with_options(config, opts).transport(&path)?)
        }
        MethodArg::Closed => None,
    };
    let closed = match a.method {
        MethodArg::Closed | MethodArg::Both => {
            Some(ClosedForm::new(config.sector)?.program(&path)?)
        }
        MethodArg::Transport => None,
    };
    let main = transported
        .as_ref()
        .or(closed.as_ref())
        .expect("one method ran");
    let aa = axis_angle(&main.u)?;
    let cross = match (&transported, &closed) {
        (Some(t), Some(c)) => Some(projective_distance2(&t.u, &c.u)),
        _ => None,
    };

    let mut t = Table::new(["method", "row", "col", "re", "im"]);
    for (name, r) in [("transport", &transported), ("closed", &closed)] {
        if let Some(r) = r {
            for i in 0..2 {
                for j in 0..2 {
                    let z = r.u[(i, j)];
                    t.push(vec![
                        name.into(),
                        i.to_string(),
                        j.to_string(),
                        num(z.re),
                        num(z.im),
                    ]);
                }
            }
        }
    }
    let data = json!({
        "path": path.to_string(),
        "u": matrix2(&main.u),
        "transport": transported.as_ref().map(holonomy_json),
        "closed": closed.as_ref().map(holonomy_json),
        "axis_angle": {"axis": aa.axis, "angle": aa.angle, "global_phase": aa.global_phase},
        "cross_distance": cross,
    });
    let mut r = Report::new(t, data)
        .with("axis", json!(aa.axis))
        .with("angle", aa.angle);
    if let Some(d) = cross {
        r = r.with("cross_distance", d);
    }
    if let Some(tr) = &transported {
        r = r.with("est_error", tr.est_error);
    }
    Ok(r)
}

fn universality(a: &UniversalityArgs) -> Result<Report, CliError> {
    if a.max_len == 0 || a.cells == 0 {
        return Err(CliError::Usage(
            "--max-len and --cells must be positive".into(),
        ));
    }
    let (u1, u2) = default_generators();
    let samples: Vec<_> = (0..a.count as u64)
        .into_par_iter()
        .map(|i| sample_word(&u1, &u2, a.max_len, a.seed, i))
        .collect();
    let fill = EqualAreaPartition::new(a.cells).fill_fraction(samples.iter().map(|s| &s.point));
    let mut t = Table::new(["x", "y", "z", "seq_len"]);
    let mut points = Vec::with_capacity(samples.len());
    for s in &samples {
        let p = s.point;
        t.push(vec![num(p.x), num(p.y), num(p.z), s.seq_len.to_string()]);
        points.push(json!([p.x, p.y, p.z, s.seq_len]));
    }
    let data = json!({"fill_fraction": fill, "cells": a.cells, "points": points});
    Ok(Report::new(t, data)
        .with("count", samples.len())
        .with("fill_fraction", fill))
}

fn synth_x(a: &SynthXArgs) -> Result<Report, CliError> {
    if a.max_reps == 0 {
        return Err(CliError::Usage("--max-reps must be positive".into()));
    }
    let theta = find_theta_star(a.m_a, a.m_b, a.tol)?;
    let x = approximate_x(theta, a.m_a, a.m_b, a.max_reps);
    let mut t = Table::new(["theta_star", "k", "distance"]);
    for (i, d) in x.distances.iter().enumerate() {
        t.push(vec![num(theta), (i + 1).to_string(), num(*d)]);
    }
    let data = json!({
        "theta_star": theta,
        "k_best": x.k_best,
        "distance": x.distance,
        "distances": x.distances,
    });
    Ok(Report::new(t, data)
        .with("theta_star", theta)
        .with("k_best", x.k_best)
        .with("distance", x.distance))
}

fn dicke(a: &DickeArgs) -> Result<Report, CliError> {
    let config = model_config(&a.sector, 1.0)?;
    if a.search {
        return dicke_search(a, config);
    }
    let method = match a.method {
        PrepMethod::Transport => Method::Transport,
        PrepMethod::Closed => Method::ClosedForm,
    };
    let prep = prepare_dicke(config, method, a.m_a, a.m_b, a.theta1)?;
    let bare = prepare_dicke_without_loop(config, method)?;
    let path = PathProgram::w_prime(a.m_a, a.m_b, a.theta1)?;
    let basis = SectorBasis::enumerate(config.sector);
    let dicke = dicke_vector(&basis);
    let final_m = CMat::from_column_slice(basis.len(), 1, prep.state.amplitudes.as_slice());
    let dicke_m = CMat::from_column_slice(basis.len(), 1, dicke.amplitudes.as_slice());
    let mut t = state_table(&basis, &[("final", &final_m), ("dicke", &dicke_m)]);
    t.header = t
        .header
        .into_iter()
        .map(|h| h.replace("final1", "final").replace("dicke1", "dicke"))
        .collect();
    let data = json!({
        "path": path.to_string(),
        "fidelity": prep.fidelity.squared,
        "overlap": prep.fidelity.amplitude,
        "fidelity_without_loop": bare.fidelity.squared,
        "holonomy": holonomy_json(&prep.holonomy),
        "states": labels(&basis),
        "final_state": prep.state.amplitudes.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
    });
    Ok(Report::new(t, data)
        .with("fidelity", prep.fidelity.squared)
        .with("fidelity_without_loop", bare.fidelity.squared))
}

fn dicke_search(a: &DickeArgs, config: ModelConfig) -> Result<Report, CliError> {
    if a.grid == 0 || a.m_range < 0 || a.theta_lo > a.theta_hi {
        return Err(CliError::Usage(
            "search needs --grid > 0, --m-range >= 0 and theta_lo <= theta_hi".into(),
        ));
    }
    let task = DickeTask::new(config)?;
    let grid: Vec<f64> = if a.grid == 1 {
        vec![a.theta_lo]
    } else {
        let step = (a.theta_hi - a.theta_lo) / (a.grid - 1) as f64;
        (0..a.grid).map(|i| a.theta_lo + step * i as f64).collect()
    };
    let m = a.m_range;
    let mut ranked: Vec<_> = (-m..=m)
        .into_par_iter()
        .flat_map_iter(|ma| {
            let task = &task;
            let grid = &grid;
            (-m..=m).flat_map(move |mb| {
                grid.iter()
                    .map(move |&t| evaluate_candidate(task, ma, mb, t))
            })
        })
        .collect();
    ranked.par_sort_by(rank_order);
    let per = best_per_winding(&ranked);
    let reported = per.iter().position(|r| (r.m_a, r.m_b) == (a.m_a, a.m_b));
    let mut t = Table::new(["rank", "m_a", "m_b", "theta_1", "fidelity"]);
    for (i, c) in per.iter().take(a.top).enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            c.m_a.to_string(),
            c.m_b.to_string(),
            num(c.theta_1),
            num(c.fidelity),
        ]);
    }
    let rows: Vec<Value> = per
        .iter()
        .take(a.top)
        .map(|c| json!({"m_a": c.m_a, "m_b": c.m_b, "theta_1": c.theta_1, "fidelity": c.fidelity}))
        .collect();
    let data = json!({
        "windings": per.len(),
        "rank_of_requested": reported.map(|r| r + 1),
        "best": rows,
    });
    let mut r = Report::new(t, data).with("windings", per.len());
    if let Some(best) = per.first() {
        r = r.with("best_fidelity", best.fidelity);
    }
    if let Some(pos) = reported {
        r = r.with("rank_of_requested", pos + 1);
    }
    Ok(r)
}

fn sweep(a: &SweepArgs) -> Result<Report, CliError> {
    if a.g_list.is_empty() || a.g_list.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(CliError::Usage("--g-list needs positive values".into()));
    }
    if !(a.time_scale > 0.0 && a.steps_per_unit_time > 0.0) {
        return Err(CliError::Usage(
            "--time-scale and --steps-per-unit-time must be positive".into(),
        ));
    }
    let mut settings = SweepSettings::new(sector(&a.sector)?)?;
    if let Some(text) = &a.path {
        settings.path = program(text)?;
    }
    settings.time_scale = a.time_scale;
    settings.steps_per_unit_time = a.steps_per_unit_time;
    settings.allocation = match a.allocation {
        AllocationArg::Proportional => Allocation::Proportional,
        AllocationArg::SqrtArc => Allocation::SqrtArc,
        AllocationArg::Equal => Allocation::Equal,
    };
    settings.profile = match a.profile {
        ProfileArg::Linear => RampProfile::Linear,
        ProfileArg::Smootherstep => RampProfile::Smootherstep,
    };
    let rows = sweep_rows(&settings, &a.g_list)?;
    let mut t = Table::new([
        "g",
        "fidelity_full",
        "fidelity_zeno",
        "fidelity_holonomic",
        "fidelity_no_phi",
        "fidelity_full_equal_time",
    ]);
    let mut data = Vec::new();
    for r in &rows {
        t.push(
            [
                r.g,
                r.fidelity_full,
                r.fidelity_zeno,
                r.fidelity_holonomic,
                r.fidelity_no_phi,
                r.fidelity_full_equal_time,
            ]
            .iter()
            .map(|x| num(*x))
            .collect(),
        );
        data.push(json!({
            "g": r.g,
            "fidelity_full": r.fidelity_full,
            "fidelity_zeno": r.fidelity_zeno,
            "fidelity_holonomic": r.fidelity_holonomic,
            "fidelity_no_phi": r.fidelity_no_phi,
            "fidelity_full_equal_time": r.fidelity_full_equal_time,
        }));
    }
    let hol = rows.first().map_or(f64::NAN, |r| r.fidelity_holonomic);
    Ok(Report::new(t, Value::Array(data))
        .with("path", settings.path.to_string())
        .with("fidelity_holonomic", hol))
}

/// Every (g, column) evolution is independent; run them all in parallel.
pub fn sweep_rows(settings: &SweepSettings, g_list: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    let cells: Vec<(f64, SweepColumn)> = g_list
        .iter()
        .flat_map(|&g| SweepColumn::ALL.into_iter().map(move |c| (g, c)))
        .collect();
    let (holonomic, values) = rayon::join(
        || holonomic_fidelity(settings),
        || {
            cells
                .par_iter()
                .map(|&(g, c)| sweep_cell(settings, g, c))
                .collect::<Result<Vec<f64>, _>>()
        },
    );
    let (holonomic, values) = (holonomic?, values?);
    Ok(g_list
        .iter()
        .zip(values.chunks_exact(SweepColumn::ALL.len()))
        .map(|(&g, v)| SweepRow::from_cells(g, holonomic, [v[0], v[1], v[2], v[3]]))
        .collect())
}
