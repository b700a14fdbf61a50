use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::config::RunConfig;
use crate::cli::verify::{run_verify, VerifyReport};
use crate::dynamics::{
    fmt_f64, simulate, simulate_planar, simulate_torus, write_reconstruction_csv,
    write_trajectory_csv, Sampling,
};
use crate::equilibria::{enumerate_equilibria, equilibria_a0, Stability};
use crate::error::{Error, Result};
use crate::model::{energy, ReducedState};
use crate::nonholonomy::find_singular_with;
use crate::single_trailer::{critical_energy, holonomy, period_with_error};

/// What a command produced: the data file (CSV or JSON) and a short JSON
/// summary for the terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub artifact: String,
    pub summary: Value,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn default_initial(n: usize) -> ReducedState {
    ReducedState::new(1.0, 0.5, vec![0.3; n])
}

pub fn cmd_simulate(config: &RunConfig) -> Result<CommandOutput> {
    let p = &config.params;
    let c = &config.simulate;
    let initial = c.initial.clone().unwrap_or_else(|| default_initial(p.trailers));
    let e0 = energy(p, &initial)?;
    let mut buf = Vec::new();
    let mut summary = json!({
        "t_end": c.t_end,
        "initial": initial,
        "energy": e0,
    });
    let (reduced, residual) = if c.reconstruct {
        let rec = simulate_planar(p, &initial, c.pose, c.t_end, &c.integrator, c.sampling)?;
        write_reconstruction_csv(&mut buf, p.trailers, &rec)?;
        summary["final_pose"] = json!(rec.configurations.last().map(|q| q.pose()));
        (rec.reduced, Some(rec.max_constraint_residual))
    } else {
        let traj = simulate(p, &initial, c.t_end, &c.integrator, c.sampling)?;
        write_trajectory_csv(&mut buf, p.trailers, &traj)?;
        (traj, None)
    };
    summary["samples"] = json!(reduced.len());
    summary["final"] = json!(reduced.last());
    summary["energy_drift"] = json!(reduced.energy_drift);
    if p.offset == 0.0 {
        summary["omega_drift"] = json!(reduced.omega_drift);
    }
    if let Some(r) = residual {
        summary["max_constraint_residual"] = json!(r);
    }
    Ok(CommandOutput {
        artifact: String::from_utf8(buf).expect("CSV is ASCII"),
        summary,
    })
}

pub fn cmd_equilibria(config: &RunConfig) -> Result<CommandOutput> {
    let p = &config.params;
    let c = &config.equilibria;
    if p.offset > 0.0 {
        let points = enumerate_equilibria(p, c.energy)?;
        let count = |s: Stability| points.iter().filter(|e| e.stability == s).count();
        let summary = json!({
            "energy": c.energy,
            "equilibria": points.len(),
            "stable_nodes": count(Stability::StableNode),
            "unstable_nodes": count(Stability::UnstableNode),
            "saddles": count(Stability::Saddle),
            "physical": points.iter().filter(|e| e.physical).count(),
        });
        Ok(CommandOutput {
            artifact: to_json(&json!({ "energy": c.energy, "equilibria": points }))?,
            summary,
        })
    } else {
        let eq = equilibria_a0(p, c.u0, c.omega0)?;
        let summary = json!({
            "u0": c.u0,
            "omega0": c.omega0,
            "condition": eq.condition,
            "solutions": eq.solutions.len(),
            "radius": eq.solutions.first().map(|s| s.radius),
        });
        Ok(CommandOutput {
            artifact: to_json(&json!({ "u0": c.u0, "omega0": c.omega0, "result": eq }))?,
            summary,
        })
    }
}

/// Cell-centred grid on the torus, so that no initial condition sits on an
/// equilibrium exactly.
fn portrait_grid(points: usize, dims: usize) -> Vec<Vec<f64>> {
    let total = points.pow(dims as u32);
    let step = 2.0 * PI / points as f64;
    (0..total)
        .map(|mut code| {
            let mut y = vec![0.0; dims];
            for k in (0..dims).rev() {
                y[k] = -PI + step * ((code % points) as f64 + 0.5);
                code /= points;
            }
            y
        })
        .collect()
}

pub fn cmd_portrait(config: &RunConfig) -> Result<CommandOutput> {
    let p = &config.params;
    let c = &config.portrait;
    let n = p.trailers;
    let grid = portrait_grid(c.grid, n + 1);
    let runs: Vec<_> = grid
        .par_iter()
        .map(|y0| {
            simulate_torus(p, c.energy, y0, c.t_end, false, &c.integrator, Sampling::Uniform { dt: c.dt })
        })
        .collect::<Result<_>>()?;

    let mut out = String::from("traj,t,beta");
    for k in 1..=n {
        out.push_str(&format!(",alpha{k}"));
    }
    out.push('\n');
    let mut rows = 0;
    for (i, traj) in runs.iter().enumerate() {
        for (t, y) in traj.times.iter().zip(&traj.states) {
            let cells: Vec<String> = std::iter::once(*t).chain(y.iter().copied()).map(fmt_f64).collect();
            out.push_str(&format!("{i},{}\n", cells.join(",")));
            rows += 1;
        }
    }
    Ok(CommandOutput {
        artifact: out,
        summary: json!({ "energy": c.energy, "trajectories": runs.len(), "rows": rows }),
    })
}

pub fn cmd_period(config: &RunConfig) -> Result<CommandOutput> {
    let p = &config.params;
    let c = &config.period;
    let critical = critical_energy(p, c.omega0)?;
    let floor = 0.5 * p.car_inertia * c.omega0 * c.omega0;
    let energies = match &c.energies {
        Some(list) => list.clone(),
        None => (0..c.count)
            .map(|k| floor + (critical - floor) * k as f64 / c.count as f64)
            .collect(),
    };
    let results: Vec<_> = energies
        .par_iter()
        .map(|&e| period_with_error(p, c.omega0, e))
        .collect::<Result<_>>()?;
    let mut out = String::from("energy,period,error\n");
    for (e, r) in energies.iter().zip(&results) {
        out.push_str(&format!("{},{},{}\n", fmt_f64(*e), fmt_f64(r.value), fmt_f64(r.error)));
    }
    Ok(CommandOutput {
        artifact: out,
        summary: json!({
            "omega0": c.omega0,
            "critical_energy": critical,
            "energies": energies.len(),
            "free_rotation_period": 2.0 * PI / c.omega0,
        }),
    })
}

pub fn cmd_holonomy(config: &RunConfig) -> Result<CommandOutput> {
    let p = &config.params;
    let c = &config.holonomy;
    let critical = critical_energy(p, c.omega0)?;
    let floor = 0.5 * p.car_inertia * c.omega0 * c.omega0;
    let e = c.energy.unwrap_or(0.5 * (floor + critical));
    let h = holonomy(p, c.omega0, e)?;
    let summary = json!({
        "energy": e,
        "critical_energy": critical,
        "classification": h.classification,
        "ratio": h.ratio,
    });
    Ok(CommandOutput {
        artifact: to_json(&json!({ "omega0": c.omega0, "energy": e, "critical_energy": critical, "holonomy": h }))?,
        summary,
    })
}

pub fn cmd_brackets(config: &RunConfig) -> Result<CommandOutput> {
    let c = &config.brackets;
    let scan = find_singular_with(&config.params, c.resolution, &c.options(config.seed))?;
    let mut buf = Vec::new();
    scan.write_csv(&mut buf)?;
    let mut histogram = std::collections::BTreeMap::new();
    for pt in &scan.points {
        let key = pt.degree.map_or("NA".to_string(), |d| d.to_string());
        *histogram.entry(key).or_insert(0usize) += 1;
    }
    Ok(CommandOutput {
        artifact: String::from_utf8(buf).expect("CSV is ASCII"),
        summary: json!({
            "generic_degree": scan.generic_degree,
            "points": scan.points.len(),
            "singular": scan.singular_points().count(),
            "indeterminate": scan.points.iter().filter(|p| p.indeterminate).count(),
            "degrees": histogram,
        }),
    })
}

/// Also returns the report, so the caller can turn a failed check into a
/// nonzero exit status.
pub fn cmd_verify(config: &RunConfig) -> Result<(CommandOutput, VerifyReport)> {
    let c = &config.verify;
    let report = run_verify(&config.params, c.samples, c.max_trailers, config.seed)?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let output = CommandOutput {
        artifact: to_json(&report)?,
        summary: json!({ "passed": report.passed, "failed": failed }),
    };
    Ok((output, report))
}

/// Process exit status for an error: 1 for bad input, 2 for numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    use crate::numerics::ode::IntegrationError as I;
    match err {
        Error::InvalidParams(_)
        | Error::DimensionMismatch { .. }
        | Error::Precondition(_)
        | Error::NonPositiveEnergy(_)
        | Error::ZeroEnergy
        | Error::Regime { .. }
        | Error::Config(_)
        | Error::Io(_)
        | Error::Json(_) => 1,
        Error::Integration(I::InvalidSpan(..) | I::InvalidConfig(_) | I::NonFiniteInitial) => 1,
        Error::Integration(_)
        | Error::NotEquilibrium { .. }
        | Error::NonHyperbolic
        | Error::DenominatorVanishes { .. }
        | Error::Quadrature { .. }
        | Error::BracketCapExceeded { .. } => 2,
    }
}
