//! The acceptance criteria, one pass/fail line each. Runs without the
//! libtest harness so the lines always reach the terminal.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::DMatrix;
use ntrailer::cli::{cmd_simulate, cmd_verify, RunConfig};
use ntrailer::dynamics::{
    reduced_vector_field, simulate, simulate_dense, simulate_planar, simulate_torus, torus_rhs,
    Sampling,
};
use ntrailer::equilibria::{enumerate_equilibria, equilibria_a0, Stability};
use ntrailer::model::{
    coeff_q, coeff_r, grad_r, identity_check, FullState, Pose, ReducedState, VehicleParams,
};
use ntrailer::nonholonomy::{degree_of_nonholonomy, eval_bracket, BracketExpression as B};
use ntrailer::numerics::ode::IntegratorConfig;
use ntrailer::oracle::{
    constrained_lagrangian_from_bodies, generated_rhs, structure_coefficients, trailer_speed_check,
};
use ntrailer::single_trailer::{
    circle_speed, critical_energy, invariant_circle_flow, period_with_error,
    solve_equilibrium_angles, Regime, ZeroKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{circumradius, max_abs_diff, random_params, random_state, torus_distance};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let n = i % 5;
        let p = random_params(&mut rng, n);
        let s = random_state(&mut rng, n);
        let closed = reduced_vector_field(&p, &s).map_err(|e| e.to_string())?.to_vec();
        let generated = generated_rhs(&p, &s).map_err(|e| e.to_string())?.to_vec();
        worst = worst.max(max_abs_diff(&closed, &generated));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(worst < 1e-9, "max residual {worst:.3e} >= 1e-9");
    ensure!(secs < 30.0, "took {secs:.1} s");
    Ok(format!("max residual {worst:.2e} over 1000 samples in {secs:.2} s"))
}

fn projection_coefficients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = i % 5;
        let p = random_params(&mut rng, n);
        let s = random_state(&mut rng, n);
        let q = FullState::new(Pose::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-PI..PI)), s.alpha.clone());
        let (c1, c2) = structure_coefficients(&p, &q).map_err(|e| e.to_string())?;
        let r = coeff_r(&p, &s.alpha).unwrap();
        let qq = coeff_q(&p, &s.alpha).unwrap();
        let want1 = qq / (p.link * p.link * r);
        let want2 = -p.car_mass * p.offset / (p.car_inertia + p.car_mass * p.offset * p.offset);
        worst = worst.max((c1 - want1).abs()).max((c2 - want2).abs());
    }
    ensure!(worst < 1e-10, "max deviation {worst:.3e}");
    Ok(format!("max deviation {worst:.2e} at 100 points"))
}

fn energy_conservation() -> Outcome {
    let cfg = IntegratorConfig::rk45(1e-10);
    let mut worst_e: f64 = 0.0;
    let mut worst_w: f64 = 0.0;
    for n in 1..=3 {
        for offset in [0.3, 0.0] {
            let p = VehicleParams::default().with_trailers(n).with_offset(offset);
            let s = ReducedState::new(0.9, 0.8, (0..n).map(|k| 0.4 - 0.3 * k as f64).collect());
            let traj = simulate(&p, &s, 100.0, &cfg, Sampling::Steps).map_err(|e| e.to_string())?;
            worst_e = worst_e.max(traj.energy_drift);
            if offset == 0.0 {
                worst_w = worst_w.max(traj.omega_drift);
            }
        }
    }
    ensure!(worst_e < 1e-8, "relative energy drift {worst_e:.3e}");
    ensure!(worst_w < 1e-10, "omega drift {worst_w:.3e}");
    Ok(format!("energy drift {worst_e:.2e}, omega drift (a = 0) {worst_w:.2e}"))
}

/// Central-difference Jacobian of the torus flow.
fn fd_jacobian(p: &VehicleParams, energy: f64, y: &[f64]) -> DMatrix<f64> {
    let h = 1e-6;
    let dim = y.len();
    let mut jac = DMatrix::zeros(dim, dim);
    let (mut up, mut dn) = (vec![0.0; dim], vec![0.0; dim]);
    for j in 0..dim {
        let (mut yu, mut yd) = (y.to_vec(), y.to_vec());
        yu[j] += h;
        yd[j] -= h;
        torus_rhs(p, energy, &yu, &mut up);
        torus_rhs(p, energy, &yd, &mut dn);
        for i in 0..dim {
            jac[(i, j)] = (up[i] - dn[i]) / (2.0 * h);
        }
    }
    jac
}

fn equilibrium_census() -> Outcome {
    let energy = 1.3;
    let mut worst_res: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    let mut upper: f64 = 0.0;
    for n in 0..=5 {
        let p = VehicleParams::default().with_trailers(n);
        let points = enumerate_equilibria(&p, energy).map_err(|e| e.to_string())?;
        ensure!(points.len() == 1 << (n + 1), "n = {n}: {} equilibria", points.len());
        let count = |s: Stability| points.iter().filter(|e| e.stability == s).count();
        ensure!(
            count(Stability::StableNode) == 1 && count(Stability::UnstableNode) == 1,
            "n = {n}: node counts {} / {}",
            count(Stability::StableNode),
            count(Stability::UnstableNode)
        );
        if n == 1 {
            ensure!(count(Stability::Saddle) == 2, "n = 1: {} saddles", count(Stability::Saddle));
        }
        let speed = (2.0 * energy / (p.car_mass + n as f64 * p.trailer_mass)).sqrt();
        let inertia = p.car_inertia + p.car_mass * p.offset * p.offset;
        for e in &points {
            let f = reduced_vector_field(&p, &e.state).unwrap().to_vec();
            worst_res = worst_res.max(f.iter().fold(0.0, |m: f64, v| m.max(v.abs())));

            let sigma0 = e.signature.sigma0 as f64;
            let mut expected = vec![-(p.car_mass * p.offset / inertia) * speed * sigma0];
            let mut prod = sigma0;
            for s in &e.signature.sigma {
                prod *= *s as f64;
                expected.push(-speed / p.link * prod);
            }
            let beta = if sigma0 > 0.0 { 0.0 } else { PI };
            let y: Vec<f64> = std::iter::once(beta).chain(e.state.alpha.iter().copied()).collect();
            let jac = fd_jacobian(&p, energy, &y);
            for i in 0..jac.nrows() {
                for j in i + 1..jac.ncols() {
                    upper = upper.max(jac[(i, j)].abs());
                }
            }
            // A triangular matrix has its diagonal as spectrum.
            let fd_eigs: Vec<f64> = jac.diagonal().iter().copied().collect();
            worst_eig = worst_eig
                .max(max_abs_diff(&e.eigenvalues, &expected))
                .max(max_abs_diff(&fd_eigs, &expected));
        }
    }
    ensure!(worst_res < 1e-12, "vector field residual {worst_res:.3e}");
    ensure!(upper < 1e-9, "finite-difference Jacobian not triangular ({upper:.3e})");
    ensure!(worst_eig < 1e-6, "eigenvalue mismatch {worst_eig:.3e}");
    Ok(format!(
        "2^(n+1) equilibria for n = 0..5, residual {worst_res:.1e}, eigenvalue mismatch {worst_eig:.1e}"
    ))
}

fn basin_behaviour() -> Outcome {
    let p = VehicleParams::default();
    let energy = 1.0;
    let cfg = IntegratorConfig::rk45(1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let horizon = 200.0;
    let (mut fwd, mut bwd): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let y0 = [rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)];
        let run = |reverse| {
            simulate_torus(&p, energy, &y0, horizon, reverse, &cfg, Sampling::Steps)
                .map(|t| t.last().clone())
                .map_err(|e| e.to_string())
        };
        fwd = fwd.max(torus_distance(&run(false)?, &[0.0, 0.0]));
        bwd = bwd.max(torus_distance(&run(true)?, &[PI, 0.0]));
    }
    ensure!(fwd < 1e-3, "forward distance to the stable node {fwd:.3e}");
    ensure!(bwd < 1e-3, "backward distance to the unstable node {bwd:.3e}");
    Ok(format!("20 starts within {fwd:.1e} (forward) / {bwd:.1e} (backward) after t = {horizon}"))
}

fn single_trailer_regimes() -> Outcome {
    let p = VehicleParams::default().with_offset(0.0);
    let omega0 = 1.0;
    let ec = critical_energy(&p, omega0).map_err(|e| e.to_string())?;
    let floor = 0.5 * p.car_inertia * omega0 * omega0;

    // (i) the car spins in place
    let r = period_with_error(&p, omega0, floor).map_err(|e| e.to_string())?;
    let spin = (r.value - TAU / omega0).abs();
    ensure!(spin < 1e-10 && r.error < 1e-10, "(i) T - 2pi/omega0 = {spin:.3e}, error {:.3e}", r.error);

    // (ii) quadrature against the first return of the simulated angle
    let mut worst_t: f64 = 0.0;
    for k in 1..=10 {
        let e = floor + (ec - floor) * k as f64 / 11.0;
        let t_quad = period_with_error(&p, omega0, e).map_err(|e| e.to_string())?.value;
        let u0 = circle_speed(&p, omega0, e, 0.0).unwrap();
        let (_, sol) = simulate_dense(
            &p,
            &ReducedState::new(u0, omega0, vec![0.0]),
            1.2 * t_quad,
            &IntegratorConfig::rk45(1e-12),
            Sampling::Steps,
        )
        .map_err(|e| e.to_string())?;
        let t_sim = sol.find_crossing(|y| y[2] - TAU).ok_or("(ii) no return")?;
        worst_t = worst_t.max((t_sim - t_quad).abs() / t_quad);
    }
    ensure!(worst_t < 1e-6, "(ii) relative period mismatch {worst_t:.3e}");

    // (iii) a single circle equilibrium at pi/2 with u = l omega0
    let eq = solve_equilibrium_angles(&p, omega0, ec).unwrap();
    ensure!(eq.regime == Regime::Critical && eq.angles == vec![FRAC_PI_2], "(iii) {eq:?}");
    let u = circle_speed(&p, omega0, ec, FRAC_PI_2).unwrap();
    ensure!((u - p.link * omega0).abs() < 1e-12, "(iii) u = {u}");

    // (iv) two equilibria, stable then unstable, joined by the flow
    let e = 1.6 * ec;
    let flow = invariant_circle_flow(&p, omega0, e, 16).unwrap();
    ensure!(flow.zeros.len() == 2, "(iv) {} zeros", flow.zeros.len());
    let (a1, a2) = (flow.zeros[0].alpha, flow.zeros[1].alpha);
    ensure!((a1.sin() - a2.sin()).abs() < 1e-12, "(iv) sines differ");
    ensure!(
        flow.zeros[0].kind == ZeroKind::Stable && flow.zeros[1].kind == ZeroKind::Unstable,
        "(iv) kinds {:?}",
        flow.zeros
    );
    let cfg = IntegratorConfig::rk45(1e-12);
    let mut hetero: f64 = 0.0;
    for nudge in [1e-6, -1e-6] {
        let alpha = a2 + nudge;
        let u0 = circle_speed(&p, omega0, e, alpha).unwrap();
        let traj = simulate(&p, &ReducedState::new(u0, omega0, vec![alpha]), 200.0, &cfg, Sampling::Steps)
            .map_err(|e| e.to_string())?;
        hetero = hetero.max(torus_distance(&traj.last().alpha, &[a1]));
    }
    ensure!(hetero < 1e-6, "(iv) orbits from the unstable equilibrium end {hetero:.3e} from the stable one");

    // (v) limit circle traced by the reconstructed car
    let alpha0 = 2.5;
    let u0 = circle_speed(&p, omega0, e, alpha0).unwrap();
    let rec = simulate_planar(
        &p,
        &ReducedState::new(u0, omega0, vec![alpha0]),
        Pose::default(),
        150.0,
        &IntegratorConfig::rk45(1e-11),
        Sampling::Uniform { dt: 0.5 },
    )
    .map_err(|e| e.to_string())?;
    let qs = &rec.configurations;
    let k = qs.len();
    let pts = [&qs[k - 1], &qs[k - 3], &qs[k - 5]].map(|q| (q.x, q.y));
    let radius = circumradius(pts[0], pts[1], pts[2]);
    let predicted = p.link / a1.sin();
    let rel = (radius - predicted).abs() / predicted;
    ensure!(rel < 0.01, "(v) radius {radius} vs {predicted}");
    Ok(format!(
        "T(floor) err {spin:.1e}; period vs return {worst_t:.1e}; heteroclinic {hetero:.1e}; radius off by {:.2e}",
        rel
    ))
}

fn circular_equilibria() -> Outcome {
    let mut checked = 0;
    let mut boundary = 0;
    let mut worst: f64 = 0.0;
    let mut worst_radius: f64 = 0.0;
    for n in 1..=4 {
        let p = VehicleParams::default().with_offset(0.0).with_trailers(n);
        for omega0 in [-2.0, -0.5, 0.5, 1.0, 2.0] {
            for i in 1..=16 {
                let u0 = 0.25 * i as f64;
                let exists = n as f64 * (p.link * omega0).powi(2) <= u0 * u0;
                boundary += (n as f64 * (p.link * omega0).powi(2) == u0 * u0) as usize;
                let eq = equilibria_a0(&p, u0, omega0).map_err(|e| e.to_string())?;
                ensure!(
                    eq.solutions.is_empty() != exists,
                    "n = {n}, u0 = {u0}, omega0 = {omega0}: {} solutions",
                    eq.solutions.len()
                );
                for s in &eq.solutions {
                    let f = reduced_vector_field(&p, &s.state).unwrap().to_vec();
                    worst = worst.max(f.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
                    let rec = simulate_planar(
                        &p,
                        &s.state,
                        Pose::default(),
                        3.0,
                        &IntegratorConfig::rk45(1e-12),
                        Sampling::Uniform { dt: 1.0 },
                    )
                    .map_err(|e| e.to_string())?;
                    let c = &rec.configurations;
                    let radius = circumradius((c[0].x, c[0].y), (c[1].x, c[1].y), (c[2].x, c[2].y));
                    ensure!(s.radius >= (n as f64).sqrt() * p.link, "radius {} below sqrt(n) l", s.radius);
                    let rel = (radius - s.radius).abs() / s.radius;
                    worst_radius = worst_radius.max(rel);
                    checked += 1;
                }
            }
        }
    }
    ensure!(worst < 1e-12, "substitution residual {worst:.3e}");
    ensure!(worst_radius < 1e-6, "reconstructed radius off by {worst_radius:.3e}");
    Ok(format!(
        "{checked} solutions ({boundary} on the boundary), residual {worst:.1e}, reconstructed radius within {worst_radius:.1e}"
    ))
}

fn degree_of_nonholonomy_two_trailers() -> Outcome {
    let p = VehicleParams::default().with_trailers(2);
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut generic = 0;
    while generic < 100 {
        let a1: f64 = rng.gen_range(-PI..PI);
        if a1.cos().abs() < 1e-3 {
            continue;
        }
        let q = FullState::new(Pose::new(0.0, 0.0, rng.gen_range(-PI..PI)), vec![a1, rng.gen_range(-PI..PI)]);
        let r = degree_of_nonholonomy(&p, &q).map_err(|e| e.to_string())?;
        ensure!(r.degree == 4 && !r.indeterminate, "degree {} at {:?}", r.degree, q.alpha);
        generic += 1;
    }

    let z12 = B::bracket(B::Z1, B::Z2);
    let z112 = B::bracket(B::Z1, z12.clone());
    let completing = B::bracket(z12.clone(), z112.clone());
    let l3 = p.link.powi(3);
    let mut worst: f64 = 0.0;
    for a1 in [FRAC_PI_2, -FRAC_PI_2] {
        for i in 0..10 {
            let a2 = -PI + TAU * i as f64 / 10.0;
            let q = FullState::new(Pose::new(0.0, 0.0, 0.4 * i as f64), vec![a1, a2]);
            let r = degree_of_nonholonomy(&p, &q).map_err(|e| e.to_string())?;
            ensure!(r.degree == 5, "degree {} at {:?}", r.degree, q.alpha);

            let v = eval_bracket(&p, &completing, &q).unwrap();
            let shown = [0.0, 0.0, 0.0, a1.sin() / l3, -a1.sin() * (2.0 + a2.cos()) / l3];
            worst = worst.max(max_abs_diff(&v, &shown));

            let cols: Vec<Vec<f64>> = [B::Z1, B::Z2, z12.clone(), z112.clone(), completing.clone()]
                .iter()
                .map(|b| eval_bracket(&p, b, &q).unwrap())
                .collect();
            let m = DMatrix::from_fn(5, 5, |i, j| cols[j][i]);
            let sv = m.singular_values();
            ensure!(sv.min() > 1e-9 * sv.max(), "completing bracket fails to span at {:?}", q.alpha);
        }
    }
    ensure!(worst < 1e-10, "length-5 bracket differs from the displayed formula by {worst:.3e}");
    Ok(format!("degree 4 at 100 generic points, 5 on cos(alpha1) = 0; bracket match {worst:.1e}"))
}

fn identity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let (mut ids, mut dr, mut speeds, mut lag): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..700 {
        let n = i % 7;
        let p = random_params(&mut rng, n);
        let s = random_state(&mut rng, n);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
        ids = ids.max(identity_check(&weights, &s.alpha).max());
        if n > 0 {
            let d1 = grad_r(&p, &s.alpha).unwrap()[0];
            let q = coeff_q(&p, &s.alpha).unwrap();
            dr = dr.max((d1 + 2.0 * q / (p.link * p.link)).abs());
        }
        let res = trailer_speed_check(&p, &s).map_err(|e| e.to_string())?;
        speeds = res.iter().fold(speeds, |m, r| m.max(r.abs()));
        let bodies = constrained_lagrangian_from_bodies(&p, &s).map_err(|e| e.to_string())?;
        let r = coeff_r(&p, &s.alpha).unwrap();
        let closed = 0.5 * (r * s.u * s.u + (p.car_inertia + p.car_mass * p.offset.powi(2)) * s.omega * s.omega);
        lag = lag.max((bodies - closed).abs() / closed.max(1.0));
    }
    let worst = ids.max(dr).max(speeds).max(lag);
    ensure!(
        worst < 1e-10,
        "identities {ids:.2e}, dR/dalpha1 {dr:.2e}, trailer speeds {speeds:.2e}, Lagrangian {lag:.2e}"
    );
    Ok(format!(
        "identities {ids:.1e}, dR/dalpha1 {dr:.1e}, trailer speeds {speeds:.1e}, Lagrangian {lag:.1e}"
    ))
}

fn determinism() -> Outcome {
    let mut config = RunConfig::new(VehicleParams::default().with_trailers(2));
    config.seed = 11;
    config.verify.samples = 200;
    config.simulate.integrator = IntegratorConfig::rk4(0.01);
    config.simulate.t_end = 20.0;
    config.simulate.reconstruct = true;
    let v1 = cmd_verify(&config).map_err(|e| e.to_string())?.0;
    let v2 = cmd_verify(&config).map_err(|e| e.to_string())?.0;
    let s1 = cmd_simulate(&config).map_err(|e| e.to_string())?;
    let s2 = cmd_simulate(&config).map_err(|e| e.to_string())?;
    ensure!(v1 == v2, "verify outputs differ");
    ensure!(s1 == s2, "simulate outputs differ");
    Ok(format!(
        "verify ({} bytes) and simulate ({} bytes) identical across runs",
        v1.artifact.len(),
        s1.artifact.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("projection coefficients", projection_coefficients),
        ("energy conservation", energy_conservation),
        ("equilibrium census", equilibrium_census),
        ("basin behaviour", basin_behaviour),
        ("single-trailer regimes", single_trailer_regimes),
        ("circular equilibria", circular_equilibria),
        ("degree of nonholonomy", degree_of_nonholonomy_two_trailers),
        ("identity suite", identity_suite),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {:>2}. {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
