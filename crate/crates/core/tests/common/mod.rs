#![allow(dead_code)]

use std::f64::consts::PI;

use ntrailer::model::{ReducedState, VehicleParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Every physical parameter log-uniform in `[0.2, 5]`.
pub fn random_params(rng: &mut ChaCha8Rng, n: usize) -> VehicleParams {
    let mut draw = || log_uniform(rng, 0.2, 5.0);
    VehicleParams::new(draw(), draw(), draw(), draw(), draw(), draw(), n).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> ReducedState {
    ReducedState::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        (0..n).map(|_| rng.gen_range(-PI..PI)).collect(),
    )
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

/// Distance on the torus: each coordinate difference reduced to `[-pi, pi]`.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Radius of the circle through three planar points.
pub fn circumradius(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
    let a = ((q.0 - r.0).powi(2) + (q.1 - r.1).powi(2)).sqrt();
    let b = ((p.0 - r.0).powi(2) + (p.1 - r.1).powi(2)).sqrt();
    let c = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
    let area2 = ((q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)).abs();
    a * b * c / (2.0 * area2)
}
