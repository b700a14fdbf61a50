mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use ntrailer::model::*;
use ntrailer::oracle::mass_matrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{max_abs_diff, random_params, random_state};

/// Term-by-term transcription of the `A_k` product formula with `alpha_0 = 0`.
fn a_reference(l: f64, alpha: &[f64]) -> Vec<f64> {
    let ext: Vec<f64> = std::iter::once(0.0).chain(alpha.iter().copied()).collect();
    (1..=alpha.len())
        .map(|k| {
            let mut prod = 1.0;
            for x in ext.iter().take(k.saturating_sub(1)).skip(1) {
                prod *= x.cos();
            }
            prod * (ext[k - 1].sin() - ext[k - 1].cos() * ext[k].sin()) / l
        })
        .collect()
}

fn r_reference(p: &VehicleParams, alpha: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for a in alpha {
        prod *= a.cos().powi(2);
        sum += prod;
    }
    p.car_mass + p.trailer_mass * sum + p.trailer_inertia / p.link.powi(2) * (1.0 - prod)
}

#[test]
fn a_matches_reference_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let p = VehicleParams::default().with_trailers(3);
    let p = VehicleParams::new(p.car_mass, p.trailer_mass, p.car_inertia, p.trailer_inertia, p.offset, 2.0, 3).unwrap();
    for _ in 0..100 {
        let alpha: Vec<f64> = (0..3).map(|_| rng.gen_range(-PI..PI)).collect();
        let got = coeff_a(&p, &alpha).unwrap();
        assert!(max_abs_diff(&got, &a_reference(2.0, &alpha)) < 1e-14);
    }
}

#[test]
fn r_special_values() {
    let p = VehicleParams::default();
    assert!((coeff_r(&p, &[FRAC_PI_2]).unwrap() - (p.car_mass + p.trailer_inertia / p.link.powi(2))).abs() < 1e-14);
    let p0 = p.with_trailers(0);
    assert_eq!(coeff_r(&p0, &[]).unwrap(), p0.car_mass);
    let p4 = p.with_trailers(4);
    assert!((coeff_r(&p4, &[0.0; 4]).unwrap() - p4.total_mass()).abs() < 1e-14);
}

#[test]
fn r_derivative_in_first_angle() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for i in 0..100 {
        let n = 1 + i % 4;
        let p = random_params(&mut rng, n);
        let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
        let h = 1e-5;
        let (mut up, mut dn) = (alpha.clone(), alpha.clone());
        up[0] += h;
        dn[0] -= h;
        let fd = (coeff_r(&p, &up).unwrap() - coeff_r(&p, &dn).unwrap()) / (2.0 * h);
        let q = coeff_q(&p, &alpha).unwrap();
        assert!((fd + 2.0 * q / p.link.powi(2)).abs() < 1e-7);
        let analytic = grad_r(&p, &alpha).unwrap()[0];
        assert!((analytic + 2.0 * q / p.link.powi(2)).abs() < 1e-12);
    }
}

#[test]
fn energy_is_the_kinetic_energy_of_the_constrained_velocity() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for i in 0..100 {
        let n = i % 5;
        let p = random_params(&mut rng, n);
        let s = random_state(&mut rng, n);
        let q = FullState::new(Pose::new(0.0, 0.0, rng.gen_range(-PI..PI)), s.alpha.clone());
        let rates: Vec<f64> = coeff_a(&p, &s.alpha)
            .unwrap_or_default()
            .iter()
            .enumerate()
            .map(|(k, a)| s.u * a + if k == 0 { s.omega } else { 0.0 })
            .collect();
        let qdot = lift_velocity(&q, s.u, s.omega, &rates);
        let k = mass_matrix(&p, &q).unwrap().kinetic_energy(&qdot);
        let e = energy(&p, &s).unwrap();
        assert!((k - e).abs() < 1e-11 * e.max(1.0), "{k} vs {e}");
    }
}

#[test]
fn identities_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..1000 {
        let n = rng.gen_range(1..7);
        let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
        assert!(identity_check(&t, &alpha).max() < 1e-12);
    }
}

#[test]
fn group_action_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..50 {
        let mut g = || Se2::new(rng.gen_range(-PI..PI), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (g1, g2) = (g(), g());
        let q = FullState::new(Pose::new(0.4, -0.3, 1.0), vec![0.2, -0.5]);
        let lhs = apply_se2(&g2, &apply_se2(&g1, &q)).to_vec();
        let rhs = apply_se2(&g2.compose(&g1), &q).to_vec();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        let qdot = [0.3, 0.1, -0.2, 0.5, 0.7];
        let moved = apply_se2(&g1, &q);
        let (u0, w0) = reduced_velocity(&q, &qdot);
        let (u1, w1) = reduced_velocity(&moved, &g1.apply_velocity(&qdot));
        assert!((u0 - u1).abs() < 1e-12 && (w0 - w1).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn r_is_positive_and_matches_reference(
        n in 0usize..6,
        alpha in prop::collection::vec(-10.0f64..10.0, 6),
        m in 0.1f64..10.0, j in 0.0f64..10.0, l in 0.1f64..5.0,
    ) {
        let p = VehicleParams::new(1.0, m, 0.5, j, 0.2, l, n).unwrap();
        let r = coeff_r(&p, &alpha[..n]).unwrap();
        prop_assert!(r > 0.0);
        prop_assert!((r - r_reference(&p, &alpha[..n])).abs() < 1e-12 * r);
    }

    #[test]
    fn torus_round_trip(
        n in 0usize..5,
        u in -3.0f64..3.0, omega in -3.0f64..3.0,
        alpha in prop::collection::vec(-PI..PI, 5),
    ) {
        prop_assume!(u.abs() + omega.abs() > 1e-3);
        let p = VehicleParams::default().with_trailers(n);
        let s = ReducedState::new(u, omega, alpha[..n].to_vec());
        let c = torus_project(&p, &s).unwrap();
        let back = torus_embed(&p, &c).unwrap();
        prop_assert!(max_abs_diff(&s.to_vec(), &back.to_vec()) < 1e-12);
        prop_assert!((energy(&p, &back).unwrap() - c.energy).abs() < 1e-12 * c.energy);
    }

    #[test]
    fn params_json_round_trip(
        mm in 0.1f64..10.0, m in 0.1f64..10.0, j0 in 0.1f64..10.0,
        j in 0.0f64..10.0, a in 0.0f64..2.0, l in 0.1f64..5.0, n in 0usize..8,
    ) {
        let p = VehicleParams::new(mm, m, j0, j, a, l, n).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: VehicleParams = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(p, back);
    }

    #[test]
    fn wrap_is_idempotent(x in -1e3f64..1e3) {
        let w = wrap(x);
        prop_assert!((-PI..PI).contains(&w));
        prop_assert_eq!(wrap(w), w);
    }
}
