//! The single trailer without centre-of-mass offset (`n = 1`, `a = 0`).
//!
//! Here `omega = omega0` is conserved and each energy level splits into
//! invariant circles on which the relative angle obeys
//!
//! ```text
//! alpha' = omega0 - sqrt(2E - J0 omega0^2) sin(alpha) / (l sqrt(R(alpha)))
//! ```
//!
//! on the branch `u > 0`. The critical energy `E_c = (J0 + J + M l^2) omega0^2 / 2`
//! separates periodic motion of `alpha` (below) from two circular relative
//! equilibria joined by heteroclinic orbits (above). Everything here uses
//! the orientation `omega0 > 0`, `u > 0`; the other cases follow from the
//! symmetry `(u, omega, t) -> (-u, -omega, -t)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::VehicleParams;
use crate::numerics::ode::{integrate, FnSystem, IntegratorConfig};
use crate::numerics::quad;

/// Relative tolerance within which `E` is treated as equal to `E_c`.
const CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        })
    }
}

fn check_params(params: &VehicleParams) -> Result<()> {
    params.validate()?;
    if params.trailers != 1 || params.offset != 0.0 {
        return Err(Error::Precondition(format!(
            "a single trailer (n = 1) and zero offset (a = 0), got n = {} and a = {}",
            params.trailers, params.offset
        )));
    }
    Ok(())
}

fn check_level(params: &VehicleParams, omega0: f64, energy: f64) -> Result<()> {
    check_params(params)?;
    if !(omega0 > 0.0) || !omega0.is_finite() {
        return Err(Error::Precondition(format!(
            "a finite positive angular velocity omega0, got {omega0}"
        )));
    }
    let floor = 0.5 * params.car_inertia * omega0 * omega0;
    if !(energy >= floor) || !energy.is_finite() {
        return Err(Error::Precondition(format!(
            "energy at least J0 omega0^2 / 2 = {floor}, got {energy}"
        )));
    }
    Ok(())
}

fn r1(p: &VehicleParams, alpha: f64) -> f64 {
    let c2 = alpha.cos().powi(2);
    p.car_mass + p.trailer_mass * c2 + p.trailer_inertia / (p.link * p.link) * (1.0 - c2)
}

fn dr1(p: &VehicleParams, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    -2.0 * c * s * (p.trailer_mass - p.trailer_inertia / (p.link * p.link))
}

/// `sqrt(2E - J0 omega0^2)`: the factor with `u = speed_scale / sqrt(R(alpha))`.
fn speed_scale(p: &VehicleParams, omega0: f64, energy: f64) -> f64 {
    (2.0 * energy - p.car_inertia * omega0 * omega0).max(0.0).sqrt()
}

/// `f(alpha) = sin^2(alpha) / R(alpha)`.
pub fn f_alpha(params: &VehicleParams, alpha: f64) -> Result<f64> {
    check_params(params)?;
    Ok(alpha.sin().powi(2) / r1(params, alpha))
}

/// `E_c = (J0 + J + M l^2) omega0^2 / 2`.
pub fn critical_energy(params: &VehicleParams, omega0: f64) -> Result<f64> {
    check_params(params)?;
    Ok(critical(params, omega0))
}

fn critical(p: &VehicleParams, omega0: f64) -> f64 {
    0.5 * (p.car_inertia + p.trailer_inertia + p.car_mass * p.link * p.link) * omega0 * omega0
}

fn regime_of(p: &VehicleParams, omega0: f64, energy: f64) -> Regime {
    let ec = critical(p, omega0);
    if (energy - ec).abs() <= CRITICAL_TOL * ec {
        Regime::Critical
    } else if energy < ec {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}

pub fn regime(params: &VehicleParams, omega0: f64, energy: f64) -> Result<Regime> {
    check_level(params, omega0, energy)?;
    Ok(regime_of(params, omega0, energy))
}

/// Speed `u > 0` on the invariant circle at angle `alpha`.
pub fn circle_speed(params: &VehicleParams, omega0: f64, energy: f64, alpha: f64) -> Result<f64> {
    check_level(params, omega0, energy)?;
    Ok(speed_scale(params, omega0, energy) / r1(params, alpha).sqrt())
}

fn alpha_rate(p: &VehicleParams, omega0: f64, scale: f64, alpha: f64) -> f64 {
    omega0 - scale * alpha.sin() / (p.link * r1(p, alpha).sqrt())
}

fn alpha_rate_slope(p: &VehicleParams, scale: f64, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    let r = r1(p, alpha);
    -scale / p.link * (c / r.sqrt() - 0.5 * s * dr1(p, alpha) / r.powf(1.5))
}

/// Angles of the circular equilibria on the invariant circle `u > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumAngles {
    pub regime: Regime,
    /// Empty (subcritical), `[pi/2]` (critical) or `[alpha1, alpha2]` with
    /// `0 < alpha1 < pi/2 < alpha2 < pi` (supercritical).
    pub angles: Vec<f64>,
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-15 {
            break;
        }
        let gm = g(mid);
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `f(alpha) = l^2 omega0^2 / (2E - J0 omega0^2)` on each monotone
/// half of `(0, pi)`.
pub fn solve_equilibrium_angles(
    params: &VehicleParams,
    omega0: f64,
    energy: f64,
) -> Result<EquilibriumAngles> {
    check_level(params, omega0, energy)?;
    let regime = regime_of(params, omega0, energy);
    let angles = match regime {
        Regime::Subcritical => Vec::new(),
        Regime::Critical => vec![FRAC_PI_2],
        Regime::Supercritical => {
            let target = (params.link * omega0).powi(2)
                / (2.0 * energy - params.car_inertia * omega0 * omega0);
            let g = |a: f64| a.sin().powi(2) / r1(params, a) - target;
            vec![bisect(g, 0.0, FRAC_PI_2), bisect(g, FRAC_PI_2, PI)]
        }
    };
    Ok(EquilibriumAngles { regime, angles })
}

/// Radius `l / sin(alpha1)` of the limit circle approached above `E_c`.
pub fn limit_circle_radius(params: &VehicleParams, omega0: f64, energy: f64) -> Result<f64> {
    let eq = solve_equilibrium_angles(params, omega0, energy)?;
    if eq.regime == Regime::Subcritical {
        return Err(Error::Regime {
            energy,
            critical: critical(params, omega0),
            expected: "critical or supercritical",
        });
    }
    Ok(params.link / eq.angles[0].sin())
}

fn require_subcritical(params: &VehicleParams, omega0: f64, energy: f64) -> Result<()> {
    check_level(params, omega0, energy)?;
    if regime_of(params, omega0, energy) != Regime::Subcritical {
        return Err(Error::Regime {
            energy,
            critical: critical(params, omega0),
            expected: "subcritical",
        });
    }
    Ok(())
}

/// Period of `alpha` on a subcritical invariant circle,
///
/// ```text
/// T = int_0^{2 pi} l sqrt(R) d alpha / (l omega0 sqrt(R) - sqrt(2E - J0 omega0^2) sin alpha)
/// ```
///
/// by adaptive Gauss-Kronrod quadrature to relative tolerance `1e-12` on
/// each of `[0, pi/2]`, `[pi/2, pi]` and `[pi, 2 pi]`.
pub fn period(params: &VehicleParams, omega0: f64, energy: f64) -> Result<f64> {
    Ok(period_with_error(params, omega0, energy)?.value)
}

/// As [`period`], also returning the quadrature error estimate.
pub fn period_with_error(
    params: &VehicleParams,
    omega0: f64,
    energy: f64,
) -> Result<quad::QuadResult> {
    require_subcritical(params, omega0, energy)?;
    let scale = speed_scale(params, omega0, energy);
    let l = params.link;
    let gap = 2.0 * (critical(params, omega0) - energy);
    let total_mass = params.car_mass + params.trailer_mass;
    let denom = |a: f64| {
        let (s, c) = a.sin_cos();
        let lw_root_r = l * omega0 * r1(params, a).sqrt();
        if s > 0.0 {
            // Rationalized: the difference cancels badly near pi/2 close to E_c.
            let num = (l * omega0 * c).powi(2) * total_mass + gap * s * s;
            num / (lw_root_r + scale * s)
        } else {
            lw_root_r - scale * s
        }
    };
    // sin(alpha)/sqrt(R) peaks at pi/2 for every J, so the denominator is
    // smallest there.
    if !(denom(FRAC_PI_2) > 0.0) {
        return Err(Error::DenominatorVanishes {
            alpha: FRAC_PI_2,
            critical: critical(params, omega0),
        });
    }
    let integrand = |a: f64| l * r1(params, a).sqrt() / denom(a);
    let halves = [(0.0, FRAC_PI_2), (FRAC_PI_2, PI), (PI, TAU)];
    let mut total = quad::QuadResult {
        value: 0.0,
        error: 0.0,
        intervals: 0,
    };
    for (a, b) in halves {
        let part = quad::integrate(integrand, a, b, 0.0, 1e-12, 200_000)?;
        total.value += part.value;
        total.error += part.error;
        total.intervals += part.intervals;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionClass {
    /// `dtheta / 2 pi` rational: the planar path closes after `q` periods.
    Periodic,
    /// `dtheta / 2 pi` irrational: the path fills an annulus.
    Quasiperiodic,
    /// `dtheta` a multiple of `2 pi` with nonzero translation: the vehicle drifts off.
    Unbounded,
}

/// Net rigid motion of the leading car over one period of `alpha`, starting
/// from `alpha = 0` with the car at the origin facing the `x` axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Holonomy {
    pub dtheta: f64,
    pub dx: f64,
    pub dy: f64,
    pub classification: MotionClass,
    pub period: f64,
    /// `(p, q)` when `dtheta / 2 pi` is within `1e-9` of `p / q`, `q <= 64`.
    pub ratio: Option<(i64, i64)>,
}

/// Best rational approximation `p / q` of `x` with `q <= max_den`, from the
/// continued-fraction convergents, if it is within `tol`.
pub fn rational_approximation(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den {
            break;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol {
            return Some((p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rest - a as f64;
        if frac == 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    None
}

pub fn classify_motion(dtheta: f64, dx: f64, dy: f64) -> (MotionClass, Option<(i64, i64)>) {
    let ratio = rational_approximation(dtheta / TAU, 64, 1e-9);
    let class = match ratio {
        Some((_, 1)) if dx * dx + dy * dy > 1e-12 => MotionClass::Unbounded,
        Some(_) => MotionClass::Periodic,
        None => MotionClass::Quasiperiodic,
    };
    (class, ratio)
}

/// Per-period holonomy on a subcritical invariant circle. `dtheta = omega0 T`
/// and `dx + i dy = int_0^T u e^{i omega0 t} dt`, integrated with `alpha` as
/// the independent variable.
pub fn holonomy(params: &VehicleParams, omega0: f64, energy: f64) -> Result<Holonomy> {
    let t = period(params, omega0, energy)?;
    let scale = speed_scale(params, omega0, energy);
    let system = FnSystem::new(3, |alpha: f64, y: &[f64], dy: &mut [f64]| {
        let rate = alpha_rate(params, omega0, scale, alpha);
        let u = scale / r1(params, alpha).sqrt();
        let (s, c) = (omega0 * y[0]).sin_cos();
        dy[0] = 1.0 / rate;
        dy[1] = u * c / rate;
        dy[2] = u * s / rate;
    });
    let sol = integrate(&system, &[0.0, 0.0, 0.0], 0.0, TAU, &IntegratorConfig::rk45(1e-12))?;
    let end = sol.last();
    let dtheta = omega0 * t;
    let (dx, dy) = (end[1], end[2]);
    let (classification, ratio) = classify_motion(dtheta, dx, dy);
    Ok(Holonomy {
        dtheta,
        dx,
        dy,
        classification,
        period: t,
        ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleOrbit {
    /// No equilibria: `alpha` winds around periodically.
    Periodic,
    /// One degenerate equilibrium joined to itself.
    Homoclinic,
    /// Two equilibria joined by a pair of orbits.
    Heteroclinic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    Stable,
    Unstable,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleZero {
    pub alpha: f64,
    /// `d alpha' / d alpha` at the zero.
    pub slope: f64,
    pub kind: ZeroKind,
}

/// The flow of `alpha` along the invariant circle `u > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleFlow {
    pub regime: Regime,
    pub orbit: CircleOrbit,
    /// `(alpha, alpha')` on a uniform grid over `[0, 2 pi)`.
    pub samples: Vec<(f64, f64)>,
    pub zeros: Vec<CircleZero>,
}

pub fn invariant_circle_flow(
    params: &VehicleParams,
    omega0: f64,
    energy: f64,
    samples: usize,
) -> Result<CircleFlow> {
    check_level(params, omega0, energy)?;
    let floor = 0.5 * params.car_inertia * omega0 * omega0;
    if !(energy > floor) {
        return Err(Error::Precondition(format!(
            "energy above J0 omega0^2 / 2 = {floor}"
        )));
    }
    let scale = speed_scale(params, omega0, energy);
    let samples = (0..samples)
        .map(|i| {
            let a = TAU * i as f64 / samples as f64;
            (a, alpha_rate(params, omega0, scale, a))
        })
        .collect();
    let eq = solve_equilibrium_angles(params, omega0, energy)?;
    let zeros = eq
        .angles
        .iter()
        .map(|&alpha| {
            let slope = if eq.regime == Regime::Critical {
                0.0
            } else {
                alpha_rate_slope(params, scale, alpha)
            };
            let kind = if slope < 0.0 {
                ZeroKind::Stable
            } else if slope > 0.0 {
                ZeroKind::Unstable
            } else {
                ZeroKind::Degenerate
            };
            CircleZero { alpha, slope, kind }
        })
        .collect();
    let orbit = match eq.regime {
        Regime::Subcritical => CircleOrbit::Periodic,
        Regime::Critical => CircleOrbit::Homoclinic,
        Regime::Supercritical => CircleOrbit::Heteroclinic,
    };
    Ok(CircleFlow {
        regime: eq.regime,
        orbit,
        samples,
        zeros,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleTrailerAnalysis {
    pub omega0: f64,
    pub energy: f64,
    pub critical_energy: f64,
    pub regime: Regime,
    pub equilibrium_angles: Vec<f64>,
    pub period: Option<f64>,
}

pub fn analyze(params: &VehicleParams, omega0: f64, energy: f64) -> Result<SingleTrailerAnalysis> {
    let eq = solve_equilibrium_angles(params, omega0, energy)?;
    let period = match eq.regime {
        Regime::Subcritical => Some(period(params, omega0, energy)?),
        _ => None,
    };
    Ok(SingleTrailerAnalysis {
        omega0,
        energy,
        critical_energy: critical(params, omega0),
        regime: eq.regime,
        equilibrium_angles: eq.angles,
        period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> VehicleParams {
        VehicleParams::default().with_offset(0.0)
    }

    #[test]
    fn rejects_wrong_configuration() {
        assert!(f_alpha(&VehicleParams::default(), 0.3).is_err());
        assert!(f_alpha(&params().with_trailers(2), 0.3).is_err());
        assert!(regime(&params(), 1.0, 0.1).is_err());
        assert!(regime(&params(), -1.0, 1.0).is_err());
    }

    #[test]
    fn regimes_split_at_critical_energy() {
        let p = params();
        let ec = critical_energy(&p, 1.5).unwrap();
        assert_eq!(regime(&p, 1.5, ec).unwrap(), Regime::Critical);
        assert_eq!(regime(&p, 1.5, 0.9 * ec).unwrap(), Regime::Subcritical);
        assert_eq!(regime(&p, 1.5, 1.1 * ec).unwrap(), Regime::Supercritical);
    }

    #[test]
    fn period_rejects_supercritical() {
        let p = params();
        let ec = critical_energy(&p, 1.0).unwrap();
        assert!(matches!(
            period(&p, 1.0, 1.5 * ec),
            Err(Error::Regime { .. })
        ));
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(rational_approximation(0.75, 64, 1e-9), Some((3, 4)));
        assert_eq!(rational_approximation(2.0, 64, 1e-9), Some((2, 1)));
        assert_eq!(rational_approximation(1.0 / 63.0, 64, 1e-12), Some((1, 63)));
        assert_eq!(rational_approximation(std::f64::consts::SQRT_2, 64, 1e-9), None);
    }

    #[test]
    fn motion_classes() {
        assert_eq!(classify_motion(TAU, 0.0, 0.0).0, MotionClass::Periodic);
        assert_eq!(classify_motion(TAU, 1e-3, 0.0).0, MotionClass::Unbounded);
        assert_eq!(classify_motion(PI, 1.0, 0.0).0, MotionClass::Periodic);
        assert_eq!(classify_motion(1.0, 1.0, 0.0).0, MotionClass::Quasiperiodic);
    }

    #[test]
    fn slope_matches_difference_quotient() {
        let p = params();
        let (w, e) = (1.0, 3.0);
        let s = speed_scale(&p, w, e);
        let h = 1e-6;
        for a in [0.3, 1.2, 2.5, 4.0] {
            let fd = (alpha_rate(&p, w, s, a + h) - alpha_rate(&p, w, s, a - h)) / (2.0 * h);
            assert!((fd - alpha_rate_slope(&p, s, a)).abs() < 1e-8);
        }
    }
}
