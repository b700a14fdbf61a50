//! Explicit Runge-Kutta integrators: classical fixed-step RK4 and the
//! Dormand-Prince 5(4) embedded pair with step-size control. Every accepted
//! step is kept together with the derivative there, which gives a cubic
//! Hermite dense output.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Right-hand side of `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

impl<S: OdeSystem + ?Sized> OdeSystem for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (**self).rhs(t, y, dy)
    }
}

/// Wraps a closure as an [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64, &[f64], &mut [f64])> FnSystem<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnSystem { dim, f }
    }
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeSystem for FnSystem<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.f)(t, y, dy)
    }
}

/// The system with time reversed: `y' = -f(-t, y)`.
pub struct Reversed<S>(pub S);

impl<S: OdeSystem> OdeSystem for Reversed<S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        self.0.rhs(-t, y, dy);
        dy.iter_mut().for_each(|v| *v = -*v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step for [`Method::Rk4Fixed`]; the span is split into equal steps no
    /// longer than this.
    pub step: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on adaptive steps; 0 means unbounded.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk45Adaptive,
            step: 1e-2,
            rtol: 1e-10,
            atol: 1e-10,
            max_step: 0.0,
            max_steps: 5_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn rk45(tol: f64) -> Self {
        IntegratorConfig {
            rtol: tol,
            atol: tol,
            ..Default::default()
        }
    }

    pub fn rk4(step: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4Fixed,
            step,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        let bad = |msg: &str| Err(IntegrationError::InvalidConfig(msg.to_string()));
        match self.method {
            Method::Rk4Fixed if !(self.step > 0.0 && self.step.is_finite()) => {
                bad("step must be positive")
            }
            Method::Rk45Adaptive if !(self.rtol > 0.0 && self.atol > 0.0) => {
                bad("rtol and atol must be positive")
            }
            Method::Rk45Adaptive if self.max_step < 0.0 => bad("max_step must be non-negative"),
            _ if self.max_steps == 0 => bad("max_steps must be positive"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("invalid time span [{0}, {1}]")]
    InvalidSpan(f64, f64),
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("initial state is not finite")]
    NonFiniteInitial,
    #[error("maximum number of steps ({steps}) exceeded at t = {t}")]
    MaxStepsExceeded { t: f64, steps: usize },
    #[error("non-finite state encountered; last good time t = {t}")]
    NonFinite { t: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
}

/// Accepted steps of an integration run.
#[derive(Debug, Clone, Default)]
pub struct OdeSolution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub dy: Vec<Vec<f64>>,
}

impl OdeSolution {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.y.last().expect("empty solution")
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().expect("empty solution")
    }

    /// Cubic Hermite interpolation; clamps to the end points outside the
    /// integrated span.
    pub fn interpolate(&self, t: f64) -> Vec<f64> {
        let (i, s) = self.locate(t);
        if s <= 0.0 {
            return self.y[i].clone();
        }
        if i + 1 >= self.t.len() {
            return self.y[i].clone();
        }
        hermite(
            self.t[i + 1] - self.t[i],
            s,
            &self.y[i],
            &self.dy[i],
            &self.y[i + 1],
            &self.dy[i + 1],
        )
    }

    /// Derivative of the Hermite interpolant.
    pub fn interpolate_derivative(&self, t: f64) -> Vec<f64> {
        let (i, s) = self.locate(t);
        if i + 1 >= self.t.len() {
            return self.dy[i].clone();
        }
        let h = self.t[i + 1] - self.t[i];
        let (y0, f0, y1, f1) = (&self.y[i], &self.dy[i], &self.y[i + 1], &self.dy[i + 1]);
        let d00 = (6.0 * s * s - 6.0 * s) / h;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = (-6.0 * s * s + 6.0 * s) / h;
        let d11 = 3.0 * s * s - 2.0 * s;
        (0..y0.len())
            .map(|k| d00 * y0[k] + d10 * f0[k] + d01 * y1[k] + d11 * f1[k])
            .collect()
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.t.len();
        if t <= self.t[0] {
            return (0, 0.0);
        }
        if t >= self.t[n - 1] {
            return (n - 1, 0.0);
        }
        let i = self.t.partition_point(|&ti| ti <= t) - 1;
        (i, (t - self.t[i]) / (self.t[i + 1] - self.t[i]))
    }

    /// First time in the run where `g(y)` changes sign from negative to
    /// non-negative, refined by bisection on the dense output.
    pub fn find_crossing(&self, g: impl Fn(&[f64]) -> f64) -> Option<f64> {
        for i in 1..self.t.len() {
            if g(&self.y[i - 1]) < 0.0 && g(&self.y[i]) >= 0.0 {
                let (mut lo, mut hi) = (self.t[i - 1], self.t[i]);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if g(&self.interpolate(mid)) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
        }
        None
    }
}

fn hermite(h: f64, s: f64, y0: &[f64], f0: &[f64], y1: &[f64], f1: &[f64]) -> Vec<f64> {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    (0..y0.len())
        .map(|k| h00 * y0[k] + h * h10 * f0[k] + h01 * y1[k] + h * h11 * f1[k])
        .collect()
}

/// Integrates from `t0` to `t1 > t0`.
pub fn integrate<S: OdeSystem>(
    system: &S,
    y0: &[f64],
    t0: f64,
    t1: f64,
    config: &IntegratorConfig,
) -> Result<OdeSolution, IntegrationError> {
    config.validate()?;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(IntegrationError::InvalidSpan(t0, t1));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(IntegrationError::NonFiniteInitial);
    }
    match config.method {
        Method::Rk4Fixed => rk4(system, y0, t0, t1, config),
        Method::Rk45Adaptive => dopri5(system, y0, t0, t1, config),
    }
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])], out: &mut [f64]) {
    for i in 0..y.len() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

fn rk4<S: OdeSystem>(
    sys: &S,
    y0: &[f64],
    t0: f64,
    t1: f64,
    config: &IntegratorConfig,
) -> Result<OdeSolution, IntegrationError> {
    let span = t1 - t0;
    let steps = ((span / config.step) - 1e-9).ceil().max(1.0) as usize;
    if steps > config.max_steps {
        return Err(IntegrationError::MaxStepsExceeded {
            t: t0,
            steps: config.max_steps,
        });
    }
    let h = span / steps as f64;
    let n = y0.len();
    let mut sol = OdeSolution::default();
    let mut y = y0.to_vec();
    let mut f = vec![0.0; n];
    sys.rhs(t0, &y, &mut f);
    sol.t.push(t0);
    sol.y.push(y.clone());
    sol.dy.push(f.clone());

    let (mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        axpy(&y, 0.5 * h, &[(1.0, &f)], &mut tmp);
        sys.rhs(t + 0.5 * h, &tmp, &mut k2);
        axpy(&y, 0.5 * h, &[(1.0, &k2)], &mut tmp);
        sys.rhs(t + 0.5 * h, &tmp, &mut k3);
        axpy(&y, h, &[(1.0, &k3)], &mut tmp);
        sys.rhs(t + h, &tmp, &mut k4);
        let mut next = vec![0.0; n];
        axpy(
            &y,
            h / 6.0,
            &[(1.0, &f), (2.0, &k2), (2.0, &k3), (1.0, &k4)],
            &mut next,
        );
        if next.iter().any(|v| !v.is_finite()) {
            return Err(IntegrationError::NonFinite { t });
        }
        let t_next = if i + 1 == steps { t1 } else { t0 + (i + 1) as f64 * h };
        y = next;
        sys.rhs(t_next, &y, &mut f);
        sol.t.push(t_next);
        sol.y.push(y.clone());
        sol.dy.push(f.clone());
    }
    Ok(sol)
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn error_norm(err: &[f64], y: &[f64], y_new: &[f64], config: &IntegratorConfig) -> f64 {
    let sum: f64 = (0..err.len())
        .map(|i| {
            let sc = config.atol + config.rtol * y[i].abs().max(y_new[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / err.len() as f64).sqrt()
}

fn initial_step<S: OdeSystem>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    config: &IntegratorConfig,
) -> f64 {
    let n = y0.len();
    let sc: Vec<f64> = y0.iter().map(|v| config.atol + config.rtol * v.abs()).collect();
    let rms = |v: &[f64]| {
        ((0..n).map(|i| (v[i] / sc[i]).powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    let d0 = rms(y0);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let mut y1 = vec![0.0; n];
    axpy(y0, h0, &[(1.0, f0)], &mut y1);
    let mut f1 = vec![0.0; n];
    sys.rhs(t0 + h0, &y1, &mut f1);
    let diff: Vec<f64> = (0..n).map(|i| f1[i] - f0[i]).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1)
}

fn dopri5<S: OdeSystem>(
    sys: &S,
    y0: &[f64],
    t0: f64,
    t1: f64,
    config: &IntegratorConfig,
) -> Result<OdeSolution, IntegrationError> {
    let n = y0.len();
    let mut sol = OdeSolution::default();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    sys.rhs(t, &y, &mut k1);
    sol.t.push(t);
    sol.y.push(y.clone());
    sol.dy.push(k1.clone());

    let span = t1 - t0;
    let max_step = if config.max_step > 0.0 {
        config.max_step.min(span)
    } else {
        span
    };
    let mut h = initial_step(sys, t, &y, &k1, config).min(max_step);
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut steps = 0usize;
    let mut rejected_last = false;

    while t < t1 {
        if steps >= config.max_steps {
            return Err(IntegrationError::MaxStepsExceeded {
                t,
                steps: config.max_steps,
            });
        }
        steps += 1;
        let last = t + h >= t1 - 1e-12 * span.max(1.0);
        if last {
            h = t1 - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(IntegrationError::StepUnderflow { t });
        }

        axpy(&y, h, &[(A21, &k1)], &mut tmp);
        sys.rhs(t + C2 * h, &tmp, &mut k2);
        axpy(&y, h, &[(A31, &k1), (A32, &k2)], &mut tmp);
        sys.rhs(t + C3 * h, &tmp, &mut k3);
        axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut tmp);
        sys.rhs(t + C4 * h, &tmp, &mut k4);
        axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut tmp);
        sys.rhs(t + C5 * h, &tmp, &mut k5);
        axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            &mut tmp,
        );
        sys.rhs(t + h, &tmp, &mut k6);
        axpy(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            &mut y_new,
        );
        let t_new = if last { t1 } else { t + h };
        sys.rhs(t_new, &y_new, &mut k7);
        for i in 0..n {
            err[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }

        if y_new.iter().any(|v| !v.is_finite()) || k7.iter().any(|v| !v.is_finite()) {
            // Retry with a smaller step before giving up.
            h *= 0.25;
            rejected_last = true;
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(IntegrationError::NonFinite { t });
            }
            continue;
        }

        let e = error_norm(&err, &y, &y_new, config);
        if e <= 1.0 {
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            sol.t.push(t);
            sol.y.push(y.clone());
            sol.dy.push(k1.clone());
            let mut fac = if e == 0.0 { 10.0 } else { 0.9 * e.powf(-0.2) };
            fac = fac.clamp(0.2, 10.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(max_step);
            rejected_last = false;
        } else {
            let fac = (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
            h *= fac;
            rejected_last = true;
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> FnSystem<impl Fn(f64, &[f64], &mut [f64])> {
        FnSystem::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0])
    }

    fn oscillator() -> FnSystem<impl Fn(f64, &[f64], &mut [f64])> {
        FnSystem::new(2, |_t, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        })
    }

    #[test]
    fn rk45_hits_tolerance_on_exponential_decay() {
        let sol = integrate(&decay(), &[1.0], 0.0, 5.0, &IntegratorConfig::rk45(1e-10)).unwrap();
        assert_eq!(sol.t_end(), 5.0);
        assert!((sol.last()[0] - (-5.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |h: f64| {
            let sol = integrate(&oscillator(), &[1.0, 0.0], 0.0, 2.0, &IntegratorConfig::rk4(h))
                .unwrap();
            (sol.last()[0] - 2.0f64.cos()).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn dense_output_is_accurate_between_steps() {
        let sol = integrate(&oscillator(), &[1.0, 0.0], 0.0, 10.0, &IntegratorConfig::rk45(1e-11))
            .unwrap();
        for i in 0..100 {
            let t = 0.1 * i as f64 + 0.037;
            let y = sol.interpolate(t);
            assert!((y[0] - t.cos()).abs() < 1e-7);
        }
        let t = sol.find_crossing(|y| -y[0]).unwrap();
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }

    #[test]
    fn reversed_system_runs_backwards() {
        let fwd = integrate(&oscillator(), &[1.0, 0.0], 0.0, 3.0, &IntegratorConfig::rk45(1e-12))
            .unwrap();
        let back = integrate(
            &Reversed(oscillator()),
            fwd.last(),
            0.0,
            3.0,
            &IntegratorConfig::rk45(1e-12),
        )
        .unwrap();
        assert!((back.last()[0] - 1.0).abs() < 1e-9);
        assert!(back.last()[1].abs() < 1e-9);
    }

    #[test]
    fn errors_are_reported() {
        let cfg = IntegratorConfig::rk45(1e-8);
        assert!(matches!(
            integrate(&decay(), &[1.0], 1.0, 1.0, &cfg),
            Err(IntegrationError::InvalidSpan(..))
        ));
        assert!(matches!(
            integrate(&decay(), &[f64::NAN], 0.0, 1.0, &cfg),
            Err(IntegrationError::NonFiniteInitial)
        ));
        let tight = IntegratorConfig {
            max_steps: 3,
            ..IntegratorConfig::rk45(1e-12)
        };
        assert!(matches!(
            integrate(&oscillator(), &[1.0, 0.0], 0.0, 100.0, &tight),
            Err(IntegrationError::MaxStepsExceeded { .. })
        ));
        let blowup = FnSystem::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0]);
        let r = integrate(&blowup, &[1.0], 0.0, 2.0, &IntegratorConfig::rk45(1e-8));
        assert!(matches!(
            r,
            Err(IntegrationError::NonFinite { .. }) | Err(IntegrationError::StepUnderflow { .. })
                | Err(IntegrationError::MaxStepsExceeded { .. })
        ));
    }

    #[test]
    fn config_json_shape() {
        let cfg: IntegratorConfig =
            serde_json::from_str(r#"{"method":"rk4_fixed","step":0.05}"#).unwrap();
        assert_eq!(cfg.method, Method::Rk4Fixed);
        assert_eq!(cfg.step, 0.05);
        assert!(serde_json::from_str::<IntegratorConfig>(r#"{"method":"euler"}"#).is_err());
        assert!(serde_json::from_str::<IntegratorConfig>(r#"{"tol":1}"#).is_err());
    }
}
