use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::Sampling;
use crate::error::{Error, Result};
use crate::model::{Pose, ReducedState, VehicleParams};
use crate::nonholonomy::NonholonomyOptions;
use crate::numerics::ode::IntegratorConfig;

/// One experiment, read from a single JSON document. Every block except
/// `params` is optional and falls back to its defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: VehicleParams,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub equilibria: EquilibriaConfig,
    #[serde(default)]
    pub portrait: PortraitConfig,
    #[serde(default)]
    pub period: PeriodConfig,
    #[serde(default)]
    pub holonomy: HolonomyConfig,
    #[serde(default)]
    pub brackets: BracketsConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    /// `[u, omega, alpha_1, ..., alpha_n]`; defaults to `u = 1`,
    /// `omega = 0.5` and every `alpha_k = 0.3`.
    pub initial: Option<ReducedState>,
    pub t_end: f64,
    pub integrator: IntegratorConfig,
    pub sampling: Sampling,
    /// Also integrate the leading car's pose, starting from `pose`.
    pub reconstruct: bool,
    pub pose: Pose,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            initial: None,
            t_end: 10.0,
            integrator: IntegratorConfig::default(),
            sampling: Sampling::Uniform { dt: 0.1 },
            reconstruct: false,
            pose: Pose::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriaConfig {
    /// Energy level, used when `a > 0`.
    pub energy: f64,
    /// Speed and angular velocity of the circular motion, used when `a = 0`.
    pub u0: f64,
    pub omega0: f64,
}

impl Default for EquilibriaConfig {
    fn default() -> Self {
        EquilibriaConfig {
            energy: 1.0,
            u0: 2.0,
            omega0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortraitConfig {
    pub energy: f64,
    /// Initial conditions per torus angle; the grid has `grid^(n+1)` points.
    pub grid: usize,
    pub t_end: f64,
    pub dt: f64,
    pub integrator: IntegratorConfig,
}

impl Default for PortraitConfig {
    fn default() -> Self {
        PortraitConfig {
            energy: 1.0,
            grid: 6,
            t_end: 20.0,
            dt: 0.05,
            integrator: IntegratorConfig::rk45(1e-9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodConfig {
    pub omega0: f64,
    /// Explicit energies; when absent, `count` energies spread over
    /// `[J0 omega0^2 / 2, E_c)`.
    pub energies: Option<Vec<f64>>,
    pub count: usize,
}

impl Default for PeriodConfig {
    fn default() -> Self {
        PeriodConfig {
            omega0: 1.0,
            energies: None,
            count: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolonomyConfig {
    pub omega0: f64,
    /// Energy; the midpoint of the subcritical range when absent.
    pub energy: Option<f64>,
}

impl Default for HolonomyConfig {
    fn default() -> Self {
        HolonomyConfig {
            omega0: 1.0,
            energy: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BracketsConfig {
    /// Grid points per relative angle.
    pub resolution: usize,
    pub cap: Option<usize>,
    pub samples: usize,
}

impl Default for BracketsConfig {
    fn default() -> Self {
        BracketsConfig {
            resolution: 16,
            cap: None,
            samples: 32,
        }
    }
}

impl BracketsConfig {
    pub fn options(&self, seed: u64) -> NonholonomyOptions {
        NonholonomyOptions {
            cap: self.cap,
            samples: self.samples,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Random samples per check.
    pub samples: usize,
    /// Checks cycle through `n = 0..=max_trailers`.
    pub max_trailers: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 1000,
            max_trailers: 4,
        }
    }
}

impl RunConfig {
    /// Defaults for every block around the given parameters.
    pub fn new(params: VehicleParams) -> Self {
        RunConfig {
            params,
            seed: 0,
            output: None,
            simulate: SimulateConfig::default(),
            equilibria: EquilibriaConfig::default(),
            portrait: PortraitConfig::default(),
            period: PeriodConfig::default(),
            holonomy: HolonomyConfig::default(),
            brackets: BracketsConfig::default(),
            verify: VerifyConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every block, so that no command starts on a bad document.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |msg: String| Err(Error::Config(msg));
        let s = &self.simulate;
        if let Some(init) = &s.initial {
            init.check(&self.params)?;
            if !init.is_finite() {
                return bad("simulate.initial must be finite".into());
            }
        }
        if !(s.t_end > 0.0 && s.t_end.is_finite()) {
            return bad(format!("simulate.t_end must be positive, got {}", s.t_end));
        }
        if let Sampling::Uniform { dt } = s.sampling {
            if !(dt > 0.0) {
                return bad(format!("simulate.sampling.dt must be positive, got {dt}"));
            }
        }
        for (name, cfg) in [("simulate", &s.integrator), ("portrait", &self.portrait.integrator)] {
            cfg.validate()
                .map_err(|e| Error::Config(format!("{name}.integrator: {e}")))?;
        }
        let p = &self.portrait;
        if p.grid == 0 || !(p.t_end > 0.0) || !(p.dt > 0.0) || !(p.energy > 0.0) {
            return bad("portrait needs positive energy, grid, t_end and dt".into());
        }
        if self.period.energies.is_none() && self.period.count == 0 {
            return bad("period.count must be positive".into());
        }
        if self.brackets.resolution == 0 || self.brackets.samples == 0 {
            return bad("brackets.resolution and brackets.samples must be positive".into());
        }
        if self.verify.samples == 0 {
            return bad("verify.samples must be positive".into());
        }
        Ok(())
    }
}
