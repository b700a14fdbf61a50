use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of a convoy: a leading car pulling `trailers`
/// identical trailers, each hooked to its predecessor by a rigid link.
///
/// Serializes as a flat JSON object with the keys
/// `{"M","m","J0","J","a","l","n"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct VehicleParams {
    /// Mass of the leading car (kg).
    pub car_mass: f64,
    /// Mass of each trailer (kg).
    pub trailer_mass: f64,
    /// Moment of inertia of the leading car about its center of mass (kg m^2).
    pub car_inertia: f64,
    /// Moment of inertia of a trailer about its axle midpoint (kg m^2).
    pub trailer_inertia: f64,
    /// Offset of the car's center of mass ahead of its axle midpoint (m).
    pub offset: f64,
    /// Link length between consecutive axle midpoints (m).
    pub link: f64,
    /// Number of trailers.
    pub trailers: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(rename = "M")]
    big_m: f64,
    m: f64,
    #[serde(rename = "J0")]
    j0: f64,
    #[serde(rename = "J")]
    big_j: f64,
    a: f64,
    l: f64,
    n: usize,
}

impl TryFrom<RawParams> for VehicleParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        VehicleParams::new(raw.big_m, raw.m, raw.j0, raw.big_j, raw.a, raw.l, raw.n)
    }
}

impl From<VehicleParams> for RawParams {
    fn from(p: VehicleParams) -> Self {
        RawParams {
            big_m: p.car_mass,
            m: p.trailer_mass,
            j0: p.car_inertia,
            big_j: p.trailer_inertia,
            a: p.offset,
            l: p.link,
            n: p.trailers,
        }
    }
}

impl VehicleParams {
    pub fn new(
        car_mass: f64,
        trailer_mass: f64,
        car_inertia: f64,
        trailer_inertia: f64,
        offset: f64,
        link: f64,
        trailers: usize,
    ) -> Result<Self> {
        let p = VehicleParams {
            car_mass,
            trailer_mass,
            car_inertia,
            trailer_inertia,
            offset,
            link,
            trailers,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.car_mass > 0.0, "M must be positive"),
            (self.trailer_mass > 0.0, "m must be positive"),
            (self.car_inertia > 0.0, "J0 must be positive"),
            (self.trailer_inertia >= 0.0, "J must be non-negative"),
            (self.offset >= 0.0, "a must be non-negative"),
            (self.link > 0.0, "l must be positive"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::InvalidParams(msg.to_string()));
            }
        }
        let all_finite = [
            self.car_mass,
            self.trailer_mass,
            self.car_inertia,
            self.trailer_inertia,
            self.offset,
            self.link,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        Ok(())
    }

    /// Same vehicle with a different number of trailers.
    pub fn with_trailers(mut self, trailers: usize) -> Self {
        self.trailers = trailers;
        self
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    /// Rotational inertia of the leading car about its axle midpoint, `J0 + M a^2`.
    pub fn car_axle_inertia(&self) -> f64 {
        self.car_inertia + self.car_mass * self.offset * self.offset
    }

    /// Mass of the whole convoy, `M + n m`.
    pub fn total_mass(&self) -> f64 {
        self.car_mass + self.trailers as f64 * self.trailer_mass
    }

    /// `J < m l^2`: the trailer's inertia is smaller than that of a point
    /// mass at the hitch distance.
    pub fn inertia_condition(&self) -> bool {
        self.trailer_inertia < self.trailer_mass * self.link * self.link
    }

    /// Configuration-space dimension `n + 3`.
    pub fn config_dim(&self) -> usize {
        self.trailers + 3
    }
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams {
            car_mass: 2.0,
            trailer_mass: 1.0,
            car_inertia: 0.5,
            trailer_inertia: 0.2,
            offset: 0.3,
            link: 1.0,
            trailers: 1,
        }
    }
}
