//! Air-to-ground link model: free-space loss with LOS/NLOS excess loss
//! mixed by an elevation-dependent LOS probability.
//!
//! Everything here is linear (not dB).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light used for the free-space factor, m/s.
pub const LIGHT_SPEED: f64 = 3.0e8;

/// Statistical A2G constants of a propagation environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub name: String,
    pub a: f64,
    /// Per-degree slope of the LOS sigmoid.
    pub b: f64,
    /// Excess LOS loss, linear.
    pub eta_los: f64,
    /// Excess NLOS loss, linear.
    pub eta_nlos: f64,
}

impl Environment {
    pub fn new(name: impl Into<String>, a: f64, b: f64, eta_los: f64, eta_nlos: f64) -> Result<Self> {
        let env = Environment {
            name: name.into(),
            a,
            b,
            eta_los,
            eta_nlos,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn urban() -> Self {
        Environment {
            name: "urban".into(),
            a: 9.61,
            b: 0.16,
            eta_los: 1.0,
            eta_nlos: 20.0,
        }
    }

    pub fn dense_urban() -> Self {
        Environment {
            name: "dense-urban".into(),
            a: 12.08,
            b: 0.11,
            eta_los: 1.6,
            eta_nlos: 23.0,
        }
    }

    pub fn suburban() -> Self {
        Environment {
            name: "suburban".into(),
            a: 4.88,
            b: 0.43,
            eta_los: 0.1,
            eta_nlos: 21.0,
        }
    }

    /// The three built-in presets, in the order dense urban, urban, suburban.
    pub fn presets() -> [Environment; 3] {
        [Self::dense_urban(), Self::urban(), Self::suburban()]
    }

    /// Looks up a preset; accepts `dense-urban`, `dense_urban` and `dense urban`.
    pub fn preset(name: &str) -> Result<Self> {
        let key: String = name
            .trim()
            .to_ascii_lowercase()
            .chars()
            .map(|c| if c == '_' || c == ' ' { '-' } else { c })
            .collect();
        match key.as_str() {
            "urban" => Ok(Self::urban()),
            "dense-urban" | "denseurban" => Ok(Self::dense_urban()),
            "suburban" => Ok(Self::suburban()),
            _ => Err(Error::invalid("environment", format!("unknown preset '{name}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.b, self.eta_los, self.eta_nlos]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.a <= 0.0 || self.b <= 0.0 {
            return Err(Error::invalid(
                "environment",
                format!("'{}': a and b must be positive and finite", self.name),
            ));
        }
        if !(self.eta_los > 0.0 && self.eta_nlos >= self.eta_los) {
            return Err(Error::invalid(
                "environment",
                format!(
                    "'{}': need eta_nlos >= eta_los > 0, got {} and {}",
                    self.name, self.eta_nlos, self.eta_los
                ),
            ));
        }
        Ok(())
    }
}

/// Radio link budget parameters shared by every user.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioConfig {
    pub carrier_hz: f64,
    pub light_speed: f64,
    /// Bandwidth allocated to one user, Hz.
    pub bandwidth_hz: f64,
    /// Noise power spectral density, W/Hz.
    pub noise_density: f64,
    /// Fixed per-user rate, bit/s.
    pub rate_bps: f64,
    /// Coverage area of a reference terrestrial base station, m^2.
    pub bs_coverage_area: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            carrier_hz: 2.4e9,
            light_speed: LIGHT_SPEED,
            bandwidth_hz: 1.0e4,
            noise_density: 5.0e-15,
            rate_bps: 1.0e4,
            bs_coverage_area: 1.0e4,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("carrier_hz", self.carrier_hz),
            ("light_speed", self.light_speed),
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_density", self.noise_density),
            ("rate_bps", self.rate_bps),
            ("bs_coverage_area", self.bs_coverage_area),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid("radio config", format!("{name} = {v} must be positive")));
            }
        }
        if !self.snr_factor().is_finite() {
            return Err(Error::invalid(
                "radio config",
                "rate/bandwidth ratio overflows the SNR requirement",
            ));
        }
        Ok(())
    }

    /// `(4 pi f / c)^2`, the distance-free part of the free-space loss.
    pub fn fspl_factor(&self) -> f64 {
        let k = 4.0 * PI * self.carrier_hz / self.light_speed;
        k * k
    }

    /// Required SNR `2^(C/W) - 1` for the fixed per-user rate.
    pub fn snr_factor(&self) -> f64 {
        (self.rate_bps / self.bandwidth_hz).exp2() - 1.0
    }

    /// Noise power in one user's band, `N0 * W`.
    pub fn noise_power(&self) -> f64 {
        self.noise_density * self.bandwidth_hz
    }
}

/// Link state of an air-to-ground path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Los,
    Nlos,
}

fn check_geometry(r: f64, h: f64) -> Result<()> {
    if !(r >= 0.0 && h >= 0.0) || !r.is_finite() || !h.is_finite() {
        return Err(Error::Domain(format!(
            "distance {r} and altitude {h} must be finite and non-negative"
        )));
    }
    if r == 0.0 && h == 0.0 {
        return Err(Error::Domain("user coincides with the UAV".into()));
    }
    Ok(())
}

/// Elevation angle in degrees; 90 when the user is directly below.
pub fn elevation_deg(r: f64, h: f64) -> Result<f64> {
    check_geometry(r, h)?;
    if r == 0.0 {
        return Ok(90.0);
    }
    Ok((h / r).atan().to_degrees())
}

fn los_from_angle(theta_deg: f64, env: &Environment) -> f64 {
    1.0 / (1.0 + env.a * (-env.b * (theta_deg - env.a)).exp())
}

/// Probability that the link at horizontal distance `r` and altitude `h` is LOS.
pub fn los_probability(r: f64, h: f64, env: &Environment) -> Result<f64> {
    Ok(los_from_angle(elevation_deg(r, h)?, env))
}

/// Derivative of the LOS probability with respect to altitude.
pub fn los_probability_slope(r: f64, h: f64, env: &Environment) -> Result<f64> {
    let p = los_probability(r, h, env)?;
    Ok(180.0 * env.b * r * p * (1.0 - p) / (PI * (r * r + h * h)))
}

/// Path loss of a link in the given state.
pub fn path_loss(link: Link, r: f64, h: f64, env: &Environment, radio: &RadioConfig) -> Result<f64> {
    check_geometry(r, h)?;
    let eta = match link {
        Link::Los => env.eta_los,
        Link::Nlos => env.eta_nlos,
    };
    Ok(radio.fspl_factor() * (r * r + h * h) * eta)
}

/// Mean excess loss `eta_nlos + P_los (eta_los - eta_nlos)`.
pub fn mean_excess_loss(r: f64, h: f64, env: &Environment) -> Result<f64> {
    let p = los_probability(r, h, env)?;
    Ok(env.eta_nlos + p * (env.eta_los - env.eta_nlos))
}

/// LOS-probability weighted path loss.
pub fn avg_path_loss(r: f64, h: f64, env: &Environment, radio: &RadioConfig) -> Result<f64> {
    Ok(radio.fspl_factor() * (r * r + h * h) * mean_excess_loss(r, h, env)?)
}

/// Transmit power needed to serve one user at the fixed rate, W.
pub fn per_user_tx_power(r: f64, h: f64, env: &Environment, radio: &RadioConfig) -> Result<f64> {
    Ok(avg_path_loss(r, h, env, radio)? * radio.noise_power() * radio.snr_factor())
}

/// Linear-to-dB conversion for output formatting.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
