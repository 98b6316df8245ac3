//! Single-slot optimal placement.
//!
//! The transmit power of one UAV factors into a density/radius scaling term
//! and a dimensionless kernel of the altitude-to-radius ratio, so the
//! optimal altitude is a fixed multiple of the radius that depends only on
//! the environment. With that ratio fixed, the static recall frequency is a
//! sum of an `R^-2` circuit term and an `R^2` transmit term whose minimizer
//! has a closed form.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::channel::{self, Environment, RadioConfig};
use crate::error::{Error, Result};
use crate::quadrature;

/// Default relative tolerance of the radial integrals.
pub const QUAD_TOL: f64 = 1e-8;
/// Default normalized altitude beyond which the bracket search gives up.
pub const ALTITUDE_CAP: f64 = 1e6;
/// Bisection continues until the bracket is at most this wide (relative).
const BRACKET_WIDTH: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

/// Power and kinematic parameters of one UAV.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyParams {
    /// On-board circuit power, W.
    pub p_circuit: f64,
    /// Battery capacity, J.
    pub battery_j: f64,
    pub p_horizontal: f64,
    pub p_ascend: f64,
    pub p_descend: f64,
    pub v_horizontal: f64,
    pub v_ascend: f64,
    pub v_descend: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            p_circuit: 0.5,
            battery_j: 1.0e6 / PI,
            p_horizontal: 1.5,
            p_ascend: 1.5,
            p_descend: 1.5,
            v_horizontal: 1.0,
            v_ascend: 1.0,
            v_descend: 1.0,
        }
    }
}

impl EnergyParams {
    /// Sets horizontal, ascend and descend power to the same value.
    pub fn with_mobility_power(mut self, p: f64) -> Self {
        self.p_horizontal = p;
        self.p_ascend = p;
        self.p_descend = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let powers = [
            ("p_circuit", self.p_circuit),
            ("p_horizontal", self.p_horizontal),
            ("p_ascend", self.p_ascend),
            ("p_descend", self.p_descend),
        ];
        for (name, v) in powers {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid("energy params", format!("{name} = {v} must be >= 0")));
            }
        }
        let positive = [
            ("battery_j", self.battery_j),
            ("v_horizontal", self.v_horizontal),
            ("v_ascend", self.v_ascend),
            ("v_descend", self.v_descend),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid("energy params", format!("{name} = {v} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Controls for the optimal altitude search.
#[derive(Debug, Clone, PartialEq)]
pub struct AltitudeSearchParams {
    /// Stop once the kernel slope magnitude is below this.
    pub tolerance: f64,
    /// Growth factor of the upper bracket end.
    pub bracket_scale: f64,
    pub quadrature_tol: f64,
    /// Largest normalized altitude the bracket may grow to.
    pub altitude_cap: f64,
}

impl Default for AltitudeSearchParams {
    fn default() -> Self {
        AltitudeSearchParams {
            tolerance: 1e-3,
            bracket_scale: 10.0,
            quadrature_tol: QUAD_TOL,
            altitude_cap: ALTITUDE_CAP,
        }
    }
}

impl AltitudeSearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0)
            || !(self.bracket_scale > 1.0)
            || !(self.quadrature_tol > 0.0)
            || !(self.altitude_cap > 0.0)
        {
            return Err(Error::invalid(
                "altitude search params",
                "need tolerance > 0, bracket_scale > 1, quadrature_tol > 0, altitude_cap > 0",
            ));
        }
        Ok(())
    }
}

/// Optimal single-slot placement of the UAVs in one subregion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotPlacement {
    pub radius: f64,
    pub altitude: f64,
    /// Transmit power of one UAV, W.
    pub tx_power: f64,
    /// Static recall frequency of the subregion, 1/s.
    pub static_rf: f64,
}

fn check_ratio(h1: f64) -> Result<()> {
    if !(h1 >= 0.0 && h1.is_finite()) {
        return Err(Error::Domain(format!("normalized altitude {h1} must be >= 0")));
    }
    Ok(())
}

/// Dimensionless kernel `int_0^1 2 pi r (r^2 + h1^2) excess(r, h1) dr`.
pub fn altitude_kernel(h1: f64, env: &Environment, quad_tol: f64) -> Result<f64> {
    check_ratio(h1)?;
    let f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let excess = channel::mean_excess_loss(r, h1, env).unwrap_or(f64::NAN);
        2.0 * PI * r * (r * r + h1 * h1) * excess
    };
    Ok(quadrature::integrate(f, 0.0, 1.0, quad_tol)?.value)
}

/// Derivative of [`altitude_kernel`] in `h1`, integrating the analytic
/// derivative of the integrand.
pub fn altitude_kernel_slope(h1: f64, env: &Environment, quad_tol: f64) -> Result<f64> {
    check_ratio(h1)?;
    let delta = env.eta_los - env.eta_nlos;
    let f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let p = match channel::los_probability(r, h1, env) {
            Ok(p) => p,
            Err(_) => return f64::NAN,
        };
        let d2 = r * r + h1 * h1;
        let dp = 180.0 * env.b * r * p * (1.0 - p) / (PI * d2);
        2.0 * PI * r * (2.0 * h1 * (env.eta_nlos + p * delta) + d2 * dp * delta)
    };
    // The slope vanishes at the optimum, so the tolerance is taken relative
    // to the size of the kernel rather than to the slope itself.
    let scale = 2.0 * PI * env.eta_nlos * (0.25 + 0.5 * h1 * h1 + h1);
    Ok(quadrature::integrate_abs(f, 0.0, 1.0, quad_tol * scale)?.value)
}

/// Transmit power of one UAV covering a unit disk at unit density and
/// unit SNR requirement, W.
pub fn normalized_tx_power(h1: f64, env: &Environment, radio: &RadioConfig, quad_tol: f64) -> Result<f64> {
    Ok(radio.noise_power() * radio.fspl_factor() * altitude_kernel(h1, env, quad_tol)?)
}

fn check_disk(radius: f64, lambda: f64, altitude: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("radius {radius} must be positive")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("density {lambda} must be >= 0")));
    }
    if !(altitude >= 0.0 && altitude.is_finite()) {
        return Err(Error::Domain(format!("altitude {altitude} must be >= 0")));
    }
    Ok(())
}

/// Transmit power of one UAV serving density `lambda` over a disk of
/// `radius` from `altitude`, via the scaled kernel.
pub fn tx_power(
    radius: f64,
    lambda: f64,
    altitude: f64,
    env: &Environment,
    radio: &RadioConfig,
    quad_tol: f64,
) -> Result<f64> {
    check_disk(radius, lambda, altitude)?;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let gamma = lambda * radius.powi(4) * radio.snr_factor();
    Ok(gamma * normalized_tx_power(altitude / radius, env, radio, quad_tol)?)
}

/// Same quantity as [`tx_power`], integrating the per-user power directly
/// over the physical disk.
pub fn tx_power_direct(
    radius: f64,
    lambda: f64,
    altitude: f64,
    env: &Environment,
    radio: &RadioConfig,
    quad_tol: f64,
) -> Result<f64> {
    check_disk(radius, lambda, altitude)?;
    let f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        2.0 * PI * r * channel::per_user_tx_power(r, altitude, env, radio).unwrap_or(f64::NAN)
    };
    Ok(lambda * quadrature::integrate(f, 0.0, radius, quad_tol)?.value)
}

/// Optimal altitude-to-radius ratio, by bracket expansion and bisection
/// on the sign of the kernel slope.
pub fn optimal_altitude_ratio(env: &Environment, params: &AltitudeSearchParams) -> Result<f64> {
    env.validate()?;
    params.validate()?;
    let slope = |h: f64| altitude_kernel_slope(h, env, params.quadrature_tol);

    let mut lo = 0.0;
    let mut hi: f64 = 1.0_f64.min(params.altitude_cap);
    let slope_lo = slope(lo)?;
    if slope_lo == 0.0 {
        return Ok(0.0);
    }
    let mut slope_hi = slope(hi)?;
    while slope_hi * slope_lo >= 0.0 {
        if hi >= params.altitude_cap {
            return Err(Error::Bracket { cap: params.altitude_cap });
        }
        hi = (hi * params.bracket_scale).min(params.altitude_cap);
        slope_hi = slope(hi)?;
    }
    // Invariant: slope(lo) < 0 < slope(hi) (or the reverse for a maximum,
    // which the kernel never has here).
    let rising = slope_hi > 0.0;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (lo + hi);
        let s = slope(mid)?;
        if s.abs() < params.tolerance && hi - lo <= BRACKET_WIDTH * hi.max(1.0) {
            break;
        }
        if (s >= 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(mid)
}

/// Radius minimizing the static recall frequency, given the kernel value at
/// the optimal altitude ratio.
pub(crate) fn radius_from_kernel(lambda: f64, p_circuit: f64, snr: f64, unit_power: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("density {lambda} must be >= 0")));
    }
    if !(p_circuit >= 0.0) {
        return Err(Error::Domain(format!("circuit power {p_circuit} must be >= 0")));
    }
    if p_circuit == 0.0 {
        return Ok(0.0);
    }
    if lambda == 0.0 || snr == 0.0 {
        return Err(Error::ZeroDensity);
    }
    Ok((p_circuit / (lambda * snr * unit_power)).powf(0.25))
}

/// Optimal altitude ratio and kernel value for one environment and radio
/// configuration. Both depend on nothing else, so one model serves every
/// subregion and time slot of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementModel {
    pub env: Environment,
    pub radio: RadioConfig,
    pub altitude_ratio: f64,
    /// `P_tr,1` at the optimal ratio, W.
    pub unit_power: f64,
}

type CacheKey = [u64; 10];

fn cache_key(env: &Environment, radio: &RadioConfig) -> CacheKey {
    [
        env.a.to_bits(),
        env.b.to_bits(),
        env.eta_los.to_bits(),
        env.eta_nlos.to_bits(),
        radio.carrier_hz.to_bits(),
        radio.light_speed.to_bits(),
        radio.bandwidth_hz.to_bits(),
        radio.noise_density.to_bits(),
        radio.rate_bps.to_bits(),
        radio.bs_coverage_area.to_bits(),
    ]
}

type ModelCache = RwLock<Vec<(CacheKey, Arc<PlacementModel>)>>;

fn model_cache() -> &'static ModelCache {
    static CACHE: OnceLock<ModelCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

impl PlacementModel {
    pub fn new(env: Environment, radio: RadioConfig, params: &AltitudeSearchParams) -> Result<Self> {
        env.validate()?;
        radio.validate()?;
        let altitude_ratio = optimal_altitude_ratio(&env, params)?;
        let unit_power = normalized_tx_power(altitude_ratio, &env, &radio, params.quadrature_tol)?;
        Ok(PlacementModel {
            env,
            radio,
            altitude_ratio,
            unit_power,
        })
    }

    /// Shared model for `(env, radio)` with default search parameters,
    /// computed on first use.
    pub fn cached(env: &Environment, radio: &RadioConfig) -> Result<Arc<Self>> {
        let key = cache_key(env, radio);
        if let Some((_, m)) = model_cache()
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .iter()
            .find(|(k, _)| *k == key)
        {
            return Ok(Arc::clone(m));
        }
        let model = Arc::new(Self::new(env.clone(), radio.clone(), &AltitudeSearchParams::default())?);
        let mut cache = model_cache().write().unwrap_or_else(|e| e.into_inner());
        if let Some((_, m)) = cache.iter().find(|(k, _)| *k == key) {
            return Ok(Arc::clone(m));
        }
        cache.push((key, Arc::clone(&model)));
        Ok(model)
    }

    /// `(2^(C/W) - 1) * P_tr,1(h1*)`: transmit power per unit `lambda R^4`.
    pub fn power_coefficient(&self) -> f64 {
        self.radio.snr_factor() * self.unit_power
    }

    pub fn optimal_radius(&self, lambda: f64, p_circuit: f64) -> Result<f64> {
        radius_from_kernel(lambda, p_circuit, self.radio.snr_factor(), self.unit_power)
    }

    pub fn altitude_for(&self, radius: f64) -> f64 {
        radius * self.altitude_ratio
    }

    /// Transmit power at `radius` with altitude on the optimal ratio.
    pub fn tx_power_at(&self, radius: f64, lambda: f64) -> f64 {
        lambda * radius.powi(4) * self.power_coefficient()
    }

    /// Static recall frequency of a subregion of `area` covered with disks of
    /// `radius` flown at the optimal ratio, using the real-valued UAV count.
    pub fn static_rf_at(&self, radius: f64, lambda: f64, energy: &EnergyParams, area: f64) -> f64 {
        let count = area / (PI * radius * radius);
        count * (self.tx_power_at(radius, lambda) + energy.p_circuit) / energy.battery_j
    }

    /// Closed-form minimum of the static recall frequency.
    pub fn min_static_rf_value(&self, lambda: f64, energy: &EnergyParams, area: f64) -> f64 {
        2.0 * area / (PI * energy.battery_j) * (lambda * self.power_coefficient() * energy.p_circuit).sqrt()
    }

    pub fn min_static_rf(&self, lambda: f64, energy: &EnergyParams, area: f64) -> Result<(f64, SlotPlacement)> {
        if !(lambda > 0.0) {
            return Err(Error::ZeroDensity);
        }
        let radius = self.optimal_radius(lambda, energy.p_circuit)?;
        let value = self.min_static_rf_value(lambda, energy, area);
        let placement = SlotPlacement {
            radius,
            altitude: self.altitude_for(radius),
            tx_power: if radius > 0.0 { self.tx_power_at(radius, lambda) } else { 0.0 },
            static_rf: value,
        };
        Ok((value, placement))
    }
}

/// Radius minimizing the static recall frequency for density `lambda`.
pub fn optimal_radius(lambda: f64, p_circuit: f64, env: &Environment, radio: &RadioConfig) -> Result<f64> {
    PlacementModel::cached(env, radio)?.optimal_radius(lambda, p_circuit)
}

/// Static recall frequency of a subregion of `area` covered by disks of
/// `radius` at `altitude`: real-valued UAV count times per-UAV power over
/// the battery capacity.
#[allow(clippy::too_many_arguments)]
pub fn static_rf(
    radius: f64,
    lambda: f64,
    altitude: f64,
    energy: &EnergyParams,
    area: f64,
    env: &Environment,
    radio: &RadioConfig,
) -> Result<f64> {
    check_disk(radius, lambda, altitude)?;
    let model = PlacementModel::cached(env, radio)?;
    let on_ratio = (altitude - radius * model.altitude_ratio).abs() <= 1e-12 * altitude.max(radius);
    let p_tr = if on_ratio {
        model.tx_power_at(radius, lambda)
    } else {
        tx_power(radius, lambda, altitude, env, radio, QUAD_TOL)?
    };
    Ok(area / (PI * radius * radius) * (p_tr + energy.p_circuit) / energy.battery_j)
}

/// Minimal static recall frequency and the placement attaining it.
pub fn min_static_rf(
    lambda: f64,
    energy: &EnergyParams,
    area: f64,
    env: &Environment,
    radio: &RadioConfig,
) -> Result<(f64, SlotPlacement)> {
    PlacementModel::cached(env, radio)?.min_static_rf(lambda, energy, area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn kernel_closed_form_without_excess_spread() {
        let env = Environment::new("flat", 9.61, 0.16, 4.0, 4.0).unwrap();
        let radio = RadioConfig::default();
        for h1 in [0.0, 0.3, 1.0, 2.5] {
            let q = normalized_tx_power(h1, &env, &radio, QUAD_TOL).unwrap();
            let exact = radio.noise_power() * radio.fspl_factor() * 4.0 * 2.0 * PI * (0.25 + 0.5 * h1 * h1);
            assert!(rel(q, exact) < QUAD_TOL, "h1={h1}");
        }
    }

    #[test]
    fn kernel_high_altitude_asymptote() {
        let env = Environment::urban();
        let radio = RadioConfig::default();
        let h1 = 1e3;
        let q = normalized_tx_power(h1, &env, &radio, QUAD_TOL).unwrap();
        let asym = radio.noise_power() * radio.fspl_factor() * env.eta_los * PI * h1 * h1;
        assert!(rel(q, asym) < 1e-3);
    }

    #[test]
    fn kernel_is_unimodal_on_grid() {
        for env in Environment::presets() {
            let vals: Vec<f64> = (0..=50)
                .map(|i| altitude_kernel(0.1 * i as f64, &env, QUAD_TOL).unwrap())
                .collect();
            let argmin = vals
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            assert!(vals[..=argmin].windows(2).all(|w| w[1] < w[0]), "{}", env.name);
            assert!(vals[argmin..].windows(2).all(|w| w[1] > w[0]), "{}", env.name);
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        let env = Environment::dense_urban();
        for h1 in [0.0f64, 0.4, 1.1, 3.0] {
            let step = 1e-5;
            let lo = (h1 - step).max(0.0);
            let fd = (altitude_kernel(h1 + step, &env, 1e-12).unwrap() - altitude_kernel(lo, &env, 1e-12).unwrap())
                / (h1 + step - lo);
            let an = altitude_kernel_slope(h1, &env, 1e-10).unwrap();
            assert!((an - fd).abs() < 1e-4 * an.abs().max(1.0), "h1={h1}: {an} vs {fd}");
        }
    }

    #[test]
    fn zero_density_has_zero_power() {
        let env = Environment::urban();
        assert_eq!(tx_power(10.0, 0.0, 5.0, &env, &RadioConfig::default(), QUAD_TOL).unwrap(), 0.0);
    }

    #[test]
    fn fourth_power_scaling() {
        let env = Environment::suburban();
        let radio = RadioConfig::default();
        let a = tx_power(40.0, 0.3, 25.0, &env, &radio, QUAD_TOL).unwrap();
        let b = tx_power(80.0, 0.3, 50.0, &env, &radio, QUAD_TOL).unwrap();
        assert!(rel(b, 16.0 * a) < 1e-12);
    }

    #[test]
    fn scaled_and_direct_routes_agree() {
        let env = Environment::urban();
        let radio = RadioConfig::default();
        for (r, l, h) in [(100.0, 0.1, 90.0), (12.0, 3.0, 1.0), (500.0, 0.01, 800.0), (30.0, 1.0, 0.0)] {
            let scaled = tx_power(r, l, h, &env, &radio, QUAD_TOL).unwrap();
            let direct = tx_power_direct(r, l, h, &env, &radio, QUAD_TOL).unwrap();
            assert!(rel(scaled, direct) < 10.0 * QUAD_TOL, "{r} {l} {h}: {scaled} vs {direct}");
        }
    }

    #[test]
    fn altitude_ratio_matches_grid_and_orders_environments() {
        let p = AltitudeSearchParams::default();
        let urban = optimal_altitude_ratio(&Environment::urban(), &p).unwrap();
        let dense = optimal_altitude_ratio(&Environment::dense_urban(), &p).unwrap();
        let sub = optimal_altitude_ratio(&Environment::suburban(), &p).unwrap();
        // Grid minimizers (step 1e-4) from tools/oracles.py.
        assert!((urban - 0.8990).abs() < 2e-4, "{urban}");
        assert!((dense - 1.1448).abs() < 2e-4, "{dense}");
        assert!((sub - 0.4512).abs() < 2e-4, "{sub}");
        assert!(dense > urban && urban > sub);
        let s = altitude_kernel_slope(urban, &Environment::urban(), QUAD_TOL).unwrap();
        assert!(s.abs() < p.tolerance);
    }

    #[test]
    fn bracket_failure_is_reported() {
        let capped = AltitudeSearchParams { altitude_cap: 0.5, ..Default::default() };
        let err = optimal_altitude_ratio(&Environment::urban(), &capped);
        assert!(matches!(err, Err(Error::Bracket { cap }) if cap == 0.5), "{err:?}");
        assert!(AltitudeSearchParams { bracket_scale: 1.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn equal_losses_put_the_optimum_on_the_ground() {
        let env = Environment::new("flat", 9.61, 0.16, 4.0, 4.0).unwrap();
        assert_eq!(optimal_altitude_ratio(&env, &AltitudeSearchParams::default()).unwrap(), 0.0);
    }

    #[test]
    fn radius_scaling_laws() {
        let env = Environment::urban();
        let radio = RadioConfig::default();
        let r1 = optimal_radius(0.1, 0.5, &env, &radio).unwrap();
        let r2 = optimal_radius(0.1, 5.0, &env, &radio).unwrap();
        let r3 = optimal_radius(1.0, 0.5, &env, &radio).unwrap();
        assert!(rel(r2 / r1, 10f64.powf(0.25)) < 1e-12);
        assert!(rel(r1 / r3, 10f64.powf(0.25)) < 1e-12);
        assert_eq!(optimal_radius(0.1, 0.0, &env, &radio).unwrap(), 0.0);
        assert!(matches!(optimal_radius(0.0, 0.5, &env, &radio), Err(Error::ZeroDensity)));
    }

    #[test]
    fn circuit_power_equals_transmit_power_at_optimum() {
        let env = Environment::dense_urban();
        let radio = RadioConfig::default();
        let model = PlacementModel::cached(&env, &radio).unwrap();
        let r = model.optimal_radius(0.7, 2.0).unwrap();
        let p = tx_power(r, 0.7, r * model.altitude_ratio, &env, &radio, QUAD_TOL).unwrap();
        assert!(rel(p, 2.0) < 1e-3);
    }

    #[test]
    fn static_rf_minimum() {
        let env = Environment::urban();
        let radio = RadioConfig::default();
        let energy = EnergyParams {
            p_circuit: 0.5,
            battery_j: 1.0 / PI,
            ..EnergyParams::default()
        };
        let (best, placement) = min_static_rf(0.1, &energy, 1.0, &env, &radio).unwrap();
        // Joint (R, h) brute-force minimum from tools/oracles.py.
        assert!(rel(best, 0.0007537494452491968) < 1e-6, "{best}");
        let assembled = static_rf(placement.radius, 0.1, placement.altitude, &energy, 1.0, &env, &radio).unwrap();
        assert!(rel(assembled, best) < 1e-6);
        // Off-ratio altitude goes through quadrature and must not beat the optimum.
        let off = static_rf(placement.radius, 0.1, 0.5 * placement.altitude, &energy, 1.0, &env, &radio).unwrap();
        assert!(off > best);
        for f in [0.5, 2.0] {
            let r = f * placement.radius;
            let v = static_rf(r, 0.1, r * PlacementModel::cached(&env, &radio).unwrap().altitude_ratio, &energy, 1.0, &env, &radio).unwrap();
            assert!(v > best);
        }
        assert!(matches!(min_static_rf(0.0, &energy, 1.0, &env, &radio), Err(Error::ZeroDensity)));
    }

    #[test]
    fn min_static_rf_square_root_laws() {
        let model = PlacementModel::cached(&Environment::suburban(), &RadioConfig::default()).unwrap();
        let e1 = EnergyParams::default();
        let e2 = EnergyParams { p_circuit: 2.0 * e1.p_circuit, ..e1.clone() };
        let a = model.min_static_rf_value(0.2, &e1, 1e5);
        assert!(rel(model.min_static_rf_value(0.2, &e2, 1e5), a * 2f64.sqrt()) < 1e-14);
        assert!(rel(model.min_static_rf_value(0.8, &e1, 1e5), 2.0 * a) < 1e-14);
    }

    #[test]
    fn energy_params_validation() {
        assert!(EnergyParams::default().validate().is_ok());
        assert!(EnergyParams { v_ascend: 0.0, ..Default::default() }.validate().is_err());
        assert!(EnergyParams { p_descend: -1.0, ..Default::default() }.validate().is_err());
    }
}
