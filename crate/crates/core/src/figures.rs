//! Experiment runners producing plot-ready CSV.
//!
//! Every runner is a pure function of the scenario; Monte-Carlo draws use
//! the scenario seed. Columns of each artifact:
//!
//! | artifact | columns |
//! |---|---|
//! | `fig4.csv` | `environment,altitude,max_radius,is_optimal` |
//! | `fig5.csv` | `p_circuit,radius,static_rf,is_optimal` |
//! | `fig6.csv` | `tau_seconds,subregion,lambda,radius,altitude,count` |
//! | `fig7.csv` | `p_mobility,tau_seconds,subregion,radius,updated` |
//! | `fig8.csv` | `p_mobility,method,avg_dynamic_rf,updates,mobility_joules,reduction_vs_worst` |
//! | `fig9.csv` | `start_hours,method,avg_dynamic_rf,updates` |
//! | `fig10_increment.csv` | `lambda,stddev,xi,measured,predicted,relative_error` |
//! | `fig10_sampling.csv` | `dphi_max,allocation,subregion,lambda,eigenvalue,n_samples,xi_bound` |
//!
//! `is_optimal` rows carry the analytic optimum of the sweep.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{Environment, RadioConfig};
use crate::csv::fmt_f64;
use crate::error::{Error, Result};
use crate::placement::{tx_power, PlacementModel, QUAD_TOL};
use crate::sampling::{
    min_sampling_numbers, optimal_sampling_numbers, rf_increment_monte_carlo, subregion_eigenvalue,
    LearningBudget,
};
use crate::scenario::Scenario;
use crate::scheduler::{baseline_schedule, run_schedule, Method, PlanningProblem, Schedule};

/// Fixed transmit power of the altitude/radius trade-off sweep, W.
pub const FIG4_POWER: f64 = 5.0;
/// User density of the altitude/radius sweep, users/m^2.
pub const FIG4_DENSITY: f64 = 1e-5;
/// Density of the static recall-frequency sweep, users/m^2.
pub const FIG5_DENSITY: f64 = 0.1;
pub const CIRCUIT_POWERS: [f64; 3] = [0.5, 5.0, 50.0];
pub const MOBILITY_POWERS: [f64; 3] = [0.05, 1.5, 50.0];
/// Monte-Carlo draws per point of the prediction-error experiment.
pub const FIG10_DRAWS: usize = 200_000;
pub const FIG10_DENSITIES: [f64; 2] = [3.0, 10.0];
/// Standard deviations as fractions of the true density.
pub const FIG10_STDDEV_FRACTIONS: [f64; 6] = [0.005, 0.01, 0.02, 0.05, 0.1, 0.2];
/// Hypothesis-space volume and confidence of the sampling sweep.
pub const FIG10_VOLUME: f64 = 1000.0;
pub const FIG10_DELTA: f64 = 0.05;
/// Budgets of the sampling sweep as fractions of the mean optimal static
/// recall frequency.
pub const FIG10_BUDGET_FRACTIONS: [f64; 5] = [0.01, 0.02, 0.05, 0.1, 0.2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::Fig9,
        Figure::Fig10,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid("figure", format!("unknown figure '{s}' (expected fig4..fig10)")))
    }
}

/// A named CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub csv: String,
}

impl Artifact {
    fn new(name: &str, csv: String) -> Self {
        Artifact {
            name: name.to_string(),
            csv,
        }
    }
}

pub fn run_figure(scenario: &Scenario, which: Figure) -> Result<Vec<Artifact>> {
    scenario.validate()?;
    Ok(match which {
        Figure::Fig4 => vec![Artifact::new("fig4.csv", fig4(&scenario.radio)?)],
        Figure::Fig5 => vec![Artifact::new("fig5.csv", fig5(scenario)?)],
        Figure::Fig6 => vec![Artifact::new("fig6.csv", fig6(scenario)?)],
        Figure::Fig7 => vec![Artifact::new("fig7.csv", fig7(scenario)?)],
        Figure::Fig8 => vec![Artifact::new("fig8.csv", fig8(scenario)?)],
        Figure::Fig9 => vec![Artifact::new("fig9.csv", fig9(scenario)?)],
        Figure::Fig10 => vec![
            Artifact::new("fig10_increment.csv", fig10_increment(scenario, FIG10_DRAWS)?),
            Artifact::new("fig10_sampling.csv", fig10_sampling(scenario)?),
        ],
    })
}

/// Largest radius one UAV at `altitude` can serve with transmit power
/// `power`, found by bisection in log-radius.
pub fn max_radius_at_altitude(
    altitude: f64,
    power: f64,
    lambda: f64,
    env: &Environment,
    radio: &RadioConfig,
) -> Result<f64> {
    if !(power > 0.0 && lambda > 0.0) {
        return Err(Error::Domain(format!("power {power} and density {lambda} must be positive")));
    }
    let p = |r: f64| tx_power(r, lambda, altitude, env, radio, QUAD_TOL);
    let (mut lo, mut hi) = (1e-3_f64, 1.0_f64);
    while p(hi)? < power {
        lo = hi;
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Bracket { cap: hi });
        }
    }
    if p(lo)? >= power {
        return Ok(0.0);
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if p(mid)? < power {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-10 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Radius reachable at the optimal altitude ratio for a fixed power.
pub fn max_radius_at_optimum(power: f64, lambda: f64, model: &PlacementModel) -> f64 {
    (power / (lambda * model.power_coefficient())).powf(0.25)
}

fn fig4(radio: &RadioConfig) -> Result<String> {
    let mut s = String::from("environment,altitude,max_radius,is_optimal\n");
    for env in Environment::presets() {
        let model = PlacementModel::cached(&env, radio)?;
        let rows: Vec<(f64, f64)> = (1..=150)
            .into_par_iter()
            .map(|i| {
                let h = 10.0 * i as f64;
                max_radius_at_altitude(h, FIG4_POWER, FIG4_DENSITY, &env, radio).map(|r| (h, r))
            })
            .collect::<Result<_>>()?;
        for (h, r) in rows {
            let _ = writeln!(s, "{},{},{},0", env.name, fmt_f64(h), fmt_f64(r));
        }
        let r = max_radius_at_optimum(FIG4_POWER, FIG4_DENSITY, &model);
        let _ = writeln!(s, "{},{},{},1", env.name, fmt_f64(model.altitude_for(r)), fmt_f64(r));
    }
    Ok(s)
}

fn fig5(scenario: &Scenario) -> Result<String> {
    let model = scenario.model()?;
    let area = scenario.subregions[0].area();
    let mut s = String::from("p_circuit,radius,static_rf,is_optimal\n");
    for p_cu in CIRCUIT_POWERS {
        let mut energy = scenario.energy.clone();
        energy.p_circuit = p_cu;
        for i in 0..=100 {
            // 10 m to 2 km, log-spaced.
            let r = 10.0 * 200f64.powf(i as f64 / 100.0);
            let rf = model.static_rf_at(r, FIG5_DENSITY, &energy, area);
            let _ = writeln!(s, "{},{},{},0", fmt_f64(p_cu), fmt_f64(r), fmt_f64(rf));
        }
        let (rf, place) = model.min_static_rf(FIG5_DENSITY, &energy, area)?;
        let _ = writeln!(s, "{},{},{},1", fmt_f64(p_cu), fmt_f64(place.radius), fmt_f64(rf));
    }
    Ok(s)
}

fn fig6(scenario: &Scenario) -> Result<String> {
    let problem = scenario.planning_problem()?;
    let mut s = String::from("tau_seconds,subregion,lambda,radius,altitude,count\n");
    for t in 0..problem.n_slots() {
        let dep = problem.deployment_at(t);
        for (region, d) in problem.regions.iter().zip(&dep.subregions) {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                fmt_f64(t as f64 * problem.slot_seconds),
                d.label,
                fmt_f64(region.densities[t]),
                fmt_f64(d.radius),
                fmt_f64(d.altitude),
                d.count()
            );
        }
    }
    Ok(s)
}

fn problem_with_mobility(scenario: &Scenario, p_mobility: f64, start: f64) -> Result<PlanningProblem> {
    let energy = scenario.energy.clone().with_mobility_power(p_mobility);
    scenario.planning_problem_with(&energy, start, scenario.n_slots())
}

fn fig7(scenario: &Scenario) -> Result<String> {
    let mut s = String::from("p_mobility,tau_seconds,subregion,radius,updated\n");
    for pm in MOBILITY_POWERS {
        let problem = problem_with_mobility(scenario, pm, scenario.start_seconds)?;
        let schedule = run_schedule(&problem, Method::Smgd, scenario.objective)?;
        let mut next = 0;
        for t in 0..problem.n_slots() {
            let updated = next < schedule.epochs.len() && schedule.epochs[next].slot == t;
            if updated {
                next += 1;
            }
            let epoch = &schedule.epochs[next - 1];
            for d in &epoch.deployment.subregions {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    fmt_f64(pm),
                    fmt_f64(t as f64 * problem.slot_seconds),
                    d.label,
                    fmt_f64(d.radius),
                    u8::from(updated && t > 0)
                );
            }
        }
    }
    Ok(s)
}

/// The three schedulers on one problem, in the order S-MGD, Lazy, Diligent.
pub fn compare_methods(problem: &PlanningProblem, scenario: &Scenario) -> Result<[Schedule; 3]> {
    Ok([
        run_schedule(problem, Method::Smgd, scenario.objective)?,
        baseline_schedule(problem, Method::Lazy)?,
        baseline_schedule(problem, Method::Diligent)?,
    ])
}

fn fig8(scenario: &Scenario) -> Result<String> {
    let mut s = String::from("p_mobility,method,avg_dynamic_rf,updates,mobility_joules,reduction_vs_worst\n");
    for pm in MOBILITY_POWERS {
        let problem = problem_with_mobility(scenario, pm, scenario.start_seconds)?;
        let schedules = compare_methods(&problem, scenario)?;
        let worst = schedules.iter().map(|x| x.avg_dynamic_rf).fold(f64::MIN, f64::max);
        for sch in &schedules {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                fmt_f64(pm),
                sch.method.name(),
                fmt_f64(sch.avg_dynamic_rf),
                sch.update_count(),
                fmt_f64(sch.total_mobility_joules()),
                fmt_f64(1.0 - sch.avg_dynamic_rf / worst)
            );
        }
    }
    Ok(s)
}

fn fig9(scenario: &Scenario) -> Result<String> {
    let rows: Vec<String> = (0..12)
        .into_par_iter()
        .map(|i| {
            let start_hours = 2.0 * i as f64;
            let problem = scenario.planning_problem_with(&scenario.energy, start_hours * 3600.0, scenario.n_slots())?;
            let mut out = String::new();
            for sch in [
                baseline_schedule(&problem, Method::Lazy)?,
                run_schedule(&problem, Method::Smgd, scenario.objective)?,
            ] {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_f64(start_hours),
                    sch.method.name(),
                    fmt_f64(sch.avg_dynamic_rf),
                    sch.update_count()
                );
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(format!("start_hours,method,avg_dynamic_rf,updates\n{}", rows.concat()))
}

/// Prediction-error experiment with the given number of draws per point.
pub fn fig10_increment(scenario: &Scenario, draws: usize) -> Result<String> {
    let model = scenario.model()?;
    let area = scenario.subregions[0].area();
    let mut s = String::from("lambda,stddev,xi,measured,predicted,relative_error\n");
    for (i, lambda) in FIG10_DENSITIES.into_iter().enumerate() {
        let stddevs: Vec<f64> = FIG10_STDDEV_FRACTIONS.iter().map(|f| f * lambda).collect();
        let points = rf_increment_monte_carlo(
            &model,
            lambda,
            &scenario.energy,
            area,
            &stddevs,
            0.0,
            draws,
            scenario.seed.wrapping_add(i as u64),
        )?;
        for p in points {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                fmt_f64(lambda),
                fmt_f64(p.stddev),
                fmt_f64(p.xi),
                fmt_f64(p.measured),
                fmt_f64(p.predicted),
                fmt_f64((p.measured - p.predicted) / p.predicted)
            );
        }
    }
    Ok(s)
}

/// Mean planning density of each subregion over the scenario horizon.
pub fn mean_densities(problem: &PlanningProblem) -> Vec<f64> {
    problem
        .regions
        .iter()
        .map(|r| r.densities.iter().sum::<f64>() / r.densities.len() as f64)
        .collect()
}

fn fig10_sampling(scenario: &Scenario) -> Result<String> {
    let problem = scenario.planning_problem()?;
    let model = scenario.model()?;
    let lambdas = mean_densities(&problem);
    let eigen: Vec<f64> = lambdas
        .iter()
        .zip(&scenario.subregions)
        .map(|(l, sub)| subregion_eigenvalue(*l, &scenario.energy, sub.area(), &model))
        .collect::<Result<_>>()?;
    let mean_rf: f64 = (0..problem.n_slots()).map(|t| problem.optimal_static_rf(t)).sum::<f64>()
        / problem.n_slots() as f64;
    let mut s = String::from("dphi_max,allocation,subregion,lambda,eigenvalue,n_samples,xi_bound\n");
    for frac in FIG10_BUDGET_FRACTIONS {
        let budget = LearningBudget {
            hypothesis_volume: FIG10_VOLUME,
            confidence_delta: FIG10_DELTA,
            max_training_error: 0.0,
            max_rf_increment: frac * mean_rf,
        };
        for (name, plan) in [
            ("literal", min_sampling_numbers(&eigen, &budget)?),
            ("optimal", optimal_sampling_numbers(&eigen, &budget)?),
        ] {
            for (b, sub) in scenario.subregions.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    fmt_f64(budget.max_rf_increment),
                    name,
                    sub.label,
                    fmt_f64(lambdas[b]),
                    fmt_f64(eigen[b]),
                    fmt_f64(plan.n_samples[b]),
                    fmt_f64(plan.xi_bounds[b])
                );
            }
        }
    }
    Ok(s)
}
