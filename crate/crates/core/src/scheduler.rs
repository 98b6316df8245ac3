//! Multi-slot placement updating.
//!
//! Density is piecewise constant over slots of length `mu`. A schedule is a
//! set of update epochs; at each epoch every subregion switches to the
//! optimal deployment for the density of that slot and keeps it until the
//! next epoch. Between epochs the static recall frequency is evaluated with
//! the stale radius against the current density; at an epoch the fleet
//! moves, and the minimal mobility energy comes from an assignment between
//! the old and new position sets padded with depot copies.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::assignment::{solve_assignment, Assignment, CostMatrix};
use crate::channel::RadioConfig;
use crate::csv::fmt_f64;
use crate::density::Subregion;
use crate::error::{Error, Result};
use crate::layout::{pad_with_rsc, Deployment, Point3, Rect, SubregionDeployment};
use crate::placement::{EnergyParams, PlacementModel};

/// Energy for one UAV to fly from `from` to `to` at constant speeds.
pub fn move_energy(from: &Point3, to: &Point3, energy: &EnergyParams) -> f64 {
    let horizontal = energy.p_horizontal * from.horizontal_distance(to) / energy.v_horizontal;
    let dz = to.z - from.z;
    let vertical = if dz >= 0.0 {
        energy.p_ascend * dz / energy.v_ascend
    } else {
        energy.p_descend * (-dz) / energy.v_descend
    };
    horizontal + vertical
}

/// Matrix of [`move_energy`] from every origin to every destination.
pub fn cost_matrix(origins: &[Point3], destinations: &[Point3], energy: &EnergyParams) -> Result<CostMatrix> {
    if origins.len() != destinations.len() {
        return Err(Error::LengthMismatch(origins.len(), destinations.len()));
    }
    CostMatrix::from_fn(origins.len(), |i, j| move_energy(&origins[i], &destinations[j], energy))
}

/// Minimal energy to move the fleet from `prev` to `next`, with depot
/// launches and recalls balancing the fleet size.
pub fn mobility_energy_at(prev: &Deployment, next: &Deployment, energy: &EnergyParams) -> Result<(f64, Assignment)> {
    if prev.rsc != next.rsc {
        return Err(Error::invalid("deployment pair", "depot positions differ"));
    }
    let (from, to) = pad_with_rsc(&prev.positions(), &next.positions(), prev.rsc);
    let cost = cost_matrix(&from, &to, energy)?;
    let a = solve_assignment(&cost);
    Ok((a.total_energy, a))
}

/// Greedy objective used to pick the next update epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmgdObjective {
    /// Interval average of the static recall frequency in excess of the
    /// per-slot optimum, plus the amortized mobility cost.
    #[default]
    Excess,
    /// Interval average of the full dynamic recall frequency.
    Absolute,
}

impl std::str::FromStr for SmgdObjective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "excess" => Ok(SmgdObjective::Excess),
            "absolute" => Ok(SmgdObjective::Absolute),
            _ => Err(Error::invalid("objective", format!("unknown objective '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Smgd,
    Lazy,
    Diligent,
    /// Exact minimum over all epoch sets, for reference.
    Optimal,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Smgd => "smgd",
            Method::Lazy => "lazy",
            Method::Diligent => "diligent",
            Method::Optimal => "optimal",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smgd" => Ok(Method::Smgd),
            "lazy" => Ok(Method::Lazy),
            "diligent" => Ok(Method::Diligent),
            "optimal" => Ok(Method::Optimal),
            _ => Err(Error::invalid("method", format!("unknown method '{s}'"))),
        }
    }
}

/// One subregion as seen by the planner.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanningRegion {
    pub label: String,
    pub rect: Rect,
    /// Planning density of each slot, users/m^2.
    pub densities: Vec<f64>,
}

/// Everything the schedulers need: per-slot densities, placement model,
/// energy parameters and depot.
#[derive(Debug, Clone)]
pub struct PlanningProblem {
    pub regions: Vec<PlanningRegion>,
    pub model: Arc<PlacementModel>,
    pub energy: EnergyParams,
    pub rsc: Point3,
    pub slot_seconds: f64,
    pub start_seconds: f64,
    /// Charge the launch of the initial fleet from the depot.
    pub include_initial_launch: bool,
    /// Slot -> index of the first slot with the same density vector.
    canonical: Vec<usize>,
    radii: Vec<Vec<f64>>,
    deployments: HashMap<usize, Deployment>,
}

impl PlanningProblem {
    pub fn new(
        regions: Vec<PlanningRegion>,
        model: Arc<PlacementModel>,
        energy: EnergyParams,
        rsc: Point3,
        slot_seconds: f64,
    ) -> Result<Self> {
        energy.validate()?;
        if !(energy.p_circuit > 0.0) {
            return Err(Error::invalid("planning problem", "circuit power must be positive"));
        }
        if !(slot_seconds > 0.0 && slot_seconds.is_finite()) {
            return Err(Error::invalid("planning problem", "slot length must be positive"));
        }
        let n = regions.first().map_or(0, |r| r.densities.len());
        if n == 0 || regions.iter().any(|r| r.densities.len() != n) {
            return Err(Error::invalid("planning problem", "every region needs the same nonzero number of slots"));
        }
        for r in &regions {
            r.rect.validate()?;
            if let Some(l) = r.densities.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
                return Err(Error::invalid(
                    "planning problem",
                    format!("region '{}' has non-positive density {l}", r.label),
                ));
            }
        }
        let mut first_seen: HashMap<Vec<u64>, usize> = HashMap::new();
        let canonical: Vec<usize> = (0..n)
            .map(|t| {
                let key: Vec<u64> = regions.iter().map(|r| r.densities[t].to_bits()).collect();
                *first_seen.entry(key).or_insert(t)
            })
            .collect();
        let radii = (0..n)
            .map(|t| {
                regions
                    .iter()
                    .map(|r| model.optimal_radius(r.densities[t], energy.p_circuit))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut problem = PlanningProblem {
            regions,
            model,
            energy,
            rsc,
            slot_seconds,
            start_seconds: 0.0,
            include_initial_launch: false,
            canonical,
            radii,
            deployments: HashMap::new(),
        };
        let mut reps: Vec<usize> = problem.canonical.clone();
        reps.sort_unstable();
        reps.dedup();
        for t in reps {
            let d = problem.build_deployment(&problem.radii[t]);
            problem.deployments.insert(t, d);
        }
        Ok(problem)
    }

    /// Planning problem over `slots` slots of the given subregions, starting
    /// at `start_seconds`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_subregions(
        subregions: &[Subregion],
        radio: &RadioConfig,
        model: Arc<PlacementModel>,
        energy: EnergyParams,
        rsc: Point3,
        start_seconds: f64,
        slot_seconds: f64,
        slots: usize,
    ) -> Result<Self> {
        let regions = subregions
            .iter()
            .map(|s| PlanningRegion {
                label: s.label.clone(),
                rect: s.rect,
                densities: s.planning_series(start_seconds, slot_seconds, slots, radio),
            })
            .collect();
        let mut p = Self::new(regions, model, energy, rsc, slot_seconds)?;
        p.start_seconds = start_seconds;
        Ok(p)
    }

    pub fn n_slots(&self) -> usize {
        self.canonical.len()
    }

    pub fn horizon_seconds(&self) -> f64 {
        self.n_slots() as f64 * self.slot_seconds
    }

    /// Optimal radius of every region for the density of `slot`.
    pub fn optimal_radii(&self, slot: usize) -> &[f64] {
        &self.radii[slot]
    }

    /// True when the optimal deployments of the two slots coincide.
    pub fn same_deployment(&self, a: usize, b: usize) -> bool {
        self.canonical[a] == self.canonical[b]
    }

    fn build_deployment(&self, radii: &[f64]) -> Deployment {
        Deployment {
            subregions: self
                .regions
                .iter()
                .zip(radii)
                .map(|(r, &radius)| {
                    SubregionDeployment::new(r.label.clone(), &r.rect, radius, self.model.altitude_for(radius))
                })
                .collect(),
            rsc: self.rsc,
        }
    }

    /// Optimal deployment for the density of `slot`.
    pub fn deployment_at(&self, slot: usize) -> &Deployment {
        &self.deployments[&self.canonical[slot]]
    }

    /// Static recall frequency summed over regions at `slot` with the given
    /// per-region radii held.
    pub fn static_rf_with(&self, radii: &[f64], slot: usize) -> f64 {
        self.regions
            .iter()
            .zip(radii)
            .map(|(r, &radius)| self.model.static_rf_at(radius, r.densities[slot], &self.energy, r.rect.area()))
            .sum()
    }

    /// Static recall frequency at `slot` with the deployment installed at `installed`.
    pub fn static_rf(&self, installed: usize, slot: usize) -> f64 {
        self.static_rf_with(&self.radii[installed], slot)
    }

    pub fn optimal_static_rf(&self, slot: usize) -> f64 {
        self.static_rf(slot, slot)
    }

    /// Energy of launching the initial fleet from the depot.
    pub fn initial_launch_energy(&self) -> Result<f64> {
        let empty = Deployment {
            subregions: Vec::new(),
            rsc: self.rsc,
        };
        Ok(mobility_energy_at(&empty, self.deployment_at(0), &self.energy)?.0)
    }
}

/// Average dynamic recall frequency over slots `[start, end)` when the
/// per-region `radii` are held, the fleet then spending
/// `mobility_at_end` joules to move at `end`.
pub fn interval_avg_rf(problem: &PlanningProblem, radii: &[f64], start: usize, end: usize, mobility_at_end: f64) -> f64 {
    let mu = problem.slot_seconds;
    let integral: f64 = (start..end).map(|t| problem.static_rf_with(radii, t) * mu).sum();
    (integral + mobility_at_end / problem.energy.battery_j) / ((end - start) as f64 * mu)
}

/// Minimal move energy between the optimal deployments of two slots, cached.
struct MobilityCache<'a> {
    problem: &'a PlanningProblem,
    cache: HashMap<(usize, usize), f64>,
}

impl<'a> MobilityCache<'a> {
    fn new(problem: &'a PlanningProblem) -> Self {
        MobilityCache {
            problem,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, from: usize, to: usize) -> Result<f64> {
        let key = (self.problem.canonical[from], self.problem.canonical[to]);
        if key.0 == key.1 {
            return Ok(0.0);
        }
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let (v, _) = mobility_energy_at(
            self.problem.deployment_at(from),
            self.problem.deployment_at(to),
            &self.problem.energy,
        )?;
        self.cache.insert(key, v);
        Ok(v)
    }
}

/// One update epoch of a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    pub slot: usize,
    /// Seconds since the start of the horizon.
    pub tau_seconds: f64,
    pub deployment: Deployment,
    /// Energy spent moving into this deployment, J.
    pub mobility_joules: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub method: Method,
    pub epochs: Vec<Epoch>,
    /// Average dynamic recall frequency over the horizon, 1/s.
    pub avg_dynamic_rf: f64,
    /// Candidate intervals evaluated while building the schedule.
    pub candidate_evaluations: usize,
}

impl Schedule {
    /// Number of updates after the initial deployment.
    pub fn update_count(&self) -> usize {
        self.epochs.len().saturating_sub(1)
    }

    pub fn epoch_slots(&self) -> Vec<usize> {
        self.epochs.iter().map(|e| e.slot).collect()
    }

    pub fn total_mobility_joules(&self) -> f64 {
        self.epochs.iter().map(|e| e.mobility_joules).sum()
    }

    pub const CSV_HEADER: &'static str = "tau_seconds,subregion,radius,altitude,count,mobility_joules";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for e in &self.epochs {
            for d in &e.deployment.subregions {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    fmt_f64(e.tau_seconds),
                    d.label,
                    fmt_f64(d.radius),
                    fmt_f64(d.altitude),
                    d.count(),
                    fmt_f64(e.mobility_joules)
                );
            }
        }
        s
    }
}

/// Average dynamic recall frequency over the horizon for updates at the
/// given slots (slot 0 is always the initial deployment).
pub fn dynamic_rf_for_epochs(problem: &PlanningProblem, slots: &[usize]) -> Result<f64> {
    let mut mob = MobilityCache::new(problem);
    evaluate_epochs(problem, &normalize_epochs(problem, slots)?, &mut mob).map(|(v, _)| v)
}

fn normalize_epochs(problem: &PlanningProblem, slots: &[usize]) -> Result<Vec<usize>> {
    let n = problem.n_slots();
    let mut epochs = vec![0];
    for &s in slots {
        if s >= n {
            return Err(Error::invalid("schedule", format!("epoch slot {s} beyond horizon of {n} slots")));
        }
        if s != 0 {
            epochs.push(s);
        }
    }
    epochs.sort_unstable();
    epochs.dedup();
    Ok(epochs)
}

fn evaluate_epochs(problem: &PlanningProblem, epochs: &[usize], mob: &mut MobilityCache) -> Result<(f64, Vec<f64>)> {
    let n = problem.n_slots();
    let mu = problem.slot_seconds;
    let mut total = 0.0;
    let mut moves = Vec::with_capacity(epochs.len());
    moves.push(if problem.include_initial_launch {
        problem.initial_launch_energy()?
    } else {
        0.0
    });
    for (i, &a) in epochs.iter().enumerate() {
        let b = epochs.get(i + 1).copied().unwrap_or(n);
        total += (a..b).map(|t| problem.static_rf(a, t) * mu).sum::<f64>();
        if b < n {
            moves.push(mob.get(a, b)?);
        }
    }
    total += moves.iter().sum::<f64>() / problem.energy.battery_j;
    Ok((total / problem.horizon_seconds(), moves))
}

fn assemble(problem: &PlanningProblem, method: Method, epochs: Vec<usize>, evaluations: usize, mob: &mut MobilityCache) -> Result<Schedule> {
    let (avg, moves) = evaluate_epochs(problem, &epochs, mob)?;
    let epochs = epochs
        .iter()
        .zip(moves)
        .map(|(&slot, mobility_joules)| Epoch {
            slot,
            tau_seconds: slot as f64 * problem.slot_seconds,
            deployment: problem.deployment_at(slot).clone(),
            mobility_joules,
        })
        .collect();
    Ok(Schedule {
        method,
        epochs,
        avg_dynamic_rf: avg,
        candidate_evaluations: evaluations,
    })
}

/// Lazy holds the initial deployment; Diligent re-optimizes at every slot
/// whose density differs from the previous one.
pub fn baseline_schedule(problem: &PlanningProblem, method: Method) -> Result<Schedule> {
    let epochs = match method {
        Method::Lazy => vec![0],
        Method::Diligent => (0..problem.n_slots())
            .filter(|&t| t == 0 || !problem.same_deployment(t - 1, t))
            .collect(),
        Method::Smgd => return smgd_schedule(problem, SmgdObjective::default()),
        Method::Optimal => return optimal_schedule(problem),
    };
    let mut mob = MobilityCache::new(problem);
    assemble(problem, method, epochs, 0, &mut mob)
}

pub fn run_schedule(problem: &PlanningProblem, method: Method, objective: SmgdObjective) -> Result<Schedule> {
    match method {
        Method::Smgd => smgd_schedule(problem, objective),
        Method::Optimal => optimal_schedule(problem),
        other => baseline_schedule(problem, other),
    }
}

/// Candidate next epochs after an update at `start`: every later slot whose
/// optimal deployment differs from the held one, then the horizon end.
fn candidates(problem: &PlanningProblem, start: usize) -> Vec<usize> {
    let n = problem.n_slots();
    (start + 1..n)
        .filter(|&b| !problem.same_deployment(start, b))
        .chain(std::iter::once(n))
        .collect()
}

/// Static part of the greedy objective for each candidate, averaged over
/// the candidate interval.
fn static_parts(problem: &PlanningProblem, start: usize, cands: &[usize], objective: SmgdObjective) -> Vec<f64> {
    let mu = problem.slot_seconds;
    let mut out = Vec::with_capacity(cands.len());
    let mut acc = 0.0;
    let mut t = start;
    for &b in cands {
        while t < b {
            let held = problem.static_rf(start, t);
            acc += match objective {
                SmgdObjective::Absolute => held,
                SmgdObjective::Excess => held - problem.optimal_static_rf(t),
            } * mu;
            t += 1;
        }
        out.push(acc / ((b - start) as f64 * mu));
    }
    out
}

fn objective_value(problem: &PlanningProblem, start: usize, b: usize, static_part: f64, mob: &mut MobilityCache) -> Result<f64> {
    if b >= problem.n_slots() {
        return Ok(static_part);
    }
    let omega = mob.get(start, b)?;
    Ok(static_part + omega / problem.energy.battery_j / ((b - start) as f64 * problem.slot_seconds))
}

/// Greedy epoch selection: from the current epoch, pick the candidate
/// next epoch minimizing the interval-averaged objective; the horizon end
/// candidate means no further update. Ties go to the earliest slot.
pub fn smgd_schedule(problem: &PlanningProblem, objective: SmgdObjective) -> Result<Schedule> {
    let n = problem.n_slots();
    let mut mob = MobilityCache::new(problem);
    let mut epochs = vec![0];
    let mut evaluations = 0usize;
    let mut start = 0;
    loop {
        let cands = candidates(problem, start);
        let lower = static_parts(problem, start, &cands, objective);
        // Mobility energy is nonnegative, so the static part bounds each
        // candidate from below; visit candidates in bound order.
        let mut order: Vec<usize> = (0..cands.len()).collect();
        order.sort_by(|&i, &j| lower[i].total_cmp(&lower[j]).then(cands[i].cmp(&cands[j])));
        let mut best = (f64::INFINITY, usize::MAX);
        for i in order {
            let (lb, b) = (lower[i], cands[i]);
            if lb > best.0 || (lb == best.0 && b > best.1) {
                break;
            }
            evaluations += 1;
            let v = objective_value(problem, start, b, lb, &mut mob)?;
            if v < best.0 || (v == best.0 && b < best.1) {
                best = (v, b);
            }
        }
        if best.1 >= n {
            break;
        }
        epochs.push(best.1);
        start = best.1;
    }
    debug_assert!(evaluations <= n * (n + 1) / 2);
    assemble(problem, Method::Smgd, epochs, evaluations, &mut mob)
}

/// Minimum of the horizon-average recall frequency over every epoch set.
///
/// The total cost is a sum over intervals, each depending only on its two
/// endpoints, so the optimum is a shortest path over slots.
pub fn optimal_schedule(problem: &PlanningProblem) -> Result<Schedule> {
    let n = problem.n_slots();
    let mu = problem.slot_seconds;
    let mut mob = MobilityCache::new(problem);
    let mut best = vec![f64::INFINITY; n + 1];
    let mut prev = vec![usize::MAX; n + 1];
    best[0] = 0.0;
    let mut evaluations = 0;
    for a in 0..n {
        if !best[a].is_finite() {
            continue;
        }
        let mut integral = 0.0;
        let mut t = a;
        for b in candidates(problem, a) {
            while t < b {
                integral += problem.static_rf(a, t) * mu;
                t += 1;
            }
            let omega = if b < n { mob.get(a, b)? } else { 0.0 };
            evaluations += 1;
            let v = best[a] + integral + omega / problem.energy.battery_j;
            if v < best[b] {
                best[b] = v;
                prev[b] = a;
            }
        }
    }
    let mut epochs = Vec::new();
    let mut at = prev[n];
    while at != usize::MAX {
        epochs.push(at);
        at = prev[at];
    }
    epochs.reverse();
    assemble(problem, Method::Optimal, epochs, evaluations, &mut mob)
}

/// A candidate that beats the selected next epoch of some interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoViolation {
    pub start: usize,
    pub selected: usize,
    pub better: usize,
    pub selected_value: f64,
    pub better_value: f64,
}

/// Checks that no candidate next epoch improves on the selected one for any
/// interval of the schedule.
pub fn verify_pareto(problem: &PlanningProblem, schedule: &Schedule, objective: SmgdObjective) -> Result<Vec<ParetoViolation>> {
    let n = problem.n_slots();
    let mut mob = MobilityCache::new(problem);
    let slots = schedule.epoch_slots();
    let mut violations = Vec::new();
    for (i, &start) in slots.iter().enumerate() {
        let selected = slots.get(i + 1).copied().unwrap_or(n);
        let cands = candidates(problem, start);
        let parts = static_parts(problem, start, &cands, objective);
        let mut values = Vec::with_capacity(cands.len());
        for (&b, &p) in cands.iter().zip(&parts) {
            values.push((b, objective_value(problem, start, b, p, &mut mob)?));
        }
        let selected_value = values
            .iter()
            .find(|(b, _)| *b == selected)
            .map(|&(_, v)| v)
            .ok_or_else(|| Error::invalid("schedule", format!("epoch {selected} is not a candidate after {start}")))?;
        for &(b, v) in &values {
            if v < selected_value {
                violations.push(ParetoViolation {
                    start,
                    selected,
                    better: b,
                    selected_value,
                    better_value: v,
                });
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Environment;
    use std::f64::consts::PI;

    fn energy(p_m: f64) -> EnergyParams {
        EnergyParams {
            p_circuit: 0.5,
            battery_j: 5e5 / PI,
            ..EnergyParams::default()
        }
        .with_mobility_power(p_m)
    }

    fn model() -> Arc<PlacementModel> {
        PlacementModel::cached(&Environment::urban(), &RadioConfig::default()).unwrap()
    }

    fn problem(series: &[&[f64]], p_m: f64) -> PlanningProblem {
        let regions = series
            .iter()
            .enumerate()
            .map(|(i, s)| PlanningRegion {
                label: format!("S{i}"),
                rect: Rect::new(500.0 * i as f64, 0.0, 500.0, 1000.0),
                densities: s.to_vec(),
            })
            .collect();
        PlanningProblem::new(regions, model(), energy(p_m), Point3::new(500.0, 500.0, 0.0), 600.0).unwrap()
    }

    #[test]
    fn move_energy_examples() {
        let e = EnergyParams {
            p_ascend: 1.0,
            ..EnergyParams::default()
        };
        let p = Point3::new(1.0, 2.0, 3.0);
        assert_eq!(move_energy(&p, &p, &e), 0.0);
        assert_eq!(move_energy(&Point3::new(0.0, 0.0, 0.0), &Point3::new(0.0, 0.0, 10.0), &e), 10.0);
        let e = EnergyParams::default().with_mobility_power(1.0);
        assert_eq!(move_energy(&Point3::new(0.0, 0.0, 5.0), &Point3::new(3.0, 4.0, 0.0), &e), 10.0);
    }

    #[test]
    fn cost_matrix_shapes() {
        let e = EnergyParams::default();
        let pts = [Point3::new(0.0, 0.0, 1.0), Point3::new(5.0, 0.0, 2.0)];
        let c = cost_matrix(&pts, &pts, &e).unwrap();
        assert_eq!((c.get(0, 0), c.get(1, 1)), (0.0, 0.0));
        assert_eq!(c.get(0, 1), move_energy(&pts[0], &pts[1], &e));
        assert!(matches!(cost_matrix(&pts, &pts[..1], &e), Err(Error::LengthMismatch(2, 1))));
    }

    #[test]
    fn recall_of_single_uav() {
        let rsc = Point3::new(500.0, 500.0, 0.0);
        let prev = Deployment {
            subregions: vec![SubregionDeployment {
                label: "A".into(),
                radius: 1.0,
                altitude: 100.0,
                positions: vec![Point3::new(0.0, 0.0, 100.0)],
            }],
            rsc,
        };
        let next = Deployment {
            subregions: vec![],
            rsc,
        };
        let e = EnergyParams::default().with_mobility_power(1.0);
        let (j, _) = mobility_energy_at(&prev, &next, &e).unwrap();
        assert!((j - (500.0 * 2f64.sqrt() + 100.0)).abs() < 1e-9);
        let (back, _) = mobility_energy_at(&next, &prev, &e).unwrap();
        assert!((back - j).abs() < 1e-9);
        assert_eq!(mobility_energy_at(&prev, &prev, &e).unwrap().0, 0.0);
    }

    #[test]
    fn constant_density_never_updates() {
        let p = problem(&[&[1e-4; 12], &[3e-5; 12]], 1.5);
        let s = smgd_schedule(&p, SmgdObjective::Excess).unwrap();
        assert_eq!(s.update_count(), 0);
        let lazy = baseline_schedule(&p, Method::Lazy).unwrap();
        let dil = baseline_schedule(&p, Method::Diligent).unwrap();
        assert_eq!(lazy.avg_dynamic_rf, dil.avg_dynamic_rf);
        assert!((lazy.avg_dynamic_rf - p.optimal_static_rf(0)).abs() < 1e-15 * lazy.avg_dynamic_rf.max(1.0));
    }

    #[test]
    fn interval_average_hand_oracle() {
        let p = problem(&[&[1e-4, 4e-4]], 1.0);
        let r = p.optimal_radii(0).to_vec();
        let area = 5e5;
        let k = p.model.power_coefficient();
        let e = &p.energy;
        let phi = |lambda: f64| area / (PI * r[0] * r[0]) * (lambda * r[0].powi(4) * k + e.p_circuit) / e.battery_j;
        let expected = ((phi(1e-4) + phi(4e-4)) * 600.0 + 123.0 / e.battery_j) / 1200.0;
        let got = interval_avg_rf(&p, &r, 0, 2, 123.0);
        assert!((got - expected).abs() < 1e-14 * expected);
        // Longer interval, same move: mobility share halves.
        let one = interval_avg_rf(&p, &r, 0, 1, 50.0) - interval_avg_rf(&p, &r, 0, 1, 0.0);
        let p2 = problem(&[&[1e-4, 1e-4]], 1.0);
        let two = interval_avg_rf(&p2, &r, 0, 2, 50.0) - interval_avg_rf(&p2, &r, 0, 2, 0.0);
        assert!((one - 2.0 * two).abs() < 1e-15);
    }

    #[test]
    fn dynamic_rf_single_update_hand_oracle() {
        let p = problem(&[&[1e-4, 1e-4, 5e-4, 5e-4]], 2.0);
        let (omega, _) = mobility_energy_at(p.deployment_at(0), p.deployment_at(2), &p.energy).unwrap();
        let expected = ((2.0 * p.static_rf(0, 0) + 2.0 * p.static_rf(2, 2)) * 600.0 + omega / p.energy.battery_j) / 2400.0;
        let got = dynamic_rf_for_epochs(&p, &[2]).unwrap();
        assert!((got - expected).abs() < 1e-14 * expected);
        // Splitting at a slot where nothing changes costs nothing.
        let split = dynamic_rf_for_epochs(&p, &[2, 3]).unwrap();
        assert!((split - got).abs() < 1e-15 * got);
    }

    #[test]
    fn free_mobility_behaves_diligently() {
        let p = problem(&[&[1e-4, 1e-4, 3e-4, 2e-4, 2e-4, 1e-4, 5e-4], &[5e-5, 5e-5, 5e-5, 1e-4, 1e-4, 1e-4, 1e-4]], 0.0);
        let s = smgd_schedule(&p, SmgdObjective::Excess).unwrap();
        let d = baseline_schedule(&p, Method::Diligent).unwrap();
        assert_eq!(s.epoch_slots(), d.epoch_slots());
        assert_eq!(s.epoch_slots(), vec![0, 2, 3, 5, 6]);
    }

    #[test]
    fn smgd_never_worse_than_baselines_and_pareto() {
        let a: Vec<f64> = (0..24).map(|i| 1e-4 * (1.5 + (i as f64 / 4.0).sin())).collect();
        let b: Vec<f64> = (0..24).map(|i| 5e-5 * (1.5 + (i as f64 / 7.0).cos())).collect();
        for pm in [0.0, 0.05, 1.5, 50.0] {
            let p = problem(&[&a, &b], pm);
            let s = smgd_schedule(&p, SmgdObjective::Excess).unwrap();
            let lazy = baseline_schedule(&p, Method::Lazy).unwrap();
            let dil = baseline_schedule(&p, Method::Diligent).unwrap();
            let opt = optimal_schedule(&p).unwrap();
            assert!(opt.avg_dynamic_rf <= s.avg_dynamic_rf * (1.0 + 1e-12), "pm={pm}");
            assert!(opt.avg_dynamic_rf <= lazy.avg_dynamic_rf.min(dil.avg_dynamic_rf) * (1.0 + 1e-12));
            // Greedy stays close to the optimum on this smooth series.
            assert!(s.avg_dynamic_rf <= 1.01 * opt.avg_dynamic_rf, "pm={pm}");
            assert!(verify_pareto(&p, &s, SmgdObjective::Excess).unwrap().is_empty());
            let n = p.n_slots();
            assert!(s.candidate_evaluations <= n * (n + 1) / 2);
            let abs = smgd_schedule(&p, SmgdObjective::Absolute).unwrap();
            assert!(verify_pareto(&p, &abs, SmgdObjective::Absolute).unwrap().is_empty());
        }
    }

    #[test]
    fn shortest_path_matches_enumeration() {
        let a = [1e-4, 3e-4, 3e-4, 1e-4, 6e-4, 2e-4, 2e-4];
        let b = [5e-5, 5e-5, 2e-4, 2e-4, 1e-4, 1e-4, 4e-4];
        for pm in [0.0, 0.3, 5.0] {
            let p = problem(&[&a, &b], pm);
            let mut brute = f64::INFINITY;
            for mask in 0u32..(1 << 6) {
                let slots: Vec<usize> = (1..7).filter(|i| mask & (1 << (i - 1)) != 0).collect();
                brute = brute.min(dynamic_rf_for_epochs(&p, &slots).unwrap());
            }
            let opt = optimal_schedule(&p).unwrap().avg_dynamic_rf;
            assert!((opt - brute).abs() <= 1e-12 * brute, "pm={pm}: {opt} vs {brute}");
        }
    }

    #[test]
    fn diligent_static_part_never_exceeds_lazy() {
        let a: Vec<f64> = (0..10).map(|i| 1e-4 * (1.0 + i as f64)).collect();
        let p = problem(&[&a], 1.0);
        let lazy: f64 = (0..10).map(|t| p.static_rf(0, t)).sum();
        let dil: f64 = (0..10).map(|t| p.optimal_static_rf(t)).sum();
        assert!(dil <= lazy);
    }

    #[test]
    fn csv_layout() {
        let p = problem(&[&[1e-4, 2e-4]], 0.0);
        let s = baseline_schedule(&p, Method::Diligent).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("tau_seconds,subregion,radius,altitude,count,mobility_joules\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(2).unwrap().starts_with("600,S0,"));
    }

    #[test]
    fn rejects_bad_problems() {
        let m = model();
        let rsc = Point3::default();
        let region = |d: Vec<f64>| PlanningRegion {
            label: "A".into(),
            rect: Rect::new(0.0, 0.0, 10.0, 10.0),
            densities: d,
        };
        assert!(PlanningProblem::new(vec![region(vec![])], m.clone(), energy(1.0), rsc, 600.0).is_err());
        assert!(PlanningProblem::new(vec![region(vec![0.0])], m.clone(), energy(1.0), rsc, 600.0).is_err());
        assert!(PlanningProblem::new(vec![region(vec![1.0]), region(vec![1.0, 2.0])], m.clone(), energy(1.0), rsc, 600.0).is_err());
        let no_circuit = EnergyParams { p_circuit: 0.0, ..energy(1.0) };
        assert!(PlanningProblem::new(vec![region(vec![1.0])], m, no_circuit, rsc, 600.0).is_err());
    }
}
