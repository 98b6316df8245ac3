//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; the process fails if any
//! criterion does.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uavbs::assignment::{solve_assignment, CostMatrix};
use uavbs::channel::{Environment, RadioConfig};
use uavbs::density::preset_pattern;
use uavbs::placement::{
    normalized_tx_power, optimal_altitude_ratio, tx_power, tx_power_direct, AltitudeSearchParams,
    EnergyParams, PlacementModel, QUAD_TOL,
};
use uavbs::sampling::{
    budget_usage, min_sampling_numbers, optimal_sampling_numbers, regression_slope, rf_increment_monte_carlo,
    subregion_eigenvalue, LearningBudget, SamplingPlan,
};
use uavbs::scenario::Scenario;
use uavbs::scheduler::{
    baseline_schedule, mobility_energy_at, smgd_schedule, verify_pareto, Method, PlanningProblem, SmgdObjective,
};

type Outcome = Result<String, String>;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn urban_model() -> Arc<PlacementModel> {
    PlacementModel::cached(&Environment::urban(), &RadioConfig::default()).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scaling_laws() -> Outcome {
    let model = urban_model();
    let r = |lambda: f64, p: f64| model.optimal_radius(lambda, p).unwrap();
    let q = 10f64.powf(0.25);
    let by_power = [r(0.1, 0.5), r(0.1, 5.0), r(0.1, 50.0)];
    let by_density = [r(0.1, 0.5), r(1.0, 0.5), r(5.0, 0.5)];
    let ratios = [
        (by_power[1] / by_power[0], q),
        (by_power[2] / by_power[1], q),
        (by_density[0] / by_density[1], q),
        (by_density[1] / by_density[2], 5f64.powf(0.25)),
    ];
    let worst = ratios.iter().map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
    check(
        worst < 1e-4,
        format!(
            "ratio error {worst:.1e}; R* = {:.2}/{:.2}/{:.2} m vs reported 327.3/582/1035 m (factor {:.3})",
            by_power[0],
            by_power[1],
            by_power[2],
            327.3 / by_power[0]
        ),
    )
}

fn optimality_condition() -> Outcome {
    let radio = RadioConfig::default();
    let mut worst: f64 = 0.0;
    for env in Environment::presets() {
        let model = PlacementModel::cached(&env, &radio).unwrap();
        for lambda in [1e-5, 1e-3, 0.1, 1.0, 5.0] {
            for p_cu in [0.05, 0.5, 5.0, 50.0, 500.0] {
                let r = model.optimal_radius(lambda, p_cu).unwrap();
                let p = tx_power(r, lambda, model.altitude_for(r), &env, &radio, QUAD_TOL).unwrap();
                worst = worst.max(rel(p, p_cu));
            }
        }
    }
    check(worst < 1e-3, format!("max |P_tr - P_cu| / P_cu = {worst:.2e} over 75 points"))
}

fn scaled_vs_direct() -> Outcome {
    let radio = RadioConfig::default();
    let env = Environment::urban();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = 10f64.powf(rng.random_range(1.0..3.3));
        let lambda = 10f64.powf(rng.random_range(-5.0..1.0));
        let h = 10f64.powf(rng.random_range(0.0..3.5));
        let a = tx_power(r, lambda, h, &env, &radio, 1e-10).unwrap();
        let b = tx_power_direct(r, lambda, h, &env, &radio, 1e-10).unwrap();
        worst = worst.max(rel(a, b));
    }
    check(worst < 1e-7, format!("max relative difference {worst:.2e} over 100 draws"))
}

fn altitude_search() -> Outcome {
    let radio = RadioConfig::default();
    let mut found = Vec::new();
    let mut worst: f64 = 0.0;
    for env in Environment::presets() {
        let h = optimal_altitude_ratio(&env, &AltitudeSearchParams::default()).unwrap();
        let grid = (0..=30_000)
            .map(|i| i as f64 * 1e-4)
            .map(|x| (x, normalized_tx_power(x, &env, &radio, QUAD_TOL).unwrap()))
            .fold((0.0, f64::INFINITY), |best, p| if p.1 < best.1 { p } else { best })
            .0;
        worst = worst.max((h - grid).abs());
        found.push((env.name.clone(), h));
    }
    let ordered = found[0].1 > found[1].1 && found[1].1 > found[2].1;
    check(
        worst < 2e-4 && ordered,
        format!(
            "max |search - grid| = {worst:.1e}; {}",
            found.iter().map(|(n, h)| format!("{n} {h:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn hungarian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for n in 2..=7 {
        let perms = permutations(n);
        for _ in 0..100 {
            // Integer costs make the totals exact in floating point.
            let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(0..1000) as f64).collect();
            let m = CostMatrix::new(n, data.clone()).unwrap();
            let best = perms
                .iter()
                .map(|p| p.iter().enumerate().map(|(i, &j)| data[i * n + j]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            let got = solve_assignment(&m);
            let recomputed: f64 = got.perm.iter().enumerate().map(|(i, &j)| data[i * n + j]).sum();
            if got.total_energy != best || recomputed != best {
                mismatches += 1;
            }
        }
    }
    check(mismatches == 0, format!("{mismatches} mismatches in 600 matrices"))
}

fn scenario_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/two_halves.cfg")
}

fn smgd_envelope() -> Outcome {
    let scenario = Scenario::load(&scenario_path()).map_err(|e| e.to_string())?;
    let slots = scenario.n_slots();
    let problem_at = |pm: f64| {
        let energy = scenario.energy.clone().with_mobility_power(pm);
        scenario.planning_problem_with(&energy, scenario.start_seconds, slots).unwrap()
    };
    let mut notes = Vec::new();
    let mut ok = true;

    let p0 = problem_at(0.0);
    let changed = (1..slots)
        .filter(|&t| p0.regions.iter().any(|r| r.densities[t] != r.densities[t - 1]))
        .count();
    let u0 = smgd_schedule(&p0, scenario.objective).unwrap().update_count();
    ok &= u0 == changed;
    notes.push(format!("P_m=0: {u0} updates for {changed} changes"));

    for pm in [0.05, 1.5, 50.0] {
        let p = problem_at(pm);
        let s = smgd_schedule(&p, scenario.objective).unwrap();
        let lazy = baseline_schedule(&p, Method::Lazy).unwrap().avg_dynamic_rf;
        let dil = baseline_schedule(&p, Method::Diligent).unwrap().avg_dynamic_rf;
        ok &= s.avg_dynamic_rf <= lazy.min(dil) + 1e-9;
        if pm == 50.0 {
            ok &= s.update_count() == 0;
        }
        notes.push(format!(
            "P_m={pm}: {} updates, {:.4}% vs best baseline",
            s.update_count(),
            100.0 * (s.avg_dynamic_rf / lazy.min(dil) - 1.0)
        ));
    }
    check(ok, notes.join("; "))
}

/// A short horizon of the two-halves scenario: random density band per
/// subregion, start time, slot length and mobility power.
fn toy_problem(base: &Scenario, seed: u64) -> PlanningProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sc = base.clone();
    for s in &mut sc.subregions {
        let peak = 10f64.powf(rng.random_range(-5.3..-4.3));
        s.mapping.peak_density = Some(peak);
        s.mapping.trough_density = Some(peak * rng.random_range(0.2..0.8));
    }
    let slots = rng.random_range(8..=10);
    sc.slot_seconds = [1800.0, 3600.0, 5400.0][rng.random_range(0..3)];
    let start = rng.random_range(0..7 * 24) as f64 * 3600.0;
    let pm = [0.05, 0.5, 1.5, 5.0, 50.0][rng.random_range(0..5)];
    let energy = sc.energy.clone().with_mobility_power(pm);
    sc.planning_problem_with(&energy, start, slots).unwrap()
}

/// Average dynamic recall frequency of an epoch set, from the per-slot
/// static values and assignment energies.
fn brute_force_value(p: &PlanningProblem, epochs: &[usize]) -> f64 {
    let n = p.n_slots();
    let mut total = 0.0;
    for (i, &a) in epochs.iter().enumerate() {
        let b = epochs.get(i + 1).copied().unwrap_or(n);
        total += (a..b).map(|t| p.static_rf(a, t) * p.slot_seconds).sum::<f64>();
        if b < n {
            let (joules, _) = mobility_energy_at(p.deployment_at(a), p.deployment_at(b), &p.energy).unwrap();
            total += joules / p.energy.battery_j;
        }
    }
    total / (n as f64 * p.slot_seconds)
}

fn smgd_vs_exhaustive() -> Outcome {
    let mut worst_gap: f64 = 0.0;
    let mut below = 0;
    let mut violations = 0;
    let mut max_fleet = 0;
    let base = Scenario::load(&scenario_path()).map_err(|e| e.to_string())?;
    for seed in 0..20 {
        let p = toy_problem(&base, 1000 + seed);
        let n = p.n_slots();
        max_fleet = max_fleet.max((0..n).map(|t| p.deployment_at(t).total_count()).max().unwrap());
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << (n - 1)) {
            let mut epochs = vec![0];
            epochs.extend((1..n).filter(|t| mask >> (t - 1) & 1 == 1));
            best = best.min(brute_force_value(&p, &epochs));
        }
        let s = smgd_schedule(&p, SmgdObjective::Excess).unwrap();
        let value = brute_force_value(&p, &s.epoch_slots());
        if rel(value, s.avg_dynamic_rf) > 1e-12 {
            return Err(format!("seed {seed}: schedule value {} disagrees with recomputation {value}", s.avg_dynamic_rf));
        }
        if value < best * (1.0 - 1e-12) {
            below += 1;
        }
        worst_gap = worst_gap.max(value / best - 1.0);
        violations += verify_pareto(&p, &s, SmgdObjective::Excess).unwrap().len();
    }
    check(
        worst_gap <= 0.10 && below == 0 && violations == 0 && max_fleet <= 6,
        format!(
            "worst gap {:.3}%, {below} below optimum, {violations} Pareto violations, fleet <= {max_fleet}",
            100.0 * worst_gap
        ),
    )
}

fn taylor_slope() -> Outcome {
    let model = urban_model();
    let energy = EnergyParams {
        p_circuit: 0.5,
        battery_j: 1e6 / PI,
        ..EnergyParams::default()
    };
    let area = 1e6;
    let lambda = 10.0;
    let small: Vec<f64> = [0.005, 0.01, 0.015, 0.02].iter().map(|f| f * lambda).collect();
    let pts = rf_increment_monte_carlo(&model, lambda, &energy, area, &small, 0.0, 1_000_000, 2024).unwrap();
    let xi: Vec<f64> = pts.iter().map(|p| p.xi).collect();
    let measured: Vec<f64> = pts.iter().map(|p| p.measured).collect();
    let slope = regression_slope(&xi, &measured);
    let eigen = subregion_eigenvalue(lambda, &energy, area, &model).unwrap();
    let slope_err = rel(slope, eigen);

    let lambda = 3.0;
    let large: Vec<f64> = [0.1, 0.15, 0.2].iter().map(|f| f * lambda).collect();
    let pts = rf_increment_monte_carlo(&model, lambda, &energy, area, &large, 0.0, 1_000_000, 2025).unwrap();
    let errors: Vec<f64> = pts.iter().map(|p| (p.measured - p.predicted) / p.predicted).collect();
    let growing = errors.windows(2).all(|w| w[1].abs() > w[0].abs()) && errors.iter().all(|e| *e > 0.0);
    check(
        slope_err < 0.05 && growing,
        format!(
            "slope {slope:.4e} vs eigenvalue {eigen:.4e} ({:.2}%); lambda=3 relative errors {}",
            100.0 * slope_err,
            errors.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

/// Minimizes `sum c_b / u_b^2` over `u > 0, sum u = slack` by pairwise
/// golden-section exchanges; `u_b` is the share of the budget spent on the
/// generalization term of subregion `b`.
fn numerical_allocation(eigen: &[f64], log_term: f64, slack: f64) -> Vec<f64> {
    let k = eigen.len();
    let c: Vec<f64> = eigen.iter().map(|l| l * l * log_term / 2.0).collect();
    let mut u = vec![slack / k as f64; k];
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        for i in 0..k {
            for j in i + 1..k {
                let total = u[i] + u[j];
                let f = |x: f64| c[i] / (x * x) + c[j] / ((total - x) * (total - x));
                let (mut a, mut b) = (total * 1e-9, total * (1.0 - 1e-9));
                while b - a > 1e-15 * total {
                    let x1 = b - g * (b - a);
                    let x2 = a + g * (b - a);
                    if f(x1) < f(x2) {
                        b = x2;
                    } else {
                        a = x1;
                    }
                }
                u[i] = 0.5 * (a + b);
                u[j] = total - u[i];
            }
        }
    }
    u.iter().zip(&c).map(|(u, c)| c / (u * u)).collect()
}

fn sampling_numbers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut stationarity: f64 = 0.0;
    let mut binding: f64 = 0.0;
    let mut oracle_gap: f64 = 0.0;
    let mut corrected_gap: f64 = 0.0;
    let mut beaten = 0usize;
    let mut single: f64 = 0.0;
    for _ in 0..10 {
        let kappa = rng.random_range(1..=5);
        let eigen: Vec<f64> = (0..kappa).map(|_| 10f64.powf(rng.random_range(-6.0..-3.0))).collect();
        let sum: f64 = eigen.iter().sum();
        let xi_max = rng.random_range(0.0..1e-4);
        let budget = LearningBudget {
            hypothesis_volume: 10f64.powf(rng.random_range(1.0..4.0)),
            confidence_delta: rng.random_range(0.01..0.2),
            max_training_error: xi_max,
            max_rf_increment: xi_max * sum + sum * rng.random_range(0.01..0.1),
        };
        let plan: SamplingPlan = min_sampling_numbers(&eigen, &budget).unwrap();
        let lt = budget.log_term();
        for (l, n) in eigen.iter().zip(&plan.n_samples) {
            stationarity = stationarity.max(rel(plan.omega * l * (lt / (2.0 * n)).sqrt(), 2.0));
        }
        binding = binding.max(rel(budget_usage(&eigen, &plan.n_samples, &budget).unwrap(), budget.max_rf_increment));
        let slack = budget.slack(&eigen).unwrap();
        let oracle: f64 = numerical_allocation(&eigen, lt, slack).iter().sum();
        oracle_gap = oracle_gap.max(rel(plan.total(), oracle));
        corrected_gap = corrected_gap.max(rel(optimal_sampling_numbers(&eigen, &budget).unwrap().total(), oracle));
        for _ in 0..1000 {
            // Random split of the slack, rounded up to feasible integers.
            let w: Vec<f64> = (0..kappa).map(|_| -rng.random_range(1e-12f64..1.0).ln()).collect();
            let ws: f64 = w.iter().sum();
            let alloc: f64 = eigen
                .iter()
                .zip(&w)
                .map(|(l, wi)| {
                    let u = slack * wi / ws;
                    (l * l * lt / (2.0 * u * u)).ceil()
                })
                .sum();
            if alloc < plan.total() {
                beaten += 1;
            }
        }
        let one = min_sampling_numbers(&eigen[..1], &LearningBudget {
            max_rf_increment: xi_max * eigen[0] + eigen[0] * 0.05,
            ..budget
        })
        .unwrap();
        let expect = eigen[0] * eigen[0] * lt / (2.0 * (0.05 * eigen[0]).powi(2));
        single = single.max(rel(one.n_samples[0], expect));
    }
    let ok = stationarity < 1e-9 && binding < 1e-9 && oracle_gap < 1e-3 && beaten == 0 && single < 1e-9;
    check(
        ok,
        format!(
            "stationarity {stationarity:.1e}, binding {binding:.1e}, single-subregion {single:.1e}, \
             oracle gap {:.2}%, random allocations below it {beaten}/10000 \
             (minimum-total allocation: oracle gap {:.1e})",
            100.0 * oracle_gap,
            corrected_gap
        ),
    )
}

fn density_patterns() -> Outcome {
    let mut worst_imag: f64 = 0.0;
    let mut worst_period: f64 = 0.0;
    for name in ["E", "R", "T", "O", "C"] {
        let p = preset_pattern(name).unwrap();
        let n = p.n_samples as i64;
        let scale = (0..n).map(|i| p.reconstruct_raw(i).abs()).fold(0.0, f64::max);
        for i in 0..n {
            let x = p.reconstruct_complex(i);
            worst_imag = worst_imag.max(x.im.abs() / scale);
            worst_period = worst_period.max((p.reconstruct_raw(i + n) - x.re).abs() / scale);
        }
        if p.n_samples != 4032 {
            return Err(format!("{name} has {} samples", p.n_samples));
        }
    }
    let e = preset_pattern("E").unwrap();
    let week = 1008usize;
    let raw: Vec<f64> = (0..week as i64).map(|i| e.reconstruct_raw(i)).collect();
    let (lo, hi) = raw.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let shape: Vec<f64> = raw.iter().map(|x| (x - lo) / (hi - lo)).collect();
    let (_, daily) = e.coefficients.iter().find(|(k, _)| *k == 28).copied().unwrap();
    let harmonic: Vec<f64> = (0..week)
        .map(|i| daily.norm() * (2.0 * PI * 28.0 * i as f64 / 4032.0 + daily.arg()).cos())
        .collect();
    let peaks = dominant_maxima(&shape, 72);
    let expected = dominant_maxima(&harmonic, 72);
    check(
        worst_imag < 1e-9 && worst_period < 1e-9 && peaks == expected && peaks == 7,
        format!("imag residual {worst_imag:.1e}, period residual {worst_period:.1e}, {peaks} daily peaks (harmonic predicts {expected})"),
    )
}

/// Samples that are the strict maximum of the circular window of
/// `half_width` samples on each side.
fn dominant_maxima(x: &[f64], half_width: usize) -> usize {
    let n = x.len();
    (0..n)
        .filter(|&i| (1..=half_width).all(|d| x[i] > x[(i + d) % n] && x[i] > x[(i + n - d) % n]))
        .count()
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("radius scaling laws", scaling_laws),
        ("optimality condition P_tr = P_cu", optimality_condition),
        ("scaled vs direct transmit power", scaled_vs_direct),
        ("altitude search vs grid", altitude_search),
        ("assignment exactness", hungarian),
        ("S-MGD behavior envelope", smgd_envelope),
        ("S-MGD vs exhaustive optimum", smgd_vs_exhaustive),
        ("prediction-error slope", taylor_slope),
        ("minimal sampling numbers", sampling_numbers),
        ("density pattern sanity", density_patterns),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
