use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use uavbs::channel::Environment;
use uavbs::csv::fmt_f64;
use uavbs::density::user_density;
use uavbs::figures::{self, Figure};
use uavbs::placement::{
    normalized_tx_power, static_rf, AltitudeSearchParams, PlacementModel, QUAD_TOL,
};
use uavbs::sampling::{min_sampling_numbers, optimal_sampling_numbers, subregion_eigenvalue, LearningBudget};
use uavbs::scenario::Scenario;
use uavbs::scheduler::{run_schedule, Method, SmgdObjective};
use uavbs::{Error, Result};

/// Energy-optimal UAV base station placement and update scheduling.
#[derive(Parser)]
#[command(name = "uavbs", version)]
struct Cli {
    /// Scenario file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write CSV files into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the scenario environment.
    #[arg(long, global = true, value_parser = ["urban", "dense-urban", "suburban"])]
    env: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal altitude ratio and the normalized transmit-power curve.
    Altitude {
        /// Largest normalized altitude of the curve.
        #[arg(long, default_value_t = 3.0)]
        max_ratio: f64,
        #[arg(long, default_value_t = 300)]
        steps: usize,
    },
    /// Optimal radius, altitude and static recall frequency over a grid.
    Radius {
        /// Comma-separated densities, users/m^2.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 5.0])]
        lambda: Vec<f64>,
        /// Comma-separated circuit powers, W.
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 5.0, 50.0])]
        p_circuit: Vec<f64>,
    },
    /// Static recall frequency of one subregion for a given placement.
    StaticRf {
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        lambda: f64,
        /// Defaults to the optimal altitude for the radius.
        #[arg(long)]
        altitude: Option<f64>,
        /// Subregion area, m^2; defaults to the first subregion.
        #[arg(long)]
        area: Option<f64>,
    },
    /// One period of each subregion's traffic and density.
    Pattern {
        /// Only this subregion.
        #[arg(long)]
        subregion: Option<String>,
    },
    /// Update schedule over the scenario horizon.
    Schedule {
        #[arg(long, default_value = "smgd")]
        method: String,
        #[arg(long)]
        horizon_hours: Option<f64>,
        /// Mobility power for horizontal, ascending and descending flight, W.
        #[arg(long)]
        pm: Option<f64>,
        #[arg(long)]
        objective: Option<String>,
        #[arg(long)]
        start_hours: Option<f64>,
    },
    /// Sample sizes meeting a learning budget.
    Sampling {
        /// Allowed total increase of the static recall frequency, 1/s.
        #[arg(long)]
        dphi_max: f64,
        /// Hypothesis-space volume.
        #[arg(long)]
        d: f64,
        /// Failure probability of the generalization bound
        #[arg(long)]
        delta: f64,
        /// Training error reached in every subregion.
        #[arg(long, default_value_t = 0.0)]
        xi_max: f64,
        /// `literal` (stationarity rule) or `optimal` (minimum total).
        #[arg(long, default_value = "literal", value_parser = ["literal", "optimal"])]
        allocation: String,
    },
    /// Reproduction data for one figure (fig4..fig10, or `all`).
    Figure { name: String },
    /// All schedulers over a list of mobility powers.
    Compare {
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 1.5, 50.0])]
        pm: Vec<f64>,
    },
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn emit(&self, name: &str, csv: &str) -> Result<()> {
        match &self.dir {
            Some(dir) => {
                let io = |source| Error::Io {
                    path: dir.clone(),
                    source,
                };
                std::fs::create_dir_all(dir).map_err(io)?;
                let path = dir.join(name);
                std::fs::write(&path, csv).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                eprintln!("wrote {}", path.display());
            }
            None => print!("{csv}"),
        }
        Ok(())
    }
}

fn load_scenario(cli: &Cli) -> Result<Scenario> {
    let mut scenario = match &cli.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    if let Some(env) = &cli.env {
        scenario.env = Environment::preset(env)?;
    }
    scenario.validate()?;
    Ok(scenario)
}

fn altitude(scenario: &Scenario, envs: &[Environment], max_ratio: f64, steps: usize) -> Result<String> {
    if max_ratio.is_nan() || max_ratio <= 0.0 || steps == 0 {
        return Err(Error::Invalid {
            what: "altitude sweep",
            reason: "max ratio and steps must be positive".into(),
        });
    }
    let mut s = String::from("environment,h1,p_tr1,is_optimal\n");
    for env in envs {
        for i in 0..=steps {
            let h1 = max_ratio * i as f64 / steps as f64;
            let p = normalized_tx_power(h1, env, &scenario.radio, QUAD_TOL)?;
            let _ = writeln!(s, "{},{},{},0", env.name, fmt_f64(h1), fmt_f64(p));
        }
        let model = PlacementModel::new(env.clone(), scenario.radio.clone(), &AltitudeSearchParams::default())?;
        let _ = writeln!(
            s,
            "{},{},{},1",
            env.name,
            fmt_f64(model.altitude_ratio),
            fmt_f64(model.unit_power)
        );
    }
    Ok(s)
}

fn radius(scenario: &Scenario, lambdas: &[f64], p_circuits: &[f64]) -> Result<String> {
    let model = scenario.model()?;
    let area = scenario.subregions[0].area();
    let mut s = String::from("lambda,p_circuit,radius,altitude,tx_power,min_static_rf\n");
    for &lambda in lambdas {
        for &p_cu in p_circuits {
            let mut energy = scenario.energy.clone();
            energy.p_circuit = p_cu;
            energy.validate()?;
            let (rf, place) = model.min_static_rf(lambda, &energy, area)?;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                fmt_f64(lambda),
                fmt_f64(p_cu),
                fmt_f64(place.radius),
                fmt_f64(place.altitude),
                fmt_f64(place.tx_power),
                fmt_f64(rf)
            );
        }
    }
    Ok(s)
}

fn pattern(scenario: &Scenario, only: Option<&str>) -> Result<String> {
    let subs: Vec<_> = scenario
        .subregions
        .iter()
        .filter(|s| only.is_none_or(|o| o == s.label))
        .collect();
    if subs.is_empty() {
        return Err(Error::Invalid {
            what: "subregion",
            reason: format!("no subregion named '{}'", only.unwrap_or_default()),
        });
    }
    let mut s = String::from("subregion,sample,tau_seconds,traffic,user_density,planning_density\n");
    for sub in subs {
        let period = sub.pattern.period();
        let mu = sub.pattern.sample_period;
        let planning = sub.planning_series(0.0, mu, period.len(), &scenario.radio);
        for (n, traffic) in period.iter().enumerate() {
            let t = n as f64 * mu;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                sub.label,
                n,
                fmt_f64(t),
                fmt_f64(*traffic),
                fmt_f64(user_density(sub, t, &scenario.radio)),
                fmt_f64(planning[n])
            );
        }
    }
    Ok(s)
}

fn sampling(scenario: &Scenario, budget: &LearningBudget, allocation: &str) -> Result<String> {
    let problem = scenario.planning_problem()?;
    let model = scenario.model()?;
    let lambdas = figures::mean_densities(&problem);
    let eigen: Vec<f64> = lambdas
        .iter()
        .zip(&scenario.subregions)
        .map(|(l, sub)| subregion_eigenvalue(*l, &scenario.energy, sub.area(), &model))
        .collect::<Result<_>>()?;
    let plan = match allocation {
        "optimal" => optimal_sampling_numbers(&eigen, budget)?,
        _ => min_sampling_numbers(&eigen, budget)?,
    };
    let mut s = String::from("subregion,lambda,eigenvalue,n_samples,xi_bound\n");
    for (b, sub) in scenario.subregions.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            sub.label,
            fmt_f64(lambdas[b]),
            fmt_f64(eigen[b]),
            fmt_f64(plan.n_samples[b]),
            fmt_f64(plan.xi_bounds[b])
        );
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<()> {
    let out = Output { dir: cli.out.clone() };
    let scenario = load_scenario(cli)?;
    match &cli.command {
        Command::Altitude { max_ratio, steps } => {
            let envs = match &cli.env {
                Some(_) => vec![scenario.env.clone()],
                None => Environment::presets().to_vec(),
            };
            out.emit("altitude.csv", &altitude(&scenario, &envs, *max_ratio, *steps)?)
        }
        Command::Radius { lambda, p_circuit } => out.emit("radius.csv", &radius(&scenario, lambda, p_circuit)?),
        Command::StaticRf {
            radius,
            lambda,
            altitude,
            area,
        } => {
            let model = scenario.model()?;
            let h = altitude.unwrap_or_else(|| model.altitude_for(*radius));
            let area = area.unwrap_or_else(|| scenario.subregions[0].area());
            let rf = static_rf(*radius, *lambda, h, &scenario.energy, area, &scenario.env, &scenario.radio)?;
            let csv = format!(
                "radius,lambda,altitude,area,static_rf\n{},{},{},{},{}\n",
                fmt_f64(*radius),
                fmt_f64(*lambda),
                fmt_f64(h),
                fmt_f64(area),
                fmt_f64(rf)
            );
            out.emit("static_rf.csv", &csv)
        }
        Command::Pattern { subregion } => out.emit("pattern.csv", &pattern(&scenario, subregion.as_deref())?),
        Command::Schedule {
            method,
            horizon_hours,
            pm,
            objective,
            start_hours,
        } => {
            let method: Method = method.parse()?;
            let objective: SmgdObjective = match objective {
                Some(o) => o.parse()?,
                None => scenario.objective,
            };
            let energy = match pm {
                Some(p) => scenario.energy.clone().with_mobility_power(*p),
                None => scenario.energy.clone(),
            };
            let horizon = horizon_hours.map_or(scenario.horizon_seconds, |h| h * 3600.0);
            let slots = (horizon / scenario.slot_seconds).round() as usize;
            if slots == 0 {
                return Err(Error::Invalid {
                    what: "horizon",
                    reason: "shorter than one slot".into(),
                });
            }
            let start = start_hours.map_or(scenario.start_seconds, |h| h * 3600.0);
            let problem = scenario.planning_problem_with(&energy, start, slots)?;
            let schedule = run_schedule(&problem, method, objective)?;
            out.emit("schedule.csv", &schedule.to_csv())?;
            println!(
                "# method={} avg_dynamic_rf={} updates={} mobility_joules={}",
                method.name(),
                fmt_f64(schedule.avg_dynamic_rf),
                schedule.update_count(),
                fmt_f64(schedule.total_mobility_joules())
            );
            Ok(())
        }
        Command::Sampling {
            dphi_max,
            d,
            delta,
            xi_max,
            allocation,
        } => {
            let budget = LearningBudget {
                hypothesis_volume: *d,
                confidence_delta: *delta,
                max_training_error: *xi_max,
                max_rf_increment: *dphi_max,
            };
            out.emit("sampling.csv", &sampling(&scenario, &budget, allocation)?)
        }
        Command::Figure { name } => {
            let which: Vec<Figure> = if name == "all" {
                Figure::ALL.to_vec()
            } else {
                vec![name.parse()?]
            };
            for f in which {
                for artifact in figures::run_figure(&scenario, f)? {
                    out.emit(&artifact.name, &artifact.csv)?;
                }
            }
            Ok(())
        }
        Command::Compare { pm } => {
            let mut s = String::from("p_mobility,method,avg_dynamic_rf,updates,mobility_joules\n");
            for &p in pm {
                let energy = scenario.energy.clone().with_mobility_power(p);
                let problem = scenario.planning_problem_with(&energy, scenario.start_seconds, scenario.n_slots())?;
                let mut all = figures::compare_methods(&problem, &scenario)?.to_vec();
                all.push(run_schedule(&problem, Method::Optimal, scenario.objective)?);
                for sch in all {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        fmt_f64(p),
                        sch.method.name(),
                        fmt_f64(sch.avg_dynamic_rf),
                        sch.update_count(),
                        fmt_f64(sch.total_mobility_joules())
                    );
                }
            }
            out.emit("compare.csv", &s)
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    if err.is_numerical() {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
