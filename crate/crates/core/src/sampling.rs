//! Effect of density-prediction error on the recall frequency, and the
//! sample sizes needed to keep that effect within a budget.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::density::PERTURBED_FLOOR;
use crate::error::{Error, Result};
use crate::placement::{EnergyParams, PlacementModel};
use crate::rng;

/// Bias and variance of a density predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizationError {
    /// (users/m^2)^2
    pub variance: f64,
    /// users/m^2
    pub bias: f64,
}

impl GeneralizationError {
    pub fn new(variance: f64, bias: f64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite() && bias.is_finite()) {
            return Err(Error::invalid("generalization error", format!("variance {variance}, bias {bias}")));
        }
        Ok(GeneralizationError { variance, bias })
    }

    pub fn xi(&self) -> f64 {
        self.variance + self.bias * self.bias
    }
}

/// Constraints on the learning stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningBudget {
    /// Size of the finite hypothesis space, `d > 1`.
    pub hypothesis_volume: f64,
    /// Failure probability of the generalization bound, in (0, 1).
    pub confidence_delta: f64,
    /// Training error every subregion reaches, (users/m^2)^2.
    pub max_training_error: f64,
    /// Allowed total increase of the static recall frequency, 1/s.
    pub max_rf_increment: f64,
}

impl LearningBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.hypothesis_volume > 1.0 && self.hypothesis_volume.is_finite()) {
            return Err(Error::invalid("learning budget", "hypothesis volume d must exceed 1"));
        }
        if !(self.confidence_delta > 0.0 && self.confidence_delta < 1.0) {
            return Err(Error::invalid("learning budget", "delta must lie in (0, 1)"));
        }
        if !(self.max_training_error >= 0.0 && self.max_training_error.is_finite()) {
            return Err(Error::invalid("learning budget", "maximum training error must be >= 0"));
        }
        if !(self.max_rf_increment > 0.0 && self.max_rf_increment.is_finite()) {
            return Err(Error::invalid("learning budget", "maximum increment must be positive"));
        }
        Ok(())
    }

    /// `ln d - ln delta`.
    pub fn log_term(&self) -> f64 {
        self.hypothesis_volume.ln() - self.confidence_delta.ln()
    }

    /// Increment left for generalization after the training error is paid:
    /// `dPhi_max - xi_max * sum(Lambda)`.
    pub fn slack(&self, eigenvalues: &[f64]) -> Result<f64> {
        self.validate()?;
        if eigenvalues.is_empty() {
            return Err(Error::invalid("learning budget", "no subregions"));
        }
        if let Some(l) = eigenvalues.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::invalid("learning budget", format!("eigenvalue {l} must be positive")));
        }
        let sum: f64 = eigenvalues.iter().sum();
        let slack = self.max_rf_increment - self.max_training_error * sum;
        if !(slack > 0.0) {
            return Err(Error::Infeasible(format!(
                "max_rf_increment {} must exceed max_training_error * sum(eigenvalues) = {}",
                self.max_rf_increment,
                self.max_training_error * sum
            )));
        }
        Ok(slack)
    }
}

/// Sensitivity of the static recall frequency to the generalization error
/// of the density prediction in one subregion, 1/s per (users/m^2)^2.
pub fn subregion_eigenvalue(lambda: f64, energy: &EnergyParams, area: f64, model: &PlacementModel) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::ZeroDensity);
    }
    Ok(area / (4.0 * std::f64::consts::PI * energy.battery_j)
        * (energy.p_circuit * model.power_coefficient() / lambda.powi(3)).sqrt())
}

/// Expected increase of the static recall frequency.
pub fn rf_increment(eigenvalue: f64, error: &GeneralizationError) -> f64 {
    eigenvalue * error.xi()
}

/// Generalization bound of a finite hypothesis space with `d` members after
/// `n_samples` samples, holding with probability `1 - delta`.
pub fn vc_epsilon(d: f64, n_samples: f64, delta: f64) -> Result<f64> {
    if !(n_samples > 0.0) || !(d > 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(
            "generalization bound",
            format!("need n > 0, d > 1, delta in (0,1); got n={n_samples}, d={d}, delta={delta}"),
        ));
    }
    Ok(((d.ln() + (1.0 / delta).ln()) / (2.0 * n_samples)).sqrt())
}

/// Per-subregion sample sizes meeting a learning budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    /// Lagrange multiplier of the budget constraint.
    pub omega: f64,
    pub n_samples: Vec<f64>,
    /// Generalization-error bound reached in each subregion.
    pub xi_bounds: Vec<f64>,
}

impl SamplingPlan {
    pub fn n_samples_ceil(&self) -> Vec<u64> {
        self.n_samples.iter().map(|n| n.ceil() as u64).collect()
    }

    pub fn total(&self) -> f64 {
        self.n_samples.iter().sum()
    }
}

/// Sample sizes from the stationarity condition `2 = omega * Lambda *
/// sqrt((ln d - ln delta) / (2 N))` with the budget binding:
/// `N = omega^2 Lambda^2 (ln d - ln delta) / 8`.
///
/// The budget binds exactly, but the total is minimal only when all
/// eigenvalues are equal; [`optimal_sampling_numbers`] gives the true
/// minimum otherwise.
pub fn min_sampling_numbers(eigenvalues: &[f64], budget: &LearningBudget) -> Result<SamplingPlan> {
    let slack = budget.slack(eigenvalues)?;
    let kappa = eigenvalues.len() as f64;
    let omega = 2.0 * kappa / slack;
    let log_term = budget.log_term();
    let n_samples = eigenvalues
        .iter()
        .map(|l| omega * omega * l * l * log_term / 8.0)
        .collect();
    let xi_bounds = eigenvalues
        .iter()
        .map(|l| budget.max_training_error + 2.0 / (omega * l))
        .collect();
    Ok(SamplingPlan {
        omega,
        n_samples,
        xi_bounds,
    })
}

/// Minimum total sample size subject to the budget
/// `sum Lambda_b (xi_max + eps(N_b)) <= dPhi_max`.
///
/// Minimizing `sum N_b` under `sum Lambda_b N_b^(-1/2) = const` gives
/// `N_b` proportional to `Lambda_b^(2/3)`.
pub fn optimal_sampling_numbers(eigenvalues: &[f64], budget: &LearningBudget) -> Result<SamplingPlan> {
    let slack = budget.slack(eigenvalues)?;
    let half_log = budget.log_term() / 2.0;
    let s23: f64 = eigenvalues.iter().map(|l| l.powf(2.0 / 3.0)).sum();
    let scale = half_log * s23 * s23 / (slack * slack);
    let n_samples: Vec<f64> = eigenvalues.iter().map(|l| scale * l.powf(2.0 / 3.0)).collect();
    let xi_bounds = n_samples
        .iter()
        .map(|n| budget.max_training_error + (half_log / n).sqrt())
        .collect();
    // Multiplier of the constraint: 1 = omega * Lambda * sqrt(half_log) / 2 * N^(-3/2).
    let omega = 2.0 * n_samples[0].powf(1.5) / (eigenvalues[0] * half_log.sqrt());
    Ok(SamplingPlan {
        omega,
        n_samples,
        xi_bounds,
    })
}

/// Total recall-frequency increment implied by per-subregion sample sizes.
pub fn budget_usage(eigenvalues: &[f64], n_samples: &[f64], budget: &LearningBudget) -> Result<f64> {
    if eigenvalues.len() != n_samples.len() {
        return Err(Error::LengthMismatch(eigenvalues.len(), n_samples.len()));
    }
    eigenvalues
        .iter()
        .zip(n_samples)
        .map(|(l, n)| {
            Ok(l * (budget.max_training_error
                + vc_epsilon(budget.hypothesis_volume, *n, budget.confidence_delta)?))
        })
        .sum()
}

/// One point of the prediction-error experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementPoint {
    pub stddev: f64,
    pub bias: f64,
    /// Generalization error `stddev^2 + bias^2`.
    pub xi: f64,
    /// Mean measured increase of the static recall frequency, 1/s.
    pub measured: f64,
    /// Second-order prediction `Lambda * xi`.
    pub predicted: f64,
}

const MC_CHUNK: usize = 1 << 14;

/// Monte-Carlo estimate of the recall-frequency increase caused by
/// deploying for a noisy density prediction.
///
/// Each draw predicts `max(floor, lambda + bias + stddev * z)`, deploys the
/// optimal radius for the prediction and evaluates the static recall
/// frequency at the true density. All standard deviations share the same
/// normal draws, and draws are split into fixed chunks with their own
/// streams, so the result is independent of thread count.
#[allow(clippy::too_many_arguments)]
pub fn rf_increment_monte_carlo(
    model: &PlacementModel,
    lambda: f64,
    energy: &EnergyParams,
    area: f64,
    stddevs: &[f64],
    bias: f64,
    draws: usize,
    seed: u64,
) -> Result<Vec<IncrementPoint>> {
    if !(lambda > 0.0) {
        return Err(Error::ZeroDensity);
    }
    if draws == 0 {
        return Err(Error::invalid("monte carlo", "need at least one draw"));
    }
    let best = model.min_static_rf_value(lambda, energy, area);
    let phi = |predicted: f64| -> f64 {
        let r = model
            .optimal_radius(predicted, energy.p_circuit)
            .unwrap_or(f64::NAN);
        model.static_rf_at(r, lambda, energy, area)
    };
    let chunks = draws.div_ceil(MC_CHUNK);
    let sums: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(seed, c as u64);
            let len = MC_CHUNK.min(draws - c * MC_CHUNK);
            let mut acc = vec![0.0; stddevs.len()];
            for _ in 0..len {
                let z: f64 = StandardNormal.sample(&mut rng);
                for (a, s) in acc.iter_mut().zip(stddevs) {
                    let predicted = (lambda + bias + s * z).max(PERTURBED_FLOOR);
                    *a += phi(predicted) - best;
                }
            }
            acc
        })
        .collect();
    let eigen = subregion_eigenvalue(lambda, energy, area, model)?;
    let mut out = Vec::with_capacity(stddevs.len());
    for (i, &s) in stddevs.iter().enumerate() {
        let total: f64 = sums.iter().map(|c| c[i]).sum();
        let err = GeneralizationError::new(s * s, bias)?;
        out.push(IncrementPoint {
            stddev: s,
            bias,
            xi: err.xi(),
            measured: total / draws as f64,
            predicted: rf_increment(eigen, &err),
        });
    }
    Ok(out)
}

/// Least-squares slope of `y` against `x` (with intercept).
pub fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
