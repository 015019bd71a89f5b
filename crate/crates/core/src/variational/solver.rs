use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use super::{gradient_raw, lagrange_residual};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::numeric::{neumaier_sum, project_onto_simplex};
use crate::qcore::QParam;
use crate::quantities::{complexity_change, complexity_raw};

const ARMIJO_SLOPE: f64 = 1e-4;
const BACKTRACK_SHRINK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 200;

/// Where the descent starts. Only the coordinates on the support of the
/// truth are used; they are renormalised.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialPoint {
    UniformOnSupport,
    /// A flat random point on the support simplex drawn from `SolverConfig::seed`.
    Random,
    Given(Distribution),
}

/// Trial step used to open each backtracking line search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// Always start from step 1.
    Unit,
    /// Start from the Barzilai–Borwein step `sᵀs / sᵀ(g_k − g_{k−1})`.
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop once the unit projected-gradient step `‖P(y − ∇Φ) − y‖∞` is this small.
    pub step_tolerance: f64,
    /// Accepted gap `|Φ* − H_q(x)|`; a run whose line search stalls at
    /// round-off counts as converged when the predicted remaining decrease
    /// is below this.
    pub value_tolerance: f64,
    pub initial_point: InitialPoint,
    pub seed: u64,
    pub step_rule: StepRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 100_000,
            step_tolerance: 1e-10,
            value_tolerance: 1e-9,
            initial_point: InitialPoint::UniformOnSupport,
            seed: 0,
            step_rule: StepRule::Spectral,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        for (name, v) in [
            ("step_tolerance", self.step_tolerance),
            ("value_tolerance", self.value_tolerance),
        ] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in (0, 1e-2], got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The projected-gradient step fell below `step_tolerance`.
    Stationary,
    /// No step decreased `Φ`; the iterate sits at the round-off floor.
    Stalled,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub minimizer: Distribution,
    pub minimum_value: f64,
    pub iterations_used: usize,
    pub converged: bool,
    /// Largest deviation of a gradient component from their mean on the support.
    pub first_order_residual: f64,
    /// `‖P(y − ∇Φ) − y‖∞` at the last iterate examined.
    pub projected_step: f64,
    /// Decrease still available under the diagonal quadratic model of `Φ` at
    /// the final iterate; `+∞` where that model is not convex.
    pub predicted_decrease: f64,
    /// Set at `q = 0`, where every belief with the truth's support is optimal.
    pub degenerate_minimum: bool,
    pub stop_reason: StopReason,
    /// `Φ` after each accepted step, starting with the initial point.
    pub value_trace: Vec<f64>,
}

fn initial_on_support(
    config: &SolverConfig,
    x: &Distribution,
    support: &[usize],
) -> Result<Vec<f64>> {
    let k = support.len();
    let raw: Vec<f64> = match &config.initial_point {
        InitialPoint::UniformOnSupport => vec![1.0; k],
        InitialPoint::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..k)
                .map(|_| loop {
                    let e: f64 = Exp1.sample(&mut rng);
                    if e > 0.0 {
                        break e;
                    }
                })
                .collect()
        }
        InitialPoint::Given(y) => {
            x.ensure_same_alphabet(y)?;
            let v: Vec<f64> = support.iter().map(|&i| y.probs()[i]).collect();
            if let Some(pos) = v.iter().position(|&p| p == 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "initial point is zero at support index {}",
                    support[pos]
                )));
            }
            v
        }
    };
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|v| v / total).collect())
}

/// Objective restricted to the open face spanned by the support.
fn objective(q: f64, xs: &[f64], ys: &[f64]) -> f64 {
    if ys.iter().any(|&v| v <= 0.0) {
        return f64::INFINITY;
    }
    complexity_raw(q, xs, ys)
}

/// `½ Σ (g_j − λ)²/h_j` for the diagonal Hessian `h`, with `λ` the
/// multiplier of the mass constraint: the step `d_j = −(g_j − λ)/h_j` is the
/// Newton step of the separable model restricted to `Σ d = 0`.
fn model_decrease(q: f64, xs: &[f64], ys: &[f64], grad: &[f64]) -> f64 {
    let h: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| q * y.powf(q - 3.0) * ((2.0 - q) * x - (1.0 - q) * y))
        .collect();
    if h.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return if lagrange_residual(grad) == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let inv_sum: f64 = h.iter().map(|v| 1.0 / v).sum();
    let lambda = grad.iter().zip(&h).map(|(g, v)| g / v).sum::<f64>() / inv_sum;
    0.5 * grad
        .iter()
        .zip(&h)
        .map(|(g, v)| (g - lambda).powi(2) / v)
        .sum::<f64>()
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

fn projected_step(y: &[f64], g: &[f64], alpha: f64, scratch: &mut [f64], out: &mut [f64]) {
    for ((s, &yj), &gj) in scratch.iter_mut().zip(y).zip(g) {
        *s = yj - alpha * gj;
    }
    project_onto_simplex(scratch, out);
}

/// Minimises `Φ_q(x, ·)` over beliefs supported on the support of `x` by
/// projected gradient descent with Armijo backtracking.
///
/// Coordinates outside the support of `x` stay at zero. A run that stops
/// without meeting its tolerances is returned with `converged = false`.
pub fn minimize_complexity(
    q: QParam,
    x: &Distribution,
    config: &SolverConfig,
) -> Result<SolverResult> {
    config.validate()?;
    let qv = q.value();
    let support = x.support();
    let k = support.len();
    let xs: Vec<f64> = support.iter().map(|&i| x.probs()[i]).collect();
    let mut y = initial_on_support(config, x, &support)?;

    let mut value = objective(qv, &xs, &y);
    let mut trace = vec![value];
    let mut grad = vec![0.0; k];
    let mut prev_grad = vec![0.0; k];
    let mut prev_step: Option<Vec<f64>> = None;
    let mut scratch = vec![0.0; k];
    let mut trial = vec![0.0; k];
    let mut iterations = 0;
    let mut stop = StopReason::IterationLimit;
    let mut stationarity = f64::INFINITY;

    while iterations < config.max_iterations {
        gradient_raw(qv, &xs, &y, &mut grad);
        if grad.iter().any(|g| !g.is_finite()) {
            stop = StopReason::Stalled;
            break;
        }
        // Projection onto the simplex ignores constant shifts; removing the
        // mean keeps `y - alpha*g` from swamping `y` for long steps.
        let mean = grad.iter().sum::<f64>() / k as f64;
        grad.iter_mut().for_each(|g| *g -= mean);
        projected_step(&y, &grad, 1.0, &mut scratch, &mut trial);
        stationarity = sup_distance(&trial, &y);
        if stationarity <= config.step_tolerance {
            stop = StopReason::Stationary;
            break;
        }

        let mut alpha = match (config.step_rule, &prev_step) {
            (StepRule::Spectral, Some(s)) => {
                let ss: f64 = s.iter().map(|v| v * v).sum();
                let sy: f64 = s
                    .iter()
                    .zip(grad.iter().zip(&prev_grad))
                    .map(|(sv, (g, gp))| sv * (g - gp))
                    .sum();
                if sy > 0.0 {
                    (ss / sy).clamp(1e-12, 1e12)
                } else {
                    1.0
                }
            }
            _ => 1.0,
        };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            projected_step(&y, &grad, alpha, &mut scratch, &mut trial);
            if trial.iter().all(|&v| v > 0.0) {
                // Iterates sum to one only up to an ulp; drop the first-order
                // effect of that mass drift so it cannot mask the true change.
                let drift = neumaier_sum(trial.iter().zip(&y).map(|(t, v)| t - v));
                let change = complexity_change(qv, &xs, &y, &trial) - mean * drift;
                let slope: f64 = grad
                    .iter()
                    .zip(trial.iter().zip(&y))
                    .map(|(g, (t, v))| g * (t - v))
                    .sum();
                if change < 0.0 && change <= ARMIJO_SLOPE * slope {
                    accepted = Some(change);
                    break;
                }
            }
            alpha *= BACKTRACK_SHRINK;
        }
        let Some(change) = accepted else {
            stop = StopReason::Stalled;
            break;
        };

        let step: Vec<f64> = trial.iter().zip(&y).map(|(t, v)| t - v).collect();
        prev_step = Some(step);
        prev_grad.copy_from_slice(&grad);
        y.copy_from_slice(&trial);
        value += change;
        trace.push(value);
        iterations += 1;
    }

    value = objective(qv, &xs, &y);
    gradient_raw(qv, &xs, &y, &mut grad);
    let first_order_residual = lagrange_residual(&grad);
    let predicted_decrease = model_decrease(qv, &xs, &y, &grad);
    // A stall is the round-off floor of the line search; accept it when the
    // local model says less than `value_tolerance` is left to gain.
    let converged = value.is_finite()
        && match stop {
            StopReason::Stationary => true,
            StopReason::Stalled => predicted_decrease <= config.value_tolerance,
            StopReason::IterationLimit => false,
        };

    let mut probs = vec![0.0; x.len()];
    for (&i, &v) in support.iter().zip(&y) {
        probs[i] = v;
    }
    let minimizer = Distribution::new(x.alphabet().clone(), &probs, true)?;

    Ok(SolverResult {
        minimizer,
        minimum_value: value,
        iterations_used: iterations,
        converged,
        first_order_residual,
        projected_step: stationarity,
        predicted_decrease,
        degenerate_minimum: qv == 0.0 && k > 1,
        stop_reason: stop,
        value_trace: trace,
    })
}

/// Solves many problems in parallel; results keep the input order.
pub fn minimize_batch(
    problems: &[(QParam, Distribution)],
    config: &SolverConfig,
) -> Vec<Result<SolverResult>> {
    problems
        .par_iter()
        .map(|(q, x)| minimize_complexity(*q, x, config))
        .collect()
}
