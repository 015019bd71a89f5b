//! The variational principle: `Φ_q(x, ·)` is minimised over the simplex at
//! `y = x`, with minimum value `H_q(x)`.
//!
//! [`minimize_complexity`] searches for that minimum numerically;
//! [`brute_force_minimum`] enumerates a grid as an independent check, and
//! [`principle_holds`] runs the same enumeration for arbitrary
//! interaction/coder pairs.

mod oracle;
mod solver;

pub use oracle::{
    brute_force_minimum, brute_force_minimum_over, decoy_fixtures, principle_holds, DecoyFixture,
    GenericPair, GridDomain, PrincipleOutcome, ENUMERATION_CAP, MAX_ORACLE_ALPHABET,
    MAX_PRINCIPLE_ALPHABET, MIN_GRID_STEP,
};
pub use solver::{
    minimize_batch, minimize_complexity, InitialPoint, SolverConfig, SolverResult, StepRule,
    StopReason,
};

use crate::dist::Distribution;
use crate::error::{domain, Result};
use crate::qcore::{coder_derivative_raw, coder_raw, interaction_raw, QParam};

/// `∂Φ_q/∂y_j` for `j` in the support of `x`, in support order.
///
/// Component `j` is `(1−q)·κ_q(y_j) + π_q(x_j, y_j)·κ_q'(y_j)`. At `y = x`
/// every component equals `−1`, the Lagrange condition on the simplex.
pub fn complexity_gradient(q: QParam, x: &Distribution, y: &Distribution) -> Result<Vec<f64>> {
    x.ensure_same_alphabet(y)?;
    let support = x.support();
    let xs: Vec<f64> = support.iter().map(|&i| x.probs()[i]).collect();
    let ys: Vec<f64> = support.iter().map(|&i| y.probs()[i]).collect();
    if let Some(pos) = ys.iter().position(|&v| v == 0.0) {
        return Err(domain(
            "complexity_gradient",
            format!("belief is zero at support index {}", support[pos]),
        ));
    }
    let mut grad = vec![0.0; xs.len()];
    gradient_raw(q.value(), &xs, &ys, &mut grad);
    if let Some(pos) = grad.iter().position(|g| !g.is_finite()) {
        return Err(domain(
            "complexity_gradient",
            format!("gradient overflows at support index {}", support[pos]),
        ));
    }
    Ok(grad)
}

/// Gradient on raw support slices; `y > 0` assumed.
pub(crate) fn gradient_raw(q: f64, xs: &[f64], ys: &[f64], out: &mut [f64]) {
    let slope = 1.0 - q;
    for ((g, &xj), &yj) in out.iter_mut().zip(xs).zip(ys) {
        let pi = interaction_raw(q, xj, yj);
        let kappa = coder_raw(q, yj);
        let lead = if slope == 0.0 { 0.0 } else { slope * kappa };
        *g = lead + pi * coder_derivative_raw(q, yj);
    }
}

/// Largest deviation of a gradient component from the component mean.
pub(crate) fn lagrange_residual(grad: &[f64]) -> f64 {
    if grad.is_empty() {
        return 0.0;
    }
    let mean = grad.iter().sum::<f64>() / grad.len() as f64;
    grad.iter().map(|g| (g - mean).abs()).fold(0.0, f64::max)
}
