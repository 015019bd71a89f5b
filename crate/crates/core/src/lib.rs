//! q-deformed statistics from the interaction between truth and belief.
//!
//! A truth `x` and a belief `y`, both probability vectors over a finite
//! alphabet, interact through `π_q(x, y) = q·x + (1 − q)·y`. Each belief
//! value is charged the effort `κ_q(y) = ln_q(1/y)`. The total effort
//! `Φ_q(x, y) = Σ π_q(x_i, y_i)·κ_q(y_i)` is smallest when belief equals
//! truth; its minimum is the Tsallis entropy `H_q(x)` and the excess is the
//! divergence `D_q(x, y)`.
//!
//! Modules:
//! - [`qcore`]: scalar primitives (`ln_q`, `exp_q`, coder, interaction).
//! - [`dist`]: alphabets and distributions.
//! - [`quantities`]: complexity, entropy, divergence.
//! - [`consistency`]: soundness and weak/strong consistency checks.
//! - [`variational`]: gradient, simplex solver, grid oracles.
//! - [`reference`]: textbook formulas used as independent checks.
//! - [`report`]: serializable run reports.
//! - [`verify`]: the verification suites behind `qframe verify`.

pub mod consistency;
pub mod dist;
pub mod error;
pub mod numeric;
pub mod qcore;
pub mod quantities;
pub mod reference;
pub mod report;
pub mod variational;
pub mod verify;

pub use consistency::{
    find_strong_violation, soundness_residual, strong_consistency_check, weak_consistency_residual,
    ConsistencyWitness,
};
pub use dist::{support_contains, Alphabet, Distribution};
pub use error::{Error, Result};
pub use qcore::{coder, coder_derivative, interaction, q_exp, q_log, ExtendedReal, QParam};
pub use quantities::{
    complexity, divergence, entropy, frustration, pseudo_additivity, pseudo_additivity_residual,
    PseudoAdditivity,
};
pub use report::{InputDigest, ResultRecord, RunReport, SuiteOutcome, Witness};
pub use variational::{
    brute_force_minimum, complexity_gradient, minimize_batch, minimize_complexity, principle_holds,
    GenericPair, InitialPoint, SolverConfig, SolverResult, StepRule, StopReason,
};
pub use verify::{run_suite, Suite, VerifyConfig};
