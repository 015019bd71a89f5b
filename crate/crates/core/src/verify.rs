//! Seeded invariant suites behind `qframe verify`.
//!
//! Every check draws its cases from `derive_seed(seed, stream, index)` and
//! evaluates them independently; results are merged in case order, so a
//! report depends only on the configuration and not on the thread count.

use rayon::prelude::*;

use crate::consistency::{
    boundary_family, find_strong_violation_with, random_pair, soundness_residual, SearchConfig,
};
use crate::dist::{derive_seed, Distribution};
use crate::error::{Error, Result};
use crate::numeric::central_difference;
use crate::qcore::{ExtendedReal, QParam};
use crate::quantities::{complexity, complexity_raw, divergence, entropy, pseudo_additivity};
use crate::reference;
use crate::report::{SuiteOutcome, Witness};
use crate::variational::{
    brute_force_minimum, brute_force_minimum_over, complexity_gradient, decoy_fixtures,
    minimize_complexity, principle_holds, GenericPair, GridDomain, SolverConfig,
};

pub const MAX_VERIFY_ALPHABET: usize = 16;

/// Failing cases kept as witnesses per check.
const WITNESS_LIMIT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Consistency,
    Quantities,
    Variational,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Consistency => "consistency",
            Suite::Quantities => "quantities",
            Suite::Variational => "variational",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Largest alphabet drawn for random cases, at most 16.
    pub n_max: usize,
}

impl VerifyConfig {
    pub fn new(seed: u64, n_max: usize) -> Result<Self> {
        if !(2..=MAX_VERIFY_ALPHABET).contains(&n_max) {
            return Err(Error::InvalidConfig(format!(
                "n_max must lie in 2..={MAX_VERIFY_ALPHABET}, got {n_max}"
            )));
        }
        Ok(VerifyConfig { seed, n_max })
    }

    fn seed(&self, stream: u64, index: u64) -> u64 {
        derive_seed(self.seed, stream, index)
    }

    /// Alphabet size in `2..=min(cap, n_max)` for case `index`.
    fn size(&self, stream: u64, index: u64, cap: usize) -> usize {
        let hi = cap.min(self.n_max);
        2 + (derive_seed(self.seed, stream ^ 0x5A5A, index) % (hi as u64 - 1)) as usize
    }

    fn random(&self, stream: u64, index: u64, cap: usize) -> Distribution {
        let n = self.size(stream, index, cap);
        Distribution::random(n, self.seed(stream, index)).expect("n >= 2")
    }

    fn random_sparse(&self, stream: u64, index: u64, cap: usize) -> Distribution {
        let n = self.size(stream, index, cap);
        Distribution::random_sparse(n, self.seed(stream, index)).expect("n >= 2")
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            n_max: MAX_VERIFY_ALPHABET,
        }
    }
}

/// Runs the checks of `suite` in a fixed order.
pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Vec<SuiteOutcome> {
    match suite {
        Suite::Consistency => consistency_suite(config),
        Suite::Quantities => quantities_suite(config),
        Suite::Variational => variational_suite(config),
        Suite::All => {
            let mut all = consistency_suite(config);
            all.extend(quantities_suite(config));
            all.extend(variational_suite(config));
            all
        }
    }
}

struct Case {
    residual: f64,
    ok: bool,
    witness: Option<Witness>,
}

impl Case {
    fn measured(residual: f64, threshold: f64, witness: impl FnOnce() -> Witness) -> Case {
        let ok = residual <= threshold;
        Case {
            residual,
            ok,
            witness: (!ok).then(witness),
        }
    }

    fn flag(ok: bool, witness: impl FnOnce() -> Witness) -> Case {
        Case::measured(if ok { 0.0 } else { 1.0 }, 0.0, witness)
    }

    fn error(err: Error, witness: impl FnOnce() -> Witness) -> Case {
        let mut w = witness();
        w.description = format!("{}: {err}", w.description);
        Case {
            residual: f64::INFINITY,
            ok: false,
            witness: Some(w),
        }
    }
}

/// JSON cannot carry non-finite numbers; those residuals saturate.
pub fn report_number(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

fn outcome(check: &str, threshold: f64, cases: Vec<Case>) -> SuiteOutcome {
    let count = cases.len();
    let mut residual: f64 = 0.0;
    let mut passed = true;
    let mut witnesses = Vec::new();
    for c in cases {
        if c.residual.is_nan() || c.residual > residual {
            residual = if c.residual.is_nan() {
                f64::INFINITY
            } else {
                c.residual
            };
        }
        passed &= c.ok;
        if let Some(w) = c.witness {
            if witnesses.len() < WITNESS_LIMIT {
                witnesses.push(w);
            }
        }
    }
    SuiteOutcome {
        check: check.to_string(),
        passed,
        residual: report_number(residual),
        threshold,
        cases: count,
        witnesses,
    }
}

fn qp(v: f64) -> QParam {
    QParam::new(v).expect("suite q values are valid")
}

fn witness(
    description: impl Into<String>,
    q: f64,
    x: &Distribution,
    y: Option<&Distribution>,
) -> Witness {
    Witness {
        description: description.into(),
        q: Some(q),
        x: Some(x.probs().to_vec()),
        y: y.map(|d| d.probs().to_vec()),
        ..Witness::default()
    }
}

/// `(q, case index)` pairs in q-major order.
fn grid(qs: &[f64], per_q: usize) -> Vec<(f64, u64)> {
    qs.iter()
        .flat_map(|&q| (0..per_q as u64).map(move |k| (q, k)))
        .collect()
}

fn stepped(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + step * i as f64).collect()
}

const SOLVER_QS: [f64; 6] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
const ORACLE_QS: [f64; 3] = [0.5, 1.0, 2.0];

fn divergence_qs() -> Vec<f64> {
    stepped(0.25, 0.25, 12)
}

// ---------------------------------------------------------------- consistency

fn consistency_suite(cfg: &VerifyConfig) -> Vec<SuiteOutcome> {
    vec![
        check_soundness(),
        check_weak_consistency(cfg),
        check_strong_violations(),
        check_strong_consistency(cfg),
    ]
}

fn check_soundness() -> SuiteOutcome {
    let cases = stepped(0.0, 0.05, 101)
        .into_par_iter()
        .map(|q| {
            Case::measured(soundness_residual(qp(q), 1001), 0.0, || Witness {
                description: "pi(t, t) differs from t on the grid".into(),
                q: Some(q),
                ..Witness::default()
            })
        })
        .collect();
    outcome("soundness", 0.0, cases)
}

fn check_weak_consistency(cfg: &VerifyConfig) -> SuiteOutcome {
    let qs: Vec<f64> = (0..50).map(|i| 100.0 * i as f64 / 49.0).collect();
    let cases = grid(&qs, 100)
        .into_par_iter()
        .map(|(q, k)| {
            let (x, y) = random_pair(cfg.seed(10, 0), k, cfg.n_max);
            match crate::consistency::weak_consistency_residual(qp(q), &x, &y) {
                Ok(r) => Case::measured(r, 1e-12, || witness("weak residual", q, &x, Some(&y))),
                Err(e) => Case::error(e, || witness("weak residual", q, &x, Some(&y))),
            }
        })
        .collect();
    outcome("weak_consistency", 1e-12, cases)
}

/// Witness search above `q = 1`; every witness is kept as evidence.
fn check_strong_violations() -> SuiteOutcome {
    let qs = [1.5, 2.0, 3.0, 10.0];
    let cfg = SearchConfig::default();
    let mut witnesses = Vec::new();
    let mut passed = true;
    for &q in &qs {
        match find_strong_violation_with(qp(q), &cfg) {
            Some(w) => {
                let ok = w.reverify() && w.offending_value.is_some_and(|v| v <= -1e-12);
                passed &= ok;
                witnesses.push(Witness {
                    description: if ok {
                        "interaction entry below zero".into()
                    } else {
                        "witness failed re-verification".into()
                    },
                    q: Some(q),
                    x: Some(w.x.probs().to_vec()),
                    y: Some(w.y.probs().to_vec()),
                    offending_index: w.offending_index,
                    offending_value: w.offending_value,
                });
            }
            None => {
                passed = false;
                witnesses.push(Witness {
                    description: "no violation found".into(),
                    q: Some(q),
                    ..Witness::default()
                });
            }
        }
    }
    SuiteOutcome {
        check: "strong_violation_above_one".into(),
        passed,
        residual: if passed { 0.0 } else { 1.0 },
        threshold: 0.0,
        cases: qs.len(),
        witnesses,
    }
}

fn check_strong_consistency(cfg: &VerifyConfig) -> SuiteOutcome {
    let qs = [0.0, 0.25, 0.5, 0.75, 1.0];
    let search = SearchConfig {
        seed: cfg.seed(11, 0),
        trials: 10_000,
        n_max: cfg.n_max,
    };
    let cases = qs
        .iter()
        .map(|&q| match find_strong_violation_with(qp(q), &search) {
            None => Case::flag(true, Witness::default),
            Some(w) => Case::flag(false, || Witness {
                description: "interaction entry outside [0, 1]".into(),
                q: Some(q),
                x: Some(w.x.probs().to_vec()),
                y: Some(w.y.probs().to_vec()),
                offending_index: w.offending_index,
                offending_value: w.offending_value,
            }),
        })
        .collect();
    let mut out = outcome("strong_consistency_up_to_one", 0.0, cases);
    out.cases = qs.len() * (search.trials + boundary_family().len());
    out
}

// ----------------------------------------------------------------- quantities

fn quantities_suite(cfg: &VerifyConfig) -> Vec<SuiteOutcome> {
    vec![
        check_closed_form(cfg),
        check_classical_reduction(cfg),
        check_complexity_decomposition(cfg),
        check_divergence_nonnegative(cfg),
        check_divergence_identity(cfg),
        check_divergence_discernibility(cfg),
        check_pseudo_additivity(cfg),
        check_additivity_classical(cfg),
        check_entropy_bounds(cfg),
        check_entropy_monotone(cfg),
        check_q_zero_entropy(cfg),
        check_q_zero_divergence(cfg),
        check_q_zero_support_error(cfg),
    ]
}

/// Dense for three cases in four, sparse otherwise.
fn mixed_distribution(cfg: &VerifyConfig, stream: u64, k: u64, cap: usize) -> Distribution {
    if k % 4 == 3 {
        cfg.random_sparse(stream, k, cap)
    } else {
        cfg.random(stream, k, cap)
    }
}

fn check_closed_form(cfg: &VerifyConfig) -> SuiteOutcome {
    let qs: Vec<f64> = stepped(0.1, 0.1, 50)
        .into_iter()
        .filter(|q| (q - 1.0).abs() > 1e-9)
        .collect();
    let cases = (0..1000u64)
        .into_par_iter()
        .flat_map_iter(|k| {
            let x = mixed_distribution(cfg, 20, k, MAX_VERIFY_ALPHABET);
            qs.iter()
                .map(|&q| {
                    let h = entropy(qp(q), &x);
                    let r = reference::tsallis_closed_form(q, x.probs());
                    let err = (h - r).abs() / r.abs().max(f64::MIN_POSITIVE);
                    let err = if h == r { 0.0 } else { err };
                    Case::measured(err, 1e-12, || witness("relative error", q, &x, None))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    outcome("tsallis_closed_form", 1e-12, cases)
}

fn check_classical_reduction(cfg: &VerifyConfig) -> SuiteOutcome {
    let one = QParam::CLASSICAL;
    let cases = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let x = mixed_distribution(cfg, 21, k, MAX_VERIFY_ALPHABET);
            let y = Distribution::random(x.len(), cfg.seed(22, k)).expect("n >= 2");
            let h_err = (entropy(one, &x) - reference::shannon_entropy(x.probs())).abs();
            let w = || witness("Shannon/KL mismatch", 1.0, &x, Some(&y));
            match divergence(one, &x, &y) {
                Ok(d) => {
                    let kl = reference::kullback_leibler(x.probs(), y.probs());
                    let d_err = (d.to_f64() - kl).abs();
                    Case::measured(h_err.max(d_err), 1e-12, w)
                }
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("classical_reduction", 1e-12, cases)
}

fn ulp(v: f64) -> f64 {
    let a = v.abs();
    f64::from_bits(a.to_bits() + 1) - a
}

fn check_complexity_decomposition(cfg: &VerifyConfig) -> SuiteOutcome {
    let cases = grid(&divergence_qs(), 100)
        .into_par_iter()
        .map(|(q, k)| {
            let x = cfg.random(23, k, MAX_VERIFY_ALPHABET);
            let y = Distribution::random(x.len(), cfg.seed(24, k)).expect("n >= 2");
            let w = || witness("complexity != entropy + divergence", q, &x, Some(&y));
            match (complexity(qp(q), &x, &y), divergence(qp(q), &x, &y)) {
                (Ok(ExtendedReal::Finite(c)), Ok(ExtendedReal::Finite(d))) => {
                    let sum = entropy(qp(q), &x) + d;
                    Case::measured((sum - c).abs() / ulp(c), 1.0, w)
                }
                (Ok(_), Ok(_)) => Case::flag(false, w),
                (Err(e), _) | (_, Err(e)) => Case::error(e, w),
            }
        })
        .collect();
    outcome("complexity_decomposition_ulps", 1.0, cases)
}

fn check_divergence_nonnegative(cfg: &VerifyConfig) -> SuiteOutcome {
    let cases = grid(&divergence_qs(), 10_000)
        .into_par_iter()
        .map(|(q, k)| {
            let (x, y) = random_pair(cfg.seed(25, 0), k, cfg.n_max);
            let w = || witness("negative divergence", q, &x, Some(&y));
            match divergence(qp(q), &x, &y) {
                Ok(d) => Case::measured(-d.to_f64(), 1e-12, w),
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("divergence_nonnegative", 1e-12, cases)
}

fn check_divergence_identity(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut qs = vec![0.0];
    qs.extend(divergence_qs());
    let cases = grid(&qs, 1000)
        .into_par_iter()
        .map(|(q, k)| {
            let x = mixed_distribution(cfg, 26, k, cfg.n_max);
            let w = || witness("divergence of x from itself", q, &x, None);
            match divergence(qp(q), &x, &x) {
                Ok(d) => Case::measured(d.to_f64().abs(), 1e-12, w),
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("divergence_identity", 1e-12, cases)
}

/// Mixture `(1 − t)·x + t·z`, which approaches `x` as `t → 0`.
fn mixture(x: &Distribution, z: &Distribution, t: f64) -> Distribution {
    let w: Vec<f64> = x
        .probs()
        .iter()
        .zip(z.probs())
        .map(|(&a, &b)| (1.0 - t) * a + t * b)
        .collect();
    Distribution::new(x.alphabet().clone(), &w, true).expect("mixture of distributions")
}

/// Small divergence forces closeness: `D ≤ 1e-10` implies `‖x − y‖∞ ≤ 1e-4`.
///
/// Random pairs are almost never close, so each base pair is also walked
/// towards `x` along a mixture path.
fn check_divergence_discernibility(cfg: &VerifyConfig) -> SuiteOutcome {
    let ts = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
    let cases = grid(&divergence_qs(), 1000)
        .into_par_iter()
        .flat_map_iter(|(q, k)| {
            let x = cfg.random(27, k, cfg.n_max);
            let z = Distribution::random(x.len(), cfg.seed(28, k)).expect("n >= 2");
            ts.iter()
                .map(|&t| {
                    let y = mixture(&x, &z, t);
                    let w = || witness("small divergence but distant belief", q, &x, Some(&y));
                    match divergence(qp(q), &x, &y) {
                        Ok(d) => {
                            let dist = x
                                .probs()
                                .iter()
                                .zip(y.probs())
                                .map(|(a, b)| (a - b).abs())
                                .fold(0.0, f64::max);
                            let r = if d.to_f64() <= 1e-10 { dist } else { 0.0 };
                            Case::measured(r, 1e-4, w)
                        }
                        Err(e) => Case::error(e, w),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    outcome("divergence_discernibility", 1e-4, cases)
}

fn check_pseudo_additivity(cfg: &VerifyConfig) -> SuiteOutcome {
    let cases = grid(&ORACLE_QS, 1000)
        .into_par_iter()
        .map(|(q, k)| {
            let x = mixed_distribution(cfg, 29, k, 8);
            let y = mixed_distribution(cfg, 30, k, 8);
            let w = || witness("composition law residual", q, &x, Some(&y));
            match pseudo_additivity(qp(q), &x, &y) {
                Ok(p) => Case::measured(p.residual, 1e-10, w),
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("pseudo_additivity", 1e-10, cases)
}

fn check_additivity_classical(cfg: &VerifyConfig) -> SuiteOutcome {
    let cases = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let x = mixed_distribution(cfg, 29, k, 8);
            let y = mixed_distribution(cfg, 30, k, 8);
            let w = || witness("Shannon additivity residual", 1.0, &x, Some(&y));
            match pseudo_additivity(QParam::CLASSICAL, &x, &y) {
                Ok(p) => Case::measured((p.joint - p.left - p.right).abs(), 1e-12, w),
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("additivity_classical", 1e-12, cases)
}

/// `0 ≤ H_q ≤ ln_q(n)` with the maximum at the uniform distribution.
fn check_entropy_bounds(cfg: &VerifyConfig) -> SuiteOutcome {
    let qs = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
    let sizes: Vec<usize> = (2..=8.min(cfg.n_max)).collect();
    let jobs: Vec<(f64, usize, u64)> = qs
        .iter()
        .flat_map(|&q| {
            sizes
                .iter()
                .flat_map(move |&n| (0..1000u64).map(move |k| (q, n, k)))
        })
        .collect();
    let cases = jobs
        .into_par_iter()
        .map(|(q, n, k)| {
            let u = Distribution::uniform(n).expect("n >= 2");
            let h_max = entropy(qp(q), &u);
            let bound_err = (h_max - reference::tsallis_maximum(q, n)).abs();
            let z = if k % 2 == 0 {
                Distribution::random(n, cfg.seed(31, k))
            } else {
                Distribution::random_sparse(n, cfg.seed(31, k))
            }
            .expect("n >= 2");
            let t = (derive_seed(cfg.seed, 32, k) >> 11) as f64 / (1u64 << 53) as f64;
            let p = mixture(&u, &z, t.max(1e-6));
            let h = entropy(qp(q), &p);
            let r = bound_err.max(h - h_max).max(-h);
            Case::measured(r, 1e-12, || {
                witness("entropy outside [0, ln_q n]", q, &p, None)
            })
        })
        .collect();
    outcome("entropy_bounds", 1e-12, cases)
}

fn check_entropy_monotone(cfg: &VerifyConfig) -> SuiteOutcome {
    let qs = stepped(0.0, 0.1, 51);
    let cases = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let x = cfg.random(33, k, cfg.n_max);
            let hs: Vec<f64> = qs.iter().map(|&q| entropy(qp(q), &x)).collect();
            let rise = hs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            Case::measured(rise, 1e-12, || {
                witness("entropy increases with q", 0.0, &x, None)
            })
        })
        .collect();
    outcome("entropy_monotone_in_q", 1e-12, cases)
}

fn check_q_zero_entropy(cfg: &VerifyConfig) -> SuiteOutcome {
    let zero = qp(0.0);
    let cases = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let x = cfg.random_sparse(34, k, cfg.n_max);
            let expected = x.support_size() as f64 - 1.0;
            Case::measured((entropy(zero, &x) - expected).abs(), 1e-12, || {
                witness("H_0 differs from support size minus one", 0.0, &x, None)
            })
        })
        .collect();
    outcome("q_zero_entropy", 1e-12, cases)
}

/// A belief whose support is the support of `x` plus random extra symbols.
fn covering_belief(cfg: &VerifyConfig, x: &Distribution, k: u64) -> Distribution {
    let base = Distribution::random(x.len(), cfg.seed(35, k)).expect("n >= 2");
    let mask = derive_seed(cfg.seed, 36, k);
    let w: Vec<f64> = base
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if x.probs()[i] > 0.0 || (mask >> i) & 1 == 1 {
                b
            } else {
                0.0
            }
        })
        .collect();
    Distribution::new(x.alphabet().clone(), &w, true).expect("positive on the support of x")
}

fn check_q_zero_divergence(cfg: &VerifyConfig) -> SuiteOutcome {
    let zero = qp(0.0);
    let cases = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let x = cfg.random_sparse(37, k, cfg.n_max);
            let y = covering_belief(cfg, &x, k);
            let expected = y.support_size() as f64 - x.support_size() as f64;
            let w = || witness("D_0 differs from the support size gap", 0.0, &x, Some(&y));
            match divergence(zero, &x, &y) {
                Ok(d) => Case::measured((d.to_f64() - expected).abs(), 1e-12, w),
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("q_zero_divergence", 1e-12, cases)
}

fn check_q_zero_support_error(cfg: &VerifyConfig) -> SuiteOutcome {
    let zero = qp(0.0);
    let cases = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let x = cfg.random(38, k, cfg.n_max);
            let drop = (derive_seed(cfg.seed, 39, k) % x.len() as u64) as usize;
            let mut w: Vec<f64> = Distribution::random(x.len(), cfg.seed(40, k))
                .expect("n >= 2")
                .probs()
                .to_vec();
            w[drop] = 0.0;
            let y = Distribution::new(x.alphabet().clone(), &w, true).expect("n >= 2");
            let raised = matches!(
                complexity(zero, &x, &y),
                Err(Error::SupportViolation { index }) if index == drop
            );
            Case::flag(raised, || {
                witness("support violation not reported", 0.0, &x, Some(&y))
            })
        })
        .collect();
    outcome("q_zero_support_error", 0.0, cases)
}

// ---------------------------------------------------------------- variational

fn variational_suite(cfg: &VerifyConfig) -> Vec<SuiteOutcome> {
    let mut out = vec![check_first_order(cfg), check_finite_differences(cfg)];
    out.extend(check_solver(cfg));
    out.extend(check_oracle(cfg));
    out.push(check_full_simplex(cfg));
    out.push(check_q_zero_solver(cfg));
    out.push(check_canonical_principle());
    out.push(check_decoys());
    out
}

fn check_first_order(cfg: &VerifyConfig) -> SuiteOutcome {
    let cases = grid(&SOLVER_QS, 50)
        .into_par_iter()
        .map(|(q, k)| {
            let x = cfg.random(50, k, cfg.n_max);
            let w = || witness("gradient at truth differs from -1", q, &x, None);
            match complexity_gradient(qp(q), &x, &x) {
                Ok(g) => Case::measured(
                    g.iter().map(|v| (v + 1.0).abs()).fold(0.0, f64::max),
                    1e-10,
                    w,
                ),
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("first_order_identity", 1e-10, cases)
}

fn check_finite_differences(cfg: &VerifyConfig) -> SuiteOutcome {
    let cases = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let q = SOLVER_QS[k as usize % SOLVER_QS.len()];
            let x = cfg.random(51, k, cfg.n_max);
            let z = Distribution::random(x.len(), cfg.seed(52, k)).expect("n >= 2");
            // keep every coordinate at least 1/(2n) away from the boundary
            let y = mixture(&Distribution::uniform(x.len()).expect("n >= 2"), &z, 0.5);
            let w = || {
                witness(
                    "gradient disagrees with central differences",
                    q,
                    &x,
                    Some(&y),
                )
            };
            match complexity_gradient(qp(q), &x, &y) {
                Ok(g) => {
                    let worst = (0..x.len())
                        .map(|j| {
                            let f = |t: f64| {
                                let mut p = y.probs().to_vec();
                                p[j] = t;
                                complexity_raw(q, x.probs(), &p)
                            };
                            let fd = central_difference(f, y.probs()[j], 1e-6);
                            (fd - g[j]).abs() / g[j].abs()
                        })
                        .fold(0.0, f64::max);
                    Case::measured(worst, 1e-6, w)
                }
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("gradient_finite_difference", 1e-6, cases)
}

fn check_solver(cfg: &VerifyConfig) -> Vec<SuiteOutcome> {
    let config = SolverConfig::default();
    let jobs: Vec<(f64, usize, u64)> = SOLVER_QS
        .iter()
        .flat_map(|&q| (2..=cfg.n_max).flat_map(move |n| (0..10u64).map(move |k| (q, n, k))))
        .collect();
    let runs: Vec<_> = jobs
        .into_par_iter()
        .map(|(q, n, k)| {
            let x = Distribution::random(n, cfg.seed(53, (n as u64) << 32 | k)).expect("n >= 2");
            let res = minimize_complexity(qp(q), &x, &config);
            (q, x, res)
        })
        .collect();

    let mut converged = Vec::new();
    let mut gap = Vec::new();
    let mut distance = Vec::new();
    let mut floor = Vec::new();
    let mut descent = Vec::new();
    for (q, x, res) in &runs {
        let (q, x) = (*q, x);
        let w = |what: &str, y: Option<&Distribution>| witness(what, q, x, y);
        match res {
            Ok(r) => {
                let h = entropy(qp(q), x);
                let y = &r.minimizer;
                converged.push(Case::flag(r.converged, || {
                    w("solver did not converge", Some(y))
                }));
                let g = if r.converged {
                    (r.minimum_value - h).abs()
                } else {
                    f64::INFINITY
                };
                gap.push(Case::measured(g, 1e-9, || {
                    w("minimum differs from entropy", Some(y))
                }));
                let d = x
                    .probs()
                    .iter()
                    .zip(y.probs())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                distance.push(Case::measured(d, 1e-6, || {
                    w("minimizer far from truth", Some(y))
                }));
                floor.push(Case::measured(h - r.minimum_value, 1e-12, || {
                    w("minimum below entropy", Some(y))
                }));
                let rise = r
                    .value_trace
                    .windows(2)
                    .map(|p| {
                        if p[1].is_nan() {
                            f64::INFINITY
                        } else {
                            p[1] - p[0]
                        }
                    })
                    .fold(0.0, f64::max);
                descent.push(Case::measured(rise, 0.0, || {
                    w("value trace increased", Some(y))
                }));
            }
            Err(e) => {
                for list in [
                    &mut converged,
                    &mut gap,
                    &mut distance,
                    &mut floor,
                    &mut descent,
                ] {
                    list.push(Case::error(e.clone(), || w("solver error", None)));
                }
            }
        }
    }
    vec![
        outcome("solver_converged", 0.0, converged),
        outcome("solver_value_gap", 1e-9, gap),
        outcome("solver_minimizer_distance", 1e-6, distance),
        outcome("solver_value_floor", 1e-12, floor),
        outcome("solver_monotone_descent", 0.0, descent),
    ]
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Random truth with every coordinate at least `step`. A coordinate below the
/// grid step has no positive grid value near it, which pushes the grid
/// minimizer more than a step away for reasons unrelated to the objective.
fn grid_resolvable(n: usize, seed: u64, step: f64) -> Distribution {
    let z = Distribution::random(n, seed).expect("n >= 2");
    let w: Vec<f64> = z
        .probs()
        .iter()
        .map(|v| step + (1.0 - n as f64 * step) * v)
        .collect();
    Distribution::from_probs(&w).expect("floored mixture sums to one")
}

/// Grid oracle against the truth and against the solver, `n ∈ {2, 3}`.
fn check_oracle(cfg: &VerifyConfig) -> Vec<SuiteOutcome> {
    const STEP: f64 = 0.01;
    let config = SolverConfig::default();
    let jobs: Vec<(f64, usize, u64)> = ORACLE_QS
        .iter()
        .flat_map(|&q| (2..=3.min(cfg.n_max)).flat_map(move |n| (0..10u64).map(move |k| (q, n, k))))
        .collect();
    let runs: Vec<_> = jobs
        .into_par_iter()
        .map(|(q, n, k)| {
            let x = grid_resolvable(n, cfg.seed(54, (n as u64) << 32 | k), STEP);
            let grid = brute_force_minimum(qp(q), &x, STEP);
            let solved = minimize_complexity(qp(q), &x, &config);
            (q, x, grid, solved)
        })
        .collect();

    let mut near_truth = Vec::new();
    let mut above_entropy = Vec::new();
    let mut solver_value = Vec::new();
    let mut solver_point = Vec::new();
    for (q, x, grid, solved) in &runs {
        let (q, x) = (*q, x);
        let w = |what: &str, y: Option<&Distribution>| witness(what, q, x, y);
        match (grid, solved) {
            (Ok((p, v)), Ok(s)) => {
                let h = entropy(qp(q), x);
                near_truth.push(Case::measured(linf(p.probs(), x.probs()), STEP, || {
                    w("grid minimizer more than one step from truth", Some(p))
                }));
                above_entropy.push(Case::measured(h - v, 1e-12, || {
                    w("grid value below entropy", Some(p))
                }));
                solver_value.push(Case::measured(s.minimum_value - v, 1e-9, || {
                    w("solver value above grid value", Some(&s.minimizer))
                }));
                solver_point.push(Case::measured(
                    linf(p.probs(), s.minimizer.probs()),
                    STEP,
                    || w("solver and grid minimizers disagree", Some(&s.minimizer)),
                ));
            }
            (Err(e), _) | (_, Err(e)) => {
                for list in [
                    &mut near_truth,
                    &mut above_entropy,
                    &mut solver_value,
                    &mut solver_point,
                ] {
                    list.push(Case::error(e.clone(), || w("oracle error", None)));
                }
            }
        }
    }
    vec![
        outcome("oracle_minimizer_near_truth", STEP, near_truth),
        outcome("oracle_value_floor", 1e-12, above_entropy),
        outcome("solver_oracle_value", 1e-9, solver_value),
        outcome("solver_oracle_minimizer", STEP, solver_point),
    ]
}

/// Above `q = 1` off-support mass is not excluded by the coder, so the
/// support restriction is rechecked on the full simplex.
fn check_full_simplex(cfg: &VerifyConfig) -> SuiteOutcome {
    let qs = [1.5, 2.0, 3.0];
    let n = 3.min(cfg.n_max);
    let cases = grid(&qs, 10)
        .into_par_iter()
        .map(|(q, k)| {
            let mut w = Distribution::random(n, cfg.seed(55, k))
                .expect("n >= 2")
                .probs()
                .to_vec();
            if n == 3 {
                w[(k % 3) as usize] = 0.0;
            }
            let x = Distribution::from_probs(&normalized(&w)).expect("normalized");
            let wit = || witness("full-simplex grid beats the entropy", q, &x, None);
            match brute_force_minimum_over(qp(q), &x, 0.01, GridDomain::FullSimplex) {
                Ok((_, v)) => Case::measured(entropy(qp(q), &x) - v, 1e-12, wit),
                Err(e) => Case::error(e, wit),
            }
        })
        .collect();
    outcome("full_simplex_floor", 1e-12, cases)
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

fn check_q_zero_solver(cfg: &VerifyConfig) -> SuiteOutcome {
    let config = SolverConfig::default();
    let cases = (0..20u64)
        .into_par_iter()
        .map(|k| {
            let x = cfg.random_sparse(56, k, cfg.n_max);
            let w = || witness("q = 0 minimum not reported as degenerate", 0.0, &x, None);
            match minimize_complexity(qp(0.0), &x, &config) {
                Ok(r) => {
                    let expected = x.support_size() as f64 - 1.0;
                    let flag_ok = r.converged && r.degenerate_minimum == (x.support_size() > 1);
                    let r_gap = if flag_ok {
                        (r.minimum_value - expected).abs()
                    } else {
                        f64::INFINITY
                    };
                    Case::measured(r_gap, 1e-9, w)
                }
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("q_zero_degenerate_minimum", 1e-9, cases)
}

fn check_canonical_principle() -> SuiteOutcome {
    let truths = [vec![0.3, 0.7], vec![0.2, 0.3, 0.5]];
    let jobs: Vec<(f64, usize)> = ORACLE_QS
        .iter()
        .flat_map(|&q| (0..truths.len()).map(move |i| (q, i)))
        .collect();
    let cases = jobs
        .into_par_iter()
        .map(|(q, i)| {
            let x = Distribution::from_probs(&truths[i]).expect("valid truth");
            let w = || witness("canonical pair beaten on the grid", q, &x, None);
            match principle_holds(&GenericPair::canonical(qp(q)), &x, 0.005) {
                Ok(o) => Case::flag(o.holds, || Witness {
                    y: o.counterexample.clone(),
                    offending_value: Some(o.best_value),
                    ..w()
                }),
                Err(e) => Case::error(e, w),
            }
        })
        .collect();
    outcome("principle_canonical_pairs", 0.0, cases)
}

/// Every pinned decoy must fail at its pinned point; the evidence is kept.
fn check_decoys() -> SuiteOutcome {
    let fixtures = decoy_fixtures();
    let mut passed = true;
    let mut witnesses = Vec::new();
    for fx in &fixtures {
        let x = Distribution::from_probs(&fx.x).expect("valid fixture");
        let (ok, point, value) = match principle_holds(&fx.pair, &x, fx.grid_step) {
            Ok(o) => {
                let matches = o
                    .counterexample
                    .as_ref()
                    .is_some_and(|c| linf(c, &fx.counterexample) <= 1e-12);
                (!o.holds && matches, o.counterexample, Some(o.best_value))
            }
            Err(_) => (false, None, None),
        };
        passed &= ok;
        witnesses.push(Witness {
            description: format!(
                "{}: {}",
                fx.pair.label(),
                if ok {
                    "beaten at the pinned point"
                } else {
                    "pinned counterexample not reproduced"
                }
            ),
            q: None,
            x: Some(fx.x.clone()),
            y: point,
            offending_index: None,
            offending_value: value,
        });
    }
    SuiteOutcome {
        check: "principle_decoy_pairs".into(),
        passed,
        residual: if passed { 0.0 } else { 1.0 },
        threshold: 0.0,
        cases: fixtures.len(),
        witnesses,
    }
}
