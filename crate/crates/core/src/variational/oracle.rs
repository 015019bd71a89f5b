use std::fmt;
use std::sync::Arc;

use crate::dist::Distribution;
use crate::error::{domain, Error, Result};
use crate::qcore::{coder_raw, interaction_raw, ExtendedReal, QParam};
use crate::quantities::complexity_raw;

pub const MAX_ORACLE_ALPHABET: usize = 4;
pub const MAX_PRINCIPLE_ALPHABET: usize = 3;
pub const MIN_GRID_STEP: f64 = 1e-3;
pub const ENUMERATION_CAP: u128 = 100_000_000;

/// Which coordinates the grid ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDomain {
    /// Only the support of the truth; other coordinates stay zero.
    Support,
    /// Every coordinate of the alphabet.
    FullSimplex,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Grid resolution `m` with `1/m ≈ grid_step`, after checking the point count.
fn grid_resolution(grid_step: f64, dims: usize) -> Result<usize> {
    if !(MIN_GRID_STEP..=1.0).contains(&grid_step) {
        return Err(domain(
            "grid",
            format!("grid step must lie in [{MIN_GRID_STEP}, 1], got {grid_step}"),
        ));
    }
    let m = (1.0 / grid_step).round() as usize;
    let points = binomial((m + dims - 1) as u128, (dims.max(1) - 1) as u128);
    if points > ENUMERATION_CAP {
        return Err(Error::SizeLimit {
            what: "grid enumeration",
            size: points.min(usize::MAX as u128) as usize,
            limit: ENUMERATION_CAP as usize,
        });
    }
    Ok(m)
}

/// Calls `visit` with every vector of `dims` non-negative integers summing to `m`.
fn for_each_composition(
    m: usize,
    dims: usize,
    mut visit: impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    fn rec(
        parts: &mut Vec<usize>,
        left: usize,
        dims: usize,
        visit: &mut dyn FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        if parts.len() + 1 == dims {
            parts.push(left);
            visit(parts)?;
            parts.pop();
            return Ok(());
        }
        for k in 0..=left {
            parts.push(k);
            rec(parts, left - k, dims, visit)?;
            parts.pop();
        }
        Ok(())
    }
    if dims == 0 {
        return Ok(());
    }
    let mut parts = Vec::with_capacity(dims);
    rec(&mut parts, m, dims, &mut visit)
}

/// Exhaustive grid search for `min_y Φ_q(x, y)` over the support of `x`.
pub fn brute_force_minimum(
    q: QParam,
    x: &Distribution,
    grid_step: f64,
) -> Result<(Distribution, f64)> {
    brute_force_minimum_over(q, x, grid_step, GridDomain::Support)
}

/// As [`brute_force_minimum`], choosing the coordinates the grid covers.
///
/// At `q = 0` grid points that drop part of the support of `x` are skipped.
pub fn brute_force_minimum_over(
    q: QParam,
    x: &Distribution,
    grid_step: f64,
    grid: GridDomain,
) -> Result<(Distribution, f64)> {
    let n = x.len();
    if n > MAX_ORACLE_ALPHABET {
        return Err(Error::SizeLimit {
            what: "oracle alphabet",
            size: n,
            limit: MAX_ORACLE_ALPHABET,
        });
    }
    let coords: Vec<usize> = match grid {
        GridDomain::Support => x.support(),
        GridDomain::FullSimplex => (0..n).collect(),
    };
    let m = grid_resolution(grid_step, coords.len())?;
    let qv = q.value();
    let support = x.support();
    let mut y = vec![0.0; n];
    let mut best: Option<(Vec<f64>, f64)> = None;
    for_each_composition(m, coords.len(), |parts| {
        for (&i, &k) in coords.iter().zip(parts) {
            y[i] = k as f64 / m as f64;
        }
        if qv == 0.0 && support.iter().any(|&i| y[i] == 0.0) {
            return Ok(());
        }
        let v = complexity_raw(qv, x.probs(), &y);
        if v.is_finite() && best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((y.clone(), v));
        }
        Ok(())
    })?;
    let (point, value) =
        best.ok_or_else(|| domain("brute_force_minimum", "no finite grid point"))?;
    Ok((
        Distribution::new(x.alphabet().clone(), &point, true)?,
        value,
    ))
}

type InteractionFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
type CoderFn = dyn Fn(f64) -> ExtendedReal + Send + Sync;

/// A candidate (interaction, coder) pair for probing the variational principle.
#[derive(Clone)]
pub struct GenericPair {
    label: String,
    interaction: Arc<InteractionFn>,
    coder: Arc<CoderFn>,
}

impl fmt::Debug for GenericPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericPair")
            .field("label", &self.label)
            .finish()
    }
}

impl GenericPair {
    /// Registers a pair; the coder must vanish at certainty (`κ(1) = 0`).
    pub fn new(
        label: impl Into<String>,
        interaction: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        coder: impl Fn(f64) -> ExtendedReal + Send + Sync + 'static,
    ) -> Result<Self> {
        let label = label.into();
        match coder(1.0) {
            ExtendedReal::Finite(v) if v.abs() <= 1e-12 => {}
            other => {
                return Err(Error::InvalidConfig(format!(
                    "coder of pair {label:?} must vanish at 1, got {other}"
                )))
            }
        }
        Ok(GenericPair {
            label,
            interaction: Arc::new(interaction),
            coder: Arc::new(coder),
        })
    }

    /// The canonical pair `(π_q, κ_q)`.
    pub fn canonical(q: QParam) -> Self {
        let qv = q.value();
        GenericPair {
            label: format!("canonical q={qv}"),
            interaction: Arc::new(move |x, y| interaction_raw(qv, x, y)),
            coder: Arc::new(move |y| {
                if coder_raw(qv, y).is_infinite() {
                    ExtendedReal::PosInf
                } else {
                    ExtendedReal::Finite(coder_raw(qv, y))
                }
            }),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Σ interaction(x_i, y_i)·coder(y_i)` with the `0·∞ = 0` convention.
    pub fn complexity(&self, x: &[f64], y: &[f64]) -> Result<ExtendedReal> {
        let mut total = 0.0;
        for (i, (&xi, &yi)) in x.iter().zip(y).enumerate() {
            match (self.coder)(yi).weighted((self.interaction)(xi, yi), i)? {
                ExtendedReal::Finite(v) => total += v,
                ExtendedReal::PosInf => return Ok(ExtendedReal::PosInf),
            }
        }
        ExtendedReal::from_f64(total)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipleOutcome {
    pub holds: bool,
    pub value_at_truth: f64,
    /// Best grid point and its value.
    pub best_point: Vec<f64>,
    pub best_value: f64,
    /// The best grid point when it beats the truth.
    pub counterexample: Option<Vec<f64>>,
    pub points_checked: usize,
}

/// Checks on a full-simplex grid whether `y = x` minimises the pair's complexity.
///
/// The principle fails when some grid point beats `Φ(x, x)` by more than
/// `1e-12·max(1, |Φ(x, x)|)`.
pub fn principle_holds(
    pair: &GenericPair,
    x: &Distribution,
    grid_step: f64,
) -> Result<PrincipleOutcome> {
    let n = x.len();
    if n > MAX_PRINCIPLE_ALPHABET {
        return Err(Error::SizeLimit {
            what: "principle alphabet",
            size: n,
            limit: MAX_PRINCIPLE_ALPHABET,
        });
    }
    let m = grid_resolution(grid_step, n)?;
    let at_truth = pair
        .complexity(x.probs(), x.probs())?
        .finite()
        .ok_or_else(|| domain("principle_holds", "complexity at the truth is infinite"))?;
    let tol = 1e-12 * at_truth.abs().max(1.0);

    let mut y = vec![0.0; n];
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut checked = 0;
    for_each_composition(m, n, |parts| {
        for (v, &k) in y.iter_mut().zip(parts) {
            *v = k as f64 / m as f64;
        }
        checked += 1;
        if let ExtendedReal::Finite(v) = pair.complexity(x.probs(), &y)? {
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((y.clone(), v));
            }
        }
        Ok(())
    })?;
    let (best_point, best_value) =
        best.ok_or_else(|| domain("principle_holds", "no finite grid point"))?;
    let holds = best_value >= at_truth - tol;
    Ok(PrincipleOutcome {
        holds,
        value_at_truth: at_truth,
        counterexample: (!holds).then(|| best_point.clone()),
        best_point,
        best_value,
        points_checked: checked,
    })
}

/// A non-canonical pair together with a truth at which it violates the
/// principle and the grid point that beats the truth.
#[derive(Debug, Clone)]
pub struct DecoyFixture {
    pub pair: GenericPair,
    pub x: Vec<f64>,
    pub grid_step: f64,
    pub counterexample: Vec<f64>,
    pub best_value: f64,
}

/// Pinned decoys, each found by enumeration at step `0.005`.
///
/// Pairing `π_2` with `κ(y) = 1 − y` is not a decoy: `1 − y = ln_2(1/y)`, so
/// that pair is canonical and holds everywhere.
pub fn decoy_fixtures() -> Vec<DecoyFixture> {
    let linear = |y: f64| ExtendedReal::Finite(1.0 - y);
    let log = |y: f64| {
        if y == 0.0 {
            ExtendedReal::PosInf
        } else {
            ExtendedReal::Finite(-y.ln())
        }
    };
    vec![
        DecoyFixture {
            pair: GenericPair::new("truth-only interaction, linear coder", |x, _| x, linear)
                .expect("coder vanishes at 1"),
            x: vec![0.2, 0.8],
            grid_step: 0.005,
            counterexample: vec![0.0, 1.0],
            best_value: 0.2,
        },
        DecoyFixture {
            pair: GenericPair::new(
                "q=2 interaction, logarithmic coder",
                |x, y| 2.0 * x - y,
                log,
            )
            .expect("coder vanishes at 1"),
            x: vec![0.2, 0.8],
            grid_step: 0.005,
            counterexample: vec![0.29, 0.71],
            best_value: 0.4409825541228087,
        },
        DecoyFixture {
            pair: GenericPair::new(
                "q=1/2 interaction, linear coder",
                |x, y| 0.5 * x + 0.5 * y,
                linear,
            )
            .expect("coder vanishes at 1"),
            x: vec![0.2, 0.3, 0.5],
            grid_step: 0.005,
            counterexample: vec![0.0, 0.0, 1.0],
            best_value: 0.25,
        },
    ]
}
