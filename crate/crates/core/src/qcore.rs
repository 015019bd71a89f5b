//! Scalar q-deformed primitives: the q-logarithm and its inverse, the
//! canonical coder `κ_q(y) = ln_q(1/y)`, its derivative, and the canonical
//! interaction `π_q(x, y) = q·x + (1 − q)·y`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Half-width of the window around `q = 1` inside which the logarithmic
/// branch is used. The generic power formula loses all precision there.
pub const BRANCH_WINDOW: f64 = 1e-9;

/// Upper cap on `q`, keeping `y^(q-1)` representable for all `y` of interest.
pub const Q_MAX: f64 = 1e6;

/// The interaction parameter `q = π(1, 0)`: finite, non-negative, at most [`Q_MAX`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || !(0.0..=Q_MAX).contains(&q) {
            return Err(Error::InvalidQ(q));
        }
        // normalise -0.0
        Ok(QParam(q + 0.0))
    }

    /// The classical, interaction-free world `π(x, y) = x`.
    pub const CLASSICAL: QParam = QParam(1.0);

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// True when `q` falls inside the logarithmic branch window.
    #[inline]
    pub fn is_classical(self) -> bool {
        (self.0 - 1.0).abs() < BRANCH_WINDOW
    }

    /// True when the canonical interaction is strongly consistent (`0 <= q <= 1`).
    #[inline]
    pub fn is_strongly_consistent(self) -> bool {
        self.0 <= 1.0
    }
}

impl<'de> Deserialize<'de> for QParam {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let q = f64::deserialize(d)?;
        QParam::new(q).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<f64> for QParam {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        QParam::new(q)
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A value in `]-∞, +∞]`. Never NaN, never `-∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtendedReal {
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    /// Maps `+∞` to [`ExtendedReal::PosInf`]; rejects NaN and `-∞`.
    pub fn from_f64(v: f64) -> Result<Self> {
        if v.is_nan() || v == f64::NEG_INFINITY {
            Err(domain(
                "ExtendedReal::from_f64",
                format!("{v} is not in ]-inf, +inf]"),
            ))
        } else if v == f64::INFINITY {
            Ok(ExtendedReal::PosInf)
        } else {
            Ok(ExtendedReal::Finite(v))
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    #[inline]
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInf => None,
        }
    }

    /// Lossy view as `f64`, with `PosInf` mapped to `f64::INFINITY`.
    #[inline]
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    /// `weight · self` under the convention `0 · (+∞) = 0`.
    ///
    /// A negative weight against `+∞` has no meaningful value and is reported
    /// as [`Error::Indeterminate`] (tagged with `index`).
    pub fn weighted(self, weight: f64, index: usize) -> Result<ExtendedReal> {
        match self {
            ExtendedReal::Finite(v) => Ok(ExtendedReal::Finite(weight * v)),
            ExtendedReal::PosInf if weight == 0.0 => Ok(ExtendedReal::ZERO),
            ExtendedReal::PosInf if weight > 0.0 => Ok(ExtendedReal::PosInf),
            ExtendedReal::PosInf => Err(Error::Indeterminate { index }),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => f.write_str("+inf"),
        }
    }
}

/// JSON cannot carry infinity: finite values serialize as numbers, `+∞` as `"+inf"`.
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            ExtendedReal::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => ExtendedReal::from_f64(v).map_err(serde::de::Error::custom),
            Repr::Text(t) if t == "+inf" || t == "inf" => Ok(ExtendedReal::PosInf),
            Repr::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"+inf\", got {t:?}"
            ))),
        }
    }
}

#[inline]
fn near_one(q: f64) -> bool {
    (q - 1.0).abs() < BRANCH_WINDOW
}

/// `ln_q` on raw values, `x > 0` assumed. `expm1` form keeps the generic
/// branch accurate just outside the window.
#[inline]
pub(crate) fn ln_q_raw(q: f64, x: f64) -> f64 {
    let ln = x.ln();
    if near_one(q) {
        ln
    } else {
        let a = 1.0 - q;
        (a * ln).exp_m1() / a
    }
}

/// `κ_q(y)` on raw values, `y ∈ [0, 1]` assumed; may return `+∞`.
#[inline]
pub(crate) fn coder_raw(q: f64, y: f64) -> f64 {
    if y == 0.0 {
        if q <= 1.0 || near_one(q) {
            f64::INFINITY
        } else {
            1.0 / (q - 1.0)
        }
    } else if near_one(q) {
        -y.ln() + 0.0
    } else {
        ((q - 1.0) * y.ln()).exp_m1() / (1.0 - q)
    }
}

/// `κ_q'(y) = -y^(q-2)` on raw values, `y > 0` assumed.
#[inline]
pub(crate) fn coder_derivative_raw(q: f64, y: f64) -> f64 {
    -y.powf(q - 2.0)
}

/// `π_q(x, y)` on raw values.
///
/// `x == y` returns `x` itself so soundness holds bit-exactly.
#[inline]
pub(crate) fn interaction_raw(q: f64, x: f64, y: f64) -> f64 {
    if x == y {
        x
    } else {
        q * x + (1.0 - q) * y
    }
}

/// The q-logarithm: `ln x` for `q = 1`, `(x^(1-q) - 1)/(1 - q)` otherwise.
pub fn q_log(q: QParam, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain(
            "q_log",
            format!("argument must be finite and > 0, got {x}"),
        ));
    }
    let v = ln_q_raw(q.value(), x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain("q_log", format!("ln_q({x}) overflows at q = {q}")))
    }
}

/// Functional inverse of [`q_log`]: `(1 + (1-q)u)^(1/(1-q))`, `exp u` at `q = 1`.
///
/// Valid for `u >= -1/(1-q)` when `q < 1` and `u < 1/(q-1)` when `q > 1`.
/// Results beyond `f64::MAX` saturate to `+∞`.
pub fn q_exp(q: QParam, u: f64) -> Result<ExtendedReal> {
    if !u.is_finite() {
        return Err(domain("q_exp", format!("argument must be finite, got {u}")));
    }
    let qv = q.value();
    if near_one(qv) {
        return ExtendedReal::from_f64(u.exp());
    }
    let a = 1.0 - qv;
    let bound = -1.0 / a;
    if qv < 1.0 && u < bound {
        return Err(domain(
            "q_exp",
            format!("u = {u} below -1/(1-q) = {bound} at q = {qv}"),
        ));
    }
    if qv > 1.0 && u >= bound {
        return Err(domain(
            "q_exp",
            format!("u = {u} not below 1/(q-1) = {bound} at q = {qv}"),
        ));
    }
    let arg = (a * u).max(-1.0);
    let v = (arg.ln_1p() / a).exp();
    ExtendedReal::from_f64(v)
}

/// The canonical coder `κ_q(y) = ln_q(1/y)`.
///
/// `κ_q(0)` is `+∞` for `q <= 1` and the continuous extension `1/(q-1)` for
/// `q > 1` (outside the branch window, where the `q = 1` value applies).
pub fn coder(q: QParam, y: f64) -> Result<ExtendedReal> {
    if !(0.0..=1.0).contains(&y) {
        return Err(domain(
            "coder",
            format!("belief must lie in [0, 1], got {y}"),
        ));
    }
    ExtendedReal::from_f64(coder_raw(q.value(), y))
}

/// `κ_q'(y) = -y^(q-2)`; equals `-1` at `y = 1` for every `q`.
pub fn coder_derivative(q: QParam, y: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(domain(
            "coder_derivative",
            format!("belief must lie in (0, 1], got {y}"),
        ));
    }
    let v = coder_derivative_raw(q.value(), y);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(
            "coder_derivative",
            format!("derivative overflows at y = {y}, q = {q}"),
        ))
    }
}

/// The canonical interaction `π_q(x, y) = q·x + (1 − q)·y`.
pub fn interaction(q: QParam, x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(
            "interaction",
            format!("truth must lie in [0, 1], got {x}"),
        ));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(domain(
            "interaction",
            format!("belief must lie in [0, 1], got {y}"),
        ));
    }
    Ok(interaction_raw(q.value(), x, y))
}
