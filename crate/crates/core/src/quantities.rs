//! Complexity `Φ_q`, entropy `H_q` and divergence `D_q`.
//!
//! Sums use the convention that a term whose weight is exactly zero
//! contributes zero, even against an infinite coder value.

use crate::dist::{first_support_gap, Distribution};
use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;
use crate::qcore::{coder_raw, interaction_raw, ExtendedReal, QParam};

/// `Φ_q(x, y) = Σ π_q(x_i, y_i)·κ_q(y_i)`: the total effort spent when the
/// truth is `x` and the belief is `y`.
///
/// At `q = 0` the belief must cover the support of the truth; violations are
/// reported as [`Error::SupportViolation`] rather than an infinite value.
pub fn complexity(q: QParam, x: &Distribution, y: &Distribution) -> Result<ExtendedReal> {
    x.ensure_same_alphabet(y)?;
    if q.value() == 0.0 {
        if let Some(index) = first_support_gap(x, y) {
            return Err(Error::SupportViolation { index });
        }
    }
    let qv = q.value();
    let mut terms = Vec::with_capacity(x.len());
    let mut infinite = false;
    for (i, (&xi, &yi)) in x.probs().iter().zip(y.probs()).enumerate() {
        let weight = interaction_raw(qv, xi, yi);
        let kappa = ExtendedReal::from_f64(coder_raw(qv, yi))?;
        match kappa.weighted(weight, i)? {
            ExtendedReal::Finite(v) => terms.push(v),
            ExtendedReal::PosInf => infinite = true,
        }
    }
    if infinite {
        Ok(ExtendedReal::PosInf)
    } else {
        Ok(ExtendedReal::Finite(neumaier_sum(terms)))
    }
}

/// Unchecked complexity over raw slices. `+∞` when some term is.
pub(crate) fn complexity_raw(q: f64, x: &[f64], y: &[f64]) -> f64 {
    let mut infinite = false;
    let total = neumaier_sum(x.iter().zip(y).map(|(&xi, &yi)| {
        let weight = interaction_raw(q, xi, yi);
        if weight == 0.0 {
            return 0.0;
        }
        let kappa = coder_raw(q, yi);
        if kappa.is_infinite() {
            infinite = true;
            0.0
        } else {
            weight * kappa
        }
    }));
    if infinite {
        f64::INFINITY
    } else {
        total
    }
}

/// `Φ_q(x, to) − Φ_q(x, from)` evaluated term by term without cancellation.
///
/// Uses `κ(b) − κ(a) = a^(q−1)·expm1((q−1)·ln1p((b−a)/a))/(1−q)` so that
/// changes far below the magnitude of `Φ` stay resolvable. Entries with a
/// zero belief fall back to direct differences.
pub(crate) fn complexity_change(q: f64, x: &[f64], from: &[f64], to: &[f64]) -> f64 {
    neumaier_sum(
        x.iter()
            .zip(from.iter().zip(to))
            .map(|(&xi, (&a, &b))| term_change(q, xi, a, b)),
    )
}

fn term_change(q: f64, x: f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a <= 0.0 || b <= 0.0 {
        return interaction_raw(q, x, b) * coder_raw(q, b)
            - interaction_raw(q, x, a) * coder_raw(q, a);
    }
    let delta = b - a;
    let log_ratio = (delta / a).ln_1p();
    let coder_change = if (q - 1.0).abs() < crate::qcore::BRANCH_WINDOW {
        -log_ratio
    } else {
        a.powf(q - 1.0) * ((q - 1.0) * log_ratio).exp_m1() / (1.0 - q)
    };
    interaction_raw(q, x, b) * coder_change + (1.0 - q) * delta * coder_raw(q, a)
}

/// `x·κ_q(x)` for `x ∈ (0, 1]`, finite even where `κ_q(x)` overflows.
#[inline]
pub(crate) fn self_term(q: f64, x: f64) -> f64 {
    let kappa = coder_raw(q, x);
    if kappa.is_finite() {
        x * kappa
    } else {
        // subnormal x with q < 1: x^q dominates and stays finite
        (x.powf(q) - x) / (1.0 - q)
    }
}

/// Tsallis entropy `H_q(x) = Σ x_i·κ_q(x_i)`, the minimal complexity over
/// all beliefs. Always finite and non-negative.
pub fn entropy(q: QParam, x: &Distribution) -> f64 {
    let qv = q.value();
    neumaier_sum(
        x.probs()
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| self_term(qv, p)),
    )
}

/// `D_q(x, y) = Φ_q(x, y) − H_q(x)`.
pub fn divergence(q: QParam, x: &Distribution, y: &Distribution) -> Result<ExtendedReal> {
    Ok(match complexity(q, x, y)? {
        ExtendedReal::Finite(c) => ExtendedReal::Finite(c - entropy(q, x)),
        ExtendedReal::PosInf => ExtendedReal::PosInf,
    })
}

/// Alias for [`divergence`]: the excess effort over the optimum.
pub fn frustration(q: QParam, x: &Distribution, y: &Distribution) -> Result<ExtendedReal> {
    divergence(q, x, y)
}

/// Terms of the composition law `H(x⊗y) = H(x) + H(y) + (1−q)·H(x)·H(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoAdditivity {
    pub joint: f64,
    pub left: f64,
    pub right: f64,
    pub residual: f64,
}

pub fn pseudo_additivity(
    q: QParam,
    x: &Distribution,
    y: &Distribution,
) -> Result<PseudoAdditivity> {
    let joint = entropy(q, &x.product(y)?);
    let left = entropy(q, x);
    let right = entropy(q, y);
    let predicted = left + right + (1.0 - q.value()) * left * right;
    Ok(PseudoAdditivity {
        joint,
        left,
        right,
        residual: (joint - predicted).abs(),
    })
}

/// `|H_q(x⊗y) − (H_q(x) + H_q(y) + (1−q)·H_q(x)·H_q(y))|`.
pub fn pseudo_additivity_residual(q: QParam, x: &Distribution, y: &Distribution) -> Result<f64> {
    pseudo_additivity(q, x, y).map(|p| p.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::q_log;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    fn d(p: &[f64]) -> Distribution {
        Distribution::from_probs(p).unwrap()
    }

    fn fin(v: ExtendedReal) -> f64 {
        v.finite().expect("finite value")
    }

    #[test]
    fn complexity_at_truth_is_entropy() {
        let x = d(&[0.2, 0.3, 0.5]);
        for &qq in &[0.0, 0.5, 1.0, 2.0, 3.0] {
            assert_relative_eq!(
                fin(complexity(q(qq), &x, &x).unwrap()),
                entropy(q(qq), &x),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn complexity_examples() {
        let v = complexity(q(1.0), &d(&[1.0, 0.0]), &d(&[0.5, 0.5])).unwrap();
        assert_relative_eq!(fin(v), LN_2, max_relative = 1e-15);

        let v = complexity(q(0.5), &d(&[0.5, 0.5]), &d(&[1.0, 0.0])).unwrap();
        assert_eq!(v, ExtendedReal::PosInf);
    }

    #[test]
    fn complexity_zero_weight_against_infinite_coder() {
        // q = 1: π = x, so the zero-truth entry contributes nothing even though κ(0) = ∞.
        let v = complexity(q(1.0), &d(&[1.0, 0.0]), &d(&[1.0, 0.0])).unwrap();
        assert_eq!(v, ExtendedReal::ZERO);
    }

    #[test]
    fn complexity_errors() {
        assert!(matches!(
            complexity(q(1.0), &d(&[0.5, 0.5]), &d(&[0.2, 0.3, 0.5])),
            Err(Error::AlphabetMismatch { .. })
        ));
        assert!(matches!(
            complexity(q(0.0), &d(&[0.5, 0.5]), &d(&[1.0, 0.0])),
            Err(Error::SupportViolation { index: 1 })
        ));
        assert!(matches!(
            divergence(q(0.0), &d(&[0.5, 0.5]), &d(&[1.0, 0.0])),
            Err(Error::SupportViolation { index: 1 })
        ));
    }

    #[test]
    fn accurate_change_matches_direct_difference() {
        let x = [0.2, 0.5, 0.3];
        let a = [0.3, 0.4, 0.3];
        let b = [0.25, 0.45, 0.3];
        for &qq in &[0.0, 0.25, 1.0, 1.0 + 1e-12, 2.0, 3.0] {
            let direct = complexity_raw(qq, &x, &b) - complexity_raw(qq, &x, &a);
            let accurate = complexity_change(qq, &x, &a, &b);
            assert!((direct - accurate).abs() <= 1e-14, "q={qq}");
        }
        // a first-order change of ~1e-12 on top of Φ ~ 1 keeps full relative accuracy
        let c = [0.3 + 1e-12, 0.4 - 1e-12, 0.3];
        let accurate = complexity_change(0.5, &x, &a, &c);
        let g0 = 0.5 * crate::qcore::coder_raw(0.5, 0.3)
            + crate::qcore::interaction_raw(0.5, 0.2, 0.3) * -(0.3f64.powf(-1.5));
        let g1 = 0.5 * crate::qcore::coder_raw(0.5, 0.4)
            + crate::qcore::interaction_raw(0.5, 0.5, 0.4) * -(0.4f64.powf(-1.5));
        let predicted = g0 * (c[0] - a[0]) + g1 * (c[1] - a[1]);
        assert!(((accurate - predicted) / predicted).abs() < 1e-6);
    }

    #[test]
    fn entropy_examples() {
        for &qq in &[0.0, 0.5, 1.0, 2.0, 9.0] {
            assert_eq!(
                entropy(q(qq), &Distribution::point_mass(4, 2).unwrap()),
                0.0
            );
        }
        assert_relative_eq!(entropy(q(2.0), &d(&[0.5, 0.5])), 0.5, max_relative = 1e-15);
        assert_relative_eq!(
            entropy(q(1.0), &Distribution::uniform(2).unwrap()),
            LN_2,
            max_relative = 1e-15
        );
        // |support| - 1
        let v = entropy(q(0.0), &d(&[0.5, 0.3, 0.2, 0.0]));
        assert!((v - 2.0).abs() <= 1e-15);
        // Σ x_i (1/x_i - 1) by hand
        let by_hand: f64 = [0.5_f64, 0.3, 0.2]
            .iter()
            .map(|x| x * (1.0 / x - 1.0))
            .sum();
        assert!((v - by_hand).abs() <= 1e-15);
    }

    #[test]
    fn entropy_is_finite_on_subnormal_mass() {
        let tiny = 1e-320;
        let x = Distribution::from_probs(&[1.0 - tiny, tiny]).unwrap();
        for &qq in &[0.0, 0.5, 1.0, 2.0] {
            let h = entropy(q(qq), &x);
            assert!(h.is_finite() && h >= 0.0, "q={qq} h={h}");
        }
    }

    #[test]
    fn divergence_examples() {
        let x = d(&[0.3, 0.7]);
        for &qq in &[0.0, 0.5, 1.0, 2.0] {
            assert_eq!(fin(divergence(q(qq), &x, &x).unwrap()), 0.0);
        }
        // 0.5 ln 2 + 0.5 ln(2/3)
        let kl = fin(divergence(q(1.0), &d(&[0.5, 0.5]), &d(&[0.25, 0.75])).unwrap());
        assert_relative_eq!(kl, 0.1438410362258904, max_relative = 1e-14);
        // |supp y| - |supp x|
        let third = 1.0 / 3.0;
        let d0 = fin(divergence(q(0.0), &d(&[0.5, 0.5, 0.0]), &d(&[third, third, third])).unwrap());
        assert!((d0 - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn divergence_infinite_off_support_below_one() {
        let v = divergence(q(0.5), &d(&[0.5, 0.5]), &d(&[1.0, 0.0])).unwrap();
        assert_eq!(v, ExtendedReal::PosInf);
        // q > 1: κ finite at 0, divergence finite and positive
        let v = fin(divergence(q(2.0), &d(&[0.5, 0.5]), &d(&[1.0, 0.0])).unwrap());
        assert!(v > 0.0);
    }

    #[test]
    fn negative_interaction_terms_are_kept() {
        // q = 3, x = (0, 1), y = (0.5, 0.5): π_0 = -1, κ_3(0.5) = (0.25 - 1)/(-2) = 0.375
        let x = d(&[0.0, 1.0]);
        let y = d(&[0.5, 0.5]);
        let phi = fin(complexity(q(3.0), &x, &y).unwrap());
        // π_1 = 3 - 1 = 2
        assert_relative_eq!(phi, -0.375 + 2.0 * 0.375, max_relative = 1e-15);
    }

    #[test]
    fn pseudo_additivity_examples() {
        let u = Distribution::uniform(2).unwrap();
        let p = pseudo_additivity(q(2.0), &u, &u).unwrap();
        assert_relative_eq!(p.joint, 0.75, max_relative = 1e-15);
        assert_relative_eq!(p.left, 0.5, max_relative = 1e-15);
        assert!(p.residual <= 1e-10);

        let x = Distribution::random(3, 1).unwrap();
        let y = Distribution::random(5, 2).unwrap();
        let p = pseudo_additivity(q(1.0), &x, &y).unwrap();
        assert!(p.residual <= 1e-10);
        assert!((p.joint - (p.left + p.right)).abs() <= 1e-12);

        assert!(pseudo_additivity_residual(q(0.5), &x, &y).unwrap() <= 1e-10);
    }

    #[test]
    fn entropy_maximal_at_uniform() {
        for n in 2..=8 {
            for &qq in &[0.0, 0.5, 1.0, 2.0, 3.0] {
                let h = entropy(q(qq), &Distribution::uniform(n).unwrap());
                assert_relative_eq!(h, q_log(q(qq), n as f64).unwrap(), max_relative = 1e-13);
            }
        }
    }

    fn arb_pair() -> impl Strategy<Value = (Distribution, Distribution)> {
        (2usize..12, any::<u64>(), any::<u64>()).prop_map(|(n, a, b)| {
            (
                Distribution::random(n, a).unwrap(),
                Distribution::random(n, b).unwrap(),
            )
        })
    }

    proptest! {
        #[test]
        fn divergence_nonnegative((x, y) in arb_pair(), qq in 0.0f64..4.0) {
            let v = fin(divergence(q(qq), &x, &y).unwrap());
            prop_assert!(v >= -1e-12);
        }

        #[test]
        fn complexity_decomposes((x, y) in arb_pair(), qq in 0.0f64..4.0) {
            let c = fin(complexity(q(qq), &x, &y).unwrap());
            let h = entropy(q(qq), &x);
            let dv = fin(divergence(q(qq), &x, &y).unwrap());
            prop_assert_eq!(dv, c - h);
        }

        #[test]
        fn entropy_nonincreasing_in_q(n in 2usize..10, seed in any::<u64>()) {
            let x = Distribution::random(n, seed).unwrap();
            let mut prev = entropy(q(0.0), &x);
            for k in 1..=50 {
                let h = entropy(q(k as f64 * 0.1), &x);
                prop_assert!(h <= prev + 1e-12);
                prev = h;
            }
        }
    }
}
