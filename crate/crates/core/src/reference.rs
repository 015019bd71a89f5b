//! Textbook formulas used as independent checks. Nothing here calls into the
//! q-logarithm, coder or interaction code paths.

/// Closed-form Tsallis entropy `(1 − Σ p_i^q)/(q − 1)` over the support, `q ≠ 1`.
pub fn tsallis_closed_form(q: f64, probs: &[f64]) -> f64 {
    let power_sum: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| p.powf(q)).sum();
    (1.0 - power_sum) / (q - 1.0)
}

/// Shannon entropy in nats.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Kullback–Leibler divergence `Σ x_i ln(x_i / y_i)`; `+∞` if `y` misses the support of `x`.
pub fn kullback_leibler(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| {
            if b == 0.0 {
                f64::INFINITY
            } else {
                a * (a / b).ln()
            }
        })
        .sum()
}

/// `ln_q(n)`, the largest Tsallis entropy on `n` symbols.
pub fn tsallis_maximum(q: f64, n: usize) -> f64 {
    let n = n as f64;
    if q == 1.0 {
        n.ln()
    } else {
        (n.powf(1.0 - q) - 1.0) / (1.0 - q)
    }
}

pub fn support_size(probs: &[f64]) -> usize {
    probs.iter().filter(|&&p| p > 0.0).count()
}
