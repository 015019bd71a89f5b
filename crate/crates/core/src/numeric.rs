//! Small numerical helpers shared by the quantity and solver code.

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Euclidean projection of `v` onto the probability simplex, written into `out`.
///
/// Sort-based algorithm: find the largest `rho` with
/// `u_rho - (sum_{j<=rho} u_j - 1) / rho > 0` over the descending sort `u`,
/// then clip `v - theta` at zero.
pub fn project_onto_simplex(v: &[f64], out: &mut [f64]) {
    debug_assert_eq!(v.len(), out.len());
    let n = v.len();
    if n == 0 {
        return;
    }
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    for (o, &x) in out.iter_mut().zip(v) {
        *o = (x - theta).max(0.0);
    }
}

/// Central finite-difference derivative of a scalar function.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
