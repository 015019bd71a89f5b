//! Shared fixtures for the criterion benches.

use qframe::{Distribution, QParam};

/// Seeded full-support truths of the given sizes.
pub fn truths(sizes: &[usize], seed: u64) -> Vec<Distribution> {
    sizes
        .iter()
        .map(|&n| Distribution::random(n, seed ^ n as u64).expect("n >= 1"))
        .collect()
}

pub fn q(v: f64) -> QParam {
    QParam::new(v).expect("valid q")
}
