//! Finite alphabets and probability distributions over them.

use std::collections::HashSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;

/// Allowed deviation of user-supplied weights from a unit sum.
pub const INPUT_SUM_TOLERANCE: f64 = 1e-9;
/// Deviation from a unit sum guaranteed for every stored distribution.
pub const STORED_SUM_TOLERANCE: f64 = 1e-12;
/// Largest alphabet a product distribution may have.
pub const PRODUCT_SIZE_CAP: usize = 1_000_000;

/// Ordered list of distinct, non-empty symbol labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidAlphabet(
                "alphabet must have at least one symbol".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::InvalidAlphabet(format!(
                    "label at index {i} is empty"
                )));
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidAlphabet(format!("duplicate label {l:?}")));
            }
        }
        Ok(Alphabet { labels })
    }

    /// Default labels `s0, s1, …, s{n-1}`.
    pub fn indexed(n: usize) -> Result<Self> {
        Alphabet::new((0..n).map(|i| format!("s{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Product alphabet with labels `"a⊗b"`, row-major in `(self, other)`.
    pub fn product(&self, other: &Alphabet) -> Result<Alphabet> {
        let size = self.len().saturating_mul(other.len());
        if size > PRODUCT_SIZE_CAP {
            return Err(Error::SizeLimit {
                what: "product alphabet",
                size,
                limit: PRODUCT_SIZE_CAP,
            });
        }
        let mut labels = Vec::with_capacity(size);
        for a in &self.labels {
            for b in &other.labels {
                labels.push(format!("{a}⊗{b}"));
            }
        }
        Ok(Alphabet { labels })
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;
    fn try_from(labels: Vec<String>) -> Result<Self> {
        Alphabet::new(labels)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.labels
    }
}

/// Probability vector over an [`Alphabet`]. Immutable once built.
///
/// Zero entries are kept; the support is the set of indices with a stored
/// value strictly greater than zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    #[serde(rename = "labels")]
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates `weights` against `alphabet` and stores them divided by their sum.
    ///
    /// Without `normalize`, the weights must already sum to one within
    /// [`INPUT_SUM_TOLERANCE`].
    pub fn new(alphabet: Alphabet, weights: &[f64], normalize: bool) -> Result<Self> {
        if weights.len() != alphabet.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} weights for an alphabet of {} symbols",
                weights.len(),
                alphabet.len()
            )));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "weight at index {i} is not finite"
                )));
            }
            if w < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "weight at index {i} is negative ({w})"
                )));
            }
        }
        let total = neumaier_sum(weights.iter().copied());
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("all weights are zero".into()));
        }
        if !normalize && (total - 1.0).abs() > INPUT_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1 (use normalization to rescale)"
            )));
        }
        let probs = weights
            .iter()
            .map(|&w| (w / total).min(1.0) + 0.0)
            .collect();
        Ok(Distribution { alphabet, probs })
    }

    /// Probabilities over the default alphabet `s0, …`, no rescaling beyond
    /// the input tolerance.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        Distribution::new(Alphabet::indexed(probs.len())?, probs, false)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution(
                "uniform distribution needs n >= 1".into(),
            ));
        }
        Ok(Distribution {
            alphabet: Alphabet::indexed(n)?,
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidDistribution(format!(
                "point mass index {index} out of range for n = {n}"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Ok(Distribution {
            alphabet: Alphabet::indexed(n)?,
            probs,
        })
    }

    /// Flat (Dirichlet(1, …, 1)) sample via normalized exponential spacings.
    /// Deterministic in `seed`; every coordinate is strictly positive.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution(
                "random distribution needs n >= 1".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = (0..n)
            .map(|_| loop {
                let e: f64 = Exp1.sample(&mut rng);
                if e > 0.0 {
                    break e;
                }
            })
            .collect();
        Distribution::new(Alphabet::indexed(n)?, &weights, true)
    }

    /// Random distribution with a random non-empty support; off-support
    /// entries are exact zeros.
    pub fn random_sparse(n: usize, seed: u64) -> Result<Self> {
        use rand::Rng;
        if n == 0 {
            return Err(Error::InvalidDistribution(
                "random distribution needs n >= 1".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keep = rng.random_range(1..=n);
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let mut weights = vec![0.0; n];
        for &i in &order[..keep] {
            weights[i] = loop {
                let e: f64 = Exp1.sample(&mut rng);
                if e > 0.0 {
                    break e;
                }
            };
        }
        Distribution::new(Alphabet::indexed(n)?, &weights, true)
    }

    /// Same weights on a different alphabet of equal size.
    pub fn relabel(&self, alphabet: Alphabet) -> Result<Self> {
        if alphabet.len() != self.len() {
            return Err(Error::AlphabetMismatch {
                detail: format!("{} symbols vs {}", self.len(), alphabet.len()),
            });
        }
        Ok(Distribution {
            alphabet,
            probs: self.probs.clone(),
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    pub fn is_point_mass(&self) -> bool {
        self.support_size() == 1
    }

    /// Independent joint distribution `x ⊗ y` on the product alphabet.
    pub fn product(&self, other: &Distribution) -> Result<Distribution> {
        let alphabet = self.alphabet.product(&other.alphabet)?;
        let mut probs = Vec::with_capacity(alphabet.len());
        for &a in &self.probs {
            for &b in &other.probs {
                probs.push(a * b);
            }
        }
        Ok(Distribution { alphabet, probs })
    }

    pub(crate) fn ensure_same_alphabet(&self, other: &Distribution) -> Result<()> {
        if self.alphabet == other.alphabet {
            return Ok(());
        }
        let (a, b) = (self.alphabet.labels(), other.alphabet.labels());
        let detail = match a.iter().zip(b).position(|(l, r)| l != r) {
            _ if a.len() != b.len() => format!("{} symbols vs {}", a.len(), b.len()),
            Some(i) => format!("label {i} is {:?} vs {:?}", a[i], b[i]),
            None => "labels differ".to_string(),
        };
        Err(Error::AlphabetMismatch { detail })
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.probs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            #[serde(default)]
            labels: Option<Vec<String>>,
            probs: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        let alphabet = match raw.labels {
            Some(l) => Alphabet::new(l),
            None => Alphabet::indexed(raw.probs.len()),
        }
        .map_err(serde::de::Error::custom)?;
        Distribution::new(alphabet, &raw.probs, false).map_err(serde::de::Error::custom)
    }
}

/// `true` iff every index in the support of `x` is in the support of `y`.
pub fn support_contains(x: &Distribution, y: &Distribution) -> Result<bool> {
    x.ensure_same_alphabet(y)?;
    Ok(first_support_gap(x, y).is_none())
}

/// First index where `x` has mass and `y` does not.
pub(crate) fn first_support_gap(x: &Distribution, y: &Distribution) -> Option<usize> {
    x.probs
        .iter()
        .zip(&y.probs)
        .position(|(&a, &b)| a > 0.0 && b == 0.0)
}

/// Derives an independent seed for sub-stream `stream`, item `index` (SplitMix64 finaliser).
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
