use ndarray::ArrayView2;

use crate::{Error, Result, Scalar};

const ETA: f64 = 1e-12;

/// Nonnegative per-objective weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyWeights<T>(Vec<T>);

impl<T: Scalar> EntropyWeights<T> {
    pub fn uniform(n_obj: usize) -> Self {
        Self(vec![T::one() / T::from_usize_lossy(n_obj); n_obj])
    }

    /// Validates nonnegativity and normalization (within `1e-9`).
    pub fn new(w: Vec<T>) -> Result<Self> {
        let sum: T = w.iter().copied().sum();
        if w.is_empty() || w.iter().any(|v| !(*v >= T::zero())) || (sum - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::InvalidArgument(format!("invalid objective weights {w:?}")));
        }
        Ok(Self(w))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Information-entropy weights of the objective columns of `y`.
///
/// Each column is min-max normalized and turned into a distribution over
/// rows; a column's weight is proportional to one minus its normalized
/// entropy. Constant columns carry no information and get weight 0; if every
/// column is constant the weights are uniform.
pub fn entropy_weights<T: Scalar>(y: ArrayView2<T>) -> Result<EntropyWeights<T>> {
    let (n, m) = y.dim();
    if n < 2 || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "entropy weights need at least 2 rows and 1 column, got {n}x{m}"
        )));
    }
    if !crate::scalar::all_finite(y.iter().copied()) {
        return Err(Error::InvalidData("objective values must be finite".into()));
    }
    let eta = T::lit(ETA);
    let ln_n = T::from_usize_lossy(n).ln();
    let divergence: Vec<Option<T>> = y
        .columns()
        .into_iter()
        .map(|col| {
            let lo = col.iter().copied().fold(T::infinity(), T::min);
            let hi = col.iter().copied().fold(T::neg_infinity(), T::max);
            if !(hi > lo) {
                return None;
            }
            let scaled: Vec<T> = col.iter().map(|&v| (v - lo) / (hi - lo)).collect();
            let total: T = scaled.iter().copied().sum();
            let mut acc = T::zero();
            for &s in &scaled {
                let p = s / total;
                if p > T::zero() {
                    acc = acc + p * (p + eta).ln();
                }
            }
            let e = -acc / ln_n;
            Some((T::one() - e).max(T::zero()))
        })
        .collect();

    let informative = divergence.iter().filter(|d| d.is_some()).count();
    if informative == 0 {
        return Ok(EntropyWeights::uniform(m));
    }
    let total: T = divergence.iter().flatten().copied().sum();
    let w = if total > T::zero() {
        divergence.iter().map(|d| d.map_or(T::zero(), |v| v / total)).collect()
    } else {
        let share = T::one() / T::from_usize_lossy(informative);
        divergence.iter().map(|d| d.map_or(T::zero(), |_| share)).collect()
    };
    Ok(EntropyWeights(w))
}
