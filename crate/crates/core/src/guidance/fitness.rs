use ndarray::{Array2, ArrayView2};

use crate::problems::Archive;
use crate::{Error, Result, Scalar};

/// Shift-based density fitness, one value per row of the objective matrix.
/// Higher is better; strictly dominated rows score 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessVector<T>(pub Vec<T>);

impl<T> FitnessVector<T> {
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

/// `fitness(p) = min over q != p of || max(0, f(q) - f(p)) ||_2`.
pub fn sde_fitness<T: Scalar>(y: ArrayView2<T>) -> Result<FitnessVector<T>> {
    let n = y.nrows();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "shift-based fitness needs at least 2 rows, got {n}"
        )));
    }
    if !crate::scalar::all_finite(y.iter().copied()) {
        return Err(Error::InvalidData("objective values must be finite".into()));
    }
    let values = (0..n)
        .map(|p| {
            let fp = y.row(p);
            let mut best = T::infinity();
            for q in (0..n).filter(|&q| q != p) {
                let mut sq = T::zero();
                for (&a, &b) in y.row(q).iter().zip(fp.iter()) {
                    let shift = (a - b).max(T::zero());
                    sq = sq + shift * shift;
                }
                best = best.min(sq.sqrt());
            }
            best
        })
        .collect();
    Ok(FitnessVector(values))
}

/// Indices of the `count` fittest rows, best first; ties keep the lower index
/// first. A single row is trivially selected.
pub fn select_elites<T: Scalar>(y: ArrayView2<T>, count: usize) -> Result<Vec<usize>> {
    let n = y.nrows();
    if n == 0 {
        return Err(Error::InvalidData("cannot extract from an empty archive".into()));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("extraction count must be at least 1".into()));
    }
    if n == 1 {
        return Ok(vec![0]);
    }
    let fit = sde_fitness(y)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fit.0[b].partial_cmp(&fit.0[a]).expect("finite fitness"));
    order.truncate(count.min(n));
    Ok(order)
}

/// Decision vectors of the archive's [`select_elites`] rows.
pub fn extract_training_set<T: Scalar>(archive: &Archive<T>, count: usize) -> Result<Array2<T>> {
    let rows = select_elites(archive.y(), count)?;
    Ok(archive.select_x(&rows))
}
