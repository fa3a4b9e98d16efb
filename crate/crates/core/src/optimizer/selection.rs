use ndarray::ArrayView2;

use crate::indicators::{hypervolume, nondominated_filter, ReferencePoint};
use crate::problems::Archive;
use crate::surrogate::GpModel;
use crate::{Error, Result, Scalar};

/// Greedy hypervolume selection of `batch` indices into `predicted`.
///
/// Starting from `base`, each round adds the candidate whose inclusion gives
/// the largest hypervolume; equal values go to the smaller index. Chosen
/// candidates leave the pool.
pub fn greedy_hv_select<T: Scalar>(
    predicted: &[Vec<T>],
    base: &[Vec<T>],
    r: &ReferencePoint<T>,
    batch: usize,
) -> Result<Vec<usize>> {
    if batch == 0 || predicted.len() < batch {
        return Err(Error::InvalidArgument(format!(
            "cannot select {batch} of {} candidates",
            predicted.len()
        )));
    }
    let mut front: Vec<Vec<T>> = base.to_vec();
    let mut taken = vec![false; predicted.len()];
    let mut chosen = Vec::with_capacity(batch);
    for _ in 0..batch {
        let mut best: Option<(usize, T)> = None;
        for (i, cand) in predicted.iter().enumerate() {
            if taken[i] {
                continue;
            }
            front.push(cand.clone());
            let hv = hypervolume(&front, r)?;
            front.pop();
            if best.is_none_or(|(_, b)| hv > b) {
                best = Some((i, hv));
            }
        }
        let (i, _) = best.expect("pool not exhausted");
        taken[i] = true;
        chosen.push(i);
        front.push(predicted[i].clone());
    }
    Ok(chosen)
}

/// Picks `batch` rows of `candidates` by [`greedy_hv_select`] on surrogate
/// mean predictions, against the archive's observed non-dominated front.
pub fn batch_select<T: Scalar>(
    candidates: ArrayView2<T>,
    models: &[GpModel<T>],
    archive: &Archive<T>,
    r: &ReferencePoint<T>,
    batch: usize,
) -> Result<Vec<usize>> {
    if models.len() != r.len() {
        return Err(Error::InvalidArgument(format!(
            "{} surrogate models for {} objectives",
            models.len(),
            r.len()
        )));
    }
    let predicted = candidates
        .rows()
        .into_iter()
        .map(|row| {
            let x = row.to_vec();
            models.iter().map(|m| m.posterior_mean(&x)).collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let base: Vec<Vec<T>> = nondominated_filter(archive.y())
        .into_iter()
        .map(|i| archive.y().row(i).to_vec())
        .collect();
    greedy_hv_select(&predicted, &base, r, batch)
}
