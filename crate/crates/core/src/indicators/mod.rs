//! Pareto dominance, non-dominated filtering and the hypervolume indicator.

mod hypervolume;

use ndarray::ArrayView2;

use crate::{Error, Result, Scalar};

pub use hypervolume::{hypervolume, hypervolume_mc, McEstimate};

/// `true` iff `p` is no worse than `q` everywhere and strictly better somewhere
/// (minimization).
pub fn dominates<T: Scalar>(p: &[T], q: &[T]) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::InvalidArgument(format!(
            "dominance between vectors of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(dominates_unchecked(p, q))
}

#[inline]
pub(crate) fn dominates_unchecked<T: Scalar>(p: &[T], q: &[T]) -> bool {
    let mut strict = false;
    for (&a, &b) in p.iter().zip(q) {
        if a > b {
            return false;
        }
        strict |= a < b;
    }
    strict
}

/// Indices of rows not dominated by any other row, ascending. Duplicate rows
/// do not dominate each other and are all kept.
pub fn nondominated_filter<T: Scalar>(y: ArrayView2<T>) -> Vec<usize> {
    let rows: Vec<Vec<T>> = y.rows().into_iter().map(|r| r.to_vec()).collect();
    nondominated_indices(&rows)
}

pub(crate) fn nondominated_indices<T: Scalar, P: AsRef<[T]>>(points: &[P]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .enumerate()
                .any(|(j, q)| j != i && dominates_unchecked(q.as_ref(), points[i].as_ref()))
        })
        .collect()
}

/// Hypervolume reference point, frozen for the lifetime of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint<T: Scalar>(Vec<T>);

impl<T: Scalar> ReferencePoint<T> {
    pub fn new(r: Vec<T>) -> Result<Self> {
        if r.is_empty() || !crate::scalar::all_finite(r.iter().copied()) {
            return Err(Error::InvalidData(
                "reference point must be non-empty and finite".into(),
            ));
        }
        Ok(Self(r))
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

/// Componentwise maximum of the initial objective sample.
pub fn reference_point<T: Scalar>(y_init: ArrayView2<T>) -> Result<ReferencePoint<T>> {
    if y_init.nrows() == 0 || y_init.ncols() == 0 {
        return Err(Error::InvalidData(
            "reference point needs at least one objective vector".into(),
        ));
    }
    let r = y_init
        .columns()
        .into_iter()
        .map(|c| c.iter().copied().fold(T::neg_infinity(), T::max))
        .collect();
    ReferencePoint::new(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn dominance_cases() {
        assert!(dominates(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        assert!(!dominates(&[1.0, 2.0], &[2.0, 1.0]).unwrap());
        assert!(!dominates(&[2.0, 1.0], &[1.0, 2.0]).unwrap());
        assert!(!dominates(&[1.0, 1.0], &[1.0, 1.0]).unwrap());
        assert!(dominates(&[1.0, 1.0], &[1.0, 2.0]).unwrap());
        assert!(dominates(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn filter_cases() {
        assert_eq!(nondominated_filter(array![[1.0, 2.0], [2.0, 1.0]].view()), vec![0, 1]);
        assert_eq!(nondominated_filter(array![[0.0, 0.0], [1.0, 1.0]].view()), vec![0]);
        assert_eq!(
            nondominated_filter(array![[0.0, 3.0], [1.0, 1.0], [3.0, 0.0], [2.0, 2.0]].view()),
            vec![0, 1, 2]
        );
        assert_eq!(
            nondominated_filter(array![[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]].view()),
            vec![0, 1]
        );
    }

    #[test]
    fn reference_point_is_componentwise_max() {
        let r = reference_point(array![[1.0, 5.0], [3.0, 2.0]].view()).unwrap();
        assert_eq!(r.as_slice(), &[3.0, 5.0]);
        let r = reference_point(array![[0.5, 0.25, 7.0]].view()).unwrap();
        assert_eq!(r.as_slice(), &[0.5, 0.25, 7.0]);
        assert!(reference_point(ndarray::Array2::<f64>::zeros((0, 2)).view()).is_err());
    }

    proptest! {
        #[test]
        fn dominance_is_antisymmetric(
            p in prop::collection::vec(0i32..4, 3),
            q in prop::collection::vec(0i32..4, 3),
        ) {
            let p: Vec<f64> = p.into_iter().map(f64::from).collect();
            let q: Vec<f64> = q.into_iter().map(f64::from).collect();
            prop_assert!(!(dominates(&p, &q).unwrap() && dominates(&q, &p).unwrap()));
        }

        #[test]
        fn filtered_rows_are_mutually_nondominated(
            pts in prop::collection::vec(prop::collection::vec(0i32..6, 2), 1..30),
        ) {
            let pts: Vec<Vec<f64>> = pts.into_iter()
                .map(|r| r.into_iter().map(f64::from).collect()).collect();
            let keep = nondominated_indices(&pts);
            prop_assert!(!keep.is_empty());
            for i in 0..pts.len() {
                let dominated = pts.iter().any(|q| dominates_unchecked(q, &pts[i]));
                prop_assert_eq!(keep.contains(&i), !dominated);
            }
        }
    }
}
