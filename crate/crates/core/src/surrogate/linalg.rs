//! Small dense kernels for the GP: Cholesky and triangular solves on
//! row-major square matrices.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::Scalar;

/// Lower Cholesky factor of `a`, or `None` if a pivot is not positive.
pub(crate) fn cholesky<T: Scalar>(a: ArrayView2<T>) -> Option<Array2<T>> {
    let n = a.nrows();
    let mut l = Array2::<T>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let (ri, rj) = (l.row(i), l.row(j));
            let ri = ri.as_slice().expect("standard layout");
            let rj = rj.as_slice().expect("standard layout");
            let dot = ri[..j]
                .iter()
                .zip(&rj[..j])
                .fold(T::zero(), |acc, (&x, &y)| acc + x * y);
            let s = a[[i, j]] - dot;
            if i == j {
                if !(s > T::zero()) || !s.is_finite() {
                    return None;
                }
                l[[i, i]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    Some(l)
}

/// Solves `L z = b` for lower-triangular `L`.
pub(crate) fn forward_solve<T: Scalar>(l: ArrayView2<T>, b: ArrayView1<T>) -> Array1<T> {
    let n = b.len();
    let mut z = Array1::<T>::zeros(n);
    for i in 0..n {
        let row = l.row(i);
        let mut s = b[i];
        for k in 0..i {
            s = s - row[k] * z[k];
        }
        z[i] = s / row[i];
    }
    z
}

/// Solves `Lᵀ x = z` for lower-triangular `L`.
pub(crate) fn backward_solve<T: Scalar>(l: ArrayView2<T>, z: ArrayView1<T>) -> Array1<T> {
    let n = z.len();
    let mut x = Array1::<T>::zeros(n);
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s = s - l[[k, i]] * x[k];
        }
        x[i] = s / l[[i, i]];
    }
    x
}
