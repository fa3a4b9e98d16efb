use std::cmp::Ordering;

use rand::Rng;

use super::ReferencePoint;
use crate::rng;
use crate::{Error, Result, Scalar};

/// Exact hypervolume dominated by `points` and bounded by `r` (minimization).
///
/// Two objectives use a sort-and-sweep; three objectives slice along the last
/// objective and sweep each slab in 2-D. Points that do not strictly dominate
/// `r` in every coordinate enclose zero volume and are dropped, as are
/// dominated points, so the result depends only on the non-dominated subset.
pub fn hypervolume<T: Scalar, P: AsRef<[T]>>(points: &[P], r: &ReferencePoint<T>) -> Result<T> {
    let r = r.as_slice();
    let m = r.len();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedDimension(m));
    }
    let mut inside: Vec<&[T]> = Vec::with_capacity(points.len());
    for p in points {
        let p = p.as_ref();
        if p.len() != m {
            return Err(Error::InvalidArgument(format!(
                "point of length {} against reference of length {m}",
                p.len()
            )));
        }
        if p.iter().zip(r).all(|(&a, &b)| a < b) {
            inside.push(p);
        }
    }
    let keep = super::nondominated_indices(&inside);
    let inside: Vec<&[T]> = keep.into_iter().map(|i| inside[i]).collect();
    Ok(match m {
        2 => {
            let mut pts: Vec<[T; 2]> = inside.iter().map(|p| [p[0], p[1]]).collect();
            sweep_2d(&mut pts, r[0], r[1])
        }
        _ => slice_3d(&inside, r),
    })
}

fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Area of the union of boxes `[p, (r0, r1)]`; every point must lie strictly below `r`.
fn sweep_2d<T: Scalar>(pts: &mut [[T; 2]], r0: T, r1: T) -> T {
    pts.sort_by(|a, b| lex_cmp(a, b));
    let mut area = T::zero();
    let mut floor = r1;
    for p in pts.iter() {
        if p[1] < floor {
            area = area + (r0 - p[0]) * (floor - p[1]);
            floor = p[1];
        }
    }
    area
}

fn slice_3d<T: Scalar>(pts: &[&[T]], r: &[T]) -> T {
    let mut sorted: Vec<&[T]> = pts.to_vec();
    sorted.sort_by(|a, b| a[2].partial_cmp(&b[2]).unwrap_or(Ordering::Equal).then_with(|| lex_cmp(a, b)));
    let mut volume = T::zero();
    let mut slab: Vec<[T; 2]> = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let z = sorted[i][2];
        while i < sorted.len() && sorted[i][2] == z {
            slab.push([sorted[i][0], sorted[i][1]]);
            i += 1;
        }
        let top = if i < sorted.len() { sorted[i][2] } else { r[2] };
        let mut work = slab.clone();
        volume = volume + sweep_2d(&mut work, r[0], r[1]) * (top - z);
    }
    volume
}

/// Monte-Carlo hypervolume estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T> {
    pub value: T,
    pub std_error: T,
}

/// Uniform sampling over the box spanned by the componentwise minimum of
/// `points ∪ {r}` and `r`; works for any number of objectives.
pub fn hypervolume_mc<T: Scalar, P: AsRef<[T]>>(
    points: &[P],
    r: &ReferencePoint<T>,
    n_samples: usize,
    seed: u64,
) -> McEstimate<T> {
    let r = r.as_slice();
    let zero = McEstimate {
        value: T::zero(),
        std_error: T::zero(),
    };
    if points.is_empty() || n_samples == 0 {
        return zero;
    }
    let mut lo = r.to_vec();
    for p in points {
        for (l, &v) in lo.iter_mut().zip(p.as_ref()) {
            *l = l.min(v);
        }
    }
    let box_volume = lo
        .iter()
        .zip(r)
        .fold(T::one(), |acc, (&l, &u)| acc * (u - l));
    if box_volume <= T::zero() {
        return zero;
    }
    let mut rng = rng::stream(seed, &[]);
    let mut q = vec![T::zero(); r.len()];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        for (k, qk) in q.iter_mut().enumerate() {
            *qk = lo[k] + (r[k] - lo[k]) * T::lit(rng.random::<f64>());
        }
        if points
            .iter()
            .any(|p| p.as_ref().iter().zip(&q).all(|(&a, &b)| a <= b))
        {
            hits += 1;
        }
    }
    let n = T::from_usize_lossy(n_samples);
    let frac = T::from_usize_lossy(hits) / n;
    McEstimate {
        value: box_volume * frac,
        std_error: box_volume * (frac * (T::one() - frac) / n).sqrt(),
    }
}
