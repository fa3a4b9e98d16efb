//! Derivative-free simplex minimization used for GP hyperparameter search.

use crate::Scalar;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexConfig {
    pub max_iter: usize,
    /// Stop once `max f - min f` over the simplex falls below this.
    pub f_tol: f64,
    pub initial_step: f64,
}

pub(crate) struct SimplexResult<T> {
    pub x: Vec<T>,
    pub f: T,
}

/// Minimizes `f` from `x0`. The returned point is the best ever evaluated,
/// so `result.f <= f(x0)` always holds.
pub(crate) fn minimize<T: Scalar>(
    mut f: impl FnMut(&[T]) -> T,
    x0: &[T],
    cfg: SimplexConfig,
) -> SimplexResult<T> {
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));
    let mut eval = |x: &[T]| {
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] = v[i] + T::lit(cfg.initial_step);
        let fv = eval(&v);
        simplex.push((v, fv));
    }

    let order = |s: &mut Vec<(Vec<T>, T)>| {
        s.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    };

    for _ in 0..cfg.max_iter {
        order(&mut simplex);
        let (best, worst) = (simplex[0].1, simplex[n].1);
        if (worst - best).abs() <= T::lit(cfg.f_tol) {
            break;
        }

        let mut centroid = vec![T::zero(); n];
        for (v, _) in &simplex[..n] {
            for (c, &x) in centroid.iter_mut().zip(v) {
                *c = *c + x;
            }
        }
        let nf = T::from_usize_lossy(n);
        centroid.iter_mut().for_each(|c| *c = *c / nf);

        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(&c, &w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-alpha);
        let f_r = eval(&reflected);
        if f_r < simplex[0].1 {
            let expanded = along(-gamma);
            let f_e = eval(&expanded);
            simplex[n] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[n - 1].1 {
            simplex[n] = (reflected, f_r);
        } else {
            let contracted = if f_r < simplex[n].1 {
                along(-rho)
            } else {
                along(rho)
            };
            let f_c = eval(&contracted);
            if f_c < f_r.min(simplex[n].1) {
                simplex[n] = (contracted, f_c);
            } else {
                let anchor = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for (x, &a) in v.iter_mut().zip(&anchor) {
                        *x = a + sigma * (*x - a);
                    }
                    *fv = eval(v);
                }
            }
        }
    }
    order(&mut simplex);
    let (x, f) = simplex.swap_remove(0);
    SimplexResult { x, f }
}
