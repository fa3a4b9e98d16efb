use ndarray::Array2;
use rand::seq::SliceRandom;

use super::ProblemSpec;
use crate::rng::{self, StreamRng};
use crate::{Error, Result, Scalar};

/// Latin hypercube design: each dimension is cut into `n` equal strata and
/// receives one jittered sample per stratum, in an independently shuffled order.
pub fn latin_hypercube<T: Scalar>(
    n: usize,
    spec: &ProblemSpec<T>,
    seed: u64,
) -> Result<Array2<T>> {
    let mut rng = rng::stream(seed, &[rng::tag::LHS]);
    latin_hypercube_with(n, spec.lower(), spec.upper(), &mut rng)
}

pub(crate) fn latin_hypercube_with<T: Scalar>(
    n: usize,
    lower: &[T],
    upper: &[T],
    rng: &mut StreamRng,
) -> Result<Array2<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "latin hypercube needs at least one sample".into(),
        ));
    }
    let d = lower.len();
    let mut out = Array2::zeros((n, d));
    let mut strata: Vec<usize> = (0..n).collect();
    let nf = n as f64;
    for j in 0..d {
        strata.shuffle(rng);
        let span = upper[j] - lower[j];
        for (i, &k) in strata.iter().enumerate() {
            let u: f64 = rng::uniform01(rng);
            // Keep the unit coordinate inside [k/n, (k+1)/n) after rounding.
            let unit = ((k as f64 + u) / nf).min((k as f64 + 1.0) / nf * (1.0 - f64::EPSILON));
            out[[i, j]] = (lower[j] + span * T::lit(unit)).min(upper[j]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_problem;
    use proptest::prelude::*;

    fn assert_stratified(x: &Array2<f64>) {
        let n = x.nrows();
        for col in x.columns() {
            let mut seen = vec![false; n];
            for &v in col {
                assert!((0.0..=1.0).contains(&v));
                let k = ((v * n as f64).floor() as usize).min(n - 1);
                assert!(!seen[k], "stratum {k} hit twice");
                seen[k] = true;
            }
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let p = make_problem::<f64>("zdt1", 3).unwrap();
        assert!(matches!(latin_hypercube(0, &p, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn single_sample_in_bounds() {
        let p = make_problem::<f64>("zdt1", 3).unwrap();
        let x = latin_hypercube(1, &p, 9).unwrap();
        assert_eq!(x.dim(), (1, 3));
        assert!(p.check_bounds(x.row(0).as_slice().unwrap()).is_ok());
    }

    #[test]
    fn quartiles_each_hit_once() {
        let p = make_problem::<f64>("zdt1", 2).unwrap();
        let x = latin_hypercube(4, &p, 5).unwrap();
        for col in x.columns() {
            let mut q: Vec<usize> = col.iter().map(|&v| (v * 4.0).floor() as usize).collect();
            q.sort();
            assert_eq!(q, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn seed_reproduces_design() {
        let p = make_problem::<f64>("dtlz2", 6).unwrap();
        let a = latin_hypercube(20, &p, 42).unwrap();
        let b = latin_hypercube(20, &p, 42).unwrap();
        let c = latin_hypercube(20, &p, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn respects_non_unit_bounds() {
        let mut rng = rng::stream(1, &[]);
        let x = latin_hypercube_with(50, &[-2.0f64, 10.0], &[3.0, 11.0], &mut rng).unwrap();
        for row in x.rows() {
            assert!((-2.0..=3.0).contains(&row[0]));
            assert!((10.0..=11.0).contains(&row[1]));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn stratified_for_any_shape(n in 1usize..=500, d in 2usize..=50, seed in any::<u64>()) {
            let p = make_problem::<f64>("zdt1", d).unwrap();
            let x = latin_hypercube(n, &p, seed).unwrap();
            prop_assert_eq!(x.dim(), (n, d));
            assert_stratified(&x);
        }
    }
}
