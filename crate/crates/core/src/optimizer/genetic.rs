use ndarray::Array2;
use rand::Rng;

use crate::guidance::sde_fitness;
use crate::problems::{Archive, ProblemSpec};
use crate::rng::{self, uniform01, StreamRng};
use crate::{Error, Result, Scalar};

/// Simulated binary crossover and polynomial mutation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneticConfig<T> {
    pub crossover_eta: T,
    /// Per-variable crossover probability.
    pub crossover_rate: T,
    pub mutation_eta: T,
    /// Per-variable mutation probability; `None` means `1 / d`.
    pub mutation_rate: Option<T>,
}

impl<T: Scalar> Default for GeneticConfig<T> {
    fn default() -> Self {
        Self {
            crossover_eta: T::lit(15.0),
            crossover_rate: T::lit(0.9),
            mutation_eta: T::lit(20.0),
            mutation_rate: None,
        }
    }
}

fn tournament<T: Scalar>(fitness: &[T], rng: &mut StreamRng) -> usize {
    let a = rng.random_range(0..fitness.len());
    let b = rng.random_range(0..fitness.len());
    if fitness[b] > fitness[a] { b } else { a }
}

fn sbx_pair<T: Scalar>(p1: T, p2: T, eta: T, rng: &mut StreamRng) -> (T, T) {
    let u: T = uniform01(rng);
    let one = T::one();
    let two = T::lit(2.0);
    let exp = one / (eta + one);
    let beta = if u <= T::lit(0.5) {
        (two * u).powf(exp)
    } else {
        (one / (two * (one - u))).powf(exp)
    };
    let half = T::lit(0.5);
    (
        half * ((one + beta) * p1 + (one - beta) * p2),
        half * ((one - beta) * p1 + (one + beta) * p2),
    )
}

fn polynomial_mutation<T: Scalar>(x: T, lo: T, hi: T, eta: T, rng: &mut StreamRng) -> T {
    let u: T = uniform01(rng);
    let one = T::one();
    let two = T::lit(2.0);
    let exp = one / (eta + one);
    let delta = if u < T::lit(0.5) {
        (two * u).powf(exp) - one
    } else {
        one - (two * (one - u)).powf(exp)
    };
    x + delta * (hi - lo)
}

/// Offspring from binary tournaments on shift-based density fitness over the
/// whole archive, recombined by SBX and perturbed by polynomial mutation, then
/// clipped to the problem bounds.
pub fn ga_offspring<T: Scalar>(
    archive: &Archive<T>,
    n_out: usize,
    spec: &ProblemSpec<T>,
    cfg: &GeneticConfig<T>,
    seed: u64,
) -> Result<Array2<T>> {
    if archive.len() < 2 {
        return Err(Error::InvalidState(format!(
            "genetic offspring need at least 2 archive rows, got {}",
            archive.len()
        )));
    }
    let d = spec.dim();
    if archive.x().ncols() != d {
        return Err(Error::InvalidArgument(format!(
            "archive has {} variables, problem has {d}",
            archive.x().ncols()
        )));
    }
    let fitness = sde_fitness(archive.y())?.0;
    let mut_rate = cfg
        .mutation_rate
        .unwrap_or_else(|| T::one() / T::from_usize_lossy(d));
    let (lower, upper) = (spec.lower(), spec.upper());
    let mut rng = rng::stream(seed, &[rng::tag::GENETIC]);
    let mut out = Array2::zeros((n_out, d));
    let mut row = 0;
    while row < n_out {
        let a = archive.x().row(tournament(&fitness, &mut rng)).to_vec();
        let b = archive.x().row(tournament(&fitness, &mut rng)).to_vec();
        let mut c1 = a.clone();
        let mut c2 = b.clone();
        for j in 0..d {
            let cross: T = uniform01(&mut rng);
            if cross < cfg.crossover_rate && (a[j] - b[j]).abs() > T::lit(1e-14) {
                let (u, v) = sbx_pair(a[j], b[j], cfg.crossover_eta, &mut rng);
                c1[j] = u;
                c2[j] = v;
            }
        }
        for child in [&mut c1, &mut c2] {
            for j in 0..d {
                let m: T = uniform01(&mut rng);
                if m < mut_rate {
                    child[j] = polynomial_mutation(child[j], lower[j], upper[j], cfg.mutation_eta, &mut rng);
                }
            }
            spec.clip(child);
        }
        for child in [c1, c2] {
            if row < n_out {
                out.row_mut(row).assign(&ndarray::ArrayView1::from(&child[..]));
                row += 1;
            }
        }
    }
    Ok(out)
}

/// Uniform samples inside the problem bounds.
pub fn uniform_candidates<T: Scalar>(spec: &ProblemSpec<T>, n_out: usize, seed: u64) -> Array2<T> {
    let mut rng = rng::stream(seed, &[rng::tag::UNIFORM]);
    let (lower, upper) = (spec.lower(), spec.upper());
    Array2::from_shape_fn((n_out, spec.dim()), |(_, j)| {
        let u: T = uniform01(&mut rng);
        lower[j] + u * (upper[j] - lower[j])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_problem;
    use ndarray::Array2;

    fn archive(spec: &ProblemSpec<f64>, n: usize) -> Archive<f64> {
        let x = crate::problems::latin_hypercube(n, spec, 3).unwrap();
        let mut a = Archive::new(spec.dim(), spec.n_obj());
        for row in x.rows() {
            let y = spec.evaluate(row.as_slice().unwrap()).unwrap();
            a.push(row, ndarray::ArrayView1::from(&y[..])).unwrap();
        }
        a
    }

    #[test]
    fn offspring_within_bounds_and_deterministic() {
        let spec = make_problem::<f64>("zdt1", 6).unwrap();
        let a = archive(&spec, 20);
        let cfg = GeneticConfig::default();
        let kids = ga_offspring(&a, 111, &spec, &cfg, 5).unwrap();
        assert_eq!(kids.dim(), (111, 6));
        assert!(kids.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(kids, ga_offspring(&a, 111, &spec, &cfg, 5).unwrap());
        assert_ne!(kids, ga_offspring(&a, 111, &spec, &cfg, 6).unwrap());
    }

    #[test]
    fn identical_parents_without_mutation_are_copied() {
        let spec = make_problem::<f64>("zdt1", 3).unwrap();
        let x = Array2::from_elem((4, 3), 0.25);
        let y = Array2::from_shape_fn((4, 2), |(i, j)| (i + j) as f64);
        let a = Archive::from_parts(x, y).unwrap();
        let cfg = GeneticConfig {
            mutation_rate: Some(0.0),
            ..GeneticConfig::default()
        };
        let kids = ga_offspring(&a, 9, &spec, &cfg, 1).unwrap();
        assert!(kids.iter().all(|&v| v == 0.25));
    }

    #[test]
    fn tiny_archive_rejected() {
        let spec = make_problem::<f64>("zdt1", 3).unwrap();
        let a = archive(&spec, 1);
        assert!(matches!(
            ga_offspring(&a, 4, &spec, &GeneticConfig::default(), 0),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn sbx_preserves_mean() {
        let mut r = rng::stream(2, &[]);
        for _ in 0..100 {
            let (u, v) = sbx_pair(0.2f64, 0.7, 15.0, &mut r);
            assert!((u + v - 0.9).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_pool_in_bounds() {
        let spec = make_problem::<f64>("dtlz2", 5).unwrap();
        let c = uniform_candidates(&spec, 50, 1);
        assert_eq!(c.dim(), (50, 5));
        assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
