//! Per-objective Gaussian-process regression.
//!
//! Inputs are mapped to the unit box with the problem bounds and targets are
//! standardized; predictions and gradients are reported back in raw units.
//! The kernel is squared-exponential with one lengthscale per input
//! dimension. Hyperparameters maximize the log marginal likelihood with a
//! multi-start simplex search in log space.

mod linalg;
mod nelder_mead;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;

use crate::rng;
use crate::scalar::all_finite;
use crate::{Error, Result, Scalar};

use linalg::{backward_solve, cholesky, forward_solve};
use nelder_mead::SimplexConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelHyper<T> {
    pub signal_variance: T,
    pub lengthscales: Vec<T>,
    pub noise_variance: T,
}

impl<T: Scalar> KernelHyper<T> {
    fn from_log(theta: &[T]) -> Self {
        let d = theta.len() - 2;
        Self {
            signal_variance: theta[0].exp(),
            lengthscales: theta[1..=d].iter().map(|v| v.exp()).collect(),
            noise_variance: theta[d + 1].exp(),
        }
    }

    fn to_log(&self) -> Vec<T> {
        let mut theta = Vec::with_capacity(self.lengthscales.len() + 2);
        theta.push(self.signal_variance.ln());
        theta.extend(self.lengthscales.iter().map(|v| v.ln()));
        theta.push(self.noise_variance.ln());
        theta
    }
}

/// Hyperparameter search settings. Ranges are in standardized-target,
/// unit-box-input units.
#[derive(Debug, Clone, PartialEq)]
pub struct GpConfig {
    pub restarts: usize,
    pub max_iter: usize,
    pub f_tol: f64,
    pub signal_variance_range: (f64, f64),
    pub lengthscale_range: (f64, f64),
    pub noise_variance_range: (f64, f64),
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            restarts: 4,
            max_iter: 200,
            f_tol: 1e-6,
            signal_variance_range: (0.05, 20.0),
            lengthscale_range: (0.01, 100.0),
            noise_variance_range: (1e-6, 1.0),
        }
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<()> {
        let ranges = [
            self.signal_variance_range,
            self.lengthscale_range,
            self.noise_variance_range,
        ];
        if self.max_iter == 0 || ranges.iter().any(|&(lo, hi)| !(lo > 0.0 && hi >= lo)) {
            return Err(Error::InvalidArgument(format!(
                "GP settings need max_iter >= 1 and positive ordered ranges: {self:?}"
            )));
        }
        Ok(())
    }

    fn log_bounds(&self, d: usize) -> Vec<(f64, f64)> {
        let ln = |(a, b): (f64, f64)| (a.ln(), b.ln());
        let mut b = vec![ln(self.signal_variance_range)];
        b.extend(std::iter::repeat_n(ln(self.lengthscale_range), d));
        b.push(ln(self.noise_variance_range));
        b
    }
}

const JITTER_START: f64 = 1e-8;
const JITTER_MAX: f64 = 1e-2;

/// A fitted single-output GP.
#[derive(Debug, Clone)]
pub struct GpModel<T: Scalar> {
    lower: Vec<T>,
    span: Vec<T>,
    x_train: Array2<T>,
    y_mean: T,
    y_std: T,
    alpha: Array1<T>,
    chol: Array2<T>,
    hyper: KernelHyper<T>,
    jitter: T,
    constant: bool,
    log_likelihood: T,
    start_log_likelihoods: Vec<T>,
}

fn sq_exp<T: Scalar>(a: ArrayView1<T>, b: ArrayView1<T>, inv_ls2: &[T], sf2: T) -> T {
    let mut s = T::zero();
    for ((&u, &v), &w) in a.iter().zip(b.iter()).zip(inv_ls2) {
        let diff = u - v;
        s = s + diff * diff * w;
    }
    sf2 * (T::lit(-0.5) * s).exp()
}

fn kernel_matrix<T: Scalar>(x: ArrayView2<T>, hyper: &KernelHyper<T>) -> Array2<T> {
    let n = x.nrows();
    let inv_ls2: Vec<T> = hyper.lengthscales.iter().map(|l| (*l * *l).recip()).collect();
    let mut k = Array2::zeros((n, n));
    for i in 0..n {
        k[[i, i]] = hyper.signal_variance;
        for j in 0..i {
            let v = sq_exp(x.row(i), x.row(j), &inv_ls2, hyper.signal_variance);
            k[[i, j]] = v;
            k[[j, i]] = v;
        }
    }
    k
}

/// Cholesky of `K + noise·I`, escalating extra diagonal jitter from 1e-8 by
/// factors of ten up to 1e-2. Returns the factor and the jitter used.
fn factor_with_jitter<T: Scalar>(
    k: &Array2<T>,
    noise: T,
) -> Option<(Array2<T>, T)> {
    let mut jitter = T::zero();
    loop {
        let mut a = k.clone();
        a.diag_mut().mapv_inplace(|v| v + noise + jitter);
        if let Some(l) = cholesky(a.view()) {
            return Some((l, jitter));
        }
        jitter = if jitter == T::zero() {
            T::lit(JITTER_START)
        } else {
            jitter * T::lit(10.0)
        };
        if jitter > T::lit(JITTER_MAX * 1.0001) {
            return None;
        }
    }
}

struct Factored<T: Scalar> {
    chol: Array2<T>,
    alpha: Array1<T>,
    jitter: T,
    lml: T,
}

fn factor_and_score<T: Scalar>(
    x: ArrayView2<T>,
    y: ArrayView1<T>,
    hyper: &KernelHyper<T>,
) -> Option<Factored<T>> {
    let k = kernel_matrix(x, hyper);
    let (chol, jitter) = factor_with_jitter(&k, hyper.noise_variance)?;
    let z = forward_solve(chol.view(), y);
    let alpha = backward_solve(chol.view(), z.view());
    let n = T::from_usize_lossy(y.len());
    let log_det: T = chol.diag().iter().map(|v| v.ln()).sum();
    let lml = T::lit(-0.5) * z.dot(&z) - log_det - T::lit(0.5) * n * T::lit((2.0 * std::f64::consts::PI).ln());
    Some(Factored {
        chol,
        alpha,
        jitter,
        lml,
    })
}

fn clamp_log<T: Scalar>(theta: &[T], bounds: &[(f64, f64)]) -> Vec<T> {
    theta
        .iter()
        .zip(bounds)
        .map(|(&v, &(lo, hi))| v.max(T::lit(lo)).min(T::lit(hi)))
        .collect()
}

impl<T: Scalar> GpModel<T> {
    /// Fits a GP to raw inputs `x` (rows inside `[lower, upper]`) and raw targets `y`.
    pub fn fit(
        x: ArrayView2<T>,
        y: ArrayView1<T>,
        lower: &[T],
        upper: &[T],
        cfg: &GpConfig,
        seed: u64,
    ) -> Result<Self> {
        let (n, d) = x.dim();
        if n < 2 {
            return Err(Error::InvalidData(format!("GP fit needs at least 2 points, got {n}")));
        }
        if y.len() != n || lower.len() != d || upper.len() != d {
            return Err(Error::InvalidData(format!(
                "GP fit shape mismatch: x {n}x{d}, y {}, bounds {}/{}",
                y.len(),
                lower.len(),
                upper.len()
            )));
        }
        if !all_finite(x.iter().copied()) || !all_finite(y.iter().copied()) {
            return Err(Error::InvalidData("GP training data must be finite".into()));
        }
        let span: Vec<T> = lower.iter().zip(upper).map(|(&l, &u)| u - l).collect();
        if span.iter().any(|&s| !(s > T::zero())) {
            return Err(Error::InvalidData("GP bounds must have positive width".into()));
        }

        let mut x_train = x.to_owned();
        for mut row in x_train.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - lower[j]) / span[j];
            }
        }

        let nf = T::from_usize_lossy(n);
        let y_mean = y.sum() / nf;
        let var = y.iter().map(|&v| (v - y_mean).powi(2)).sum::<T>() / (nf - T::one());
        let y_std = var.sqrt();
        let scale = y_mean.abs().max(T::one());

        let default_hyper = KernelHyper {
            signal_variance: T::one(),
            lengthscales: vec![T::lit(0.5); d],
            noise_variance: T::lit(1e-4),
        };

        if !(y_std > T::lit(1e-12) * scale) {
            // Constant targets: zero standardized function, prior variance.
            let hyper = default_hyper;
            return Ok(Self {
                lower: lower.to_vec(),
                span,
                chol: Array2::eye(n),
                alpha: Array1::zeros(n),
                x_train,
                y_mean,
                y_std: T::one(),
                hyper,
                jitter: T::zero(),
                constant: true,
                log_likelihood: T::zero(),
                start_log_likelihoods: Vec::new(),
            });
        }

        let y_std_vec: Array1<T> = y.mapv(|v| (v - y_mean) / y_std);
        let bounds = cfg.log_bounds(d);
        let objective = |theta: &[T]| -> T {
            let theta = clamp_log(theta, &bounds);
            match factor_and_score(x_train.view(), y_std_vec.view(), &KernelHyper::from_log(&theta)) {
                Some(f) => -f.lml,
                None => T::infinity(),
            }
        };

        let mut rng = rng::stream(seed, &[rng::tag::GP]);
        let mut starts = vec![clamp_log(&default_hyper.to_log(), &bounds)];
        while starts.len() < cfg.restarts.max(1) {
            starts.push(
                bounds
                    .iter()
                    .map(|&(lo, hi)| T::lit(rng.random_range(lo..=hi)))
                    .collect(),
            );
        }

        let simplex = SimplexConfig {
            max_iter: cfg.max_iter,
            f_tol: cfg.f_tol,
            initial_step: 0.5,
        };
        let mut best: Option<(Vec<T>, T)> = None;
        let mut start_lmls = Vec::with_capacity(starts.len());
        for s in &starts {
            start_lmls.push(-objective(s));
            let r = nelder_mead::minimize(objective, s, simplex);
            if best.as_ref().is_none_or(|(_, f)| r.f < *f) {
                best = Some((clamp_log(&r.x, &bounds), r.f));
            }
        }
        let (theta, _) = best.expect("at least one start");
        let hyper = KernelHyper::from_log(&theta);
        let fac = factor_and_score(x_train.view(), y_std_vec.view(), &hyper).ok_or(
            Error::IllConditioned {
                jitter: JITTER_MAX,
            },
        )?;

        Ok(Self {
            lower: lower.to_vec(),
            span,
            x_train,
            y_mean,
            y_std,
            alpha: fac.alpha,
            chol: fac.chol,
            hyper,
            jitter: fac.jitter,
            constant: false,
            log_likelihood: fac.lml,
            start_log_likelihoods: start_lmls,
        })
    }

    /// Fits with fixed hyperparameters (no search).
    pub fn fit_with_hyper(
        x: ArrayView2<T>,
        y: ArrayView1<T>,
        lower: &[T],
        upper: &[T],
        hyper: KernelHyper<T>,
    ) -> Result<Self> {
        let cfg = GpConfig {
            restarts: 1,
            max_iter: 0,
            ..GpConfig::default()
        };
        let mut gp = Self::fit(x, y, lower, upper, &cfg, 0)?;
        if gp.constant {
            gp.hyper = hyper;
            return Ok(gp);
        }
        let y_std_vec: Array1<T> = y.mapv(|v| (v - gp.y_mean) / gp.y_std);
        let fac = factor_and_score(gp.x_train.view(), y_std_vec.view(), &hyper)
            .ok_or(Error::IllConditioned { jitter: JITTER_MAX })?;
        gp.alpha = fac.alpha;
        gp.chol = fac.chol;
        gp.jitter = fac.jitter;
        gp.log_likelihood = fac.lml;
        gp.start_log_likelihoods = vec![fac.lml];
        gp.hyper = hyper;
        Ok(gp)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn hyper(&self) -> &KernelHyper<T> {
        &self.hyper
    }

    pub fn y_mean(&self) -> T {
        self.y_mean
    }

    pub fn y_std(&self) -> T {
        self.y_std
    }

    pub fn jitter(&self) -> T {
        self.jitter
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn cholesky_factor(&self) -> ArrayView2<'_, T> {
        self.chol.view()
    }

    /// Training inputs in unit-box coordinates.
    pub fn train_inputs(&self) -> ArrayView2<'_, T> {
        self.x_train.view()
    }

    /// Log marginal likelihood (standardized targets) of the selected hyperparameters.
    pub fn log_marginal_likelihood(&self) -> T {
        self.log_likelihood
    }

    /// Log marginal likelihood at each multi-start initialization point.
    pub fn start_log_marginal_likelihoods(&self) -> &[T] {
        &self.start_log_likelihoods
    }

    fn normalize(&self, x: &[T]) -> Result<Array1<T>> {
        if x.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "GP input has length {}, expected {}",
                x.len(),
                self.dim()
            )));
        }
        if !all_finite(x.iter().copied()) {
            return Err(Error::InvalidArgument("GP input must be finite".into()));
        }
        Ok(x.iter()
            .enumerate()
            .map(|(j, &v)| (v - self.lower[j]) / self.span[j])
            .collect())
    }

    fn cross_kernel(&self, xn: &Array1<T>) -> Array1<T> {
        let inv_ls2: Vec<T> = self.hyper.lengthscales.iter().map(|l| (*l * *l).recip()).collect();
        self.x_train
            .rows()
            .into_iter()
            .map(|row| sq_exp(row, xn.view(), &inv_ls2, self.hyper.signal_variance))
            .collect()
    }

    /// Posterior mean and (latent, noise-free) variance at a raw input.
    pub fn posterior(&self, x: &[T]) -> Result<(T, T)> {
        let xn = self.normalize(x)?;
        let sf2 = self.hyper.signal_variance;
        let scale2 = self.y_std * self.y_std;
        if self.constant {
            return Ok((self.y_mean, sf2 * scale2));
        }
        let ks = self.cross_kernel(&xn);
        let mean = ks.dot(&self.alpha);
        let v = forward_solve(self.chol.view(), ks.view());
        let var = (sf2 - v.dot(&v)).max(T::zero());
        Ok((self.y_mean + self.y_std * mean, var * scale2))
    }

    /// Posterior mean only; skips the triangular solve.
    pub fn posterior_mean(&self, x: &[T]) -> Result<T> {
        let xn = self.normalize(x)?;
        if self.constant {
            return Ok(self.y_mean);
        }
        Ok(self.y_mean + self.y_std * self.cross_kernel(&xn).dot(&self.alpha))
    }

    /// Gradient of the posterior mean with respect to the raw input.
    pub fn posterior_mean_gradient(&self, x: &[T]) -> Result<Vec<T>> {
        let xn = self.normalize(x)?;
        let d = self.dim();
        if self.constant {
            return Ok(vec![T::zero(); d]);
        }
        let inv_ls2: Vec<T> = self.hyper.lengthscales.iter().map(|l| (*l * *l).recip()).collect();
        let ks = self.cross_kernel(&xn);
        let mut grad = vec![T::zero(); d];
        for ((row, &k), &a) in self.x_train.rows().into_iter().zip(ks.iter()).zip(self.alpha.iter()) {
            let w = k * a;
            for j in 0..d {
                grad[j] = grad[j] - w * (xn[j] - row[j]) * inv_ls2[j];
            }
        }
        for j in 0..d {
            grad[j] = grad[j] * self.y_std / self.span[j];
        }
        Ok(grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};
    use rand::SeedableRng;

    fn fit_1d(x: &[f64], y: &[f64]) -> GpModel<f64> {
        let xs = Array2::from_shape_vec((x.len(), 1), x.to_vec()).unwrap();
        GpModel::fit(xs.view(), Array1::from(y.to_vec()).view(), &[0.0], &[1.0], &GpConfig::default(), 1)
            .unwrap()
    }

    /// Dense Gaussian elimination with partial pivoting; independent of the Cholesky path.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
            a.swap(c, p);
            b.swap(c, p);
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    fn dense_oracle(gp: &GpModel<f64>, y_raw: &[f64], x: &[f64]) -> (f64, f64) {
        let h = gp.hyper();
        let xt = gp.train_inputs();
        let n = xt.nrows();
        let k = |a: &[f64], b: &[f64]| {
            let s: f64 = a
                .iter()
                .zip(b)
                .zip(&h.lengthscales)
                .map(|((u, v), l)| ((u - v) / l).powi(2))
                .sum();
            h.signal_variance * (-0.5 * s).exp()
        };
        let rows: Vec<Vec<f64>> = xt.rows().into_iter().map(|r| r.to_vec()).collect();
        let mut kmat = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                kmat[i][j] = k(&rows[i], &rows[j]);
            }
            kmat[i][i] += h.noise_variance + gp.jitter();
        }
        let ys: Vec<f64> = y_raw.iter().map(|v| (v - gp.y_mean()) / gp.y_std()).collect();
        let alpha = dense_solve(kmat.clone(), ys);
        let ks: Vec<f64> = rows.iter().map(|r| k(r, x)).collect();
        let mean: f64 = ks.iter().zip(&alpha).map(|(a, b)| a * b).sum();
        let w = dense_solve(kmat, ks.clone());
        let var = h.signal_variance - ks.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        (gp.y_mean() + gp.y_std() * mean, var.max(0.0) * gp.y_std().powi(2))
    }

    #[test]
    fn linear_data_interpolated_at_midpoint() {
        let gp = fit_1d(&[0.0, 0.5, 1.0], &[0.0, 0.5, 1.0]);
        let (m, v) = gp.posterior(&[0.5]).unwrap();
        assert!((m - 0.5).abs() < 1e-3, "mean {m}");
        assert!(v >= 0.0);
    }

    #[test]
    fn constant_targets_give_constant_mean() {
        let gp = fit_1d(&[0.0, 0.3, 0.9], &[3.0, 3.0, 3.0]);
        assert!(gp.is_constant());
        for x in [0.0, 0.17, 0.5, 1.0] {
            let (m, v) = gp.posterior(&[x]).unwrap();
            assert!((m - 3.0).abs() < 1e-6);
            assert!(v > 0.0);
            assert_eq!(gp.posterior_mean_gradient(&[x]).unwrap(), vec![0.0]);
        }
    }

    #[test]
    fn duplicate_rows_fit() {
        let gp = fit_1d(&[0.2, 0.2, 0.2, 0.7], &[1.0, 1.0, 1.0, 2.0]);
        let (m, _) = gp.posterior(&[0.2]).unwrap();
        assert!((m - 1.0).abs() < 1e-2);
    }

    #[test]
    fn duplicate_rows_with_tiny_noise_need_jitter() {
        let x = array![[0.2], [0.2], [0.7]];
        let y = array![1.0, 1.0, 2.0];
        let hyper = KernelHyper {
            signal_variance: 1.0,
            lengthscales: vec![0.3],
            noise_variance: 1e-300,
        };
        let gp = GpModel::fit_with_hyper(x.view(), y.view(), &[0.0], &[1.0], hyper).unwrap();
        assert!(gp.jitter() >= 1e-8);
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = array![[0.1], [0.2]];
        assert!(matches!(
            GpModel::fit(x.view(), array![1.0, f64::NAN].view(), &[0.0], &[1.0], &GpConfig::default(), 0),
            Err(Error::InvalidData(_))
        ));
        assert!(GpModel::fit(array![[0.1]].view(), array![1.0].view(), &[0.0], &[1.0], &GpConfig::default(), 0).is_err());
        let gp = fit_1d(&[0.0, 1.0], &[0.0, 1.0]);
        assert!(gp.posterior(&[f64::INFINITY]).is_err());
        assert!(gp.posterior(&[0.1, 0.2]).is_err());
    }

    fn random_model(seed: u64, n: usize, d: usize) -> (GpModel<f64>, Array2<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let lower: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..0.0)).collect();
        let upper: Vec<f64> = lower.iter().map(|l| l + rng.random_range(0.5..3.0)).collect();
        let x = Array2::from_shape_fn((n, d), |(_, j)| rng.random_range(lower[j]..upper[j]));
        let y: Vec<f64> = x
            .rows()
            .into_iter()
            .map(|r| r.iter().enumerate().map(|(j, v)| ((j + 1) as f64 * v).sin()).sum::<f64>() * 3.0 + 5.0)
            .collect();
        let gp = GpModel::fit(x.view(), Array1::from(y.clone()).view(), &lower, &upper, &GpConfig::default(), seed).unwrap();
        (gp, x, y, lower, upper)
    }

    #[test]
    fn training_inputs_reproduced_within_noise() {
        let (gp, x, y, _, _) = random_model(4, 25, 3);
        let tol = 3.0 * gp.hyper().noise_variance.sqrt() * gp.y_std();
        for (row, &target) in x.rows().into_iter().zip(&y) {
            let (m, _) = gp.posterior(row.as_slice().unwrap()).unwrap();
            assert!((m - target).abs() <= tol.max(1e-9), "{m} vs {target} (tol {tol})");
        }
    }

    #[test]
    fn noiseless_fit_interpolates() {
        let x = array![[0.1], [0.4], [0.8]];
        let y = array![1.0, -1.0, 0.5];
        let hyper = KernelHyper {
            signal_variance: 1.0,
            lengthscales: vec![0.2],
            noise_variance: 1e-10,
        };
        let gp = GpModel::fit_with_hyper(x.view(), y.view(), &[0.0], &[1.0], hyper).unwrap();
        for (xi, yi) in [(0.1f64, 1.0f64), (0.4, -1.0), (0.8, 0.5)] {
            assert!((gp.posterior(&[xi]).unwrap().0 - yi).abs() < 1e-4);
        }
    }

    #[test]
    fn far_away_reverts_to_prior() {
        let (gp, _, _, _, _) = random_model(5, 20, 2);
        let (m, v) = gp.posterior(&[1e6, -1e6]).unwrap();
        let prior_var = gp.hyper().signal_variance * gp.y_std().powi(2);
        assert!((m - gp.y_mean()).abs() <= 0.05 * gp.y_mean().abs());
        assert!((v - prior_var).abs() <= 0.05 * prior_var);
    }

    #[test]
    fn matches_dense_oracle() {
        for seed in 0..3 {
            let (gp, _, y, lower, upper) = random_model(seed, 30, 4);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(100 + seed);
            for _ in 0..20 {
                let x: Vec<f64> = (0..4).map(|j| rng.random_range(lower[j]..upper[j])).collect();
                let xn: Vec<f64> = x.iter().enumerate().map(|(j, v)| (v - lower[j]) / (upper[j] - lower[j])).collect();
                let (m, v) = gp.posterior(&x).unwrap();
                let (mo, vo) = dense_oracle(&gp, &y, &xn);
                assert!((m - mo).abs() <= 1e-8 * mo.abs().max(1.0), "mean {m} vs {mo}");
                assert!((v - vo).abs() <= 1e-8 * vo.abs().max(1.0), "var {v} vs {vo}");
            }
        }
    }

    #[test]
    fn cholesky_reconstructs_kernel() {
        let (gp, _, _, _, _) = random_model(8, 40, 3);
        let l = gp.cholesky_factor();
        let mut k = kernel_matrix(gp.train_inputs(), gp.hyper());
        k.diag_mut().mapv_inplace(|v| v + gp.hyper().noise_variance + gp.jitter());
        let diff = &l.dot(&l.t()) - &k;
        let rel = diff.iter().map(|v| v * v).sum::<f64>().sqrt() / k.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(rel < 1e-8, "{rel}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (gp, _, _, lower, upper) = random_model(9, 30, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|j| rng.random_range(lower[j]..upper[j])).collect();
            let g = gp.posterior_mean_gradient(&x).unwrap();
            for j in 0..3 {
                let h = 1e-5;
                let (mut a, mut b) = (x.clone(), x.clone());
                a[j] += h;
                b[j] -= h;
                let fd = (gp.posterior_mean(&a).unwrap() - gp.posterior_mean(&b).unwrap()) / (2.0 * h);
                assert!((g[j] - fd).abs() <= 1e-4 * fd.abs().max(1e-3), "{} vs {fd}", g[j]);
            }
        }
    }

    #[test]
    fn slope_of_linear_function_recovered() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 / 29.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let gp = fit_1d(&x, &y);
        for xi in [0.3, 0.5, 0.7] {
            let g = gp.posterior_mean_gradient(&[xi]).unwrap()[0];
            assert!((g - 2.0).abs() <= 0.1, "slope {g}");
        }
    }

    #[test]
    fn selected_hyper_beat_every_start() {
        for seed in 0..3 {
            let (gp, _, _, _, _) = random_model(20 + seed, 25, 2);
            let best = gp.log_marginal_likelihood();
            assert_eq!(gp.start_log_marginal_likelihoods().len(), 4);
            for &s in gp.start_log_marginal_likelihoods() {
                assert!(best >= s - 1e-9, "{best} < {s}");
            }
        }
    }

    #[test]
    fn fit_is_reproducible() {
        let (a, ..) = random_model(31, 20, 3);
        let (b, ..) = random_model(31, 20, 3);
        assert_eq!(a.hyper(), b.hyper());
        assert_eq!(a.posterior(&[0.1, 0.2, 0.3]).unwrap(), b.posterior(&[0.1, 0.2, 0.3]).unwrap());
    }
}
