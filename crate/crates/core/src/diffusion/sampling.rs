use ndarray::{Array2, ArrayView1, ArrayView2, ArrayViewMut1, Axis};

use super::{GenerationConfig, NoisePredictor, NoiseSchedule};
use crate::rng::{self, StreamRng};
use crate::{Error, Result, Scalar};

/// Closed-form forward noising `sqrt(ab_t)·x0 + sqrt(1 - ab_t)·noise`.
pub fn forward_sample<T: Scalar>(
    x0: ArrayView1<T>,
    t: usize,
    sched: &NoiseSchedule<T>,
    noise: ArrayView1<T>,
) -> Result<ndarray::Array1<T>> {
    sched.check_step(t)?;
    if x0.len() != noise.len() {
        return Err(Error::InvalidArgument(format!(
            "sample length {} vs noise length {}",
            x0.len(),
            noise.len()
        )));
    }
    let mut out = ndarray::Array1::zeros(x0.len());
    forward_sample_into(x0, t, sched, noise, out.view_mut());
    Ok(out)
}

pub(crate) fn forward_sample_into<T: Scalar>(
    x0: ArrayView1<T>,
    t: usize,
    sched: &NoiseSchedule<T>,
    noise: ArrayView1<T>,
    mut out: ArrayViewMut1<T>,
) {
    let ab = sched.alpha_bar(t);
    let (a, b) = (ab.sqrt(), (T::one() - ab).sqrt());
    for ((o, &x), &z) in out.iter_mut().zip(x0.iter()).zip(noise.iter()) {
        *o = a * x + b * z;
    }
}

/// `x_{t-1} = (x_t - (1-a_t)/sqrt(1-ab_t)·eps) / sqrt(a_t) + sigma_t^2·g + sigma_t·z`,
/// with `z` ignored at `t = 1`.
fn reverse_update<T: Scalar>(
    x_t: ArrayView2<T>,
    eps: ArrayView2<T>,
    t: usize,
    sched: &NoiseSchedule<T>,
    z: ArrayView2<T>,
    g_hat: Option<ArrayView2<T>>,
) -> Array2<T> {
    let alpha = sched.alpha(t);
    let coef = (T::one() - alpha) / (T::one() - sched.alpha_bar(t)).sqrt();
    let inv_sqrt_alpha = alpha.sqrt().recip();
    let sigma = sched.sigma(t);
    let sigma2 = sigma * sigma;
    let noise_on = t > 1;
    let mut out = Array2::zeros(x_t.raw_dim());
    for (i, mut row) in out.rows_mut().into_iter().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            let mut v = inv_sqrt_alpha * (x_t[[i, j]] - coef * eps[[i, j]]);
            if let Some(g) = &g_hat {
                v = v + sigma2 * g[[i, j]];
            }
            if noise_on {
                v = v + sigma * z[[i, j]];
            }
            *o = v;
        }
    }
    out
}

fn check_batch<T: Scalar>(
    net_dim: usize,
    x_t: &ArrayView2<T>,
    other: &ArrayView2<T>,
    what: &str,
) -> Result<()> {
    if x_t.ncols() != net_dim || other.dim() != x_t.dim() {
        return Err(Error::InvalidArgument(format!(
            "batch shape {:?} / {what} shape {:?} incompatible with dimension {net_dim}",
            x_t.dim(),
            other.dim()
        )));
    }
    Ok(())
}

/// One unguided reverse step on a batch of samples (one per row).
pub fn denoise_step<T: Scalar, N: NoisePredictor<T> + ?Sized>(
    net: &N,
    x_t: ArrayView2<T>,
    t: usize,
    sched: &NoiseSchedule<T>,
    z: ArrayView2<T>,
) -> Result<Array2<T>> {
    sched.check_step(t)?;
    check_batch(net.dim(), &x_t, &z, "noise")?;
    let eps = net.predict_noise(x_t, t, sched.steps());
    Ok(reverse_update(x_t, eps.view(), t, sched, z, None))
}

/// One guided reverse step: the unguided update plus `sigma_t^2 · g_hat`.
pub fn guided_denoise_step<T: Scalar, N: NoisePredictor<T> + ?Sized>(
    net: &N,
    x_t: ArrayView2<T>,
    t: usize,
    sched: &NoiseSchedule<T>,
    g_hat: ArrayView2<T>,
    z: ArrayView2<T>,
) -> Result<Array2<T>> {
    sched.check_step(t)?;
    check_batch(net.dim(), &x_t, &z, "noise")?;
    check_batch(net.dim(), &x_t, &g_hat, "guidance")?;
    if !crate::scalar::all_finite(g_hat.iter().copied()) {
        return Err(Error::InvalidArgument("guidance gradient must be finite".into()));
    }
    let eps = net.predict_noise(x_t, t, sched.steps());
    Ok(reverse_update(x_t, eps.view(), t, sched, z, Some(g_hat)))
}

/// Guidance callback: maps a sample (diffusion coordinates) to `g_hat`.
pub type GuidanceFn<'a, T> = dyn Fn(&[T]) -> Result<Vec<T>> + 'a;

fn draw_normals<T: Scalar>(rngs: &mut [StreamRng], d: usize) -> Array2<T> {
    let mut out = Array2::zeros((rngs.len(), d));
    for (mut row, r) in out.rows_mut().into_iter().zip(rngs.iter_mut()) {
        row.iter_mut().for_each(|v| *v = rng::normal(r));
    }
    out
}

/// Runs reverse chains for output rows `first..first + count`, guided when
/// `guidance` is given. Row `i` draws from its own stream `(seed, i)`.
pub fn reverse_chains<T: Scalar, N: NoisePredictor<T> + ?Sized>(
    net: &N,
    sched: &NoiseSchedule<T>,
    first: usize,
    count: usize,
    guidance: Option<&GuidanceFn<'_, T>>,
    seed: u64,
) -> Result<Array2<T>> {
    let d = net.dim();
    let mut rngs: Vec<StreamRng> = (first..first + count)
        .map(|i| rng::stream(seed, &[rng::tag::GENERATE, i as u64]))
        .collect();
    let mut x = draw_normals::<T>(&mut rngs, d);
    let (lo, hi) = (-T::one(), T::one());
    for t in (1..=sched.steps()).rev() {
        let z = draw_normals::<T>(&mut rngs, d);
        x = match guidance {
            Some(guide) => {
                let mut g = Array2::zeros((count, d));
                for (i, mut g_row) in g.rows_mut().into_iter().enumerate() {
                    let query: Vec<T> = x.row(i).iter().map(|v| v.max(lo).min(hi)).collect();
                    let grad = guide(&query)?;
                    if grad.len() != d {
                        return Err(Error::InvalidArgument(format!(
                            "guidance returned {} components, expected {d}",
                            grad.len()
                        )));
                    }
                    g_row.assign(&ArrayView1::from(&grad[..]));
                }
                guided_denoise_step(net, x.view(), t, sched, g.view(), z.view())?
            }
            None => denoise_step(net, x.view(), t, sched, z.view())?,
        };
    }
    x.mapv_inplace(|v| v.max(lo).min(hi));
    Ok(x)
}

/// Composite generation: `n_conditional` guided chains followed by
/// `n_unconditional` unguided ones, all clipped to `[-1, 1]^d`.
pub fn generate_composite<T: Scalar, N: NoisePredictor<T> + ?Sized>(
    net: &N,
    sched: &NoiseSchedule<T>,
    gen: &GenerationConfig<T>,
    guidance: Option<&GuidanceFn<'_, T>>,
    seed: u64,
) -> Result<Array2<T>> {
    let (n1, n2) = (gen.n_conditional, gen.n_unconditional);
    if n1 > 0 && guidance.is_none() {
        return Err(Error::InvalidArgument(
            "conditional generation requested without a guidance function".into(),
        ));
    }
    let cond = reverse_chains(net, sched, 0, n1, guidance, seed)?;
    let uncond = reverse_chains(net, sched, n1, n2, None, seed)?;
    ndarray::concatenate(Axis(0), &[cond.view(), uncond.view()])
        .map_err(|e| Error::InvalidState(e.to_string()))
}
