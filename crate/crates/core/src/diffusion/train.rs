use ndarray::{s, Array2, ArrayView2};
use rand::seq::index;
use rand::Rng;

use super::net::{time_feature, Adam, DenoiseNet, Workspace};
use super::{forward_sample_into, NoiseSchedule, NoisePredictor, TrainConfig};
use crate::rng;
use crate::{Error, Result, Scalar};

/// Trains `net` to predict the injected noise on `data` (rows in `[-1, 1]^d`).
///
/// Each epoch draws one minibatch (the whole set when `cfg.batch >= n`),
/// a uniform step and a standard-normal noise per row, and takes one Adam
/// step on the mean squared noise-prediction error. Returns the trained
/// network and the per-epoch loss.
pub fn train<T: Scalar>(
    mut net: DenoiseNet<T>,
    data: ArrayView2<T>,
    sched: &NoiseSchedule<T>,
    cfg: &TrainConfig<T>,
    seed: u64,
) -> Result<(DenoiseNet<T>, Vec<T>)> {
    cfg.validate()?;
    let (n, d) = data.dim();
    if n == 0 {
        return Err(Error::InvalidData("diffusion training set is empty".into()));
    }
    if d != net.dim() {
        return Err(Error::InvalidData(format!(
            "training data has {d} columns, network expects {}",
            net.dim()
        )));
    }
    if !crate::scalar::all_finite(data.iter().copied()) {
        return Err(Error::InvalidData("diffusion training data must be finite".into()));
    }

    let mut rng = rng::stream(seed, &[rng::tag::TRAIN]);
    let batch = cfg.batch.min(n);
    let steps = sched.steps();
    let hidden = net.layers[1].w.nrows();
    let mut ws = Workspace::new(batch, d, hidden);
    let mut grads = net.zero_grads();
    let mut adam = Adam::new(&net, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
    let mut input = Array2::<T>::zeros((batch, d + 1));
    let mut noise = Array2::<T>::zeros((batch, d));
    let mut rows: Vec<usize> = (0..n).collect();
    let scale = T::lit(2.0) / T::from_usize_lossy(batch * d);
    let mut history = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        if batch < n {
            rows = index::sample(&mut rng, n, batch).into_vec();
        }
        for (i, &r) in rows.iter().enumerate() {
            let t = rng.random_range(1..=steps);
            for v in noise.row_mut(i).iter_mut() {
                *v = rng::normal(&mut rng);
            }
            forward_sample_into(
                data.row(r),
                t,
                sched,
                noise.row(i),
                input.slice_mut(s![i, ..d]),
            );
            input[[i, d]] = time_feature(t, steps);
        }

        net.forward(input.view(), &mut ws);
        let diff = &ws.out - &noise;
        history.push(diff.iter().map(|v| *v * *v).sum::<T>() / T::from_usize_lossy(batch * d));
        ws.grad_out = diff * scale;
        net.backward(input.view(), &mut ws, &mut grads);
        adam.update(&mut net, &grads);
    }
    Ok((net, history))
}
