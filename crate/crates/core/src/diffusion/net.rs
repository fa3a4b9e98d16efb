//! Fully connected noise-prediction network and its Adam optimizer.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;

use crate::rng::StreamRng;
use crate::Scalar;

pub const HIDDEN_UNITS: usize = 128;

/// Anything that predicts the injected noise from a noised batch at step `t`.
pub trait NoisePredictor<T: Scalar> {
    /// Sample dimension `d` (input and output width, excluding the time feature).
    fn dim(&self) -> usize;

    fn predict_noise(&self, x_t: ArrayView2<T>, t: usize, steps: usize) -> Array2<T>;
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Dense<T> {
    pub w: Array2<T>,
    pub b: Array1<T>,
}

impl<T: Scalar> Dense<T> {
    fn init(fan_in: usize, fan_out: usize, rng: &mut StreamRng) -> Self {
        let bound = (1.0 / fan_in as f64).sqrt();
        let mut draw = || T::lit(rng.random_range(-bound..bound));
        let w = Array2::from_shape_simple_fn((fan_in, fan_out), &mut draw);
        let b = Array1::from_shape_simple_fn(fan_out, &mut draw);
        Self { w, b }
    }

    fn zeros_like(&self) -> Self {
        Self {
            w: Array2::zeros(self.w.raw_dim()),
            b: Array1::zeros(self.b.raw_dim()),
        }
    }

    /// `out = input · w + b`
    fn forward_into(&self, input: ArrayView2<T>, out: &mut Array2<T>) {
        general_mat_mul(T::one(), &input, &self.w, T::zero(), out);
        for mut row in out.rows_mut() {
            row.zip_mut_with(&self.b, |o, &b| *o = *o + b);
        }
    }
}

/// `(d + 1) → 128 → 128 → d` network with rectified-linear hidden layers.
/// The extra input is the normalized step `t / T`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseNet<T> {
    pub(crate) layers: [Dense<T>; 3],
    dim: usize,
}

fn relu_inplace<T: Scalar>(a: &mut Array2<T>) {
    a.mapv_inplace(|v| v.max(T::zero()));
}

impl<T: Scalar> DenoiseNet<T> {
    /// Each layer is drawn uniformly from `±sqrt(1 / fan_in)`.
    pub fn new(dim: usize, rng: &mut StreamRng) -> Self {
        Self::with_hidden(dim, HIDDEN_UNITS, rng)
    }

    pub fn with_hidden(dim: usize, hidden: usize, rng: &mut StreamRng) -> Self {
        let layers = [
            Dense::init(dim + 1, hidden, rng),
            Dense::init(hidden, hidden, rng),
            Dense::init(hidden, dim, rng),
        ];
        Self { layers, dim }
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    pub fn params_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.w.iter().chain(l.b.iter()).all(|v| v.is_finite()))
    }

    /// Forward pass on inputs that already carry the time column.
    pub(crate) fn forward(&self, input: ArrayView2<T>, ws: &mut Workspace<T>) {
        self.layers[0].forward_into(input, &mut ws.z1);
        ws.h1.assign(&ws.z1);
        relu_inplace(&mut ws.h1);
        self.layers[1].forward_into(ws.h1.view(), &mut ws.z2);
        ws.h2.assign(&ws.z2);
        relu_inplace(&mut ws.h2);
        self.layers[2].forward_into(ws.h2.view(), &mut ws.out);
    }

    /// Back-propagates `grad_out = dL/d(out)` through the activations cached in `ws`.
    pub(crate) fn backward(&self, input: ArrayView2<T>, ws: &mut Workspace<T>, grads: &mut [Dense<T>; 3]) {
        let one = T::one();
        let zero = T::zero();
        general_mat_mul(one, &ws.h2.t(), &ws.grad_out, zero, &mut grads[2].w);
        grads[2].b.assign(&ws.grad_out.sum_axis(Axis(0)));

        general_mat_mul(one, &ws.grad_out, &self.layers[2].w.t(), zero, &mut ws.d2);
        Zip::from(&mut ws.d2).and(&ws.z2).for_each(|g, &z| {
            if z <= zero {
                *g = zero;
            }
        });
        general_mat_mul(one, &ws.h1.t(), &ws.d2, zero, &mut grads[1].w);
        grads[1].b.assign(&ws.d2.sum_axis(Axis(0)));

        general_mat_mul(one, &ws.d2, &self.layers[1].w.t(), zero, &mut ws.d1);
        Zip::from(&mut ws.d1).and(&ws.z1).for_each(|g, &z| {
            if z <= zero {
                *g = zero;
            }
        });
        general_mat_mul(one, &input.t(), &ws.d1, zero, &mut grads[0].w);
        grads[0].b.assign(&ws.d1.sum_axis(Axis(0)));
    }

    pub(crate) fn zero_grads(&self) -> [Dense<T>; 3] {
        [
            self.layers[0].zeros_like(),
            self.layers[1].zeros_like(),
            self.layers[2].zeros_like(),
        ]
    }
}

pub(crate) fn time_feature<T: Scalar>(t: usize, steps: usize) -> T {
    T::from_usize_lossy(t) / T::from_usize_lossy(steps)
}

impl<T: Scalar> NoisePredictor<T> for DenoiseNet<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn predict_noise(&self, x_t: ArrayView2<T>, t: usize, steps: usize) -> Array2<T> {
        let n = x_t.nrows();
        let mut input = Array2::zeros((n, self.dim + 1));
        input.slice_mut(ndarray::s![.., ..self.dim]).assign(&x_t);
        input.column_mut(self.dim).fill(time_feature(t, steps));
        let mut ws = Workspace::new(n, self.dim, self.layers[1].w.nrows());
        self.forward(input.view(), &mut ws);
        ws.out
    }
}

/// Preallocated activations and gradients for a fixed batch size.
pub(crate) struct Workspace<T> {
    pub z1: Array2<T>,
    pub h1: Array2<T>,
    pub z2: Array2<T>,
    pub h2: Array2<T>,
    pub out: Array2<T>,
    pub grad_out: Array2<T>,
    pub d2: Array2<T>,
    pub d1: Array2<T>,
}

impl<T: Scalar> Workspace<T> {
    pub fn new(batch: usize, dim: usize, hidden: usize) -> Self {
        let h = || Array2::zeros((batch, hidden));
        Self {
            z1: h(),
            h1: h(),
            z2: h(),
            h2: h(),
            out: Array2::zeros((batch, dim)),
            grad_out: Array2::zeros((batch, dim)),
            d2: h(),
            d1: h(),
        }
    }
}

pub(crate) struct Adam<T> {
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
    step: i32,
    m: [Dense<T>; 3],
    v: [Dense<T>; 3],
}

impl<T: Scalar> Adam<T> {
    pub fn new(net: &DenoiseNet<T>, lr: T, beta1: T, beta2: T, eps: T) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            eps,
            step: 0,
            m: net.zero_grads(),
            v: net.zero_grads(),
        }
    }

    pub fn update(&mut self, net: &mut DenoiseNet<T>, grads: &[Dense<T>; 3]) {
        self.step += 1;
        let (b1, b2) = (self.beta1, self.beta2);
        let c1 = T::one() - b1.powi(self.step);
        let c2 = T::one() - b2.powi(self.step);
        let (lr, eps) = (self.lr, self.eps);
        let apply = |p: &mut T, m: &mut T, v: &mut T, g: T| {
            *m = b1 * *m + (T::one() - b1) * g;
            *v = b2 * *v + (T::one() - b2) * g * g;
            *p = *p - lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        };
        for k in 0..3 {
            Zip::from(&mut net.layers[k].w)
                .and(&mut self.m[k].w)
                .and(&mut self.v[k].w)
                .and(&grads[k].w)
                .for_each(|p, m, v, &g| apply(p, m, v, g));
            Zip::from(&mut net.layers[k].b)
                .and(&mut self.m[k].b)
                .and(&mut self.v[k].b)
                .and(&grads[k].b)
                .for_each(|p, m, v, &g| apply(p, m, v, g));
        }
    }
}
