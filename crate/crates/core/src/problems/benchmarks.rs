//! ZDT (two objectives) and DTLZ (three objectives) test problems on `[0, 1]^d`.

use std::sync::Arc;

use super::ProblemSpec;
use crate::{Error, Result, Scalar};

const DTLZ_OBJECTIVES: usize = 3;

pub(super) fn build<T: Scalar>(name: &str, dim: usize) -> Result<ProblemSpec<T>> {
    let (n_obj, min_dim, f): (usize, usize, fn(&[T]) -> Vec<T>) = match name {
        "zdt1" => (2, 2, zdt1::<T>),
        "zdt2" => (2, 2, zdt2::<T>),
        "zdt3" => (2, 2, zdt3::<T>),
        "dtlz2" => (DTLZ_OBJECTIVES, DTLZ_OBJECTIVES, dtlz2_m3::<T>),
        "dtlz3" => (DTLZ_OBJECTIVES, DTLZ_OBJECTIVES, dtlz3_m3::<T>),
        "dtlz4" => (DTLZ_OBJECTIVES, DTLZ_OBJECTIVES, dtlz4_m3::<T>),
        "dtlz5" => (DTLZ_OBJECTIVES, DTLZ_OBJECTIVES, dtlz5_m3::<T>),
        "dtlz6" => (DTLZ_OBJECTIVES, DTLZ_OBJECTIVES, dtlz6_m3::<T>),
        "dtlz7" => (DTLZ_OBJECTIVES, DTLZ_OBJECTIVES, dtlz7_m3::<T>),
        _ => return Err(Error::UnsupportedProblem(name.to_string())),
    };
    if dim < min_dim {
        return Err(Error::InvalidDimension {
            problem: name.to_string(),
            dim,
            min: min_dim,
        });
    }
    ProblemSpec::unit_box(name, dim, n_obj, Arc::new(f))
}

fn zdt_g<T: Scalar>(x: &[T]) -> T {
    let tail: T = x[1..].iter().copied().sum();
    T::one() + T::lit(9.0) * tail / T::from_usize_lossy(x.len() - 1)
}

pub fn zdt1<T: Scalar>(x: &[T]) -> Vec<T> {
    let f1 = x[0];
    let g = zdt_g(x);
    vec![f1, g * (T::one() - (f1 / g).sqrt())]
}

pub fn zdt2<T: Scalar>(x: &[T]) -> Vec<T> {
    let f1 = x[0];
    let g = zdt_g(x);
    vec![f1, g * (T::one() - (f1 / g).powi(2))]
}

pub fn zdt3<T: Scalar>(x: &[T]) -> Vec<T> {
    let f1 = x[0];
    let g = zdt_g(x);
    let r = f1 / g;
    let ten_pi = T::lit(10.0 * std::f64::consts::PI);
    vec![f1, g * (T::one() - r.sqrt() - r * (ten_pi * f1).sin())]
}

/// Spherical front shared by DTLZ2-6: objective `m` is
/// `(1+g) * prod_{j < M-1-m} cos(theta_j) * sin(theta_{M-1-m})` (no sine for m = 0).
fn spherical<T: Scalar>(theta: &[T], g: T, n_obj: usize) -> Vec<T> {
    (0..n_obj)
        .map(|m| {
            let cut = n_obj - 1 - m;
            let mut v = T::one() + g;
            for &a in &theta[..cut] {
                v = v * a.cos();
            }
            if m > 0 {
                v = v * theta[cut].sin();
            }
            v
        })
        .collect()
}

fn half_pi<T: Scalar>() -> T {
    T::lit(std::f64::consts::FRAC_PI_2)
}

fn sphere_g<T: Scalar>(tail: &[T]) -> T {
    let half = T::lit(0.5);
    tail.iter().map(|&v| (v - half).powi(2)).sum()
}

fn rastrigin_g<T: Scalar>(tail: &[T]) -> T {
    let half = T::lit(0.5);
    let twenty_pi = T::lit(20.0 * std::f64::consts::PI);
    let s: T = tail
        .iter()
        .map(|&v| (v - half).powi(2) - (twenty_pi * (v - half)).cos())
        .sum();
    T::lit(100.0) * (T::from_usize_lossy(tail.len()) + s)
}

/// DTLZ2 with `n_obj` objectives; position parameters are `x[..n_obj-1]`.
pub fn dtlz2<T: Scalar>(x: &[T], n_obj: usize) -> Vec<T> {
    let (pos, tail) = x.split_at(n_obj - 1);
    let theta: Vec<T> = pos.iter().map(|&v| v * half_pi()).collect();
    spherical(&theta, sphere_g(tail), n_obj)
}

pub fn dtlz3<T: Scalar>(x: &[T], n_obj: usize) -> Vec<T> {
    let (pos, tail) = x.split_at(n_obj - 1);
    let theta: Vec<T> = pos.iter().map(|&v| v * half_pi()).collect();
    spherical(&theta, rastrigin_g(tail), n_obj)
}

/// DTLZ4 with the usual bias exponent 100.
pub fn dtlz4<T: Scalar>(x: &[T], n_obj: usize) -> Vec<T> {
    let (pos, tail) = x.split_at(n_obj - 1);
    let alpha = T::lit(100.0);
    let theta: Vec<T> = pos.iter().map(|&v| v.powf(alpha) * half_pi()).collect();
    spherical(&theta, sphere_g(tail), n_obj)
}

fn degenerate_theta<T: Scalar>(pos: &[T], g: T) -> Vec<T> {
    let scale = T::lit(std::f64::consts::FRAC_PI_4) / (T::one() + g);
    pos.iter()
        .enumerate()
        .map(|(i, &v)| {
            if i == 0 {
                v * half_pi()
            } else {
                scale * (T::one() + T::lit(2.0) * g * v)
            }
        })
        .collect()
}

pub fn dtlz5<T: Scalar>(x: &[T], n_obj: usize) -> Vec<T> {
    let (pos, tail) = x.split_at(n_obj - 1);
    let g = sphere_g(tail);
    spherical(&degenerate_theta(pos, g), g, n_obj)
}

pub fn dtlz6<T: Scalar>(x: &[T], n_obj: usize) -> Vec<T> {
    let (pos, tail) = x.split_at(n_obj - 1);
    let g: T = tail.iter().map(|&v| v.powf(T::lit(0.1))).sum();
    spherical(&degenerate_theta(pos, g), g, n_obj)
}

pub fn dtlz7<T: Scalar>(x: &[T], n_obj: usize) -> Vec<T> {
    let (pos, tail) = x.split_at(n_obj - 1);
    let k = T::from_usize_lossy(tail.len());
    let g = T::one() + T::lit(9.0) / k * tail.iter().copied().sum::<T>();
    let three_pi = T::lit(3.0 * std::f64::consts::PI);
    let h = T::from_usize_lossy(n_obj)
        - pos
            .iter()
            .map(|&f| f / (T::one() + g) * (T::one() + (three_pi * f).sin()))
            .sum::<T>();
    let mut out = pos.to_vec();
    out.push((T::one() + g) * h);
    out
}

fn dtlz2_m3<T: Scalar>(x: &[T]) -> Vec<T> {
    dtlz2(x, DTLZ_OBJECTIVES)
}
fn dtlz3_m3<T: Scalar>(x: &[T]) -> Vec<T> {
    dtlz3(x, DTLZ_OBJECTIVES)
}
fn dtlz4_m3<T: Scalar>(x: &[T]) -> Vec<T> {
    dtlz4(x, DTLZ_OBJECTIVES)
}
fn dtlz5_m3<T: Scalar>(x: &[T]) -> Vec<T> {
    dtlz5(x, DTLZ_OBJECTIVES)
}
fn dtlz6_m3<T: Scalar>(x: &[T]) -> Vec<T> {
    dtlz6(x, DTLZ_OBJECTIVES)
}
fn dtlz7_m3<T: Scalar>(x: &[T]) -> Vec<T> {
    dtlz7(x, DTLZ_OBJECTIVES)
}
