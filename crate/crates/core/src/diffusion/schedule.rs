use crate::{Error, Result, Scalar};

/// Linear variance schedule with its derived per-step quantities.
/// Steps are numbered `1..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule<T> {
    beta: Vec<T>,
    alpha: Vec<T>,
    alpha_bar: Vec<T>,
    sigma: Vec<T>,
}

impl<T: Scalar> NoiseSchedule<T> {
    /// `beta` rises linearly from `beta_min` (step 1) to `beta_max` (last step).
    pub fn linear(steps: usize, beta_min: T, beta_max: T) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("schedule needs at least one step".into()));
        }
        if !(beta_min > T::zero() && beta_min <= beta_max && beta_max < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < beta_min <= beta_max < 1, got [{beta_min}, {beta_max}]"
            )));
        }
        let beta: Vec<T> = (0..steps)
            .map(|i| {
                if steps == 1 {
                    beta_min
                } else {
                    beta_min
                        + (beta_max - beta_min) * T::from_usize_lossy(i)
                            / T::from_usize_lossy(steps - 1)
                }
            })
            .collect();
        let alpha: Vec<T> = beta.iter().map(|&b| T::one() - b).collect();
        let alpha_bar: Vec<T> = alpha
            .iter()
            .scan(T::one(), |acc, &a| {
                *acc = *acc * a;
                Some(*acc)
            })
            .collect();
        let sigma = beta.iter().map(|b| b.sqrt()).collect();
        Ok(Self {
            beta,
            alpha,
            alpha_bar,
            sigma,
        })
    }

    pub fn steps(&self) -> usize {
        self.beta.len()
    }

    pub(crate) fn check_step(&self, t: usize) -> Result<usize> {
        if t == 0 || t > self.steps() {
            return Err(Error::InvalidArgument(format!(
                "step {t} outside 1..={}",
                self.steps()
            )));
        }
        Ok(t - 1)
    }

    pub fn beta(&self, t: usize) -> T {
        self.beta[t - 1]
    }

    pub fn alpha(&self, t: usize) -> T {
        self.alpha[t - 1]
    }

    pub fn alpha_bar(&self, t: usize) -> T {
        self.alpha_bar[t - 1]
    }

    pub fn sigma(&self, t: usize) -> T {
        self.sigma[t - 1]
    }
}

/// Plain-data description of a linear schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    pub steps: usize,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            steps: 25,
            beta_min: 1e-5,
            beta_max: 5e-2,
        }
    }
}

impl ScheduleConfig {
    pub fn build<T: Scalar>(&self) -> Result<NoiseSchedule<T>> {
        NoiseSchedule::linear(self.steps, T::lit(self.beta_min), T::lit(self.beta_max))
    }
}
