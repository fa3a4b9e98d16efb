use crate::Scalar;

const RATE_GUARD: f64 = 1e-12;

/// When the hypervolume growth test runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwitchMode {
    /// After every iteration once a full window of history exists.
    #[default]
    Sliding,
    /// Only when the number of completed iterations is a multiple of the window.
    Blocked,
}

/// Operator flag (`true`: diffusion model, `false`: genetic algorithm) and the
/// archive hypervolume after initialization and after each iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchState<T> {
    pub use_diffusion: bool,
    pub hv_history: Vec<T>,
}

impl<T: Scalar> Default for SwitchState<T> {
    fn default() -> Self {
        Self {
            use_diffusion: true,
            hv_history: Vec::new(),
        }
    }
}

impl<T: Scalar> SwitchState<T> {
    /// Relative hypervolume growth over the last `window` entries, if the
    /// history is long enough.
    pub fn growth_rate(&self, window: usize) -> Option<T> {
        let n = self.hv_history.len();
        if window == 0 || n < window + 1 {
            return None;
        }
        let now = self.hv_history[n - 1];
        let then = self.hv_history[n - 1 - window];
        Some((now - then) / then.max(T::lit(RATE_GUARD)))
    }

    /// Inverts the operator flag when growth over the window is below
    /// `threshold`. Returns whether the flag flipped.
    pub fn update(&mut self, window: usize, threshold: T, mode: SwitchMode) -> bool {
        if mode == SwitchMode::Blocked {
            let completed = self.hv_history.len().saturating_sub(1);
            if window == 0 || completed == 0 || completed % window != 0 {
                return false;
            }
        }
        match self.growth_rate(window) {
            Some(rate) if rate < threshold => {
                self.use_diffusion = !self.use_diffusion;
                true
            }
            _ => false,
        }
    }
}

/// Functional form of [`SwitchState::update`] in sliding mode.
pub fn update_switch<T: Scalar>(mut state: SwitchState<T>, window: usize, threshold: T) -> SwitchState<T> {
    state.update(window, threshold, SwitchMode::Sliding);
    state
}
