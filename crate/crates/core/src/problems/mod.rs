//! Box-constrained black-box problems, the evaluated archive, and
//! space-filling initialization.

mod benchmarks;
mod lhs;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::{Error, Result, Scalar};

pub use benchmarks::{dtlz2, dtlz3, dtlz4, dtlz5, dtlz6, dtlz7, zdt1, zdt2, zdt3};
pub use lhs::latin_hypercube;

/// Names of the built-in benchmark problems.
pub const BUILTIN_PROBLEMS: [&str; 9] = [
    "zdt1", "zdt2", "zdt3", "dtlz2", "dtlz3", "dtlz4", "dtlz5", "dtlz6", "dtlz7",
];

pub type Evaluator<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// A minimization problem over the box `[lower, upper]`.
#[derive(Clone)]
pub struct ProblemSpec<T: Scalar> {
    name: String,
    n_obj: usize,
    lower: Vec<T>,
    upper: Vec<T>,
    evaluator: Evaluator<T>,
}

impl<T: Scalar> fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("n_obj", &self.n_obj)
            .finish()
    }
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(
        name: impl Into<String>,
        lower: Vec<T>,
        upper: Vec<T>,
        n_obj: usize,
        evaluator: Evaluator<T>,
    ) -> Result<Self> {
        let name = name.into();
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidArgument(format!(
                "`{name}`: bounds must be non-empty and of equal length ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(Error::InvalidArgument(format!(
                "`{name}`: lower[{i}] must be strictly below upper[{i}]"
            )));
        }
        if n_obj < 2 {
            return Err(Error::InvalidArgument(format!(
                "`{name}`: need at least 2 objectives, got {n_obj}"
            )));
        }
        Ok(Self {
            name,
            n_obj,
            lower,
            upper,
            evaluator,
        })
    }

    /// Unit-box problem `[0, 1]^dim`.
    pub fn unit_box(
        name: impl Into<String>,
        dim: usize,
        n_obj: usize,
        evaluator: Evaluator<T>,
    ) -> Result<Self> {
        Self::new(name, vec![T::zero(); dim], vec![T::one(); dim], n_obj, evaluator)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn n_obj(&self) -> usize {
        self.n_obj
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn check_bounds(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "decision vector has length {}, problem `{}` has d = {}",
                x.len(),
                self.name,
                self.dim()
            )));
        }
        for (i, &v) in x.iter().enumerate() {
            if !(v >= self.lower[i] && v <= self.upper[i]) {
                return Err(Error::BoundsViolation {
                    index: i,
                    value: v.to_f64_lossy(),
                    lower: self.lower[i].to_f64_lossy(),
                    upper: self.upper[i].to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    /// Evaluates the objective vector at an in-bounds decision vector.
    pub fn evaluate(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_bounds(x)?;
        let y = (self.evaluator)(x);
        if y.len() != self.n_obj {
            return Err(Error::InvalidData(format!(
                "`{}` returned {} objectives, expected {}",
                self.name,
                y.len(),
                self.n_obj
            )));
        }
        if !crate::scalar::all_finite(y.iter().copied()) {
            return Err(Error::InvalidData(format!(
                "`{}` returned a non-finite objective",
                self.name
            )));
        }
        Ok(y)
    }

    /// Clamps `x` into the box in place.
    pub fn clip(&self, x: &mut [T]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.max(self.lower[i]).min(self.upper[i]);
        }
    }
}

type Factory<T> = Arc<dyn Fn(usize) -> Result<ProblemSpec<T>> + Send + Sync>;

/// Name-keyed problem constructors. Starts with the built-in suite; further
/// problems (e.g. engineering design suites) can be registered at runtime.
#[derive(Clone)]
pub struct ProblemRegistry<T: Scalar> {
    factories: BTreeMap<String, Factory<T>>,
}

impl<T: Scalar> Default for ProblemRegistry<T> {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl<T: Scalar> ProblemRegistry<T> {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        for name in BUILTIN_PROBLEMS {
            reg.register(name, move |d| benchmarks::build(name, d));
        }
        reg
    }

    /// Registers (or replaces) a constructor under a lowercase name.
    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(usize) -> Result<ProblemSpec<T>> + Send + Sync + 'static,
    {
        self.factories
            .insert(name.to_ascii_lowercase(), Arc::new(factory));
    }

    pub fn make(&self, name: &str, dim: usize) -> Result<ProblemSpec<T>> {
        let factory = self
            .factories
            .get(&name.to_ascii_lowercase())
            .ok_or_else(|| Error::UnsupportedProblem(name.to_string()))?;
        factory(dim)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }
}

/// Builds one of the built-in benchmark problems.
pub fn make_problem<T: Scalar>(name: &str, dim: usize) -> Result<ProblemSpec<T>> {
    benchmarks::build(&name.to_ascii_lowercase(), dim)
}

/// Evaluated decision/objective pairs. Rows are only ever appended.
#[derive(Debug, Clone)]
pub struct Archive<T: Scalar> {
    x: Array2<T>,
    y: Array2<T>,
}

impl<T: Scalar> Archive<T> {
    pub fn new(dim: usize, n_obj: usize) -> Self {
        Self {
            x: Array2::zeros((0, dim)),
            y: Array2::zeros((0, n_obj)),
        }
    }

    pub fn from_parts(x: Array2<T>, y: Array2<T>) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(Error::InvalidData(format!(
                "archive row mismatch: {} decision rows vs {} objective rows",
                x.nrows(),
                y.nrows()
            )));
        }
        Ok(Self { x, y })
    }

    pub fn push(&mut self, x: ArrayView1<T>, y: ArrayView1<T>) -> Result<()> {
        if x.len() != self.x.ncols() || y.len() != self.y.ncols() {
            return Err(Error::InvalidData(format!(
                "archive row of shape ({}, {}) does not match ({}, {})",
                x.len(),
                y.len(),
                self.x.ncols(),
                self.y.ncols()
            )));
        }
        self.x.push_row(x).expect("width checked");
        self.y.push_row(y).expect("width checked");
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self) -> ArrayView2<'_, T> {
        self.x.view()
    }

    pub fn y(&self) -> ArrayView2<'_, T> {
        self.y.view()
    }

    pub fn select_x(&self, rows: &[usize]) -> Array2<T> {
        self.x.select(Axis(0), rows)
    }

    pub fn select_y(&self, rows: &[usize]) -> Array2<T> {
        self.y.select(Axis(0), rows)
    }
}
