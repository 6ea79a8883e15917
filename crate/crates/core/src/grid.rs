//! Space-time mesh, sampled signals, metric weights and discrete paths.
//!
//! Every field lives on the uniform mesh `x_i = i/nx`, `t_j = j/nt` of the unit
//! square. Fields are stored as `(nt + 1) x (nx + 1)` arrays whose row `j` is
//! the time slice `t_j`.

use ndarray::{Array2, ArrayView1, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};

/// Uniform mesh on `[0,1] x [0,1]` with `nx` spatial and `nt` time intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    nx: usize,
    nt: usize,
}

impl Grid {
    /// The fourth-order stencil needs at least four spatial intervals.
    pub fn new(nx: usize, nt: usize) -> Result<Self> {
        if nx < 4 {
            return Err(HvError::InvalidGrid(format!("nx = {nx} < 4")));
        }
        if nt < 1 {
            return Err(HvError::InvalidGrid("nt must be positive".into()));
        }
        Ok(Self { nx, nt })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.nt as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 / self.nx as f64
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 / self.nt as f64
    }

    /// Shape `(nt + 1, nx + 1)` of a space-time field.
    pub fn shape(&self) -> (usize, usize) {
        (self.nt + 1, self.nx + 1)
    }

    pub fn zeros(&self) -> Array2<f64> {
        Array2::zeros(self.shape())
    }

    /// Trapezoid weights on the spatial nodes.
    pub fn x_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.nx, self.dx())
    }

    /// Trapezoid weights on the time nodes.
    pub fn t_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.nt, self.dt())
    }

    /// Trapezoid `L²(0,1)` norm of a nodal vector.
    pub fn l2_norm(&self, values: &[f64]) -> f64 {
        l2_norm_trapezoid(values, self.dx())
    }
}

/// Composite trapezoid weights for `n` intervals of width `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n + 1];
    w[0] = 0.5 * h;
    w[n] = 0.5 * h;
    w
}

pub(crate) fn l2_norm_trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    let interior: f64 = values[1..n].iter().map(|v| v * v).sum();
    (h * (interior + 0.5 * (values[0] * values[0] + values[n] * values[n]))).sqrt()
}

/// Signal amplitudes at the nodes `x_i = i/nx` of a spatial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    values: Vec<f64>,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 5 {
            return Err(HvError::InvalidGrid(format!(
                "a signal needs at least 5 samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(HvError::NonFinite("signal"));
        }
        Ok(Self { values })
    }

    /// Samples `f` at the nodes of a grid with `nx` intervals.
    pub fn from_fn(nx: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=nx).map(|i| f(i as f64 / nx as f64)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Number of spatial intervals the signal is sampled on.
    pub fn nx(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn negated(&self) -> Signal {
        Signal {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Linear interpolant of the samples evaluated at `x ∈ [0,1]`.
    pub fn eval(&self, x: f64) -> f64 {
        eval_uniform(&self.values, x)
    }

    /// Resamples onto a grid with `nx` intervals by linear interpolation.
    pub fn resample(&self, nx: usize) -> Signal {
        if nx == self.nx() {
            return self.clone();
        }
        Signal {
            values: (0..=nx).map(|i| self.eval(i as f64 / nx as f64)).collect(),
        }
    }

    /// Trapezoid `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        l2_norm_trapezoid(&self.values, 1.0 / self.nx() as f64)
    }

    pub(crate) fn check_on(&self, grid: &Grid, what: &'static str) -> Result<()> {
        if self.nx() != grid.nx() {
            return Err(HvError::DimensionMismatch {
                what,
                expected: format!("{} samples", grid.nx() + 1),
                got: format!("{} samples", self.len()),
            });
        }
        Ok(())
    }
}

/// Linear interpolation of samples on the uniform grid `i/(n-1)`.
pub(crate) fn eval_uniform(values: &[f64], x: f64) -> f64 {
    let n = values.len() - 1;
    let s = (x.clamp(0.0, 1.0)) * n as f64;
    let k = (s.floor() as usize).min(n - 1);
    let theta = s - k as f64;
    (1.0 - theta) * values[k] + theta * values[k + 1]
}

/// Piecewise-linear interpolation of the sorted abscissae `xs` at the sorted
/// query points `queries`. Queries outside `[xs[0], xs[last]]` are clamped.
pub(crate) fn interp_sorted(xs: &[f64], ys: &[f64], queries: &[f64], out: &mut [f64]) {
    let mut seg = 0;
    let last = xs.len() - 1;
    for (q, o) in queries.iter().zip(out.iter_mut()) {
        while seg + 1 < last && xs[seg + 1] < *q {
            seg += 1;
        }
        let (a, b) = (xs[seg], xs[seg + 1]);
        let theta = if b > a {
            ((q - a) / (b - a)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        *o = (1.0 - theta) * ys[seg] + theta * ys[seg + 1];
    }
}

/// Metric weights `(κ, λ, ε)` of the action `½∬ κv² + λv_x² + εv_xx² + z²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HVParams {
    pub kappa: f64,
    pub lambda: f64,
    pub epsilon: f64,
}

impl HVParams {
    pub fn new(kappa: f64, lambda: f64, epsilon: f64) -> Result<Self> {
        let p = Self {
            kappa,
            lambda,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.lambda.is_finite() && self.epsilon.is_finite()) {
            return Err(HvError::InvalidParams("weights must be finite".into()));
        }
        if self.kappa <= 0.0 {
            return Err(HvError::InvalidParams(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if self.lambda < 0.0 || self.epsilon < 0.0 {
            return Err(HvError::InvalidParams(
                "lambda and epsilon must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Operations that solve the fourth-order problem need `ε > 0`.
    pub fn require_curvature(&self) -> Result<()> {
        self.validate()?;
        if self.epsilon == 0.0 {
            return Err(HvError::DegenerateMetric);
        }
        Ok(())
    }

    /// Multiplies every weight by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            kappa: c * self.kappa,
            lambda: c * self.lambda,
            epsilon: c * self.epsilon,
        }
    }
}

/// A discrete path `(f, v, z)`: signal, velocity and vertical source on the
/// full space-time mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    grid: Grid,
    pub(crate) f: Array2<f64>,
    pub(crate) v: Array2<f64>,
    pub(crate) z: Array2<f64>,
}

impl Path {
    /// Validates shapes, finiteness and the zero boundary values of `v`.
    pub fn new(grid: Grid, f: Array2<f64>, v: Array2<f64>, z: Array2<f64>) -> Result<Self> {
        for (name, a) in [("f", &f), ("v", &v), ("z", &z)] {
            if a.dim() != grid.shape() {
                return Err(HvError::DimensionMismatch {
                    what: name,
                    expected: format!("{:?}", grid.shape()),
                    got: format!("{:?}", a.dim()),
                });
            }
            if a.iter().any(|x| !x.is_finite()) {
                return Err(HvError::NonFinite(name));
            }
        }
        let nx = grid.nx();
        for (j, row) in v.rows().into_iter().enumerate() {
            if row[0] != 0.0 || row[nx] != 0.0 {
                return Err(HvError::BoundaryVelocity { slice: j });
            }
        }
        // rows are handed out as contiguous slices
        let standard = |a: Array2<f64>| {
            if a.is_standard_layout() {
                a
            } else {
                a.as_standard_layout().into_owned()
            }
        };
        Ok(Self {
            grid,
            f: standard(f),
            v: standard(v),
            z: standard(z),
        })
    }

    pub(crate) fn from_parts_unchecked(
        grid: Grid,
        f: Array2<f64>,
        v: Array2<f64>,
        z: Array2<f64>,
    ) -> Self {
        debug_assert_eq!(f.dim(), grid.shape());
        debug_assert_eq!(v.dim(), grid.shape());
        debug_assert_eq!(z.dim(), grid.shape());
        Self { grid, f, v, z }
    }

    /// The zero-velocity path `f = (1-t) f0 + t f1`, `z = f1 - f0`.
    pub fn linear(grid: Grid, f0: &Signal, f1: &Signal) -> Result<Self> {
        f0.check_on(&grid, "source signal")?;
        f1.check_on(&grid, "target signal")?;
        let (f, z) = linear_fields(&grid, f0.values(), f1.values());
        Ok(Self::from_parts_unchecked(grid, f, grid.zeros(), z))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn f(&self) -> &Array2<f64> {
        &self.f
    }

    pub fn v(&self) -> &Array2<f64> {
        &self.v
    }

    pub fn z(&self) -> &Array2<f64> {
        &self.z
    }

    pub fn into_parts(self) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
        (self.f, self.v, self.z)
    }

    /// Signal at time slice `j`.
    pub fn slice(&self, j: usize) -> ArrayView1<'_, f64> {
        self.f.row(j)
    }

    pub fn source(&self) -> Signal {
        Signal {
            values: self.f.row(0).to_vec(),
        }
    }

    pub fn target(&self) -> Signal {
        Signal {
            values: self.f.row(self.grid.nt()).to_vec(),
        }
    }

    /// Componentwise `(1-α)·self + α·other`.
    pub fn blend(&self, other: &Path, alpha: f64) -> Path {
        debug_assert_eq!(self.grid, other.grid);
        let mix = |a: &Array2<f64>, b: &Array2<f64>| {
            let mut out = a.clone();
            Zip::from(&mut out)
                .and(b)
                .for_each(|o, &bb| *o = (1.0 - alpha) * *o + alpha * bb);
            out
        };
        if alpha == 0.0 {
            return self.clone();
        }
        if alpha == 1.0 {
            return other.clone();
        }
        Path {
            grid: self.grid,
            f: mix(&self.f, &other.f),
            v: mix(&self.v, &other.v),
            z: mix(&self.z, &other.z),
        }
    }

    /// Signal at an arbitrary time, linearly interpolated between slices.
    pub fn frame(&self, t: f64) -> Vec<f64> {
        let nt = self.grid.nt();
        let s = t.clamp(0.0, 1.0) * nt as f64;
        let j = (s.floor() as usize).min(nt - 1);
        let theta = s - j as f64;
        self.f
            .row(j)
            .iter()
            .zip(self.f.row(j + 1).iter())
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect()
    }
}

pub(crate) fn linear_fields(grid: &Grid, f0: &[f64], f1: &[f64]) -> (Array2<f64>, Array2<f64>) {
    let mut f = grid.zeros();
    let mut z = grid.zeros();
    let nt = grid.nt();
    for j in 0..=nt {
        let t = grid.t(j);
        for i in 0..=grid.nx() {
            f[[j, i]] = (1.0 - t) * f0[i] + t * f1[i];
            z[[j, i]] = f1[i] - f0[i];
        }
    }
    f.row_mut(0).assign(&ArrayView1::from(f0));
    f.row_mut(nt).assign(&ArrayView1::from(f1));
    (f, z)
}
