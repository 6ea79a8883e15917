//! The velocity step: for a fixed signal path, each time slice of `v` solves
//!
//! ```text
//! ε v'''' - λ v'' + (κ + f_x²) v = -f_t f_x,   v = v'' = 0 on {0, 1}
//! ```
//!
//! discretized as a pentadiagonal system. Rows `0` and `nx` are identity rows
//! pinning `v = 0`; rows `1` and `nx - 1` fold in the odd-reflection ghost
//! values, which turns the `6ε` on their diagonals into `5ε`. The interior block
//! is the Hessian of the slice action, so each solve is an exact minimization.

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banded::BandMatrix;
use crate::error::{HvError, Result};
use crate::grid::{Grid, HVParams, Path, Signal};

/// Time differencing used for `f_t` in the velocity step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TimeDifference {
    /// Forward differences, backward on the last slice.
    #[default]
    Forward,
    /// Central differences inside, one-sided on the first and last slice.
    Central,
}

/// Linear system of one time slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSystem {
    /// Time slice the system belongs to, used in error reports.
    pub slice: usize,
    pub band: BandMatrix,
    pub rhs: Vec<f64>,
    /// Forward spatial differences of `f`, zero at both ends.
    pub w: Vec<f64>,
    /// Time differences of `f`, zero at both ends.
    pub tau: Vec<f64>,
}

/// Fills the pentadiagonal operator `ε D⁴ - λ D² + κ + diag(extra)`.
fn operator(n: usize, params: &HVParams, dx: f64, extra: &[f64]) -> BandMatrix {
    let (kappa, lambda, eps) = (params.kappa, params.lambda, params.epsilon);
    let dx2 = dx * dx;
    let dx4 = dx2 * dx2;
    let far = eps / dx4;
    let near = -4.0 * eps / dx4 - lambda / dx2;
    let mut a = BandMatrix::zeros(n + 1, 2, 2);
    a.set(0, 0, 1.0);
    a.set(n, n, 1.0);
    for i in 1..n {
        let ghost = i == 1 || i == n - 1;
        let bend = if ghost { 5.0 } else { 6.0 };
        a.set(
            i,
            i,
            kappa + extra[i] + 2.0 * lambda / dx2 + bend * eps / dx4,
        );
        a.set(i, i - 1, near);
        a.set(i, i + 1, near);
        if i >= 2 {
            a.set(i, i - 2, far);
        }
        if i + 2 <= n {
            a.set(i, i + 2, far);
        }
    }
    a
}

impl SliceSystem {
    /// Assembles from explicit `w` and `tau` without checking `ε > 0`.
    ///
    /// The endpoints of `w` and `tau` are zeroed. This is the raw constructor
    /// behind [`assemble`]; it also admits the reduced `ε = 0` operators.
    pub fn from_parts(
        mut w: Vec<f64>,
        mut tau: Vec<f64>,
        params: &HVParams,
        dx: f64,
    ) -> Result<Self> {
        if w.len() != tau.len() || w.len() < 5 {
            return Err(HvError::DimensionMismatch {
                what: "slice system",
                expected: format!("{} entries, at least 5", w.len()),
                got: format!("{}", tau.len()),
            });
        }
        let n = w.len() - 1;
        w[0] = 0.0;
        w[n] = 0.0;
        tau[0] = 0.0;
        tau[n] = 0.0;
        let w2: Vec<f64> = w.iter().map(|x| x * x).collect();
        let band = operator(n, params, dx, &w2);
        let rhs = tau.iter().zip(&w).map(|(t, w)| -t * w).collect();
        Ok(Self {
            slice: 0,
            band,
            rhs,
            w,
            tau,
        })
    }

    /// `‖band·v - rhs‖∞`.
    pub fn residual(&self, v: &[f64]) -> f64 {
        self.band
            .mul_vec(v)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Forward spatial differences with zero endpoints.
pub(crate) fn spatial_difference(f: ArrayView1<f64>, dx: f64) -> Vec<f64> {
    let n = f.len() - 1;
    let mut w = vec![0.0; n + 1];
    for i in 1..n {
        w[i] = (f[i + 1] - f[i]) / dx;
    }
    w
}

/// Assembles the slice system from consecutive signals.
pub fn assemble(
    f_now: &Signal,
    f_next: &Signal,
    params: &HVParams,
    grid: &Grid,
) -> Result<SliceSystem> {
    params.require_curvature()?;
    f_now.check_on(grid, "current slice")?;
    f_next.check_on(grid, "next slice")?;
    let w = spatial_difference(ArrayView1::from(f_now.values()), grid.dx());
    let dt = grid.dt();
    let tau = f_next
        .values()
        .iter()
        .zip(f_now.values())
        .map(|(b, a)| (b - a) / dt)
        .collect();
    SliceSystem::from_parts(w, tau, params, grid.dx())
}

/// Solves one slice by banded LU with partial pivoting.
///
/// The boundary rows only pin `v₀ = v_n = 0`, so those unknowns are
/// eliminated and the interior block is factored on its own. Letting the
/// pivoting mix the identity rows into the elimination leaves the pinned
/// values at the size of the rounding error times `‖A‖`.
pub fn solve_slice(sys: &SliceSystem) -> Result<Vec<f64>> {
    let n = sys.rhs.len() - 1;
    let (kl, ku) = (sys.band.lower_bandwidth(), sys.band.upper_bandwidth());
    let mut inner = BandMatrix::zeros(n - 1, kl, ku);
    for i in 1..n {
        for j in i.saturating_sub(kl).max(1)..=(i + ku).min(n - 1) {
            inner.set(i - 1, j - 1, sys.band.get(i, j));
        }
    }
    let lu = inner.factor().map_err(|e| HvError::Singular {
        slice: sys.slice,
        column: e.column + 1,
    })?;
    let mut interior = sys.rhs[1..n].to_vec();
    lu.solve_in_place(&mut interior);
    let mut v = vec![0.0; n + 1];
    v[1..n].copy_from_slice(&interior);
    if v.iter().any(|x| !x.is_finite()) {
        return Err(HvError::Singular {
            slice: sys.slice,
            column: 0,
        });
    }
    debug_assert!(
        {
            // normwise backward error; an absolute bound on the residual is
            // out of reach once ε/dx⁴ dominates the matrix norm
            let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let bmax = sys.rhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let scale = sys.band.norm_inf() * vmax + bmax;
            sys.residual(&v) <= 1e-10 * (1.0 + scale)
        },
        "slice {} residual too large",
        sys.slice
    );
    Ok(v)
}

/// `f_t` on slice `j` for every node.
fn time_difference(f: &Array2<f64>, j: usize, dt: f64, mode: TimeDifference) -> Vec<f64> {
    let nt = f.nrows() - 1;
    let (a, b, h) = match mode {
        TimeDifference::Central if j > 0 && j < nt => (j - 1, j + 1, 2.0 * dt),
        _ if j < nt => (j, j + 1, dt),
        _ => (j - 1, j, dt),
    };
    f.row(b)
        .iter()
        .zip(f.row(a).iter())
        .map(|(y, x)| (y - x) / h)
        .collect()
}

/// Velocity and source for a fixed signal path.
///
/// Returns `(v, z)` with `z = f_t + v f_x` inside and `z = f_t` at the two
/// boundary nodes.
pub fn g2_solve(
    f: &Array2<f64>,
    params: &HVParams,
    grid: &Grid,
    mode: TimeDifference,
) -> Result<(Array2<f64>, Array2<f64>)> {
    params.require_curvature()?;
    if f.dim() != grid.shape() {
        return Err(HvError::DimensionMismatch {
            what: "signal path",
            expected: format!("{:?}", grid.shape()),
            got: format!("{:?}", f.dim()),
        });
    }
    let (nx, nt, dx, dt) = (grid.nx(), grid.nt(), grid.dx(), grid.dt());
    let slices: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..=nt)
        .into_par_iter()
        .map(|j| {
            let w = spatial_difference(f.row(j), dx);
            let ft = time_difference(f, j, dt, mode);
            let mut sys = SliceSystem::from_parts(w, ft.clone(), params, dx)?;
            sys.slice = j;
            let v = solve_slice(&sys)?;
            let mut z = ft;
            for i in 1..nx {
                z[i] += v[i] * sys.w[i];
            }
            Ok((v, z))
        })
        .collect();
    let mut v = grid.zeros();
    let mut z = grid.zeros();
    for (j, s) in slices.into_iter().enumerate() {
        let (vj, zj) = s?;
        v.row_mut(j).assign(&ArrayView1::from(&vj));
        z.row_mut(j).assign(&ArrayView1::from(&zj));
    }
    Ok((v, z))
}

/// Tangent representative of a vertical perturbation `zbar` at the signal
/// `f_slice`: solves `ε v'''' - λ v'' + κ v = -f_x zbar` with the same
/// boundary treatment as the velocity step.
pub fn tangent_project(
    f_slice: &Signal,
    zbar: &Signal,
    params: &HVParams,
    grid: &Grid,
) -> Result<Vec<f64>> {
    params.require_curvature()?;
    f_slice.check_on(grid, "signal")?;
    zbar.check_on(grid, "vertical perturbation")?;
    let n = grid.nx();
    let w = spatial_difference(ArrayView1::from(f_slice.values()), grid.dx());
    let band = operator(n, params, grid.dx(), &vec![0.0; n + 1]);
    let mut rhs: Vec<f64> = w.iter().zip(zbar.values()).map(|(a, b)| -a * b).collect();
    rhs[0] = 0.0;
    rhs[n] = 0.0;
    let sys = SliceSystem {
        slice: 0,
        band,
        rhs,
        w,
        tau: zbar.values().to_vec(),
    };
    solve_slice(&sys)
}

/// Per-slice defect of the velocity equation `(εD⁴ - λD² + κ) v = -z f_x`,
/// measured as `‖A v + z⊙w‖∞ / (1 + ‖z⊙w‖∞)` over the interior nodes.
pub fn euler_lagrange_residual(path: &Path, params: &HVParams) -> Vec<f64> {
    let grid = path.grid();
    let n = grid.nx();
    let a = operator(n, params, grid.dx(), &vec![0.0; n + 1]);
    (0..=grid.nt())
        .map(|j| {
            let w = spatial_difference(path.f().row(j), grid.dx());
            let v = path.v().row(j).to_vec();
            let av = a.mul_vec(&v);
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for i in 1..n {
                let zw = path.z()[[j, i]] * w[i];
                worst = worst.max((av[i] + zw).abs());
                scale = scale.max(zw.abs());
            }
            worst / (1.0 + scale)
        })
        .collect()
}
