//! Lagrangian transport step: the flow of a velocity field and the
//! closed-form optimal `(f, z)` along its trajectories.
//!
//! For fixed `v`, the source that minimizes `∬ z²` subject to the transport
//! constraint is constant along trajectories once weighted by `DΦ`, which gives
//!
//! ```text
//! z(Φ(x,t), t) = (f1(Φ(x,1)) - f0(x)) J(x,t) / ∫₀¹ J(x,s) ds
//! f(Φ(x,t), t) = (1 - η(x,t)) f0(x) + η(x,t) f1(Φ(x,1))
//! ```
//!
//! with `J = 1/DΦ` and `η` the normalized running integral of `J`.

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::grid::{eval_uniform, interp_sorted, Grid, Path, Signal};

/// Time stepping for the characteristic ODE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Integrator {
    /// First order, velocity frozen at the left end of each time step.
    #[default]
    Euler,
    /// Classical fourth-order Runge-Kutta, velocity linear in time between slices.
    Rk4,
}

/// Trajectories of a velocity field and the quantities carried along them.
/// Every array is indexed `[j, i]`: time slice `j`, starting node `x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    /// Position `Φ(x_i, t_j)`.
    pub phi: Array2<f64>,
    /// `DΦ = exp(∫ v_x∘Φ)`.
    pub dphi: Array2<f64>,
    /// `J = exp(-∫ v_x∘Φ)`.
    pub jac: Array2<f64>,
    /// `η = ∫₀ᵗ J / ∫₀¹ J`.
    pub eta: Array2<f64>,
}

/// Nodal velocity derivative: central inside, one-sided at the ends.
fn nodal_derivative(row: ArrayView1<f64>, dx: f64) -> Vec<f64> {
    let n = row.len() - 1;
    let mut d = vec![0.0; n + 1];
    d[0] = (row[1] - row[0]) / dx;
    d[n] = (row[n] - row[n - 1]) / dx;
    for i in 1..n {
        d[i] = (row[i + 1] - row[i - 1]) / (2.0 * dx);
    }
    d
}

pub(crate) fn check_velocity(v: &Array2<f64>, grid: &Grid) -> Result<()> {
    if v.dim() != grid.shape() {
        return Err(HvError::DimensionMismatch {
            what: "velocity",
            expected: format!("{:?}", grid.shape()),
            got: format!("{:?}", v.dim()),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(HvError::NonFinite("velocity"));
    }
    let nx = grid.nx();
    for (j, row) in v.rows().into_iter().enumerate() {
        if row[0] != 0.0 || row[nx] != 0.0 {
            return Err(HvError::BoundaryVelocity { slice: j });
        }
    }
    Ok(())
}

/// Integrates `∂ₜΦ = v(Φ, t)`, `Φ(x, 0) = x` from every grid node.
///
/// Fails with [`HvError::FoldOver`] when two trajectories cross and with
/// [`HvError::Collapse`] when neighbours become numerically coincident.
pub fn integrate_flow(v: &Array2<f64>, grid: &Grid, integrator: Integrator) -> Result<FlowField> {
    check_velocity(v, grid)?;
    let (nx, nt) = (grid.nx(), grid.nt());
    let (dx, dt) = (grid.dx(), grid.dt());
    let vel: Vec<Vec<f64>> = v.rows().into_iter().map(|r| r.to_vec()).collect();
    let dvel: Vec<Vec<f64>> = v
        .rows()
        .into_iter()
        .map(|r| nodal_derivative(r, dx))
        .collect();

    // (V, V_x) at position x and time t_j + θ dt.
    let field = |x: f64, j: usize, theta: f64| -> (f64, f64) {
        let a = (eval_uniform(&vel[j], x), eval_uniform(&dvel[j], x));
        if theta == 0.0 || j == nt {
            return a;
        }
        let b = (eval_uniform(&vel[j + 1], x), eval_uniform(&dvel[j + 1], x));
        (
            (1.0 - theta) * a.0 + theta * b.0,
            (1.0 - theta) * a.1 + theta * b.1,
        )
    };

    let columns: Vec<(Vec<f64>, Vec<f64>)> = (0..=nx)
        .into_par_iter()
        .map(|i| {
            let mut pos = vec![0.0; nt + 1];
            let mut acc = vec![0.0; nt + 1];
            let (mut x, mut s) = (grid.x(i), 0.0);
            pos[0] = x;
            for j in 0..nt {
                match integrator {
                    Integrator::Euler => {
                        let (u, ux) = field(x, j, 0.0);
                        x += dt * u;
                        s += dt * ux;
                    }
                    Integrator::Rk4 => {
                        let k1 = field(x, j, 0.0);
                        let k2 = field((x + 0.5 * dt * k1.0).clamp(0.0, 1.0), j, 0.5);
                        let k3 = field((x + 0.5 * dt * k2.0).clamp(0.0, 1.0), j, 0.5);
                        let k4 = field((x + dt * k3.0).clamp(0.0, 1.0), j, 1.0);
                        x += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                        s += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                    }
                }
                x = x.clamp(0.0, 1.0);
                pos[j + 1] = x;
                acc[j + 1] = s;
            }
            (pos, acc)
        })
        .collect();

    let mut phi = grid.zeros();
    let mut integral = grid.zeros();
    for (i, (pos, acc)) in columns.iter().enumerate() {
        for j in 0..=nt {
            phi[[j, i]] = pos[j];
            integral[[j, i]] = acc[j];
        }
    }
    let tol = dx * 1e-8;
    for j in 1..=nt {
        let row = phi.row(j);
        if (0..nx).any(|i| row[i + 1] - row[i] < -tol) {
            return Err(HvError::FoldOver { slice: j });
        }
        if let Some(i) = (0..nx).find(|&i| row[i + 1] - row[i] <= tol) {
            return Err(HvError::Collapse { slice: j, index: i });
        }
    }

    let jac = integral.mapv(|s| (-s).exp());
    let dphi = integral.mapv(f64::exp);
    let mut eta = grid.zeros();
    for i in 0..=nx {
        let mut run = 0.0;
        for j in 1..=nt {
            run += 0.5 * dt * (jac[[j - 1, i]] + jac[[j, i]]);
            eta[[j, i]] = run;
        }
        for j in 1..nt {
            eta[[j, i]] /= run;
        }
        eta[[nt, i]] = 1.0;
    }
    Ok(FlowField {
        phi,
        dphi,
        jac,
        eta,
    })
}

/// Optimal `f` and `z` along each trajectory, before returning to the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectories {
    pub flow: FlowField,
    /// `f(Φ(x_i, t_j), t_j)`.
    pub fhat: Array2<f64>,
    /// `z(Φ(x_i, t_j), t_j)`.
    pub zhat: Array2<f64>,
}

/// Lagrangian values of the transport step.
pub fn g1_trajectories(
    v: &Array2<f64>,
    f0: &Signal,
    f1: &Signal,
    grid: &Grid,
    integrator: Integrator,
) -> Result<Trajectories> {
    f0.check_on(grid, "source signal")?;
    f1.check_on(grid, "target signal")?;
    let flow = integrate_flow(v, grid, integrator)?;
    let (nx, nt, dt) = (grid.nx(), grid.nt(), grid.dt());
    let mut fhat = grid.zeros();
    let mut zhat = grid.zeros();
    for i in 0..=nx {
        let total: f64 = (1..=nt)
            .map(|j| 0.5 * dt * (flow.jac[[j - 1, i]] + flow.jac[[j, i]]))
            .sum();
        let end = f1.eval(flow.phi[[nt, i]]);
        let start = f0.values()[i];
        for j in 0..=nt {
            let eta = flow.eta[[j, i]];
            fhat[[j, i]] = (1.0 - eta) * start + eta * end;
            zhat[[j, i]] = (end - start) * flow.jac[[j, i]] / total;
        }
    }
    Ok(Trajectories { flow, fhat, zhat })
}

/// The transport step: for fixed `v`, the admissible `(f, z)` with minimal
/// vertical action, returned as a path carrying `v`.
///
/// ```
/// use hv_geodesic::flow::{g1_solve, Integrator};
/// use hv_geodesic::{Grid, Signal};
///
/// let grid = Grid::new(8, 4).unwrap();
/// let f0 = Signal::from_fn(8, |x| x).unwrap();
/// let f1 = Signal::from_fn(8, |x| 1.0 - x).unwrap();
/// let path = g1_solve(&grid.zeros(), &f0, &f1, &grid, Integrator::Euler).unwrap();
/// assert_eq!(path.f()[[2, 3]], 0.5 * 0.375 + 0.5 * 0.625);
/// ```
pub fn g1_solve(
    v: &Array2<f64>,
    f0: &Signal,
    f1: &Signal,
    grid: &Grid,
    integrator: Integrator,
) -> Result<Path> {
    if v.iter().all(|&x| x == 0.0) {
        check_velocity(v, grid)?;
        return Path::linear(*grid, f0, f1);
    }
    let traj = g1_trajectories(v, f0, f1, grid, integrator)?;
    let nt = grid.nt();
    let xs: Vec<f64> = (0..=grid.nx()).map(|i| grid.x(i)).collect();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..=nt)
        .into_par_iter()
        .map(|j| {
            let phi = traj.flow.phi.row(j).to_vec();
            let fh = traj.fhat.row(j).to_vec();
            let zh = traj.zhat.row(j).to_vec();
            let mut f = vec![0.0; xs.len()];
            let mut z = vec![0.0; xs.len()];
            interp_sorted(&phi, &fh, &xs, &mut f);
            interp_sorted(&phi, &zh, &xs, &mut z);
            (f, z)
        })
        .collect();
    let mut f = grid.zeros();
    let mut z = grid.zeros();
    for (j, (fr, zr)) in rows.into_iter().enumerate() {
        f.row_mut(j).assign(&ArrayView1::from(&fr));
        z.row_mut(j).assign(&ArrayView1::from(&zr));
    }
    f.row_mut(0).assign(&ArrayView1::from(f0.values()));
    f.row_mut(nt).assign(&ArrayView1::from(f1.values()));
    Ok(Path::from_parts_unchecked(*grid, f, v.clone(), z))
}
