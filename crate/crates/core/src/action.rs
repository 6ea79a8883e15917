//! Discrete action and constraint defect of a path.
//!
//! The quadrature is the composite trapezoid rule in `x` and `t`. The
//! gradient term uses cell differences `(v_{i+1} - v_i)/dx` weighted by `dx`,
//! and the curvature term uses the centered second difference with the ghost
//! values `v(-dx) = -v(dx)`, `v(1+dx) = -v(1-dx)` that encode `v_xx = 0` on the
//! boundary. With these stencils the slice quadratic is exactly the one whose
//! normal equations are assembled in [`crate::bvp`].

use serde::{Deserialize, Serialize};

use crate::grid::{HVParams, Path};

/// Normalization of the action integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Convention {
    /// `½∬ κv² + λv_x² + εv_xx² + z²`.
    #[default]
    Half,
    /// `∬ κv² + λv_x² + εv_xx² + z²`, used for the ε = 0 constructions.
    Unit,
}

impl Convention {
    fn factor(self) -> f64 {
        match self {
            Convention::Half => 0.5,
            Convention::Unit => 1.0,
        }
    }
}

/// The four quadrature terms of the action (weights and prefactor applied).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ActionBreakdown {
    pub total: f64,
    pub kinetic_v: f64,
    pub grad_v: f64,
    pub curv_v: f64,
    pub vertical_z: f64,
}

/// Per-slice unweighted integrals `∫v²`, `∫v_x²`, `∫v_xx²`, `∫z²`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct SliceIntegrals {
    pub v2: f64,
    pub vx2: f64,
    pub vxx2: f64,
    pub z2: f64,
}

/// Second difference at node `i` with the odd-reflection ghost points.
#[inline]
pub(crate) fn second_difference(v: &[f64], i: usize, dx: f64) -> f64 {
    let n = v.len() - 1;
    let (left, right) = if i == 0 {
        (-v[1], v[1])
    } else if i == n {
        (v[n - 1], -v[n - 1])
    } else {
        (v[i - 1], v[i + 1])
    };
    (left - 2.0 * v[i] + right) / (dx * dx)
}

pub(crate) fn slice_integrals(v: &[f64], z: &[f64], dx: f64) -> SliceIntegrals {
    let n = v.len() - 1;
    let mut s = SliceIntegrals::default();
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 * dx } else { dx };
        let vxx = second_difference(v, i, dx);
        s.v2 += w * v[i] * v[i];
        s.vxx2 += w * vxx * vxx;
        s.z2 += w * z[i] * z[i];
        if i < n {
            let vx = (v[i + 1] - v[i]) / dx;
            s.vx2 += dx * vx * vx;
        }
    }
    s
}

/// Action `½∬ κv² + λv_x² + εv_xx² + z²` of a path.
///
/// ```
/// use hv_geodesic::{action, Grid, HVParams, Path, Signal};
///
/// let grid = Grid::new(16, 4).unwrap();
/// let f0 = Signal::from_fn(16, |_| 0.0).unwrap();
/// let f1 = Signal::from_fn(16, |_| 1.0).unwrap();
/// let path = Path::linear(grid, &f0, &f1).unwrap();
/// let a = action(&path, &HVParams::new(1.0, 1.0, 1.0).unwrap());
/// assert!((a.total - 0.5).abs() < 1e-15);
/// ```
pub fn action(path: &Path, params: &HVParams) -> ActionBreakdown {
    action_with(path, params, Convention::Half)
}

pub fn action_with(path: &Path, params: &HVParams, convention: Convention) -> ActionBreakdown {
    let grid = path.grid();
    let dx = grid.dx();
    let tw = grid.t_weights();
    let mut acc = SliceIntegrals::default();
    for (j, wt) in tw.iter().enumerate() {
        let v = path.v.row(j);
        let z = path.z.row(j);
        let s = slice_integrals(
            v.as_slice().expect("standard layout"),
            z.as_slice().expect("standard layout"),
            dx,
        );
        acc.v2 += wt * s.v2;
        acc.vx2 += wt * s.vx2;
        acc.vxx2 += wt * s.vxx2;
        acc.z2 += wt * s.z2;
    }
    let c = convention.factor();
    let kinetic_v = c * params.kappa * acc.v2;
    let grad_v = c * params.lambda * acc.vx2;
    let curv_v = c * params.epsilon * acc.vxx2;
    let vertical_z = c * acc.z2;
    ActionBreakdown {
        total: kinetic_v + grad_v + curv_v + vertical_z,
        kinetic_v,
        grad_v,
        curv_v,
        vertical_z,
    }
}

/// Largest interior defect of `f_t + v f_x = z`, forward in `t` and central in `x`.
pub fn constraint_residual(path: &Path) -> f64 {
    let grid = path.grid();
    let (dx, dt) = (grid.dx(), grid.dt());
    let mut worst: f64 = 0.0;
    for j in 0..grid.nt() {
        for i in 1..grid.nx() {
            let ft = (path.f[[j + 1, i]] - path.f[[j, i]]) / dt;
            let fx = (path.f[[j, i + 1]] - path.f[[j, i - 1]]) / (2.0 * dx);
            let r = (ft + path.v[[j, i]] * fx - path.z[[j, i]]).abs();
            worst = worst.max(r);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Signal};
    use std::f64::consts::PI;

    fn sine_path(nx: usize) -> Path {
        let g = Grid::new(nx, 3).unwrap();
        let mut v = g.zeros();
        for j in 0..=3 {
            for i in 0..=nx {
                v[[j, i]] = (PI * g.x(i)).sin();
            }
            v[[j, 0]] = 0.0;
            v[[j, nx]] = 0.0;
        }
        Path::new(g, g.zeros(), v, g.zeros()).unwrap()
    }

    #[test]
    fn constant_source_is_exact() {
        let g = Grid::new(7, 3).unwrap();
        let mut z = g.zeros();
        z.fill(1.0);
        let p = Path::new(g, g.zeros(), g.zeros(), z).unwrap();
        let a = action(&p, &HVParams::new(2.0, 3.0, 4.0).unwrap());
        assert!((a.total - 0.5).abs() < 1e-15);
        assert_eq!(a.kinetic_v, 0.0);
    }

    #[test]
    fn breakdown_sums_to_total() {
        let p = sine_path(20);
        let a = action(&p, &HVParams::new(0.3, 0.2, 0.1).unwrap());
        assert_eq!(a.total, a.kinetic_v + a.grad_v + a.curv_v + a.vertical_z);
        assert!(a.kinetic_v > 0.0 && a.grad_v > 0.0 && a.curv_v > 0.0);
    }

    #[test]
    fn sine_velocity_converges_at_second_order() {
        // ½(∫sin² + π²∫cos² + π⁴∫sin²) = ½(½ + π²/2 + π⁴/2)
        let exact = 0.5 * (0.5 + PI * PI / 2.0 + PI.powi(4) / 2.0);
        let params = HVParams::new(1.0, 1.0, 1.0).unwrap();
        let errs: Vec<f64> = [40, 80, 160]
            .iter()
            .map(|&nx| (action(&sine_path(nx), &params).total - exact).abs())
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.9, "order {order}, errors {errs:?}");
        }
    }

    #[test]
    fn linear_path_action_is_half_l2_gap() {
        let g = Grid::new(10, 5).unwrap();
        let f0 = Signal::from_fn(10, |x| x * x).unwrap();
        let f1 = Signal::from_fn(10, |x| (3.0 * x).sin()).unwrap();
        let p = Path::linear(g, &f0, &f1).unwrap();
        let gap: Vec<f64> = f1
            .values()
            .iter()
            .zip(f0.values())
            .map(|(a, b)| a - b)
            .collect();
        let expect = 0.5 * g.l2_norm(&gap).powi(2);
        let got = action(&p, &HVParams::new(1.0, 1.0, 1.0).unwrap()).total;
        assert!((got - expect).abs() <= 1e-14 * expect);
        assert!(constraint_residual(&p) < 1e-12);
    }

    #[test]
    fn residual_detects_defects() {
        let g = Grid::new(6, 2).unwrap();
        let mut f = g.zeros();
        f.fill(2.0);
        let p = Path::new(g, f.clone(), g.zeros(), g.zeros()).unwrap();
        assert_eq!(constraint_residual(&p), 0.0);
        let mut z = g.zeros();
        z[[1, 3]] = 0.5;
        let bad = Path::new(g, f, g.zeros(), z).unwrap();
        assert_eq!(constraint_residual(&bad), 0.5);
    }

    #[test]
    fn ghost_second_difference_vanishes_at_boundary() {
        let v = [0.0, 1.0, 3.0, 2.0, 0.0];
        assert_eq!(second_difference(&v, 0, 0.25), 0.0);
        assert_eq!(second_difference(&v, 4, 0.25), 0.0);
        assert_eq!(second_difference(&v, 2, 0.5), (1.0 - 6.0 + 2.0) / 0.25);
    }
}
