//! Constructions behind the `ε = 0` degeneracy, and a-priori bound checks
//! for computed paths.
//!
//! Without the curvature penalty, the action `∬ v² + λv_x² + z²` between the
//! constants `0` and `H` has no minimizer. [`competitor_path`] beats the
//! linear path for large `H` by filling a thin strip, sliding its edge across
//! the domain and filling the remaining strip; [`halving_path`] lowers the
//! action of any transporting path by squeezing two copies of it into the
//! unit interval.

use serde::{Deserialize, Serialize};

use crate::action::slice_integrals;
use crate::error::{HvError, Result};
use crate::flow::FlowField;
use crate::grid::{Grid, Path};

/// Closed-form action `∬ v² + λv_x² + z²` of the continuous competitor path
/// with strip width `s`, height `h` and phases of length ⅓.
pub fn competitor_action_exact(h: f64, s: f64, lambda: f64) -> f64 {
    let c = 3.0 * (1.0 - 2.0 * s);
    6.0 * s * h * h + c * c / 9.0 + 2.0 * lambda * c * ((1.0 - s) / s).ln()
}

/// Upper bound `6sH² + 3(1-2s)²(1 + λ/s²)` on the competitor action.
pub fn competitor_action_bound(h: f64, s: f64, lambda: f64) -> f64 {
    6.0 * s * h * h + 3.0 * (1.0 - 2.0 * s).powi(2) * (1.0 + lambda / (s * s))
}

/// Three-phase path from `f ≡ 0` to `f ≡ h`.
///
/// Until `t = ⅓` the strip `[0, s]` is raised to `h`; until `t = ⅔` the edge of
/// the raised region is carried from `s` to `1 - s` by a tent-shaped velocity
/// with no vertical source; afterwards the strip `[1 - s, 1]` is raised. The
/// strip width and phase boundaries are snapped to the grid.
pub fn competitor_path(h: f64, s: f64, grid: &Grid) -> Result<Path> {
    if !(s > 0.0 && s < 0.5) {
        return Err(HvError::InvalidArgument(format!(
            "s = {s} outside (0, 1/2)"
        )));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(HvError::InvalidArgument(format!(
            "height {h} must be positive"
        )));
    }
    let (nx, nt) = (grid.nx(), grid.nt());
    if (nx as f64) * s < 2.0 {
        return Err(HvError::InvalidGrid(format!(
            "nx = {nx} cannot resolve a strip of width {s}"
        )));
    }
    let j1 = (nt as f64 / 3.0).round() as usize;
    let j2 = (2.0 * nt as f64 / 3.0).round() as usize;
    if j1 == 0 || j2 <= j1 + 1 || j2 >= nt {
        return Err(HvError::InvalidGrid(format!(
            "nt = {nt} is too coarse for three phases"
        )));
    }
    let i_s = (s * nx as f64).round() as usize;
    let s = grid.x(i_s);
    let (t1, t2) = (grid.t(j1), grid.t(j2));
    let speed = (1.0 - 2.0 * s) / (t2 - t1);

    let mut f = grid.zeros();
    let mut v = grid.zeros();
    let mut z = grid.zeros();
    for j in 0..=nt {
        let t = grid.t(j);
        for i in 0..=nx {
            let x = grid.x(i);
            if j <= j1 {
                if i <= i_s {
                    f[[j, i]] = h * t / t1;
                    z[[j, i]] = h / t1;
                }
            } else if j < j2 {
                let edge = s + speed * (t - t1);
                if x <= edge {
                    f[[j, i]] = h;
                }
                if i > 0 && i < nx {
                    v[[j, i]] = if x <= edge {
                        speed * x / edge
                    } else {
                        speed * (1.0 - x) / (1.0 - edge)
                    };
                }
            } else if i <= nx - i_s {
                f[[j, i]] = h;
            } else {
                f[[j, i]] = h * (t - t2) / (1.0 - t2);
                z[[j, i]] = h / (1.0 - t2);
            }
        }
    }
    Path::new(*grid, f, v, z)
}

/// Two copies of the path squeezed into the unit interval:
/// `(f(2x mod 1), v(2x mod 1)/2, z(2x mod 1))`.
///
/// The result lives on a grid with `2 nx` intervals so that no sample is
/// lost. Under `∬ v² + λv_x² + z²` its action equals `∬ ¼v² + λv_x² + z²` of the
/// input whenever `z(0, t) = z(1, t)`.
pub fn halving_path(path: &Path) -> Result<Path> {
    let grid = path.grid();
    let (nx, nt) = (grid.nx(), grid.nt());
    let fine = Grid::new(2 * nx, nt)?;
    let src = |i: usize| if i <= nx { i } else { i - nx };
    let mut f = fine.zeros();
    let mut v = fine.zeros();
    let mut z = fine.zeros();
    for j in 0..=nt {
        for i in 0..=2 * nx {
            let k = src(i);
            f[[j, i]] = path.f()[[j, k]];
            v[[j, i]] = 0.5 * path.v()[[j, k]];
            z[[j, i]] = path.z()[[j, k]];
        }
    }
    Path::new(fine, f, v, z)
}

/// Observed slack of each a-priori bound, as allowed over observed (a
/// value of at least 1 passes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundMargins {
    pub energy: f64,
    pub jac_low: f64,
    pub jac_high: f64,
    pub dphi_low: f64,
    pub dphi_high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Discrete `‖v‖` in `L²(0,1; H²)`.
    pub v_norm: f64,
    /// `exp(√2 · v_norm)`.
    pub b: f64,
    /// `max_t ‖f(t)‖ ≤ b (‖f0‖ + ‖z‖)`.
    pub energy_ok: bool,
    /// `1/b ≤ J ≤ b`.
    pub jac_ok: bool,
    /// `exp(-√(2t) v_norm) ≤ DΦ ≤ exp(√(2t) v_norm)`.
    pub dphi_ok: bool,
    pub margins: BoundMargins,
}

/// Multiplicative slack granted to every bound.
pub const BOUND_SLACK: f64 = 1.05;

/// Checks the energy, Jacobian and `DΦ` bounds on a path and its flow.
pub fn bound_report(path: &Path, flow: &FlowField) -> BoundReport {
    let grid = path.grid();
    let (dx, tw) = (grid.dx(), grid.t_weights());
    let mut h2 = 0.0;
    let mut z2 = 0.0;
    for (j, w) in tw.iter().enumerate() {
        let v = path.v().row(j).to_vec();
        let zr = path.z().row(j).to_vec();
        let s = slice_integrals(&v, &zr, dx);
        h2 += w * (s.v2 + s.vx2 + s.vxx2);
        z2 += w * s.z2;
    }
    let v_norm = h2.sqrt();
    let b = (2f64.sqrt() * v_norm).exp();

    let f0 = path.f().row(0).to_vec();
    let allowed = BOUND_SLACK * b * (grid.l2_norm(&f0) + z2.sqrt());
    let observed = (0..=grid.nt())
        .map(|j| grid.l2_norm(&path.f().row(j).to_vec()))
        .fold(0.0, f64::max);
    let energy = if observed > 0.0 {
        allowed / observed
    } else {
        f64::INFINITY
    };

    let jmin = flow.jac.iter().copied().fold(f64::INFINITY, f64::min);
    let jmax = flow.jac.iter().copied().fold(0.0, f64::max);
    let jac_low = jmin * BOUND_SLACK * b;
    let jac_high = BOUND_SLACK * b / jmax;

    let mut dphi_low = f64::INFINITY;
    let mut dphi_high = f64::INFINITY;
    for (j, row) in flow.dphi.rows().into_iter().enumerate() {
        let e = ((2.0 * grid.t(j)).sqrt() * v_norm).exp();
        for &d in row {
            dphi_low = dphi_low.min(d * e * BOUND_SLACK);
            dphi_high = dphi_high.min(BOUND_SLACK * e / d);
        }
    }
    let margins = BoundMargins {
        energy,
        jac_low,
        jac_high,
        dphi_low,
        dphi_high,
    };
    BoundReport {
        v_norm,
        b,
        energy_ok: energy >= 1.0,
        jac_ok: jac_low >= 1.0 && jac_high >= 1.0,
        dphi_ok: dphi_low >= 1.0 && dphi_high >= 1.0,
        margins,
    }
}
