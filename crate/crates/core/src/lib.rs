//! Horizontal-vertical geodesics between one-dimensional signals.
//!
//! A path deforms a signal `f(·, t)` by transporting it with a velocity `v`
//! and adding a vertical source `z`, subject to `f_t + v f_x = z`. Its action
//!
//! ```text
//! ½ ∬ κ v² + λ v_x² + ε v_xx² + z²  dx dt
//! ```
//!
//! is minimized by alternating two convex steps: a Lagrangian transport step
//! ([`flow::g1_solve`]) that finds the best `(f, z)` for a fixed `v`, and a
//! fourth-order boundary value solve ([`bvp::g2_solve`]) that finds the best
//! `(v, z)` for a fixed `f`. [`optimizer::solve`] wraps both in a damped
//! iteration started from several peak-matching initializations.
//!
//! ```
//! use hv_geodesic::{optimizer, Grid, HVParams, Signal};
//!
//! let grid = Grid::new(40, 20).unwrap();
//! let bump = |c: f64| move |x: f64| (-(x - c).powi(2) / 0.005).exp();
//! let f0 = Signal::from_fn(40, bump(0.35)).unwrap();
//! let f1 = Signal::from_fn(40, bump(0.65)).unwrap();
//! let params = HVParams::new(0.1, 0.01, 0.0005).unwrap();
//!
//! let result = optimizer::solve(&f0, &f1, &params, &grid, &Default::default()).unwrap();
//! let linear = 0.5 * hv_geodesic::l2_distance(&f0, &f1).powi(2);
//! assert!(result.action.total <= linear + 1e-9);
//! ```

pub mod action;
pub mod analysis;
pub mod banded;
pub mod bvp;
pub mod error;
pub mod flow;
pub mod grid;
pub mod optimizer;
pub mod prominence;
pub mod transform;

pub use action::{action, action_with, constraint_residual, ActionBreakdown, Convention};
pub use error::{HvError, Result};
pub use flow::{FlowField, Integrator};
pub use grid::{trapezoid_weights, Grid, HVParams, Path, Signal};
pub use optimizer::{GeodesicResult, SolveOptions};

/// Trapezoid `L²` distance between two signals on the same grid.
///
/// # Panics
/// If the signals have different lengths.
pub fn l2_distance(a: &Signal, b: &Signal) -> f64 {
    assert_eq!(a.len(), b.len(), "signals on different grids");
    let diff: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x - y)
        .collect();
    grid::l2_norm_trapezoid(&diff, 1.0 / a.nx() as f64)
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/paths.md")]
    mod paths {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
    #[doc = include_str!("../../../book/src/velocity.md")]
    mod velocity {}
    #[doc = include_str!("../../../book/src/iteration.md")]
    mod iteration {}
    #[doc = include_str!("../../../book/src/degeneracy.md")]
    mod degeneracy {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
