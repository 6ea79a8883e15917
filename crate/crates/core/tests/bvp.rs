use std::f64::consts::PI;

use hv_geodesic::bvp::{assemble, euler_lagrange_residual, g2_solve, solve_slice, TimeDifference};
use hv_geodesic::{action, Grid, HVParams, Path, Signal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> HVParams {
    HVParams::new(0.05, 0.004, 0.0008).unwrap()
}

fn moving_bump(grid: &Grid) -> ndarray::Array2<f64> {
    let mut f = grid.zeros();
    for j in 0..=grid.nt() {
        let c = 0.35 + 0.3 * grid.t(j);
        for i in 0..=grid.nx() {
            f[[j, i]] = (-(grid.x(i) - c).powi(2) / 0.01).exp() + 0.2 * grid.t(j);
        }
    }
    f
}

#[test]
fn interior_operator_is_symmetric() {
    let grid = Grid::new(30, 4).unwrap();
    let a = Signal::from_fn(30, |x| (5.0 * x).sin()).unwrap();
    let b = Signal::from_fn(30, |x| (5.0 * x).cos()).unwrap();
    let sys = assemble(&a, &b, &params(), &grid).unwrap();
    for i in 1..30 {
        for j in 1..30 {
            assert_eq!(sys.band.get(i, j), sys.band.get(j, i), "({i}, {j})");
        }
    }
}

#[test]
fn velocity_step_minimizes_the_action_for_fixed_f() {
    let grid = Grid::new(60, 20).unwrap();
    let f = moving_bump(&grid);
    let (v, z) = g2_solve(&f, &params(), &grid, TimeDifference::Forward).unwrap();
    let best = action(
        &Path::new(grid, f.clone(), v.clone(), z).unwrap(),
        &params(),
    )
    .total;

    // any other velocity, with z completed from the same discrete constraint
    let dx = grid.dx();
    let dt = grid.dt();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let mut u = v.clone();
        let mut zu = grid.zeros();
        for j in 0..=grid.nt() {
            for i in 1..grid.nx() {
                u[[j, i]] += rng.gen_range(-0.05..0.05);
            }
            let jn = (j + 1).min(grid.nt());
            for i in 0..=grid.nx() {
                let ft = if j < grid.nt() {
                    (f[[jn, i]] - f[[j, i]]) / dt
                } else {
                    (f[[j, i]] - f[[j - 1, i]]) / dt
                };
                let w = if i > 0 && i < grid.nx() {
                    (f[[j, i + 1]] - f[[j, i]]) / dx
                } else {
                    0.0
                };
                zu[[j, i]] = ft + u[[j, i]] * w;
            }
        }
        let other = action(&Path::new(grid, f.clone(), u, zu).unwrap(), &params()).total;
        assert!(other > best, "{other} <= {best}");
    }
}

#[test]
fn velocity_step_satisfies_its_own_equation() {
    for mode in [TimeDifference::Forward, TimeDifference::Central] {
        let grid = Grid::new(80, 16).unwrap();
        let f = moving_bump(&grid);
        let (v, z) = g2_solve(&f, &params(), &grid, mode).unwrap();
        let p = Path::new(grid, f, v, z).unwrap();
        let worst = euler_lagrange_residual(&p, &params())
            .into_iter()
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "{mode:?}: {worst}");
    }
}

#[test]
fn stiff_curvature_still_solves_accurately() {
    // ε/dx⁴ ≈ 1.6e9 against κ = 1: the ill-conditioned end of the range
    let p = HVParams::new(1.0, 1.0, 0.01).unwrap();
    let nx = 400;
    let grid = Grid::new(nx, 1).unwrap();
    let a = Signal::from_fn(nx, |x| (PI * x).sin()).unwrap();
    let b = Signal::from_fn(nx, |x| (PI * x).sin() + 0.1 * x).unwrap();
    let sys = assemble(&a, &b, &p, &grid).unwrap();
    let v = solve_slice(&sys).unwrap();
    assert_eq!((v[0], v[nx]), (0.0, 0.0));
    let bmax = sys.rhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(sys.residual(&v) <= 1e-12 * (sys.band.norm_inf() * vmax + bmax));
}
