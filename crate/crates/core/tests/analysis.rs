mod common;

use common::periodic_path;
use hv_geodesic::analysis::{
    bound_report, competitor_action_bound, competitor_action_exact, competitor_path, halving_path,
};
use hv_geodesic::flow::integrate_flow;
use hv_geodesic::optimizer::solve;
use hv_geodesic::{
    action_with, Convention, Grid, HVParams, Integrator, Path, Signal, SolveOptions,
};

fn unit(p: &Path, kappa: f64, lambda: f64) -> f64 {
    action_with(
        p,
        &HVParams::new(kappa, lambda, 0.0).unwrap(),
        Convention::Unit,
    )
    .total
}

#[test]
fn competitor_converges_to_its_closed_form() {
    let (h, s, lambda) = (23.0, 0.1, 1.0);
    let exact = competitor_action_exact(h, s, lambda);
    let mut errs = Vec::new();
    for n in [150, 300, 600] {
        let p = competitor_path(h, s, &Grid::new(n, n).unwrap()).unwrap();
        errs.push((unit(&p, 1.0, lambda) - exact).abs() / exact);
    }
    assert!(errs[2] < errs[1] && errs[1] < errs[0], "{errs:?}");
    assert!(errs[1] < 0.01, "{errs:?}");
}

#[test]
fn competitor_beats_the_linear_path_only_for_tall_steps() {
    let grid = Grid::new(300, 300).unwrap();
    for (h, wins) in [(23.0, true), (1.0, false)] {
        let p = competitor_path(h, 0.1, &grid).unwrap();
        let lo = Signal::from_fn(300, |_| 0.0).unwrap();
        let hi = Signal::from_fn(300, |_| h).unwrap();
        let linear = unit(&Path::linear(grid, &lo, &hi).unwrap(), 1.0, 1.0);
        assert!((linear - h * h).abs() < 1e-9 * h * h);
        assert_eq!(unit(&p, 1.0, 1.0) < linear, wins, "H = {h}");
    }
}

#[test]
fn proof_bound_sits_above_the_exact_action() {
    for s in [0.05, 0.1, 0.2, 0.3] {
        for lambda in [0.0, 0.5, 1.0, 4.0] {
            assert!(
                competitor_action_exact(23.0, s, lambda)
                    <= competitor_action_bound(23.0, s, lambda)
            );
        }
    }
}

#[test]
fn repeated_halving_keeps_lowering_the_action() {
    let p = periodic_path(Grid::new(40, 10).unwrap());
    let once = halving_path(&p).unwrap();
    let twice = halving_path(&once).unwrap();
    let (a0, a1, a2) = (
        unit(&p, 1.0, 1.0),
        unit(&once, 1.0, 1.0),
        unit(&twice, 1.0, 1.0),
    );
    assert!(a2 < a1 && a1 < a0, "{a0} {a1} {a2}");
    assert!((a2 - unit(&p, 1.0 / 16.0, 1.0)).abs() <= 1e-10 * a2);
}

#[test]
fn bounds_hold_on_a_geodesic() {
    let grid = Grid::new(80, 40).unwrap();
    let f0 = Signal::from_fn(80, |x| (-(x - 0.35f64).powi(2) / 0.004).exp()).unwrap();
    let f1 = Signal::from_fn(80, |x| 0.8 * (-(x - 0.6f64).powi(2) / 0.004).exp()).unwrap();
    let params = HVParams::new(0.1, 0.01, 0.0005).unwrap();
    let opts = SolveOptions {
        max_iters: 80,
        k_max: 1,
        ..SolveOptions::default()
    };
    let r = solve(&f0, &f1, &params, &grid, &opts).unwrap();
    let flow = integrate_flow(r.path.v(), &grid, Integrator::Euler).unwrap();
    let rep = bound_report(&r.path, &flow);
    assert!(rep.v_norm > 0.0);
    assert!(rep.energy_ok && rep.jac_ok && rep.dphi_ok, "{rep:?}");
}

// The closed form is an upper bound from a cruder estimate of the transport
// phase; the competitor itself costs about a third less.
#[test]
#[ignore = "the closed-form bound overestimates the competitor action by ~55%"]
fn competitor_within_five_percent_of_the_bound() {
    let p = competitor_path(23.0, 0.1, &Grid::new(300, 300).unwrap()).unwrap();
    let bound = competitor_action_bound(23.0, 0.1, 1.0);
    assert!((unit(&p, 1.0, 1.0) - bound).abs() <= 0.05 * bound);
}
