//! Damped alternation between the transport and velocity steps, back-tracking
//! line search, and the multi-start driver over peak-matching initializations.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{action, ActionBreakdown};
use crate::bvp::{g2_solve, TimeDifference};
use crate::error::{HvError, Result};
use crate::flow::{g1_solve, integrate_flow, Integrator};
use crate::grid::{Grid, HVParams, Path, Signal};
use crate::prominence::{top_peaks, MatchingMap};

/// Knobs of the outer iteration and the initialization search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Maximum number of outer iterations per initialization.
    pub max_iters: usize,
    /// Stop once an iteration improves the action by less than this.
    /// `None` means `1e-8` times the action of the starting path.
    pub tol: Option<f64>,
    /// Maximum number of halvings tried by the line search.
    pub ls_max: usize,
    /// Largest number of matched peaks tried.
    pub k_max: usize,
    /// Line-searched steps; when off every step uses `α = 1` and the
    /// iteration stops at the first step that does not decrease the action.
    pub damped: bool,
    /// Also start from matchings of the minima.
    pub match_minima: bool,
    /// Keep iterating the winning initialization for another `max_iters`.
    pub refine: bool,
    pub integrator: Integrator,
    pub time_difference: TimeDifference,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tol: None,
            ls_max: 20,
            k_max: 3,
            damped: true,
            match_minima: true,
            refine: false,
            integrator: Integrator::Euler,
            time_difference: TimeDifference::Forward,
        }
    }
}

/// One accepted iterate. The first entry of a trace is the starting path,
/// recorded with both step sizes zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub action: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

/// How a run was started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitKind {
    /// Matching of the `k` most prominent maxima (`k = 0` is the linear path).
    Peaks,
    /// Matching of the `k` most prominent minima.
    Minima,
}

/// Outcome of one initialization in the multi-start search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitRecord {
    pub kind: InitKind,
    pub k_requested: usize,
    /// Number of pairs actually matched.
    pub k_used: usize,
    /// Final action, when the run succeeded.
    pub action: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicResult {
    pub path: Path,
    pub action: ActionBreakdown,
    /// `sqrt(action.total)`.
    pub distance: f64,
    pub trace: Vec<TraceEntry>,
    /// Matched pairs of the winning initialization.
    pub k_selected: usize,
    pub init_kind: InitKind,
    /// False only if the iteration cap was hit.
    pub converged: bool,
    /// Every initialization tried, in order.
    pub initializations: Vec<InitRecord>,
}

/// Starting velocity `T(x) - x` of a matching map, constant in time.
pub fn matching_velocity(map: &MatchingMap, grid: &Grid) -> Array2<f64> {
    let mut v = grid.zeros();
    let nx = grid.nx();
    for i in 1..nx {
        let x = grid.x(i);
        let u = map.eval(x) - x;
        for j in 0..=grid.nt() {
            v[[j, i]] = u;
        }
    }
    v
}

/// Matching map of the `k` most prominent peaks (or minima) of each signal.
/// Returns the map and the number of pairs actually used, which is capped by
/// the peak count of the poorer signal.
pub fn matching_map(
    f0: &Signal,
    f1: &Signal,
    k: usize,
    kind: InitKind,
) -> Result<(MatchingMap, usize)> {
    if k == 0 {
        return Ok((MatchingMap::identity(), 0));
    }
    let pick = |s: &Signal| match kind {
        InitKind::Peaks => s.values().to_vec(),
        InitKind::Minima => s.values().iter().map(|x| -x).collect(),
    };
    let (a, b) = (pick(f0), pick(f1));
    let k = k
        .min(top_peaks(&a, usize::MAX).len())
        .min(top_peaks(&b, usize::MAX).len());
    let map = MatchingMap::from_peaks(&top_peaks(&a, k), &top_peaks(&b, k), f0.nx())?;
    Ok((map, k))
}

/// Initial velocity and admissible path from matching `k` peaks.
///
/// ```
/// use hv_geodesic::optimizer::{prominence_init, InitKind};
/// use hv_geodesic::{Grid, Integrator, Signal};
///
/// let grid = Grid::new(10, 4).unwrap();
/// let f0 = Signal::new(vec![0., 0., 0., 1., 0., 0., 0., 0., 0., 0., 0.]).unwrap();
/// let f1 = Signal::new(vec![0., 0., 0., 0., 0., 0., 1., 0., 0., 0., 0.]).unwrap();
/// let (v0, _path, k) = prominence_init(&f0, &f1, 1, InitKind::Peaks, &grid, Integrator::Euler).unwrap();
/// assert_eq!(k, 1);
/// assert!((v0[[0, 3]] - 0.3).abs() < 1e-15);
/// ```
pub fn prominence_init(
    f0: &Signal,
    f1: &Signal,
    k: usize,
    kind: InitKind,
    grid: &Grid,
    integrator: Integrator,
) -> Result<(Array2<f64>, Path, usize)> {
    f0.check_on(grid, "source signal")?;
    f1.check_on(grid, "target signal")?;
    let (map, used) = matching_map(f0, f1, k, kind)?;
    let v0 = matching_velocity(&map, grid);
    let path = g1_solve(&v0, f0, f1, grid, integrator)?;
    Ok((v0, path, used))
}

/// Back-tracking line search on the blend `(1-α)·old + α·proposed`.
///
/// Tries `α = 1, ½, ¼, …` (`ls_max` trials) and returns the first `α` whose
/// blend has a strictly smaller action than `old`, or `(0, false)`.
pub fn line_search(old: &Path, proposed: &Path, params: &HVParams, ls_max: usize) -> (f64, bool) {
    let a_old = action(old, params).total;
    let (alpha, _) = search(old, proposed, params, ls_max, a_old, |_| true);
    (alpha, alpha > 0.0)
}

/// Line search returning the accepted `α` and blend; `admissible` can veto a trial.
fn search(
    old: &Path,
    proposed: &Path,
    params: &HVParams,
    ls_max: usize,
    a_old: f64,
    admissible: impl Fn(&Path) -> bool,
) -> (f64, Option<(Path, ActionBreakdown)>) {
    let mut alpha = 1.0;
    for _ in 0..ls_max {
        let trial = old.blend(proposed, alpha);
        let a = action(&trial, params);
        if a.total < a_old && admissible(&trial) {
            return (alpha, Some((trial, a)));
        }
        alpha *= 0.5;
    }
    (0.0, None)
}

/// Runs the alternating iteration from an admissible starting path.
pub fn iterate(
    start: Path,
    params: &HVParams,
    opts: &SolveOptions,
) -> Result<(Path, Vec<TraceEntry>, bool)> {
    params.require_curvature()?;
    let grid = start.grid();
    let (f0, f1) = (start.source(), start.target());
    let flows = |p: &Path| integrate_flow(p.v(), &grid, opts.integrator).is_ok();

    let mut cur = start;
    let mut a_cur = action(&cur, params);
    let tol = opts.tol.unwrap_or(1e-8 * a_cur.total);
    let mut trace = vec![TraceEntry {
        action: a_cur.total,
        alpha1: 0.0,
        alpha2: 0.0,
    }];
    for _ in 0..opts.max_iters {
        // transport step: best (f, z) for the current v
        let tilde = g1_solve(cur.v(), &f0, &f1, &grid, opts.integrator)?;
        let (alpha1, mid, a_mid) = if opts.damped {
            match search(&cur, &tilde, params, opts.ls_max, a_cur.total, |_| true) {
                (a, Some((p, ap))) => (a, p, ap),
                _ => (0.0, cur.clone(), a_cur),
            }
        } else {
            let a = action(&tilde, params);
            (1.0, tilde, a)
        };

        // velocity step: best (v, z) for the blended f
        let (v_hat, z_hat) = g2_solve(mid.f(), params, &grid, opts.time_difference)?;
        let hat = Path::new(grid, mid.f().clone(), v_hat, z_hat)?;
        let (alpha2, next, a_next) = if opts.damped {
            match search(&mid, &hat, params, opts.ls_max, a_mid.total, flows) {
                (a, Some((p, ap))) => (a, p, ap),
                _ => (0.0, mid, a_mid),
            }
        } else if flows(&hat) {
            let a = action(&hat, params);
            (1.0, hat, a)
        } else {
            break;
        };

        if !(a_next.total < a_cur.total) {
            return Ok((cur, trace, true));
        }
        let gain = a_cur.total - a_next.total;
        cur = next;
        a_cur = a_next;
        trace.push(TraceEntry {
            action: a_cur.total,
            alpha1,
            alpha2,
        });
        if gain < tol {
            return Ok((cur, trace, true));
        }
    }
    let converged = trace.len() <= opts.max_iters;
    Ok((cur, trace, converged))
}

struct Start {
    kind: InitKind,
    k_requested: usize,
    k_used: usize,
    map: Result<MatchingMap>,
}

/// Multi-start geodesic solve: iterates from the linear path and from every
/// peak (and minima) matching with up to `k_max` pairs, and keeps the run
/// with the smallest action.
pub fn solve(
    f0: &Signal,
    f1: &Signal,
    params: &HVParams,
    grid: &Grid,
    opts: &SolveOptions,
) -> Result<GeodesicResult> {
    params.require_curvature()?;
    f0.check_on(grid, "source signal")?;
    f1.check_on(grid, "target signal")?;

    let mut starts: Vec<Start> = Vec::new();
    let mut kinds = vec![InitKind::Peaks];
    if opts.match_minima {
        kinds.push(InitKind::Minima);
    }
    for kind in kinds {
        let first = if kind == InitKind::Peaks { 0 } else { 1 };
        for k in first..=opts.k_max {
            let (map, k_used) = match matching_map(f0, f1, k, kind) {
                Ok((m, u)) => (Ok(m), u),
                Err(e) => (Err(e), 0),
            };
            starts.push(Start {
                kind,
                k_requested: k,
                k_used,
                map,
            });
        }
    }

    // maps that agree on the grid give identical runs; a knot pairing a
    // point with itself is invisible there up to rounding
    let sampled: Vec<Option<Vec<f64>>> = starts
        .iter()
        .map(|s| {
            s.map
                .as_ref()
                .ok()
                .map(|m| (0..=grid.nx()).map(|i| m.eval(grid.x(i))).collect())
        })
        .collect();
    let mut run_index: Vec<Option<usize>> = Vec::with_capacity(starts.len());
    for (i, s) in sampled.iter().enumerate() {
        let dup = sampled[..i].iter().position(|o| match (o, s) {
            (Some(a), Some(b)) => a.iter().zip(b).all(|(p, q)| (p - q).abs() <= 1e-12),
            _ => false,
        });
        run_index.push(dup);
    }

    let outcomes: Vec<Option<Result<(Path, Vec<TraceEntry>, bool)>>> = starts
        .par_iter()
        .zip(run_index.par_iter())
        .map(|(s, dup)| {
            if dup.is_some() {
                return None;
            }
            let run = || -> Result<(Path, Vec<TraceEntry>, bool)> {
                let map = s.map.clone()?;
                let v0 = matching_velocity(&map, grid);
                let start = g1_solve(&v0, f0, f1, grid, opts.integrator)?;
                iterate(start, params, opts)
            };
            Some(run())
        })
        .collect();

    let mut records = Vec::with_capacity(starts.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in starts.iter().enumerate() {
        let source = run_index[i].unwrap_or(i);
        let (act, err) = match outcomes[source].as_ref().expect("run recorded") {
            Ok((_, trace, _)) => (Some(trace.last().expect("nonempty trace").action), None),
            Err(e) => (None, Some(e.to_string())),
        };
        if let Some(a) = act {
            if run_index[i].is_none() && best.map_or(true, |(_, b)| a < b) {
                best = Some((i, a));
            }
        }
        records.push(InitRecord {
            kind: s.kind,
            k_requested: s.k_requested,
            k_used: s.k_used,
            action: act,
            error: err,
        });
    }
    let Some((winner, _)) = best else {
        return Err(HvError::AllInitializationsFailed(
            records.iter().filter_map(|r| r.error.clone()).collect(),
        ));
    };
    let mut outcomes = outcomes;
    let (mut path, mut trace, mut converged) = outcomes[winner]
        .take()
        .expect("winner ran")
        .expect("winner succeeded");
    if opts.refine {
        let (p, more, c) = iterate(path, params, opts)?;
        trace.extend(more.into_iter().skip(1));
        path = p;
        converged = c;
    }
    let act = action(&path, params);
    Ok(GeodesicResult {
        distance: act.total.sqrt(),
        action: act,
        path,
        trace,
        k_selected: starts[winner].k_used,
        init_kind: starts[winner].kind,
        converged,
        initializations: records,
    })
}
