//! Command-line front end for HV geodesic distances.
//!
//! The binary `hvgeo` is a thin wrapper around [`run`]; everything here is
//! also usable as a library for scripting and tests.

pub mod io;
pub mod params;

use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand};
use hv_geodesic::analysis::{
    competitor_action_bound, competitor_action_exact, competitor_path, halving_path,
};
use hv_geodesic::bvp::TimeDifference;
use hv_geodesic::optimizer::{self, InitKind, InitRecord, TraceEntry};
use hv_geodesic::{
    action_with, ActionBreakdown, Convention, GeodesicResult, Grid, HVParams, HvError, Signal,
    SolveOptions,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::io::{format_matrix, load_signal, write_text, IoError};
use crate::params::{dataset_h2, estimate_params, HeuristicInput};

#[derive(Debug, Parser)]
#[command(
    name = "hvgeo",
    version,
    about = "HV distances and geodesics between 1D signals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a geodesic and write f.csv, v.csv, z.csv and report.json.
    Solve {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output directory (created if missing).
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the distance between two signals.
    Distance {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Write the matrix of pairwise distances of a set of signals.
    DistanceMatrix {
        /// Signal files.
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long, default_value_t = 100)]
        nt: usize,
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print metric weights estimated from data scales.
    EstimateParams {
        #[arg(long = "H")]
        h: Option<f64>,
        #[arg(long = "W")]
        w: f64,
        #[arg(long = "L")]
        l: f64,
        /// Estimate H from a corpus instead of giving it.
        #[arg(long, num_args = 1.., conflicts_with = "h")]
        dataset: Vec<PathBuf>,
    },
    /// Write the geodesic signal at the requested times, one CSV row each.
    Frames {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma-separated times in [0, 1].
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
        times: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the strip-sliding competitor with the linear path for ε = 0.
    DemoDegeneracy {
        #[arg(long = "H", default_value_t = 23.0)]
        h: f64,
        #[arg(long, default_value_t = 0.1)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 300)]
        nx: usize,
        #[arg(long, default_value_t = 300)]
        nt: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub f0: PathBuf,
    #[arg(long)]
    pub f1: PathBuf,
    /// Spatial intervals; defaults to the finer of the two inputs.
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub nt: usize,
}

/// Either explicit weights or the scales they are estimated from.
#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "H")]
    pub h: Option<f64>,
    #[arg(long = "W")]
    pub w: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    /// Absolute stopping tolerance on the action decrease.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Central time differences in the velocity step.
    #[arg(long)]
    pub smooth: bool,
    /// Reserved; the solver is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] HvError),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl MetricArgs {
    pub fn resolve(&self) -> Result<HVParams, CliError> {
        let explicit = [self.kappa, self.lambda, self.epsilon];
        let scales = [self.h, self.w, self.l];
        let usage = |m: &str| CliError::Usage(m.into());
        match (explicit, scales) {
            ([Some(k), Some(l), Some(e)], [None, None, None]) => {
                HVParams::new(k, l, e).map_err(|e| usage(&e.to_string()))
            }
            ([None, None, None], [Some(h), Some(w), Some(l)]) => {
                estimate_params(&HeuristicInput { h, w, l }).map_err(|e| usage(&e.to_string()))
            }
            _ => Err(usage(
                "give either all of --kappa --lambda --epsilon or all of --H --W --L",
            )),
        }
    }
}

impl SolverArgs {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            k_max: self.kmax,
            max_iters: self.max_iters,
            tol: self.tol,
            time_difference: if self.smooth {
                TimeDifference::Central
            } else {
                TimeDifference::Forward
            },
            ..SolveOptions::default()
        }
    }
}

/// Summary written next to the geodesic fields.
#[derive(Debug, Serialize)]
pub struct Report {
    pub action: ActionBreakdown,
    pub distance: f64,
    pub trace: Vec<TraceEntry>,
    pub k_selected: usize,
    pub init_kind: InitKind,
    pub params: HVParams,
    pub grid: Grid,
    pub converged: bool,
    pub initializations: Vec<InitRecord>,
}

impl Report {
    pub fn new(result: &GeodesicResult, params: HVParams) -> Self {
        Self {
            action: result.action,
            distance: result.distance,
            trace: result.trace.clone(),
            k_selected: result.k_selected,
            init_kind: result.init_kind,
            params,
            grid: result.path.grid(),
            converged: result.converged,
            initializations: result.initializations.clone(),
        }
    }
}

/// Loads a pair of signals on a common grid (the finer one unless `nx` is given).
pub fn load_pair(pair: &PairArgs) -> Result<(Signal, Signal, Grid), CliError> {
    let a = load_signal(&pair.f0, None)?;
    let b = load_signal(&pair.f1, None)?;
    let nx = pair.nx.unwrap_or(a.nx().max(b.nx()));
    let grid = Grid::new(nx, pair.nt).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((a.resample(nx), b.resample(nx), grid))
}

fn solve_pair(
    pair: &PairArgs,
    metric: &MetricArgs,
    solver: &SolverArgs,
) -> Result<(GeodesicResult, HVParams), CliError> {
    let params = metric.resolve()?;
    let (f0, f1, grid) = load_pair(pair)?;
    let result = optimizer::solve(&f0, &f1, &params, &grid, &solver.options())?;
    Ok((result, params))
}

fn create_dir(dir: &FsPath) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| {
        CliError::Io(IoError::Write {
            path: dir.display().to_string(),
            source,
        })
    })
}

/// Pairwise distance matrix; each unordered pair is solved once.
pub fn distance_matrix(
    signals: &[Signal],
    params: &HVParams,
    grid: &Grid,
    opts: &SolveOptions,
) -> Result<ndarray::Array2<f64>, HvError> {
    let n = signals.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let dists: Vec<Result<f64, HvError>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            optimizer::solve(&signals[i], &signals[j], params, grid, opts).map(|r| r.distance)
        })
        .collect();
    let mut m = ndarray::Array2::zeros((n, n));
    for (&(i, j), d) in pairs.iter().zip(dists) {
        let d = d?;
        m[[i, j]] = d;
        m[[j, i]] = d;
    }
    Ok(m)
}

/// Action table of the degeneracy construction under `∬ v² + λv_x² + z²`.
pub fn degeneracy_table(h: f64, s: f64, lambda: f64, grid: &Grid) -> Result<String, HvError> {
    let params = HVParams::new(1.0, lambda, 0.0)?;
    let competitor = competitor_path(h, s, grid)?;
    let discrete = action_with(&competitor, &params, Convention::Unit).total;
    let mut out = String::new();
    let mut row = |name: &str, value: f64| {
        writeln!(out, "{name:<28}{value:>14.4}").expect("writing to a String");
    };
    row("linear path (H^2)", h * h);
    row("competitor, discrete", discrete);
    row("competitor, exact", competitor_action_exact(h, s, lambda));
    row(
        "competitor, proof bound",
        competitor_action_bound(h, s, lambda),
    );
    let mut halved = competitor;
    for k in 1..=2 {
        halved = halving_path(&halved)?;
        row(
            &format!("competitor halved {k}x"),
            action_with(&halved, &params, Convention::Unit).total,
        );
    }
    let verdict = if discrete < h * h {
        "competitor < linear"
    } else {
        "competitor >= linear"
    };
    writeln!(out, "{verdict}").expect("writing to a String");
    Ok(out)
}

/// Executes a parsed command, returning what should go to standard output.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Solve {
            pair,
            metric,
            solver,
            out,
        } => {
            let (result, params) = solve_pair(&pair, &metric, &solver)?;
            create_dir(&out)?;
            write_text(&out.join("f.csv"), &format_matrix(result.path.f()))?;
            write_text(&out.join("v.csv"), &format_matrix(result.path.v()))?;
            write_text(&out.join("z.csv"), &format_matrix(result.path.z()))?;
            let report = serde_json::to_string_pretty(&Report::new(&result, params))
                .expect("report serializes");
            write_text(&out.join("report.json"), &report)?;
            Ok(format!("{}\n", result.distance))
        }
        Command::Distance {
            pair,
            metric,
            solver,
        } => {
            let (result, _) = solve_pair(&pair, &metric, &solver)?;
            Ok(format!("{}\n", result.distance))
        }
        Command::DistanceMatrix {
            inputs,
            nx,
            nt,
            metric,
            solver,
            out,
        } => {
            let params = metric.resolve()?;
            let raw = inputs
                .iter()
                .map(|p| load_signal(p, None))
                .collect::<Result<Vec<_>, _>>()?;
            let nx = nx.unwrap_or_else(|| raw.iter().map(Signal::nx).max().expect("inputs"));
            let grid = Grid::new(nx, nt).map_err(|e| CliError::Usage(e.to_string()))?;
            let signals: Vec<Signal> = raw.iter().map(|s| s.resample(nx)).collect();
            let m = distance_matrix(&signals, &params, &grid, &solver.options())?;
            write_text(&out, &format_matrix(&m))?;
            Ok(String::new())
        }
        Command::EstimateParams { h, w, l, dataset } => {
            let h = match h {
                Some(h) => h,
                None if !dataset.is_empty() => {
                    let corpus = dataset
                        .iter()
                        .map(|p| load_signal(p, None))
                        .collect::<Result<Vec<_>, _>>()?;
                    dataset_h2(&corpus)?.sqrt()
                }
                None => return Err(CliError::Usage("give --H or --dataset".into())),
            };
            let p = estimate_params(&HeuristicInput { h, w, l })
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(serde_json::to_string(&p).expect("params serialize") + "\n")
        }
        Command::Frames {
            pair,
            metric,
            solver,
            times,
            out,
        } => {
            if let Some(t) = times.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                return Err(CliError::Usage(format!("time {t} outside [0, 1]")));
            }
            let (result, _) = solve_pair(&pair, &metric, &solver)?;
            let mut text = String::new();
            for &t in &times {
                let cells: Vec<String> = std::iter::once(t)
                    .chain(result.path.frame(t))
                    .map(|v| format!("{v}"))
                    .collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            write_text(&out, &text)?;
            Ok(String::new())
        }
        Command::DemoDegeneracy {
            h,
            s,
            lambda,
            nx,
            nt,
        } => {
            let grid = Grid::new(nx, nt).map_err(|e| CliError::Usage(e.to_string()))?;
            degeneracy_table(h, s, lambda, &grid).map_err(|e| match e {
                HvError::InvalidArgument(m) | HvError::InvalidGrid(m) => CliError::Usage(m),
                other => CliError::Solver(other),
            })
        }
    }
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
