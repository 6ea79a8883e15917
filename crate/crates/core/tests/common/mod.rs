//! Signals, paths and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use hv_geodesic::{Grid, Path, Signal};
use ndarray::Array2;
use rand::Rng;

pub fn gaussian(c: f64, h: f64, width: f64) -> impl Fn(f64) -> f64 {
    move |x| h * (-((x - c) / width).powi(2)).exp()
}

/// Sum of one to three Gaussian bumps with random centres, heights and widths.
pub fn random_bumps(rng: &mut impl Rng, nx: usize) -> Signal {
    let n = rng.gen_range(1..=3);
    let bumps: Vec<(f64, f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.gen_range(0.2..0.8),
                rng.gen_range(0.3..1.0),
                rng.gen_range(0.03..0.08),
            )
        })
        .collect();
    Signal::from_fn(nx, |x| {
        bumps.iter().map(|&(c, h, w)| gaussian(c, h, w)(x)).sum()
    })
    .unwrap()
}

/// Big bump at 0.3 and a bump of height `r` at 0.7.
pub fn two_bumps(nx: usize, big_left: bool, r: f64) -> Signal {
    let (a, b) = if big_left { (1.0, r) } else { (r, 1.0) };
    Signal::from_fn(nx, |x| {
        a * (-(x - 0.3).powi(2) / 0.003).exp() + b * (-(x - 0.7).powi(2) / 0.003).exp()
    })
    .unwrap()
}

/// Trapezoid weights written out by hand, independent of the library.
pub fn trap(n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    (0..=n)
        .map(|i| if i == 0 || i == n { 0.5 * h } else { h })
        .collect()
}

/// Space-time trapezoid `L²` norm of `a - b`.
pub fn field_distance(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let (nt1, nx1) = a.dim();
    let (tw, xw) = (trap(nt1 - 1), trap(nx1 - 1));
    let mut s = 0.0;
    for j in 0..nt1 {
        for i in 0..nx1 {
            s += tw[j] * xw[i] * (a[[j, i]] - b[[j, i]]).powi(2);
        }
    }
    s.sqrt()
}

/// Path whose periodic extension in `x` is smooth, with nonzero velocity.
pub fn periodic_path(grid: Grid) -> Path {
    use std::f64::consts::PI;
    let (nx, nt) = (grid.nx(), grid.nt());
    let mut f = grid.zeros();
    let mut v = grid.zeros();
    let mut z = grid.zeros();
    for j in 0..=nt {
        for i in 0..=nx {
            let (x, t) = (grid.x(i), grid.t(j));
            f[[j, i]] = (2.0 * PI * x).cos() + t;
            z[[j, i]] = 1.0 + 0.5 * (2.0 * PI * x).cos() * t;
            if i > 0 && i < nx {
                v[[j, i]] = 0.1 * (2.0 * PI * x).sin() * (1.0 + t);
            }
        }
    }
    Path::new(grid, f, v, z).unwrap()
}

/// Prominences by enumerating every walk away from each peak.
///
/// A sample belongs to a peak's reach on one side if nothing strictly higher
/// than the peak lies between them; the base on that side is the lowest
/// sample in reach. Peaks equal to the global maximum drop to the global
/// minimum instead.
pub fn brute_prominences(values: &[f64]) -> Vec<(usize, f64)> {
    let n = values.len();
    let gmax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = Vec::new();
    for p in 1..n.saturating_sub(1) {
        let v = values[p];
        if values[p - 1] >= v {
            continue;
        }
        let mut q = p;
        while q + 1 < n && values[q + 1] == v {
            q += 1;
        }
        if q + 1 >= n || values[q + 1] >= v {
            continue;
        }
        if v == gmax {
            out.push((p, v - gmin));
            continue;
        }
        let reach = |m: usize| {
            let (lo, hi) = if m < p { (m, p) } else { (q, m) };
            values[lo..=hi].iter().all(|&y| y <= v)
        };
        let left = (0..p)
            .filter(|&m| reach(m))
            .map(|m| values[m])
            .fold(f64::INFINITY, f64::min);
        let right = (q + 1..n)
            .filter(|&m| reach(m))
            .map(|m| values[m])
            .fold(f64::INFINITY, f64::min);
        out.push((p, v - left.max(right)));
    }
    out
}
