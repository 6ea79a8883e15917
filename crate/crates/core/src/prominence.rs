//! Peak prominence and the piecewise-linear matching maps built from it.

use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};

/// A local maximum and its prominence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Leftmost index of the maximum (plateaus included).
    pub index: usize,
    pub value: f64,
    pub prominence: f64,
}

/// Prominence of every strict interior local maximum.
///
/// On each side, the base is the lowest value met before reaching a strictly
/// higher sample or the end of the signal; the prominence is the height above
/// the higher of the two bases. A peak at the global maximum is measured from
/// the global minimum instead.
///
/// ```
/// use hv_geodesic::prominence::prominences;
///
/// let p: Vec<f64> = prominences(&[0.0, 2.0, 1.0, 3.0, 0.0])
///     .iter()
///     .map(|p| p.prominence)
///     .collect();
/// assert_eq!(p, vec![1.0, 3.0]);
/// ```
pub fn prominences(values: &[f64]) -> Vec<Peak> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bottom = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let v = values[i];
        if values[i - 1] >= v {
            i += 1;
            continue;
        }
        let mut end = i;
        while end + 1 < n && values[end + 1] == v {
            end += 1;
        }
        if end + 1 < n && values[end + 1] < v {
            let prominence = if v == top {
                v - bottom
            } else {
                let mut left = v;
                for &x in values[..i].iter().rev() {
                    if x > v {
                        break;
                    }
                    left = left.min(x);
                }
                let mut right = v;
                for &x in &values[end + 1..] {
                    if x > v {
                        break;
                    }
                    right = right.min(x);
                }
                v - left.max(right)
            };
            peaks.push(Peak {
                index: i,
                value: v,
                prominence,
            });
        }
        i = end + 1;
    }
    peaks
}

/// The `k` most prominent peaks, returned in increasing spatial order.
///
/// Ties are broken by larger value, then smaller index.
pub fn top_peaks(values: &[f64], k: usize) -> Vec<Peak> {
    let mut peaks = prominences(values);
    peaks.sort_by(|a, b| {
        b.prominence
            .total_cmp(&a.prominence)
            .then(b.value.total_cmp(&a.value))
            .then(a.index.cmp(&b.index))
    });
    peaks.truncate(k);
    peaks.sort_by_key(|p| p.index);
    peaks
}

/// Monotone piecewise-linear map of `[0,1]` onto itself with `T(0) = 0`,
/// `T(1) = 1` and `T(knots_x[i]) = knots_y[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingMap {
    knots_x: Vec<f64>,
    knots_y: Vec<f64>,
}

impl MatchingMap {
    pub fn new(knots_x: Vec<f64>, knots_y: Vec<f64>) -> Result<Self> {
        if knots_x.len() != knots_y.len() {
            return Err(HvError::InvalidArgument(
                "matching knots come in pairs".into(),
            ));
        }
        for knots in [&knots_x, &knots_y] {
            let inside = knots.iter().all(|&x| x > 0.0 && x < 1.0);
            let increasing = knots.windows(2).all(|w| w[0] < w[1]);
            if !(inside && increasing) {
                return Err(HvError::InvalidArgument(
                    "matching knots must increase strictly inside (0, 1)".into(),
                ));
            }
        }
        Ok(Self { knots_x, knots_y })
    }

    /// The identity map.
    pub fn identity() -> Self {
        Self {
            knots_x: Vec::new(),
            knots_y: Vec::new(),
        }
    }

    /// Pairs the peaks of two signals sampled on the same uniform grid.
    pub fn from_peaks(source: &[Peak], target: &[Peak], nx: usize) -> Result<Self> {
        let h = 1.0 / nx as f64;
        Self::new(
            source.iter().map(|p| p.index as f64 * h).collect(),
            target.iter().map(|p| p.index as f64 * h).collect(),
        )
    }

    pub fn knots_x(&self) -> &[f64] {
        &self.knots_x
    }

    pub fn knots_y(&self) -> &[f64] {
        &self.knots_y
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut x0 = 0.0;
        let mut y0 = 0.0;
        for (&x1, &y1) in self.knots_x.iter().zip(&self.knots_y).chain([(&1.0, &1.0)]) {
            if x <= x1 {
                return if x1 > x0 {
                    let theta = (x - x0) / (x1 - x0);
                    (1.0 - theta) * y0 + theta * y1
                } else {
                    y1
                };
            }
            x0 = x1;
            y0 = y1;
        }
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and_monotone() {
        let p = prominences(&[0.0, 1.0, 0.0]);
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].index, p[0].prominence), (1, 1.0));
        assert!(prominences(&[0.0, 1.0, 2.0, 3.0]).is_empty());
        assert!(prominences(&[1.0, 1.0, 1.0]).is_empty());
    }

    #[test]
    fn plateau_uses_leftmost_index() {
        let p = prominences(&[0.0, 2.0, 2.0, 2.0, 1.0, 1.5, 0.0]);
        assert_eq!(p[0].index, 1);
        assert_eq!(p[0].prominence, 2.0);
        assert_eq!(p[1].index, 5);
        assert_eq!(p[1].prominence, 0.5);
    }

    #[test]
    fn edge_plateau_is_not_a_peak() {
        assert!(prominences(&[0.0, 1.0, 2.0, 2.0]).is_empty());
    }

    #[test]
    fn top_peaks_orders_spatially_and_breaks_ties() {
        let s = [0.0, 1.0, 0.0, 2.0, 0.0, 1.0, 0.0];
        let top = top_peaks(&s, 2);
        assert_eq!(top.iter().map(|p| p.index).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn matching_map_interpolates() {
        let t = MatchingMap::new(vec![0.3], vec![0.6]).unwrap();
        assert_eq!(t.eval(0.0), 0.0);
        assert!((t.eval(0.3) - 0.6).abs() < 1e-15);
        assert!((t.eval(0.15) - 0.3).abs() < 1e-15);
        assert_eq!(t.eval(1.0), 1.0);
        assert!(MatchingMap::new(vec![0.5, 0.4], vec![0.1, 0.2]).is_err());
        assert!(MatchingMap::new(vec![0.0], vec![0.1]).is_err());
        assert_eq!(MatchingMap::identity().eval(0.37), 0.37);
    }
}
