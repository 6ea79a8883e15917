//! Rule-of-thumb metric weights from the scales of the data.

use hv_geodesic::{HVParams, HvError, Signal};
use serde::{Deserialize, Serialize};

/// Typical vertical variation `h`, feature width `w` and largest distance
/// `l` over which features should be matched by transport.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicInput {
    pub h: f64,
    pub w: f64,
    pub l: f64,
}

/// `κ = 0.01 H²/L²`, `λ = 0.02 H²`, `ε = 0.2 H² W²`.
///
/// ```
/// use hv_cli::params::{estimate_params, HeuristicInput};
///
/// let p = estimate_params(&HeuristicInput { h: 1.0, w: 1.0, l: 1.0 }).unwrap();
/// assert_eq!((p.kappa, p.lambda, p.epsilon), (0.01, 0.02, 0.2));
/// ```
pub fn estimate_params(input: &HeuristicInput) -> Result<HVParams, HvError> {
    let HeuristicInput { h, w, l } = *input;
    if !(h > 0.0 && w > 0.0 && l > 0.0 && h.is_finite() && w.is_finite() && l.is_finite()) {
        return Err(HvError::InvalidParams(format!(
            "H, W and L must be positive, got H = {h}, W = {w}, L = {l}"
        )));
    }
    let h2 = h * h;
    HVParams::new(0.01 * h2 / (l * l), 0.02 * h2, 0.2 * h2 * w * w)
}

/// Squared vertical scale of a corpus, `(2/n) Σ ‖f_i‖² - 2 ‖mean‖²`
/// (twice the total variance), with trapezoid norms. Signals are resampled
/// to the finest grid among them.
pub fn dataset_h2(signals: &[Signal]) -> Result<f64, HvError> {
    if signals.is_empty() {
        return Err(HvError::InvalidArgument("empty corpus".into()));
    }
    let nx = signals.iter().map(Signal::nx).max().expect("nonempty");
    let n = signals.len() as f64;
    let resampled: Vec<Signal> = signals.iter().map(|s| s.resample(nx)).collect();
    let mut mean = vec![0.0; nx + 1];
    let mut sq = 0.0;
    for s in &resampled {
        sq += s.l2_norm().powi(2);
        for (m, v) in mean.iter_mut().zip(s.values()) {
            *m += v / n;
        }
    }
    let mean = Signal::new(mean)?;
    Ok(2.0 / n * sq - 2.0 * mean.l2_norm().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ecg_setting() {
        let p = estimate_params(&HeuristicInput {
            h: 300.0,
            w: 0.1,
            l: 0.1,
        })
        .unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b;
        assert!(close(p.kappa, 90000.0), "{}", p.kappa);
        assert!(close(p.lambda, 1800.0));
        assert!(close(p.epsilon, 180.0));
        assert!(estimate_params(&HeuristicInput {
            h: 0.0,
            w: 1.0,
            l: 1.0
        })
        .is_err());
    }

    #[test]
    fn dataset_scale_is_twice_the_variance() {
        let a = Signal::from_fn(10, |_| 1.0).unwrap();
        let b = Signal::from_fn(10, |_| 3.0).unwrap();
        // mean 2, deviations ±1 everywhere: variance 1
        assert!((dataset_h2(&[a.clone(), b]).unwrap() - 2.0).abs() < 1e-12);
        assert!(dataset_h2(&[a.clone(), a]).unwrap().abs() < 1e-12);
        assert!(dataset_h2(&[]).is_err());
    }
}
