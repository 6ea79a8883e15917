//! Path transforms under which the action has a simple law: sign flip,
//! vertical shift, amplitude scaling and periodic spatial compression.

use ndarray::Array2;

use crate::error::{HvError, Result};
use crate::grid::Path;

/// `(-f, v, -z)`; the action is unchanged.
pub fn negate(path: &Path) -> Path {
    Path::from_parts_unchecked(path.grid(), -&path.f, path.v.clone(), -&path.z)
}

/// `(f + c, v, z)`; the action is unchanged.
pub fn shift(path: &Path, c: f64) -> Path {
    Path::from_parts_unchecked(path.grid(), &path.f + c, path.v.clone(), path.z.clone())
}

/// `(c f, v, c z)`; with all weights multiplied by `c²` the action scales by `c²`.
pub fn amplitude_scale(path: &Path, c: f64) -> Result<Path> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(HvError::InvalidArgument(format!(
            "amplitude scale must be positive, got {c}"
        )));
    }
    Ok(Path::from_parts_unchecked(
        path.grid(),
        &path.f * c,
        path.v.clone(),
        &path.z * c,
    ))
}

/// Compresses `L` periodic copies of the path into the unit interval:
/// `(f(Lx), v(Lx)/L, z(Lx))` sampled on the same grid.
///
/// With weights `(L²κ, λ, ε/L²)` the action of the result matches the original
/// action up to quadrature error, provided the periodic extension of the path
/// is smooth across the seams.
pub fn space_rescale(path: &Path, factor: usize) -> Result<Path> {
    let grid = path.grid();
    let nx = grid.nx();
    if factor == 0 || nx % factor != 0 {
        return Err(HvError::Divisibility { nx, factor });
    }
    // Seam nodes take the value at x = 1 of the copy on their left.
    let source: Vec<usize> = (0..=nx)
        .map(|i| {
            let k = factor * i;
            if i > 0 && k % nx == 0 {
                nx
            } else {
                k % nx
            }
        })
        .collect();
    let gather = |a: &Array2<f64>, scale: f64| {
        let mut out = grid.zeros();
        for j in 0..=grid.nt() {
            for (i, &s) in source.iter().enumerate() {
                out[[j, i]] = scale * a[[j, s]];
            }
        }
        out
    };
    Ok(Path::from_parts_unchecked(
        grid,
        gather(&path.f, 1.0),
        gather(&path.v, 1.0 / factor as f64),
        gather(&path.z, 1.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::action;
    use crate::grid::{Grid, HVParams};

    fn sample_path() -> Path {
        let g = Grid::new(8, 4).unwrap();
        let mut f = g.zeros();
        let mut v = g.zeros();
        let mut z = g.zeros();
        for j in 0..=4 {
            for i in 0..=8 {
                let (x, t) = (g.x(i), g.t(j));
                f[[j, i]] = x * t + 0.3;
                z[[j, i]] = (x - t).cos();
                if i > 0 && i < 8 {
                    v[[j, i]] = (x * (1.0 - x)) * (1.0 + t);
                }
            }
        }
        Path::new(g, f, v, z).unwrap()
    }

    #[test]
    fn negate_is_an_involution() {
        let p = sample_path();
        assert_eq!(negate(&negate(&p)), p);
    }

    #[test]
    fn shift_leaves_action_unchanged() {
        let p = sample_path();
        let params = HVParams::new(0.1, 0.2, 0.3).unwrap();
        assert_eq!(action(&shift(&p, 4.5), &params), action(&p, &params));
    }

    #[test]
    fn rescale_requires_divisibility() {
        assert_eq!(
            space_rescale(&sample_path(), 3).unwrap_err(),
            HvError::Divisibility { nx: 8, factor: 3 }
        );
        assert!(amplitude_scale(&sample_path(), -1.0).is_err());
    }

    #[test]
    fn rescale_by_one_is_identity() {
        let p = sample_path();
        assert_eq!(space_rescale(&p, 1).unwrap(), p);
    }

    #[test]
    fn rescale_keeps_boundary_velocity_zero() {
        let p = space_rescale(&sample_path(), 2).unwrap();
        for j in 0..=4 {
            assert_eq!(p.v()[[j, 0]], 0.0);
            assert_eq!(p.v()[[j, 4]], 0.0);
            assert_eq!(p.v()[[j, 8]], 0.0);
        }
        assert_eq!(p.f()[[2, 4]], sample_path().f()[[2, 8]]);
    }
}
