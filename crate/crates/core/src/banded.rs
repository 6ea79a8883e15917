//! Banded LU factorization with partial pivoting.
//!
//! Storage follows the usual column-oriented band layout: entry `A[i][j]`
//! lives at `ab[(kl + ku + i - j) * n + j]`, with `kl` extra rows above the
//! band to hold the fill-in created by row interchanges.

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
}

/// Zero pivot encountered while factoring column `column`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroPivot {
    pub column: usize,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            ab: vec![0.0; (2 * kl + ku + 1) * n],
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) * self.n + j
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i <= j + self.kl && j <= i + self.ku
    }

    /// Entry `A[i][j]`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// Sets `A[i][j]`.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.ab[s] = value;
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Factors `P A = L U` in place of a copy of the band.
    pub fn factor(&self) -> Result<BandLu, ZeroPivot> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let kv = kl + ku;
        let mut ab = self.ab.clone();
        let at = |i: usize, j: usize| (kv + i - j) * n + j;
        let mut pivots = vec![0usize; n];
        // last column touched by the row interchanges so far
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = ab[at(j, j)].abs();
            for r in 1..=km {
                let cand = ab[at(j + r, j)].abs();
                if cand > best {
                    best = cand;
                    jp = r;
                }
            }
            pivots[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(ZeroPivot { column: j });
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    ab.swap(at(j, c), at(j + jp, c));
                }
            }
            let pivot = ab[at(j, j)];
            for r in 1..=km {
                ab[at(j + r, j)] /= pivot;
            }
            for c in j + 1..=ju {
                let ujc = ab[at(j, c)];
                if ujc != 0.0 {
                    for r in 1..=km {
                        let l = ab[at(j + r, j)];
                        ab[at(j + r, c)] -= l * ujc;
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            kv,
            ab,
            pivots,
        })
    }
}

/// Factors produced by [`BandMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    kv: usize,
    ab: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, kv) = (self.n, self.kl, self.kv);
        assert_eq!(b.len(), n);
        let at = |i: usize, j: usize| (kv + i - j) * n + j;
        for j in 0..n.saturating_sub(1) {
            let p = self.pivots[j];
            if p != j {
                b.swap(p, j);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            for r in 1..=km {
                b[j + r] -= self.ab[at(j + r, j)] * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[at(j, j)];
            let bj = b[j];
            for r in j.saturating_sub(kv)..j {
                b[r] -= self.ab[at(r, j)] * bj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for r in k + 1..n {
                let m = a[r][k] / a[k][k];
                for c in k..n {
                    a[r][c] -= m * a[k][c];
                }
                b[r] -= m * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
            x[k] = (b[k] - s) / a[k][k];
        }
        x
    }

    #[test]
    fn matches_dense_elimination_on_random_nonsymmetric_bands() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, kl, ku) in &[(9, 2, 2), (12, 1, 3), (6, 2, 1), (30, 2, 2)] {
            let mut m = BandMatrix::zeros(n, kl, ku);
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                    // weak diagonal so that pivoting actually happens
                    let val = rng.gen_range(-1.0..1.0) + if i == j { 0.05 } else { 0.0 };
                    m.set(i, j, val);
                    dense[i][j] = val;
                }
            }
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut x = b.clone();
            m.factor().unwrap().solve_in_place(&mut x);
            let expect = dense_solve(dense, b.clone());
            for (a, e) in x.iter().zip(&expect) {
                assert!((a - e).abs() < 1e-9 * (1.0 + e.abs()), "{a} vs {e}");
            }
            let r = m.mul_vec(&x);
            for (ri, bi) in r.iter().zip(&b) {
                assert!((ri - bi).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_column_is_reported() {
        let mut m = BandMatrix::zeros(4, 1, 1);
        m.set(0, 0, 1.0);
        m.set(2, 2, 1.0);
        m.set(3, 3, 1.0);
        assert_eq!(m.factor().unwrap_err(), ZeroPivot { column: 1 });
    }

    #[test]
    #[should_panic]
    fn set_outside_band_panics() {
        BandMatrix::zeros(5, 1, 1).set(0, 3, 1.0);
    }
}
