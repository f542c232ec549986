//! Complex banded matrices and their LU factorization with partial pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` superdiagonals. Each row keeps a
/// window of columns `[i − kl, i + ku + extra]`; the `extra` columns hold the
/// fill produced by row interchanges during factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    extra: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self::with_fill(n, kl, ku, 0)
    }

    fn with_fill(n: usize, kl: usize, ku: usize, extra: usize) -> Self {
        let width = kl + ku + extra + 1;
        BandMatrix {
            n,
            kl,
            ku,
            extra,
            width,
            data: vec![Complex64::new(0.0, 0.0); n * width],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    /// Whether (i, j) lies inside the declared band.
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.extra);
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.ku + self.extra {
            return Complex64::new(0.0, 0.0);
        }
        self.data[self.slot(i, j)]
    }

    /// Adds `v` at (i, j). Entries outside the band are an assembly error.
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) -> Result<()> {
        if !self.in_band(i, j) {
            return Err(Error::Assembly(format!(
                "entry ({i}, {j}) outside band kl={}, ku={}",
                self.kl, self.ku
            )));
        }
        let s = self.slot(i, j);
        self.data[s] += v;
        Ok(())
    }

    /// Columns of row `i` inside the band.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// self − σ·other, for matrices of equal shape.
    pub fn shifted(&self, sigma: Complex64, other: &BandMatrix) -> BandMatrix {
        assert_eq!((self.n, self.kl, self.ku), (other.n, other.kl, other.ku));
        let mut out = Self::with_fill(self.n, self.kl, self.ku, self.kl);
        for i in 0..self.n {
            for j in self.row_range(i) {
                let s = out.slot(i, j);
                out.data[s] = self.get(i, j) - sigma * other.get(i, j);
            }
        }
        out
    }

    /// Largest |entry| outside a band of the given width, computed from the
    /// stored window (used to verify the declared structure).
    pub fn max_outside(&self, kl: usize, ku: usize) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n {
            for j in self.row_range(i) {
                if j + kl < i || j > i + ku {
                    m = m.max(self.get(i, j).norm());
                }
            }
        }
        m
    }

    /// Dense copy, for small test problems.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// LU factorization with partial pivoting (row interchanges).
    pub fn factor(&self, sigma: Complex64, other: &BandMatrix) -> Result<BandLu> {
        let mut a = self.shifted(sigma, other);
        let n = a.n;
        let kl = a.kl;
        let reach = a.ku + kl;
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a.get(k, k).norm();
            for i in k + 1..=last_row {
                let v = a.get(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > 0.0) || !best.is_finite() {
                return Err(Error::FactorizationSingular { pivot: k });
            }
            pivots[k] = p;
            let last_col = (k + reach).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (sk, sp) = (a.slot(k, j), a.slot(p, j));
                    a.data.swap(sk, sp);
                }
            }
            let inv = 1.0 / a.get(k, k);
            for i in k + 1..=last_row {
                let s = a.slot(i, k);
                let l = a.data[s] * inv;
                a.data[s] = l;
                if l.norm_sqr() == 0.0 {
                    continue;
                }
                for j in k + 1..=last_col {
                    let akj = a.data[a.slot(k, j)];
                    let sij = a.slot(i, j);
                    a.data[sij] -= l * akj;
                }
            }
        }
        Ok(BandLu { lu: a, pivots })
    }
}

/// Factors of a banded matrix; see [`BandMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let a = &self.lu;
        let n = a.n;
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + a.kl).min(n - 1) {
                x[i] -= a.get(i, k) * xk;
            }
        }
        let reach = a.ku + a.kl;
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + reach).min(n - 1) {
                s -= a.get(k, j) * x[j];
            }
            x[k] = s / a.get(k, k);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense_matvec(a: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
        a.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn solve_needs_pivoting() {
        // zero leading diagonal entry forces an interchange
        let n = 40;
        let (kl, ku) = (3, 2);
        let mut m = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in m.row_range(i) {
                let v = if i == j && i % 5 == 0 {
                    c(0.0, 0.0)
                } else {
                    c(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64 - 2.0)
                };
                m.add(i, j, v).unwrap();
            }
        }
        let zero = BandMatrix::zeros(n, kl, ku);
        let lu = m.factor(c(0.0, 0.0), &zero).unwrap();
        let x_true: Vec<Complex64> = (0..n).map(|i| c(i as f64 * 0.1, 1.0 - i as f64 * 0.03)).collect();
        let b = m.matvec(&x_true);
        let x = lu.solve(&b);
        let err = x.iter().zip(&x_true).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
        assert_eq!(dense_matvec(&m.to_dense(), &x_true), b);
    }

    #[test]
    fn out_of_band_entry_rejected() {
        let mut m = BandMatrix::zeros(10, 1, 1);
        assert!(m.add(5, 7, c(1.0, 0.0)).is_err());
        assert!(m.add(5, 6, c(1.0, 0.0)).is_ok());
        assert_eq!(m.max_outside(1, 1), 0.0);
        assert_eq!(m.max_outside(1, 0), 1.0);
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        let m = BandMatrix::zeros(4, 1, 1);
        let zero = BandMatrix::zeros(4, 1, 1);
        assert!(matches!(
            m.factor(c(0.0, 0.0), &zero),
            Err(Error::FactorizationSingular { pivot: 0 })
        ));
    }
}
