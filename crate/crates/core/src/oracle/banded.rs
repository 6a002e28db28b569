//! Complex band matrices with an LU factorization using partial pivoting.
//!
//! Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl` columns on
//! the right hold the fill-in created by row interchanges.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![Complex64::new(0.0, 0.0); n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + j + self.kl - i
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Adds `value` at `(i, j)`; the position must lie inside the band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.data[s] += value;
    }

    pub fn shift_diagonal(&mut self, shift: Complex64) {
        for i in 0..self.n {
            let s = self.slot(i, i);
            self.data[s] += shift;
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let row = &self.data[i * self.width..];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in lo..=hi {
                acc += row[j + self.kl - i] * x[j];
            }
            *yi = acc;
        }
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    /// LU factorization of `self - shift I`.
    pub fn factor_shifted(&self, shift: Complex64) -> Result<BandLu> {
        let mut a = self.clone();
        a.shift_diagonal(-shift);
        a.factor()
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let reach = kl + self.ku;
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + reach).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.slot(k, k)].norm();
            for r in k + 1..=last_row {
                let v = self.data[self.slot(r, k)].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularPivot { pivot: k });
            }
            pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.slot(k, j), self.slot(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(k, k)];
            let inv = pivot.inv();
            for r in k + 1..=last_row {
                let sr = self.slot(r, k);
                let l = self.data[sr] * inv;
                self.data[sr] = l;
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = self.data[self.slot(k, j)];
                    let s = self.slot(r, j);
                    self.data[s] -= l * u;
                }
            }
        }
        Ok(BandLu { lu: self, pivots })
    }
}

/// Factors `P L U` of a band matrix.
#[derive(Clone, Debug)]
pub struct BandLu {
    lu: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn dim(&self) -> usize {
        self.lu.n
    }

    /// Solves in place.
    pub fn solve(&self, b: &mut [Complex64]) {
        let a = &self.lu;
        let n = a.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk == Complex64::new(0.0, 0.0) {
                continue;
            }
            for r in k + 1..=(k + a.kl).min(n - 1) {
                b[r] -= a.data[a.slot(r, k)] * bk;
            }
        }
        let reach = a.kl + a.ku;
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                acc -= a.data[a.slot(i, j)] * b[j];
            }
            b[i] = acc / a.data[a.slot(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> BandMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                m.add(i, j, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        m
    }

    #[test]
    fn matvec_matches_dense() {
        let m = random_band(12, 2, 3, 1);
        let x: Vec<Complex64> = (0..12).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let mut y = vec![Complex64::new(0.0, 0.0); 12];
        m.matvec(&x, &mut y);
        for i in 0..12 {
            let dense: Complex64 = (0..12).map(|j| m.get(i, j) * x[j]).sum();
            assert!((dense - y[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] needs a row swap.
        let mut m = BandMatrix::zeros(2, 1, 1);
        m.add(0, 1, Complex64::new(1.0, 0.0));
        m.add(1, 0, Complex64::new(1.0, 0.0));
        let lu = m.factor().unwrap();
        let mut b = vec![Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)];
        lu.solve(&mut b);
        assert_eq!(b, vec![Complex64::new(3.0, 0.0), Complex64::new(2.0, 0.0)]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = BandMatrix::zeros(4, 1, 1);
        assert!(matches!(m.factor(), Err(Error::SingularPivot { pivot: 0 })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn solve_inverts_matvec(n in 5usize..60, kl in 0usize..5, ku in 0usize..5, seed in 0u64..1000) {
            // Diagonal dominance keeps the condition number modest.
            let mut m = random_band(n, kl, ku, seed);
            m.shift_diagonal(Complex64::new(2.0 * (kl + ku + 1) as f64, 0.0));
            let x: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos())).collect();
            let mut b = vec![Complex64::new(0.0, 0.0); n];
            m.matvec(&x, &mut b);
            let shift = Complex64::new(0.3, -0.2);
            let lu = m.factor_shifted(shift).unwrap();
            for (bi, xi) in b.iter_mut().zip(&x) {
                *bi -= shift * xi;
            }
            lu.solve(&mut b);
            let err = b.iter().zip(&x).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-12, "err {err}");
        }
    }
}
