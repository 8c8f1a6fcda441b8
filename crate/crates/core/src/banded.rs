//! Banded LU with partial pivoting (the `gbtrf`/`gbtrs` scheme), used for
//! the implicit-midpoint system and for every shifted generator solve.
//!
//! Row `i` stores columns `i - kl ..= i + kl + ku`; the extra `kl`
//! super-diagonals hold the fill produced by row interchanges.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct BandedMatrix<T> {
    size: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandedMatrix<T> {
    pub fn zeros(size: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            size,
            kl,
            ku,
            width,
            data: vec![T::zero(); size * width],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.size && j < self.size && j + self.kl >= i && j <= i + self.ku
    }

    pub fn add(&mut self, i: usize, j: usize, value: T) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let k = self.idx(i, j);
        self.data[k] += value;
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            T::zero()
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.size)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.size - 1);
                (lo..=hi).map(|j| self.data[self.idx(i, j)] * x[j]).sum()
            })
            .collect()
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.size)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.size - 1);
                (lo..=hi).map(|j| self.data[self.idx(i, j)].modulus()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn factor(mut self) -> Result<BandedLu<T>> {
        let (n, kl, ku) = (self.size, self.kl, self.ku);
        let kuf = kl + ku;
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let mut piv = vec![0usize; n];
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].modulus();
            for r in k + 1..=last {
                let m = self.data[self.idx(r, k)].modulus();
                if m > best {
                    best = m;
                    p = r;
                }
            }
            min_pivot = min_pivot.min(best);
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularPivot { row: k, size: n, value: best });
            }
            piv[k] = p;
            let jmax = (k + kuf).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(k, k)];
            for r in k + 1..=last {
                let ir = self.idx(r, k);
                let l = self.data[ir] / pivot;
                self.data[ir] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=jmax {
                    let kj = self.data[self.idx(k, j)];
                    let rj = self.idx(r, j);
                    self.data[rj] -= l * kj;
                }
            }
        }
        Ok(BandedLu {
            m: self,
            piv,
            min_pivot_ratio: min_pivot / scale,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    m: BandedMatrix<T>,
    piv: Vec<usize>,
    min_pivot_ratio: f64,
}

impl<T: Scalar> BandedLu<T> {
    pub fn size(&self) -> usize {
        self.m.size
    }

    /// Smallest pivot magnitude relative to ‖A‖∞; a cheap conditioning hint.
    pub fn min_pivot_ratio(&self) -> f64 {
        self.min_pivot_ratio
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let m = &self.m;
        let (n, kl) = (m.size, m.kl);
        let kuf = m.kl + m.ku;
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] -= m.data[m.idx(r, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + kuf).min(n - 1) {
                s -= m.data[m.idx(k, j)] * b[j];
            }
            b[k] = s / m.data[m.idx(k, k)];
        }
    }

    /// Solves `A* x = b` (conjugate transpose).
    pub fn solve_adjoint_in_place(&self, b: &mut [T]) {
        let m = &self.m;
        let (n, kl) = (m.size, m.kl);
        let kuf = m.kl + m.ku;
        assert_eq!(b.len(), n);
        // U* w = b
        for k in 0..n {
            let mut s = b[k];
            for j in k.saturating_sub(kuf)..k {
                s -= m.data[m.idx(j, k)].conj() * b[j];
            }
            b[k] = s / m.data[m.idx(k, k)].conj();
        }
        // undo the unit-lower eliminations in reverse
        for k in (0..n).rev() {
            let mut s = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                s -= m.data[m.idx(r, k)].conj() * b[r];
            }
            b[k] = s;
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_adjoint(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_adjoint_in_place(&mut x);
        x
    }
}
