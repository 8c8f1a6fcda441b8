use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Semigroup state `U = (y, u, z, v)`: two displacements and their
/// velocities, sampled at interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T = f64> {
    pub y: Vec<T>,
    pub u: Vec<T>,
    pub z: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> StateVector<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            y: vec![T::zero(); n],
            u: vec![T::zero(); n],
            z: vec![T::zero(); n],
            v: vec![T::zero(); n],
        }
    }

    pub fn from_components(y: Vec<T>, u: Vec<T>, z: Vec<T>, v: Vec<T>) -> Result<Self> {
        let n = y.len();
        for c in [&u, &z, &v] {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
        }
        Ok(Self { y, u, z, v })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.len() });
        }
        Ok(())
    }

    pub fn components(&self) -> [&[T]; 4] {
        [&self.y, &self.u, &self.z, &self.v]
    }

    fn components_mut(&mut self) -> [&mut Vec<T>; 4] {
        [&mut self.y, &mut self.u, &mut self.z, &mut self.v]
    }

    /// Node-interleaved layout `[y_0, u_0, z_0, v_0, y_1, ...]` used by the
    /// banded solvers.
    pub fn to_interleaved(&self) -> Vec<T> {
        let n = self.len();
        let mut out = Vec::with_capacity(4 * n);
        for i in 0..n {
            out.extend([self.y[i], self.u[i], self.z[i], self.v[i]]);
        }
        out
    }

    pub fn from_interleaved(data: &[T]) -> Result<Self> {
        if data.len() % 4 != 0 {
            return Err(Error::InvalidInput(format!(
                "interleaved state length {} is not a multiple of 4",
                data.len()
            )));
        }
        let n = data.len() / 4;
        let mut s = Self::zeros(n);
        for i in 0..n {
            s.y[i] = data[4 * i];
            s.u[i] = data[4 * i + 1];
            s.z[i] = data[4 * i + 2];
            s.v[i] = data[4 * i + 3];
        }
        Ok(s)
    }

    /// Block layout `[y; u; z; v]`, the ordering of the generator matrix.
    pub fn to_blocks(&self) -> Vec<T> {
        self.components().concat()
    }

    pub fn from_blocks(data: &[T]) -> Result<Self> {
        if data.len() % 4 != 0 {
            return Err(Error::InvalidInput(format!(
                "block state length {} is not a multiple of 4",
                data.len()
            )));
        }
        let n = data.len() / 4;
        Ok(Self {
            y: data[..n].to_vec(),
            u: data[n..2 * n].to_vec(),
            z: data[2 * n..3 * n].to_vec(),
            v: data[3 * n..].to_vec(),
        })
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: T, other: &Self) {
        for (dst, src) in self.components_mut().into_iter().zip(other.components()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += a * *s;
            }
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        let f = |c: &[T]| c.iter().map(|x| a * *x).collect::<Vec<_>>();
        Self {
            y: f(&self.y),
            u: f(&self.u),
            z: f(&self.z),
            v: f(&self.v),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, x| m.max(x.modulus()))
    }
}

impl StateVector<f64> {
    pub fn to_complex(&self) -> StateVector<Complex64> {
        let f = |c: &[f64]| c.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        StateVector {
            y: f(&self.y),
            u: f(&self.u),
            z: f(&self.z),
            v: f(&self.v),
        }
    }
}
