use faer::Mat;

use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;
use crate::scalar::Scalar;

/// Symmetric tridiagonal `L_g` with
/// `(L_g y)_i = [g_{i+1/2}(y_{i+1} - y_i) - g_{i-1/2}(y_i - y_{i-1})] / h²`
/// and `y_{-1} = y_n = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticMatrix {
    h: f64,
    diag: Vec<f64>,
    off: Vec<f64>,
}

pub fn assemble_elliptic(grid: &Grid1D, g_mid: &[f64]) -> Result<EllipticMatrix> {
    let n = grid.n();
    if g_mid.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: g_mid.len() });
    }
    if let Some((i, g)) = g_mid.iter().enumerate().find(|(_, g)| !(**g > 0.0 && g.is_finite())) {
        return invalid(format!("g_mid[{i}] = {g} is not positive"));
    }
    let h2 = grid.h() * grid.h();
    Ok(EllipticMatrix {
        h: grid.h(),
        diag: (0..n).map(|i| -(g_mid[i] + g_mid[i + 1]) / h2).collect(),
        off: (0..n - 1).map(|i| g_mid[i + 1] / h2).collect(),
    })
}

impl EllipticMatrix {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Coupling between nodes `i` and `i + 1`.
    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn apply<T: Scalar>(&self, y: &[T]) -> Vec<T> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = y[i].scale(self.diag[i]);
                if i > 0 {
                    s += y[i - 1].scale(self.off[i - 1]);
                }
                if i + 1 < n {
                    s += y[i + 1].scale(self.off[i]);
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let n = self.n();
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if j == i + 1 {
                self.off[i]
            } else if i == j + 1 {
                self.off[j]
            } else {
                0.0
            }
        })
    }
}
