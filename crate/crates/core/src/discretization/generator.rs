use faer::Mat;

use super::elliptic::EllipticMatrix;
use crate::banded::BandedMatrix;
use crate::coeffs::CoefficientField;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scalar::Scalar;
use crate::state::StateVector;

/// Lower/upper bandwidth of the generator in node-interleaved ordering.
pub const BAND_LOWER: usize = 5;
pub const BAND_UPPER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Y = 0,
    U = 1,
    Z = 2,
    V = 3,
}

/// Discrete generator
/// `A(y, u, z, v) = (u, L_g y - α v - β u, v, L_g z + α u)`.
///
/// Stored structurally (elliptic part plus the diagonal couplings); dense,
/// coordinate and banded forms are produced on demand.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    grid: Grid1D,
    coeffs: CoefficientField,
    lg: EllipticMatrix,
}

pub fn assemble_generator(grid: &Grid1D, lg: EllipticMatrix, coeffs: CoefficientField) -> Result<GeneratorMatrix> {
    let n = grid.n();
    for got in [lg.n(), coeffs.n()] {
        if got != n {
            return Err(Error::DimensionMismatch { expected: n, got });
        }
    }
    Ok(GeneratorMatrix {
        grid: *grid,
        coeffs,
        lg,
    })
}

impl GeneratorMatrix {
    /// Assembles `L_g` from the field's midpoint samples and the generator.
    pub fn new(grid: &Grid1D, coeffs: CoefficientField) -> Result<Self> {
        let lg = super::assemble_elliptic(grid, coeffs.g_mid())?;
        assemble_generator(grid, lg, coeffs)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn coeffs(&self) -> &CoefficientField {
        &self.coeffs
    }

    pub fn elliptic(&self) -> &EllipticMatrix {
        &self.lg
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn dim(&self) -> usize {
        4 * self.n()
    }

    pub fn block_index(&self, c: Component, i: usize) -> usize {
        c as usize * self.n() + i
    }

    pub fn apply<T: Scalar>(&self, s: &StateVector<T>) -> Result<StateVector<T>> {
        let n = self.n();
        s.check_len(n)?;
        let (a, b) = (self.coeffs.alpha(), self.coeffs.beta());
        let ly = self.lg.apply(&s.y);
        let lz = self.lg.apply(&s.z);
        Ok(StateVector {
            y: s.u.clone(),
            u: (0..n).map(|i| ly[i] - s.v[i].scale(a[i]) - s.u[i].scale(b[i])).collect(),
            z: s.v.clone(),
            v: (0..n).map(|i| lz[i] + s.u[i].scale(a[i])).collect(),
        })
    }

    /// Nonzero entries `(row, col, value)` in block ordering, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        use Component::*;
        let n = self.n();
        let (a, b) = (self.coeffs.alpha(), self.coeffs.beta());
        let (d, o) = (self.lg.diag(), self.lg.off());
        let ix = |c, i| self.block_index(c, i);
        let mut t = Vec::with_capacity(12 * n);
        for i in 0..n {
            t.push((ix(Y, i), ix(U, i), 1.0));
        }
        let push_lg = |t: &mut Vec<_>, row: usize, c: Component, i: usize| {
            if i > 0 {
                t.push((row, ix(c, i - 1), o[i - 1]));
            }
            t.push((row, ix(c, i), d[i]));
            if i + 1 < n {
                t.push((row, ix(c, i + 1), o[i]));
            }
        };
        for i in 0..n {
            let row = ix(U, i);
            push_lg(&mut t, row, Y, i);
            if b[i] != 0.0 {
                t.push((row, ix(U, i), -b[i]));
            }
            if a[i] != 0.0 {
                t.push((row, ix(V, i), -a[i]));
            }
        }
        for i in 0..n {
            t.push((ix(Z, i), ix(V, i), 1.0));
        }
        for i in 0..n {
            let row = ix(V, i);
            if a[i] != 0.0 {
                t.push((row, ix(U, i), a[i]));
            }
            push_lg(&mut t, row, Z, i);
        }
        t
    }

    pub fn nnz(&self) -> usize {
        self.triplets().len()
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let m = self.dim();
        let mut d = Mat::<f64>::zeros(m, m);
        for (r, c, v) in self.triplets() {
            d[(r, c)] += v;
        }
        d
    }

    /// Max absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut cols = vec![0.0; self.dim()];
        for (_, c, v) in self.triplets() {
            cols[c] += v.abs();
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    /// `shift · I + scale · A` in node-interleaved ordering.
    pub fn shifted_banded<T: Scalar>(&self, shift: T, scale: T) -> BandedMatrix<T> {
        let n = self.n();
        let mut m = BandedMatrix::zeros(4 * n, BAND_LOWER, BAND_UPPER);
        for (r, c, v) in self.triplets() {
            m.add(to_interleaved(r, n), to_interleaved(c, n), scale * T::from_real(v));
        }
        for k in 0..4 * n {
            m.add(k, k, shift);
        }
        m
    }
}

fn to_interleaved(block: usize, n: usize) -> usize {
    4 * (block % n) + block / n
}
