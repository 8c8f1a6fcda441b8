//! Discrete energy space: the inner product of H = H¹₀ × L² × H¹₀ × L²,
//! energy, dissipation and the graph norm.
//!
//! The H¹₀ part uses midpoint-sampled `g` and first differences,
//! `h · Σ_{i=0}^{n} g_{i-1/2} (Δa_i / h)(Δb_i / h)*` with Dirichlet zero
//! extension, and the L² part is the node sum `h · Σ a_i b_i*`. With this
//! choice the stiffness form equals `-h · aᵀ L_g b` exactly, which is what
//! makes the discrete dissipation identity hold to round-off.

use faer::Mat;
use serde::Serialize;

use crate::coeffs::CoefficientField;
use crate::discretization::GeneratorMatrix;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scalar::Scalar;
use crate::state::StateVector;

fn check_dims<T: Scalar>(
    u1: &StateVector<T>,
    u2: &StateVector<T>,
    grid: &Grid1D,
    coeffs: &CoefficientField,
) -> Result<()> {
    let n = grid.n();
    if coeffs.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: coeffs.n() });
    }
    u1.check_len(n)?;
    u2.check_len(n)
}

fn stiffness<T: Scalar>(a: &[T], b: &[T], g_mid: &[f64], h: f64) -> T {
    let n = a.len();
    let mut acc = T::zero();
    let (mut pa, mut pb) = (T::zero(), T::zero());
    for i in 0..=n {
        let (ca, cb) = if i < n { (a[i], b[i]) } else { (T::zero(), T::zero()) };
        acc += (ca - pa) * (cb - pb).conj() * T::from_real(g_mid[i]);
        pa = ca;
        pb = cb;
    }
    acc.scale(1.0 / h)
}

fn mass<T: Scalar>(a: &[T], b: &[T], h: f64) -> T {
    a.iter().zip(b).map(|(x, y)| *x * y.conj()).sum::<T>().scale(h)
}

/// Energy inner product `<U1, U2>_H`, sesquilinear (conjugate-linear in
/// the second argument).
pub fn inner_h<T: Scalar>(
    u1: &StateVector<T>,
    u2: &StateVector<T>,
    grid: &Grid1D,
    coeffs: &CoefficientField,
) -> Result<T> {
    check_dims(u1, u2, grid, coeffs)?;
    let h = grid.h();
    let g = coeffs.g_mid();
    Ok(stiffness(&u1.y, &u2.y, g, h)
        + mass(&u1.u, &u2.u, h)
        + stiffness(&u1.z, &u2.z, g, h)
        + mass(&u1.v, &u2.v, h))
}

pub fn norm_h_sq<T: Scalar>(u: &StateVector<T>, grid: &Grid1D, coeffs: &CoefficientField) -> Result<f64> {
    Ok(inner_h(u, u, grid, coeffs)?.re())
}

/// Total energy, `½ <U, U>_H`.
pub fn energy<T: Scalar>(u: &StateVector<T>, grid: &Grid1D, coeffs: &CoefficientField) -> Result<f64> {
    Ok(0.5 * norm_h_sq(u, grid, coeffs)?)
}

/// Instantaneous dissipation rate `h · Σ β_i |u_i|²`.
pub fn dissipation<T: Scalar>(u: &StateVector<T>, grid: &Grid1D, coeffs: &CoefficientField) -> Result<f64> {
    check_dims(u, u, grid, coeffs)?;
    Ok(grid.h()
        * u.u
            .iter()
            .zip(coeffs.beta())
            .map(|(x, b)| b * x.modulus_sq())
            .sum::<f64>())
}

/// Squared graph norm `‖U‖²_H + ‖AU‖²_H`, our reading of the D(A) norm.
pub fn graph_norm_sq<T: Scalar>(u: &StateVector<T>, a: &GeneratorMatrix) -> Result<f64> {
    let au = a.apply(u)?;
    Ok(norm_h_sq(u, a.grid(), a.coeffs())? + norm_h_sq(&au, a.grid(), a.coeffs())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub h_norm_sq: f64,
    pub graph_norm_sq: f64,
}

impl EnergyReport {
    pub fn at(t: f64, u: &StateVector<f64>, a: &GeneratorMatrix) -> Result<Self> {
        let (grid, coeffs) = (a.grid(), a.coeffs());
        let h_norm_sq = norm_h_sq(u, grid, coeffs)?;
        Ok(Self {
            t,
            energy: 0.5 * h_norm_sq,
            dissipation: dissipation(u, grid, coeffs)?,
            h_norm_sq,
            graph_norm_sq: graph_norm_sq(u, a)?,
        })
    }
}

/// Gram operator `M` of the energy inner product, `<a, b>_H = b* M a`, in
/// block layout: `M = diag(K, hI, K, hI)` with `K = -h L_g` tridiagonal SPD.
#[derive(Debug, Clone)]
pub struct EnergyGram {
    h: f64,
    k_diag: Vec<f64>,
    k_off: Vec<f64>,
    // K = C Cᵀ, C lower bidiagonal
    c_diag: Vec<f64>,
    c_sub: Vec<f64>,
}

impl EnergyGram {
    pub fn new(grid: &Grid1D, coeffs: &CoefficientField) -> Result<Self> {
        let n = grid.n();
        if coeffs.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: coeffs.n() });
        }
        let h = grid.h();
        let g = coeffs.g_mid();
        let k_diag: Vec<f64> = (0..n).map(|i| (g[i] + g[i + 1]) / h).collect();
        let k_off: Vec<f64> = (0..n - 1).map(|i| -g[i + 1] / h).collect();
        let mut c_diag = vec![0.0; n];
        let mut c_sub = vec![0.0; n - 1];
        c_diag[0] = k_diag[0].sqrt();
        for i in 0..n - 1 {
            c_sub[i] = k_off[i] / c_diag[i];
            c_diag[i + 1] = (k_diag[i + 1] - c_sub[i] * c_sub[i]).sqrt();
        }
        Ok(Self {
            h,
            k_diag,
            k_off,
            c_diag,
            c_sub,
        })
    }

    pub fn n(&self) -> usize {
        self.k_diag.len()
    }

    fn apply_k<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = x[i].scale(self.k_diag[i]);
                if i > 0 {
                    s += x[i - 1].scale(self.k_off[i - 1]);
                }
                if i + 1 < n {
                    s += x[i + 1].scale(self.k_off[i]);
                }
                s
            })
            .collect()
    }

    fn solve_k<T: Scalar>(&self, b: &[T]) -> Vec<T> {
        let n = self.n();
        // C w = b
        let mut w = vec![T::zero(); n];
        for i in 0..n {
            let mut s = b[i];
            if i > 0 {
                s -= w[i - 1].scale(self.c_sub[i - 1]);
            }
            w[i] = s.scale(1.0 / self.c_diag[i]);
        }
        // Cᵀ x = w
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = w[i];
            if i + 1 < n {
                s -= x[i + 1].scale(self.c_sub[i]);
            }
            x[i] = s.scale(1.0 / self.c_diag[i]);
        }
        x
    }

    pub fn apply<T: Scalar>(&self, u: &StateVector<T>) -> StateVector<T> {
        let m = |c: &[T]| c.iter().map(|x| x.scale(self.h)).collect::<Vec<_>>();
        StateVector {
            y: self.apply_k(&u.y),
            u: m(&u.u),
            z: self.apply_k(&u.z),
            v: m(&u.v),
        }
    }

    pub fn solve<T: Scalar>(&self, u: &StateVector<T>) -> StateVector<T> {
        let m = |c: &[T]| c.iter().map(|x| x.scale(1.0 / self.h)).collect::<Vec<_>>();
        StateVector {
            y: self.solve_k(&u.y),
            u: m(&u.u),
            z: self.solve_k(&u.z),
            v: m(&u.v),
        }
    }

    /// Dense upper-triangular factor `W` with `WᵀW = M`, and `W⁻¹`, both in
    /// block layout.
    pub fn dense_factor(&self) -> (Mat<f64>, Mat<f64>) {
        let n = self.n();
        let mut w = Mat::<f64>::zeros(4 * n, 4 * n);
        let mut winv = Mat::<f64>::zeros(4 * n, 4 * n);
        let sh = self.h.sqrt();
        // Cᵀ is upper bidiagonal: diag c_diag, superdiag c_sub
        let mut cinv = Mat::<f64>::zeros(n, n);
        for j in 0..n {
            cinv[(j, j)] = 1.0 / self.c_diag[j];
            for k in (0..j).rev() {
                cinv[(k, j)] = -self.c_sub[k] * cinv[(k + 1, j)] / self.c_diag[k];
            }
        }
        for blk in 0..4 {
            let o = blk * n;
            for i in 0..n {
                if blk % 2 == 0 {
                    w[(o + i, o + i)] = self.c_diag[i];
                    if i + 1 < n {
                        w[(o + i, o + i + 1)] = self.c_sub[i];
                    }
                    for j in i..n {
                        winv[(o + i, o + j)] = cinv[(i, j)];
                    }
                } else {
                    w[(o + i, o + i)] = sh;
                    winv[(o + i, o + i)] = 1.0 / sh;
                }
            }
        }
        (w, winv)
    }
}
