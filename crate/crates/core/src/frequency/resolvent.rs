use std::fmt::Debug;
use std::sync::OnceLock;

use faer::Mat;
use num_complex::Complex64;

use crate::discretization::GeneratorMatrix;
use crate::energy::{inner_h, norm_h_sq, EnergyGram};
use crate::error::{invalid, Error, Result};
use crate::registry::{CallSpec, Registry};
use crate::state::StateVector;

/// Smallest singular value of `γI - A` as an operator on (ℂ⁴ⁿ, ‖·‖_H).
pub trait SmallestSingularValue: Debug + Send + Sync {
    fn sigma_min(&self, a: &GeneratorMatrix, gamma: Complex64) -> Result<f64>;
    fn spec(&self) -> String;
}

fn at_spectrum(gamma: Complex64, sigma_min: f64) -> Error {
    Error::AtSpectrum { gamma, sigma_min }
}

/// Dense SVD of `W(γI - A)W⁻¹` with `WᵀW` the energy Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSvd {
    pub max_dim: usize,
}

impl Default for DenseSvd {
    fn default() -> Self {
        Self { max_dim: 2000 }
    }
}

impl SmallestSingularValue for DenseSvd {
    fn sigma_min(&self, a: &GeneratorMatrix, gamma: Complex64) -> Result<f64> {
        let d = a.dim();
        if d > self.max_dim {
            return invalid(format!("dense SVD limited to dimension {}, generator has {d}", self.max_dim));
        }
        let (w, winv) = EnergyGram::new(a.grid(), a.coeffs())?.dense_factor();
        let b: Mat<f64> = &w * a.to_dense() * &winv;
        let m = Mat::<Complex64>::from_fn(d, d, |i, j| {
            let diag = if i == j { gamma } else { Complex64::new(0.0, 0.0) };
            diag - Complex64::new(b[(i, j)], 0.0)
        });
        let s = m.singular_values().map_err(|e| Error::EigenNonConvergence {
            reason: format!("dense SVD failed: {e:?}"),
            residual: f64::NAN,
        })?;
        Ok(*s.last().expect("nonempty matrix"))
    }

    fn spec(&self) -> String {
        "dense-svd".into()
    }
}

/// Power iteration on `R*R` with `R = (γI - A)⁻¹` and `R* = M⁻¹RᴴM` its
/// energy-adjoint; each step costs two banded solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseIteration {
    pub max_iter: usize,
    pub rel_tol: f64,
}

impl Default for InverseIteration {
    fn default() -> Self {
        Self { max_iter: 2000, rel_tol: 1e-12 }
    }
}

fn start(n: usize) -> StateVector<Complex64> {
    // real start vector keeps the γ ↦ γ̄ symmetry exact
    let f = |k: usize| {
        (0..n)
            .map(|i| Complex64::new(1.0 + ((i * 13 + k * 5) % 17) as f64 / 17.0, 0.0))
            .collect::<Vec<_>>()
    };
    StateVector { y: f(0), u: f(1), z: f(2), v: f(3) }
}

impl SmallestSingularValue for InverseIteration {
    fn sigma_min(&self, a: &GeneratorMatrix, gamma: Complex64) -> Result<f64> {
        let lu = match a.shifted_banded(gamma, Complex64::new(-1.0, 0.0)).factor() {
            Ok(lu) => lu,
            Err(Error::SingularPivot { .. }) => return Err(at_spectrum(gamma, 0.0)),
            Err(e) => return Err(e),
        };
        let (g, c) = (a.grid(), a.coeffs());
        let gram = EnergyGram::new(g, c)?;
        let norm = |v: &StateVector<Complex64>| -> Result<f64> { Ok(norm_h_sq(v, g, c)?.sqrt()) };
        let mut x = start(a.n());
        let nx = norm(&x)?;
        x = x.scaled(Complex64::new(1.0 / nx, 0.0));
        let mut est = 0.0;
        for _ in 0..self.max_iter {
            let y = StateVector::from_interleaved(&lu.solve(&x.to_interleaved()))?;
            let ny = norm(&y)?;
            if !ny.is_finite() {
                return Err(at_spectrum(gamma, 0.0));
            }
            let my = gram.apply(&y);
            let z = StateVector::from_interleaved(&lu.solve_adjoint(&my.to_interleaved()))?;
            let z = gram.solve(&z);
            // ‖R*R x‖ ≥ <R*R x, x> = ‖Rx‖², both tend to ‖R‖²
            let q = inner_h(&z, &x, g, c)?.re;
            let next = q.max(ny * ny).sqrt();
            let nz = norm(&z)?;
            x = z.scaled(Complex64::new(1.0 / nz, 0.0));
            let done = (next - est).abs() <= self.rel_tol * next;
            est = next;
            if done {
                break;
            }
        }
        Ok(1.0 / est)
    }

    fn spec(&self) -> String {
        "inverse-iteration".into()
    }
}

pub type SigmaSolverFactory = fn(&CallSpec) -> Result<Box<dyn SmallestSingularValue>>;

pub fn sigma_solvers() -> &'static Registry<SigmaSolverFactory> {
    static REG: OnceLock<Registry<SigmaSolverFactory>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::new("smallest-singular-value solver")
            .with("dense-svd", (|c: &CallSpec| {
                if !c.args.is_empty() {
                    c.arity(0)?;
                }
                Ok(Box::new(DenseSvd::default()) as Box<dyn SmallestSingularValue>)
            }) as SigmaSolverFactory)
            .with("inverse-iteration", |c| {
                if !c.args.is_empty() {
                    c.arity(0)?;
                }
                Ok(Box::new(InverseIteration::default()))
            })
    })
}

pub fn parse_sigma_solver(spec: &str) -> Result<Box<dyn SmallestSingularValue>> {
    let call = CallSpec::parse(spec)?;
    (sigma_solvers().get(&call.name)?)(&call)
}

/// `‖(A - γI)⁻¹‖` in the energy norm; `AtSpectrum` once σ_min drops below
/// `1e-14 ‖A‖₁`.
pub fn resolvent_norm_with(solver: &dyn SmallestSingularValue, a: &GeneratorMatrix, gamma: Complex64) -> Result<f64> {
    if !gamma.is_finite() {
        return invalid(format!("shift must be finite, got {gamma}"));
    }
    let s = solver.sigma_min(a, gamma)?;
    if !(s >= 1e-14 * a.norm_one()) {
        return Err(at_spectrum(gamma, s));
    }
    Ok(1.0 / s)
}

pub fn resolvent_norm(a: &GeneratorMatrix, gamma: Complex64) -> Result<f64> {
    resolvent_norm_with(&InverseIteration::default(), a, gamma)
}
