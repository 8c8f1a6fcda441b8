use std::fmt::Debug;
use std::io::Write;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::discretization::GeneratorMatrix;
use crate::energy::norm_h_sq;
use crate::error::{invalid, Error, Result};
use crate::output::{fmt17, write_table};
use crate::registry::{parse_complex, CallSpec, Registry};
use crate::state::StateVector;

/// Bound on `‖Aφ - λφ‖_H / ‖φ‖_H` for every reported pair.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Eigenvalues with `|Re λ|` below this are treated as numerically
/// imaginary.
pub fn tol_eig(a: &GeneratorMatrix) -> f64 {
    1e-8 * a.norm_one()
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: StateVector<Complex64>,
    /// Relative residual in the energy norm.
    pub residual: f64,
}

pub trait EigenSolver: Debug + Send + Sync {
    fn solve(&self, a: &GeneratorMatrix) -> Result<Vec<EigenPair>>;
    fn spec(&self) -> String;
}

fn h_norm(a: &GeneratorMatrix, v: &StateVector<Complex64>) -> Result<f64> {
    Ok(norm_h_sq(v, a.grid(), a.coeffs())?.sqrt())
}

fn residual(a: &GeneratorMatrix, lambda: Complex64, v: &StateVector<Complex64>) -> Result<f64> {
    let mut r = a.apply(v)?;
    r.axpy(-lambda, v);
    Ok(h_norm(a, &r)? / h_norm(a, v)?)
}

/// Rayleigh quotient `<Av, v>_H / <v, v>_H`.
fn rayleigh(a: &GeneratorMatrix, v: &StateVector<Complex64>) -> Result<Complex64> {
    let (g, c) = (a.grid(), a.coeffs());
    let av = a.apply(v)?;
    Ok(crate::energy::inner_h(&av, v, g, c)? / crate::energy::inner_h(v, v, g, c)?)
}

fn normalized(a: &GeneratorMatrix, v: StateVector<Complex64>) -> Result<StateVector<Complex64>> {
    let n = h_norm(a, &v)?;
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::EigenNonConvergence {
            reason: "iterate collapsed to zero or overflowed".into(),
            residual: f64::NAN,
        });
    }
    Ok(v.scaled(Complex64::new(1.0 / n, 0.0)))
}

/// Inverse iteration with shift `target`; returns the best pair seen.
fn inverse_iteration(
    a: &GeneratorMatrix,
    target: Complex64,
    start: StateVector<Complex64>,
    max_iter: usize,
) -> Result<EigenPair> {
    let bump = 1e-13 * a.norm_one().max(1.0);
    let lu = match a.shifted_banded(-target, Complex64::new(1.0, 0.0)).factor() {
        Ok(lu) => lu,
        Err(Error::SingularPivot { .. }) => a
            .shifted_banded(-(target + Complex64::new(bump, bump)), Complex64::new(1.0, 0.0))
            .factor()?,
        Err(e) => return Err(e),
    };
    let mut x = normalized(a, start)?;
    let mut best: Option<EigenPair> = None;
    for _ in 0..max_iter {
        let mut w = x.to_interleaved();
        lu.solve_in_place(&mut w);
        x = normalized(a, StateVector::from_interleaved(&w)?)?;
        let lambda = rayleigh(a, &x)?;
        let res = residual(a, lambda, &x)?;
        if best.as_ref().is_none_or(|b| res < b.residual) {
            best = Some(EigenPair {
                value: lambda,
                vector: x.clone(),
                residual: res,
            });
        }
        if res <= 0.1 * RESIDUAL_TOL {
            break;
        }
    }
    Ok(best.expect("at least one iteration"))
}

fn sort_pairs(pairs: &mut [EigenPair]) {
    pairs.sort_by(|p, q| {
        let (a, b) = (p.value, q.value);
        a.im.abs()
            .total_cmp(&b.im.abs())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
    });
}

/// Full dense eigendecomposition; each pair whose residual exceeds a
/// tenth of [`RESIDUAL_TOL`] is polished by inverse iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseEigen {
    pub max_dim: usize,
}

impl Default for DenseEigen {
    fn default() -> Self {
        Self { max_dim: 4000 }
    }
}

impl EigenSolver for DenseEigen {
    fn solve(&self, a: &GeneratorMatrix) -> Result<Vec<EigenPair>> {
        let d = a.dim();
        if d > self.max_dim {
            return invalid(format!(
                "dense eigensolve limited to dimension {}, generator has {d}; use shift-invert",
                self.max_dim
            ));
        }
        let evd = a.to_dense().eigen().map_err(|e| Error::EigenNonConvergence {
            reason: format!("dense eigensolver failed: {e:?}"),
            residual: f64::NAN,
        })?;
        let (s, u) = (evd.S().column_vector(), evd.U());
        let mut pairs = Vec::with_capacity(d);
        for j in 0..d {
            let value = s[j];
            let col: Vec<Complex64> = (0..d).map(|i| u[(i, j)]).collect();
            let vector = StateVector::from_blocks(&col)?;
            let res = residual(a, value, &vector)?;
            let pair = if res > 0.1 * RESIDUAL_TOL {
                let polished = inverse_iteration(a, value, vector.clone(), 3)?;
                if polished.residual < res {
                    polished
                } else {
                    EigenPair { value, vector, residual: res }
                }
            } else {
                EigenPair { value, vector, residual: res }
            };
            pairs.push(pair);
        }
        let worst = pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
        if !(worst <= RESIDUAL_TOL) {
            return Err(Error::EigenNonConvergence {
                reason: "eigenvector residual above tolerance after polishing".into(),
                residual: worst,
            });
        }
        sort_pairs(&mut pairs);
        Ok(pairs)
    }

    fn spec(&self) -> String {
        "dense".into()
    }
}

/// One eigenpair per target: the eigenvalue nearest each shift, found by
/// inverse iteration on the banded factorization of `A - τI`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftInvert {
    pub targets: Vec<Complex64>,
    pub max_iter: usize,
}

impl ShiftInvert {
    pub fn new(targets: Vec<Complex64>) -> Self {
        Self { targets, max_iter: 200 }
    }
}

fn start_vector(n: usize) -> StateVector<Complex64> {
    // deterministic, generic in every component
    let f = |k: usize| {
        (0..n)
            .map(|i| Complex64::new(1.0 + ((i * 7 + k * 3) % 11) as f64 / 11.0, ((i * 5 + k) % 7) as f64 / 7.0))
            .collect::<Vec<_>>()
    };
    StateVector { y: f(0), u: f(1), z: f(2), v: f(3) }
}

impl EigenSolver for ShiftInvert {
    fn solve(&self, a: &GeneratorMatrix) -> Result<Vec<EigenPair>> {
        if self.targets.is_empty() {
            return invalid("shift-invert needs at least one target");
        }
        let mut pairs = Vec::with_capacity(self.targets.len());
        for &t in &self.targets {
            let p = inverse_iteration(a, t, start_vector(a.n()), self.max_iter)?;
            if !(p.residual <= RESIDUAL_TOL) {
                return Err(Error::EigenNonConvergence {
                    reason: format!("inverse iteration at target {t} did not converge in {} steps", self.max_iter),
                    residual: p.residual,
                });
            }
            pairs.push(p);
        }
        sort_pairs(&mut pairs);
        Ok(pairs)
    }

    fn spec(&self) -> String {
        let t: Vec<String> = self
            .targets
            .iter()
            .map(|z| format!("{}{:+}i", z.re, z.im))
            .collect();
        format!("shift-invert({})", t.join(", "))
    }
}

pub type EigenSolverFactory = fn(&CallSpec) -> Result<Box<dyn EigenSolver>>;

pub fn eigen_solvers() -> &'static Registry<EigenSolverFactory> {
    static REG: OnceLock<Registry<EigenSolverFactory>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::new("eigensolver")
            .with("dense", (|c: &CallSpec| {
                if !c.args.is_empty() {
                    c.arity(0)?;
                }
                Ok(Box::new(DenseEigen::default()) as Box<dyn EigenSolver>)
            }) as EigenSolverFactory)
            .with("shift-invert", |c| {
                let targets = c.args.iter().map(|s| parse_complex(s)).collect::<Result<Vec<_>>>()?;
                if targets.is_empty() {
                    return invalid("shift-invert needs at least one target, e.g. shift-invert(5i)");
                }
                Ok(Box::new(ShiftInvert::new(targets)))
            })
    })
}

pub fn parse_eigen_solver(spec: &str) -> Result<Box<dyn EigenSolver>> {
    let call = CallSpec::parse(spec)?;
    (eigen_solvers().get(&call.name)?)(&call)
}

/// Dense eigenpairs sorted by `|Im λ|`.
pub fn eigenpairs(a: &GeneratorMatrix) -> Result<Vec<EigenPair>> {
    DenseEigen::default().solve(a)
}

pub fn eigenvalues(a: &GeneratorMatrix) -> Result<Vec<Complex64>> {
    Ok(eigenpairs(a)?.into_iter().map(|p| p.value).collect())
}

/// Columns `re, im, residual`.
pub fn write_eigen_csv<W: Write>(out: W, pairs: &[EigenPair]) -> Result<()> {
    let rows = pairs
        .iter()
        .map(|p| vec![fmt17(p.value.re), fmt17(p.value.im), fmt17(p.residual)]);
    write_table(out, &["re", "im", "residual"], rows)
}
