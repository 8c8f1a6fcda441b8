//! Spectra, spectral-region fits and resolvent norms of the generator,
//! all measured in the energy inner product.

mod eigen;
mod region;
mod resolvent;
mod sweep;

pub use eigen::{
    eigen_solvers, eigenpairs, eigenvalues, parse_eigen_solver, tol_eig, write_eigen_csv, DenseEigen, EigenPair,
    EigenSolver, EigenSolverFactory, ShiftInvert, RESIDUAL_TOL,
};
pub use region::{fit_spectral_region, region_constant, RegionFit};
pub use resolvent::{
    parse_sigma_solver, resolvent_norm, resolvent_norm_with, sigma_solvers, DenseSvd, InverseIteration,
    SigmaSolverFactory, SmallestSingularValue,
};
pub use sweep::{
    c_res_for, resolvent_sweep, resolvent_sweep_with, write_sweep_csv, PointKind, SpectralPoint, SweepConfig,
    SweepResult,
};
