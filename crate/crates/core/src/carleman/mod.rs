//! Weights, cutoffs and the numerical check of the weighted elliptic
//! estimate on the cylinder `(-b, b) × (0, L)`.

mod check;
mod cutoff;
mod manufactured;
mod psi;
mod weights;

pub use check::{carleman_check, carleman_sweep, write_carleman_csv, CarlemanResult, CarlemanSweep, QuadratureOptions};
pub use cutoff::{build_eta2, Eta2, Varphi, ETA2_EVEN};
pub use manufactured::{
    conductivities, manufactured_solutions, parse_conductivity, parse_manufactured, Conductivity,
    ConstantConductivity, GaussianBump, Jet, Manufactured, PolySine, PsiProfile, Scaled, SineConductivity,
    ZeroSolution,
};
pub use psi::{build_psi_hat, PsiHat};
pub use weights::{build_weights, weight_b, weight_b0, CarlemanWeights, ThetaBoundReport};
