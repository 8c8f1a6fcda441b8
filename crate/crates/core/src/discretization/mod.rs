//! Finite-difference assembly of the elliptic operator `y ↦ (g y_x)_x` and
//! of the 4n×4n semigroup generator.

mod elliptic;
mod export;
mod generator;

pub use elliptic::{assemble_elliptic, EllipticMatrix};
pub use export::write_coordinate;
pub use generator::{assemble_generator, Component, GeneratorMatrix, BAND_LOWER, BAND_UPPER};
