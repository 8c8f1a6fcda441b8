use std::io::Write;

use super::GeneratorMatrix;
use crate::error::Result;

/// Writes the generator in coordinate text form: one `row col value` line
/// per stored entry (0-based, block ordering), values with 17 significant
/// digits.
pub fn write_coordinate<W: Write>(a: &GeneratorMatrix, mut out: W) -> Result<()> {
    writeln!(out, "% {} {} {}", a.dim(), a.dim(), a.nnz())?;
    for (r, c, v) in a.triplets() {
        writeln!(out, "{r} {c} {v:.16e}")?;
    }
    Ok(())
}
