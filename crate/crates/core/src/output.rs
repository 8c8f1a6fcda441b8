//! CSV writers. Every float is written with 17 significant digits so the
//! files round-trip exactly through `f64` parsing.

use std::io::Write;

use crate::error::Result;

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus rows of already-formatted fields.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
