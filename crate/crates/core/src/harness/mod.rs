//! Config-driven runs, figure exports, parameter sweeps and the invariant
//! suite behind the `ncosc` binary.

mod check;
pub mod config;
pub mod figures;
mod run;
mod sweep;

use std::path::Path;

pub use check::{check_suite, CheckLine};
pub use config::{AnalysisItem, BackgroundConfig, EpConfig, EpMethod, ExperimentConfig, TimeGrid, SCHEMA_VERSION};
pub use figures::{figure_data, write_figure, FigureData, FigureId, Series};
pub use run::{analyse, compute, compute_with, ep_solve, run, run_checks, AnalysisRows, CheckOutcome, RunData, RunReport};
pub use sweep::{parse_values, sweep, sweep_rows, write_sweep, SweepRow};

use crate::error::Result;

pub(crate) const SOFTWARE: &str = env!("CARGO_PKG_NAME");

/// Fixed-format float: 12 significant digits in scientific notation, so
/// identical inputs give byte-identical files.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes a header plus rows of floats, comma-separated with LF endings.
pub fn write_table<S: AsRef<str>>(path: &Path, header: &[S], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(header.iter().map(|h| h.as_ref()))?;
    for row in rows {
        w.write_record(run::fmt_row(row))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_float_has_twelve_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.00000000000e0");
        assert_eq!(fmt_float(-0.000123456789012345), "-1.23456789012e-4");
    }

    #[test]
    fn table_uses_lf() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_table(&p, &["a", "b"], &[vec![1.0, 2.0]]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "a,b\n1.00000000000e0,2.00000000000e0\n");
    }
}
