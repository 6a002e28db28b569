//! CSV tables and plot-ready two-column data files.

use super::compare::{ComparisonRow, CSV_HEADER};
use super::fit::ConvergenceFit;
use crate::error::Result;
use crate::oracle::Method;
use std::io::Write;
use std::path::Path;

pub fn write_csv<W: Write>(rows: &[ComparisonRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv())?;
    }
    Ok(())
}

pub fn csv_string(rows: &[ComparisonRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// Writes `x y` columns, one pair per line, after a `# x y` header.
pub fn write_columns(path: &Path, labels: (&str, &str), data: &[(f64, f64)]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "# {} {}", labels.0, labels.1)?;
    for (x, y) in data {
        writeln!(f, "{x} {y}")?;
    }
    f.flush()?;
    Ok(())
}

fn method_rows(rows: &[ComparisonRow], m: Method) -> impl Iterator<Item = &ComparisonRow> {
    rows.iter().filter(move |r| r.method == m)
}

/// Per method: residual envelopes against h, oracle and predicted positions
/// in the complex plane, and the width ratio against `e_k`.
pub fn write_plot_data(dir: &Path, rows: &[ComparisonRow], fit: Option<&ConvergenceFit>) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut emit = |name: String, labels: (&str, &str), data: Vec<(f64, f64)>| -> Result<()> {
        if data.is_empty() {
            return Ok(());
        }
        write_columns(&dir.join(&name), labels, &data)?;
        written.push(name);
        Ok(())
    };
    for m in [Method::Ecs, Method::Wronskian] {
        emit(
            format!("oracle_{m}.dat"),
            ("re_E", "im_E"),
            method_rows(rows, m).map(|r| (r.oracle.re, r.oracle.im)).collect(),
        )?;
        emit(
            format!("predicted_{m}.dat"),
            ("re_E", "im_E"),
            method_rows(rows, m).map(|r| (r.predicted.re, r.predicted.im)).collect(),
        )?;
        emit(
            format!("width_ratio_{m}.dat"),
            ("e_k", "ratio"),
            method_rows(rows, m).filter(|r| r.c > 0.0).map(|r| (r.e_k, r.width_ratio())).collect(),
        )?;
        if let Some(mf) = fit.and_then(|f| f.method(m)) {
            emit(
                format!("residual_re_{m}.dat"),
                ("h", "max_residual_re"),
                mf.envelope.iter().filter(|e| e.1.is_finite()).map(|e| (e.0, e.1)).collect(),
            )?;
            emit(
                format!("residual_im_{m}.dat"),
                ("h", "max_residual_im"),
                mf.envelope.iter().filter(|e| e.2.is_finite()).map(|e| (e.0, e.2)).collect(),
            )?;
        }
    }
    Ok(written)
}
