use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{Format, Report};

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub fn json_string(report: &Report) -> Result<String, EmitError> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

/// `n,s_n` rows with 17 significant digits; header only when there is no sequence.
pub fn csv_string(report: &Report) -> Result<String, EmitError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "s_n"])?;
    if let Some(v) = &report.verdicts {
        for (i, s) in v.power_sequence.values.iter().enumerate() {
            w.write_record([(i + 1).to_string(), format!("{s:.16e}")])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| EmitError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Two columns `n s_n`.
pub fn plot_sequence(report: &Report) -> String {
    let mut out = String::from("# n s_n\n");
    if let Some(v) = &report.verdicts {
        for (i, s) in v.power_sequence.values.iter().enumerate() {
            let _ = writeln!(out, "{} {s:.16e}", i + 1);
        }
    }
    out
}

/// One block per (path, j) of the residual tail of condition (ii), blocks
/// separated by two blank lines; columns are tail step and residual.
pub fn plot_residual_tails(report: &Report) -> String {
    let mut out = String::new();
    let Some(v) = &report.verdicts else { return out };
    for r in v.theorem_a.condition_ii.iter().filter(|r| !r.tail.is_empty()) {
        let _ = writeln!(out, "# path {} j {} {:?}", r.path, r.j, r.outcome);
        for (k, x) in r.tail.iter().enumerate() {
            let _ = writeln!(out, "{k} {x:.16e}");
        }
        out.push_str("\n\n");
    }
    out
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, EmitError> {
    std::fs::write(&path, text).map_err(|source| EmitError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Writes the requested format into `dir` and returns the files written:
/// `report.json`, `s_n.csv`, or `s_n.dat` plus `residual_tails.dat`.
pub fn emit(report: &Report, format: Format, dir: &Path) -> Result<Vec<PathBuf>, EmitError> {
    std::fs::create_dir_all(dir).map_err(|source| EmitError::Io { path: dir.to_path_buf(), source })?;
    Ok(match format {
        Format::Json => vec![write(dir.join("report.json"), &json_string(report)?)?],
        Format::Csv => vec![write(dir.join("s_n.csv"), &csv_string(report)?)?],
        Format::Plot => vec![
            write(dir.join("s_n.dat"), &plot_sequence(report))?,
            write(dir.join("residual_tails.dat"), &plot_residual_tails(report))?,
        ],
    })
}
