//! Writing reports, plots and tables to disk.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::plot::{plot_csv, plot_rows, render_svg};
use super::report::DiagnosticsReport;

/// Where a report's artifacts go. Unset entries are skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmitPaths {
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl EmitPaths {
    /// `<dir>/<stem>.json`, `.svg` and `.csv`.
    pub fn in_dir(dir: &Path, stem: &str) -> Self {
        EmitPaths {
            json: Some(dir.join(format!("{stem}.json"))),
            svg: Some(dir.join(format!("{stem}.svg"))),
            csv: Some(dir.join(format!("{stem}.csv"))),
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the JSON report, the SVG coefficient plot and the CSV of plotted
/// numbers. Returns the paths written.
pub fn emit_outputs(report: &DiagnosticsReport, paths: &EmitPaths) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if let Some(p) = &paths.json {
        write_text(p, &report.to_json())?;
        written.push(p.clone());
    }
    if let Some(p) = &paths.svg {
        write_text(p, &render_svg(report))?;
        written.push(p.clone());
    }
    if let Some(p) = &paths.csv {
        write_text(p, &plot_csv(&plot_rows(report)))?;
        written.push(p.clone());
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = write_text(&blocker.join("out.json"), "{}").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert_eq!(err.exit_code(), 2);
    }
}
