//! CSV ingestion with listwise deletion of incomplete rows.

use std::io::Read;
use std::path::Path;

use crate::data::{Dataset, Roles};
use crate::error::{Error, Result};

/// A dataset plus the placebo-row selection, if a flag column was given.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub dataset: Dataset,
    /// Rows (after deletion) whose flag is nonzero.
    pub zfs_rows: Option<Vec<usize>>,
    /// Rows removed because a needed cell was missing.
    pub dropped: usize,
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

pub fn load_dataset(path: &Path, roles: &Roles, zfs_flag: Option<&str>) -> Result<LoadedData> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_from_reader(file, roles, zfs_flag)
}

/// Parses CSV text from any reader. Only the role columns and the flag column
/// are read; other columns may hold anything.
pub fn load_from_reader<R: Read>(reader: R, roles: &Roles, zfs_flag: Option<&str>) -> Result<LoadedData> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            column: String::new(),
            message: format!("unreadable header: {e}"),
        })?
        .clone();
    let header: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
    for (i, h) in header.iter().enumerate() {
        if header[..i].contains(h) {
            return Err(Error::Config(format!("duplicate column '{h}' in header")));
        }
    }

    let mut wanted: Vec<String> = roles.assignments().iter().map(|(c, _)| c.to_string()).collect();
    if let Some(f) = zfs_flag {
        if !wanted.iter().any(|w| w == f) {
            wanted.push(f.to_string());
        }
    }
    let mut index = Vec::with_capacity(wanted.len());
    for w in &wanted {
        let pos = header
            .iter()
            .position(|h| h == w)
            .ok_or_else(|| Error::Config(format!("column '{w}' not found in data")))?;
        index.push(pos);
    }

    let mut values: Vec<Vec<f64>> = vec![Vec::new(); wanted.len()];
    let mut dropped = 0;
    for (r, rec) in rdr.records().enumerate() {
        // header is line 1
        let line = r + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row: line,
            column: String::new(),
            message: e.to_string(),
        })?;
        let mut row = Vec::with_capacity(wanted.len());
        let mut complete = true;
        for (j, &pos) in index.iter().enumerate() {
            let cell = rec.get(pos).unwrap_or("");
            if is_missing(cell) {
                complete = false;
                break;
            }
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row: line,
                column: wanted[j].clone(),
                message: format!("'{}' is not a number", cell.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    column: wanted[j].clone(),
                    message: format!("non-finite value '{}'", cell.trim()),
                });
            }
            row.push(v);
        }
        if !complete {
            dropped += 1;
            continue;
        }
        for (col, v) in values.iter_mut().zip(row) {
            col.push(v);
        }
    }
    if dropped > 0 {
        log::info!("listwise deletion removed {dropped} incomplete row(s)");
    }

    let zfs_rows = zfs_flag.map(|f| {
        let j = wanted.iter().position(|w| w == f).unwrap();
        values[j]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect::<Vec<_>>()
    });
    let columns: Vec<(String, Vec<f64>)> = wanted
        .into_iter()
        .zip(values)
        .filter(|(name, _)| roles.role_of(name).is_some())
        .collect();
    let dataset = Dataset::new(columns, roles.clone())?;
    Ok(LoadedData {
        dataset,
        zfs_rows,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIX_A: &str = "z,d,y\n0,1,2\n0,0,1\n0,1,2\n1,2,5\n1,1,3\n1,3,7\n";

    fn roles() -> Roles {
        Roles::new("y", "d", &["z"])
    }

    #[test]
    fn fix_a_has_six_rows() {
        let l = load_from_reader(FIX_A.as_bytes(), &roles(), None).unwrap();
        assert_eq!(l.dataset.n_rows(), 6);
        assert_eq!(l.dropped, 0);
    }

    #[test]
    fn missing_cells_drop_the_row() {
        let text = format!("{FIX_A}1,NA,4\n0,,1\n");
        let l = load_from_reader(text.as_bytes(), &roles(), None).unwrap();
        assert_eq!(l.dataset.n_rows(), 6);
        assert_eq!(l.dropped, 2);
    }

    #[test]
    fn missing_column_is_config_error() {
        let err = load_from_reader(FIX_A.as_bytes(), &Roles::new("y", "x", &["z"]), None).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn bad_number_reports_row_and_column() {
        let text = "z,d,y\n0,1,2\n0,abc,1\n";
        match load_from_reader(text.as_bytes(), &roles(), None).unwrap_err() {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "d");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn single_cluster_is_rejected() {
        let text = "z,d,y,g\n0,1,2,1\n0,0,1,1\n1,2,5,1\n1,1,3,1\n";
        let err = load_from_reader(text.as_bytes(), &roles().with_cluster("g"), None).unwrap_err();
        assert!(matches!(err, Error::ClusterCount { found: 1 }));
    }

    #[test]
    fn flag_selects_rows() {
        let text = "z,d,y,f\n0,1,2,0\n0,0,1,1\n1,2,5,1\n1,1,3,0\n";
        let l = load_from_reader(text.as_bytes(), &roles(), Some("f")).unwrap();
        assert_eq!(l.zfs_rows, Some(vec![1, 2]));
    }
}
