//! Shared plumbing: CSV writing, table resolution, path suffixing.

use mib_core::betatable::BetaTable;
use mib_core::{Error, Result};
use std::path::{Path, PathBuf};

/// Appends a suffix to a path, keeping the original extension.
pub fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(suffix);
    PathBuf::from(os)
}

/// Opens a CSV writer at the path.
pub fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(from_csv)
}

/// Converts a csv-crate error into the library's error type.
pub fn from_csv(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("csv error: {other:?}")),
    }
}

/// Loads the interpolation table from the flag, falling back to the
/// `BETA_TABLE_PATH` environment variable; load failures name the file and
/// the offending line.
pub fn load_table(flag: Option<&Path>) -> Result<BetaTable> {
    let path = match flag {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os("BETA_TABLE_PATH") {
            Some(v) => PathBuf::from(v),
            None => {
                return Err(Error::domain(
                    "no interpolation table given: pass --table or set BETA_TABLE_PATH",
                ))
            }
        },
    };
    BetaTable::load_from_path(&path).map_err(|e| match e {
        Error::Io(io) => Error::Domain(format!("cannot read table {}: {io}", path.display())),
        Error::Parse(msg) => Error::Parse(format!("table {}: {msg}", path.display())),
        other => other,
    })
}
