//! Comma-separated text tables with a fixed header row.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {source}")]
    Csv {
        origin: String,
        #[source]
        source: csv::Error,
    },
    #[error("{origin}: expected header `{expected}`, found `{found}`")]
    Header {
        origin: String,
        expected: String,
        found: String,
    },
}

/// Reads every record of a table, checking that the header matches `columns` exactly.
pub fn read_records<T, R>(reader: R, origin: &str, columns: &[&str]) -> Result<Vec<T>, TableError>
where
    T: DeserializeOwned,
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let csv_err = |source| TableError::Csv {
        origin: origin.to_string(),
        source,
    };
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(columns.iter().copied()) {
        return Err(TableError::Header {
            origin: origin.to_string(),
            expected: columns.join(","),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    rdr.deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn read_file<T: DeserializeOwned>(path: &Path, columns: &[&str]) -> Result<Vec<T>, TableError> {
    let file = File::open(path).map_err(|source| TableError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_records(file, &path.display().to_string(), columns)
}

/// Writes records under the given header. Header columns come from `columns`,
/// not from serde field names, so renamed fields cannot drift from the format.
pub fn write_records<T, W>(writer: W, columns: &[&str], rows: &[T]) -> Result<(), TableError>
where
    T: Serialize,
    W: Write,
{
    let csv_err = |source| TableError::Csv {
        origin: "<output>".to_string(),
        source,
    };
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(columns).map_err(csv_err)?;
    for row in rows {
        wtr.serialize(row).map_err(csv_err)?;
    }
    wtr.flush().map_err(|source| TableError::Io {
        path: PathBuf::from("<output>"),
        source,
    })?;
    Ok(())
}

pub fn write_file<T: Serialize>(path: &Path, columns: &[&str], rows: &[T]) -> Result<(), TableError> {
    let file = File::create(path).map_err(|source| TableError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_records(std::io::BufWriter::new(file), columns, rows)
}

/// Joins ids with `;`, the list separator used inside table cells.
pub fn join_ids<I: IntoIterator<Item = u64>>(ids: I) -> String {
    ids.into_iter().map(|id| id.to_string()).collect::<Vec<_>>().join(";")
}

pub fn split_ids(cell: &str) -> Result<Vec<u64>, std::num::ParseIntError> {
    if cell.trim().is_empty() {
        return Ok(Vec::new());
    }
    cell.split(';').map(|s| s.trim().parse()).collect()
}
