//! CSV writing. Floats use 17 significant digits so values round-trip.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

/// A CSV cell.
pub enum Cell {
    Float(f64),
    Int(u64),
    Flag(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

fn format_cell(out: &mut String, cell: &Cell) {
    match cell {
        Cell::Float(v) => write!(out, "{v:.16e}"),
        Cell::Int(v) => write!(out, "{v}"),
        Cell::Flag(v) => write!(out, "{}", u8::from(*v)),
        Cell::Empty => Ok(()),
    }
    .expect("writing to a String");
}

/// Renders a header line and rows.
pub fn render(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            format_cell(&mut out, cell);
        }
        out.push('\n');
    }
    out
}

/// Writes `dir/name`, creating `dir` if needed.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> Result<PathBuf, CliError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let path = dir.join(name);
    std::fs::write(&path, render(header, rows)).map_err(io(&path))?;
    log::info!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(path)
}
