use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::BipartiteNetwork;

/// Parses headerless comma-separated rows of nonnegative decimals.
pub fn parse_matrix(text: &str) -> Result<BipartiteNetwork> {
    let mut lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(Error::Parse { row: 1, col: 1, msg: "empty matrix".into() });
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let mut row = Vec::new();
        for (j, field) in line.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                row: i + 1,
                col: j + 1,
                msg: format!("'{field}' is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse { row: i + 1, col: j + 1, msg: format!("'{field}' is not finite") });
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry { row: i + 1, col: j + 1, value });
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Ragged { row: i + 1, found: row.len(), expected: first.len() });
            }
        }
        rows.push(row);
    }
    BipartiteNetwork::from_rows(&rows)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<BipartiteNetwork> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_matrix(&text)
}

/// Shortest round-trip decimal rendering of every weight.
pub fn render_matrix(y: &BipartiteNetwork) -> String {
    let mut out = String::with_capacity(y.rows() * y.cols() * 3);
    for row in y.iter_rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn save_matrix(y: &BipartiteNetwork, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_matrix(y)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
