//! In-memory result tables and their CSV rendering.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn opt(value: Option<f64>) -> Self {
        value.map_or(Cell::Empty, Cell::Float)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            _ => None,
        }
    }

    fn render(&self, out: &mut String) {
        match self {
            Cell::Empty => {}
            Cell::Int(i) => {
                let _ = write!(out, "{i}");
            }
            // 17 significant digits round-trip every f64.
            Cell::Float(x) => {
                let _ = write!(out, "{x:.16e}");
            }
            Cell::Text(s) => {
                if s.contains([',', '"', '\n', '\r']) {
                    out.push('"');
                    out.push_str(&s.replace('"', "\"\""));
                    out.push('"');
                } else {
                    out.push_str(s);
                }
            }
        }
    }
}

/// A header block, named columns and rows in output order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub provenance: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric view of one column; `None` for empty or text cells.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[idx].as_f64()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.provenance {
            for part in line.lines() {
                out.push_str("# ");
                out.push_str(part);
                out.push('\n');
            }
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}
