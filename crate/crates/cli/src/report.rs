//! Tabular results and their CSV and JSON encodings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// One table cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Flag(bool),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Missing
        }
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(i64::from(x))
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Flag(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Num(x) => Some(x),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.11e}"),
            Cell::Flag(b) => b.to_string(),
            Cell::Text(s) => quote(s),
            Cell::Missing => String::new(),
        }
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }
}

/// Everything one command produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            tables: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// A single table is written as plain CSV. Several tables are written in
    /// long form, one `table,row,column,value` line per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let [only] = self.tables.as_slice() {
            let header: Vec<String> = only.columns.iter().map(|c| quote(c)).collect();
            let _ = writeln!(out, "{}", header.join(","));
            for row in &only.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
            return out;
        }
        out.push_str("table,row,column,value\n");
        for t in &self.tables {
            for (i, row) in t.rows.iter().enumerate() {
                for (col, cell) in t.columns.iter().zip(row) {
                    let _ = writeln!(out, "{},{},{},{}", quote(&t.name), i, quote(col), cell.csv());
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new("demo", &["n", "x", "ok", "label"]);
        t.push(vec![9u32.into(), 1.847e-6.into(), true.into(), "a,b".into()]);
        t.push(vec![3u32.into(), f64::NAN.into(), false.into(), Cell::Missing]);
        let mut r = Report::new("demo");
        r.tables.push(t);
        r
    }

    #[test]
    fn csv_uses_twelve_significant_digits() {
        let csv = sample().to_csv();
        assert_eq!(csv, "n,x,ok,label\n9,1.84700000000e-6,true,\"a,b\"\n3,,false,\n");
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn long_form_for_several_tables() {
        let mut r = sample();
        let mut t = Table::new("other", &["v"]);
        t.push(vec![0.5.into()]);
        r.tables.push(t);
        let csv = r.to_csv();
        assert!(csv.starts_with("table,row,column,value\ndemo,0,n,9\n"));
        assert!(csv.ends_with("other,0,v,5.00000000000e-1\n"));
    }
}
