//! Row-oriented output with a fixed header, printable as CSV (floats at 17
//! significant digits so runs round-trip bit-exactly) or as a JSON array.

use std::io::Write;

use anyhow::Result;

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
    B(bool),
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, w: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    fn write_csv(&self, w: &mut dyn Write) -> Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, w: &mut dyn Write) -> Result<()> {
        let objects: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.header.iter().zip(row) {
                    obj.insert((*name).to_string(), json_cell(cell));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut *w, &objects)?;
        writeln!(w)?;
        Ok(())
    }
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::F(v) => format!("{v:.16e}"),
        Cell::U(v) => v.to_string(),
        Cell::S(s) => s.clone(),
        Cell::B(b) => b.to_string(),
        Cell::Empty => String::new(),
    }
}

fn json_cell(cell: &Cell) -> serde_json::Value {
    match cell {
        Cell::F(v) => serde_json::json!(v),
        Cell::U(v) => serde_json::json!(v),
        Cell::S(s) => serde_json::json!(s),
        Cell::B(b) => serde_json::json!(b),
        Cell::Empty => serde_json::Value::Null,
    }
}

/// Write to `--out` when given, stdout otherwise.
pub fn emit(table: &Table, format: Format, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            table.write(format, &mut f)
        }
        None => {
            let stdout = std::io::stdout();
            table.write(format, &mut stdout.lock())
        }
    }
}
