//! The `{version, inputs, outputs}` JSON envelope and unit-labelled CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<I, O> {
    pub version: String,
    pub inputs: I,
    pub outputs: O,
}

impl<I: Serialize, O: Serialize> Envelope<I, O> {
    pub fn new(inputs: I, outputs: O) -> Self {
        Self { version: VERSION.to_string(), inputs, outputs }
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)
    }
}

/// A CSV column: name plus unit, rendered as `name[unit]` in the header.
#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

/// Writes a one-line header and numeric rows. Values use the shortest
/// representation that parses back to the same `f64`.
pub struct CsvTable<W: Write> {
    writer: csv::Writer<W>,
    width: usize,
}

impl<W: Write> CsvTable<W> {
    pub fn new(w: W, columns: &[Column]) -> csv::Result<Self> {
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)))?;
        Ok(Self { writer, width: columns.len() })
    }

    pub fn row(&mut self, values: &[f64]) -> csv::Result<()> {
        debug_assert_eq!(values.len(), self.width);
        self.writer.write_record(values.iter().map(|v| format_value(*v)))
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.writer.flush()
    }
}

/// Shortest round-tripping form; exponent notation outside `[1e-4, 1e15)`.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

/// Splits a `name[unit]` header cell.
pub fn parse_header_cell(cell: &str) -> Option<(&str, &str)> {
    let open = cell.find('[')?;
    let unit = cell[open + 1..].strip_suffix(']')?;
    Some((&cell[..open], unit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_has_three_keys() {
        let mut buf = Vec::new();
        Envelope::new(serde_json::json!({"delta": 0.25}), serde_json::json!({"x": 1})).write(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let obj = v.as_object().unwrap();
        assert_eq!(obj.len(), 3);
        assert_eq!(obj["version"], VERSION);
        assert_eq!(obj["inputs"]["delta"], 0.25);
    }

    #[test]
    fn csv_header_names_units_and_values_round_trip() {
        let mut buf = Vec::new();
        let mut t = CsvTable::new(&mut buf, &[col("x", "1"), col("p", "probability")]).unwrap();
        let x = 0.1 + 0.2;
        t.row(&[x, 1e-300]).unwrap();
        t.row(&[-2.5e17, 7.695626617128751e-24]).unwrap();
        t.finish().unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header: Vec<_> = lines.next().unwrap().split(',').collect();
        assert_eq!(parse_header_cell(header[1]), Some(("p", "probability")));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row[0].to_bits(), x.to_bits());
        assert_eq!(row[1], 1e-300);
        assert_eq!(lines.next().unwrap(), "-2.5e17,7.695626617128751e-24");
    }
}
