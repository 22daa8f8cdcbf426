//! Report serialization. JSON keys follow struct declaration order, floats carry
//! 17 significant digits, and non-finite floats become `null` in JSON.

use std::io;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Float(v.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// A report that can be written out. Reports without a tabular form only support JSON.
pub trait Report: Serialize {
    fn table(&self) -> Option<Table> {
        None
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format!("{value:.16e}").as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub fn to_csv(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        if row.len() != table.header.len() {
            bail!("row has {} cells, header has {}", row.len(), table.header.len());
        }
        w.write_record(row.iter().map(|c| match c {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }))?;
    }
    Ok(w.into_inner()?)
}

pub fn emit<R: Report + ?Sized>(report: &R, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => match report.table() {
            Some(t) => to_csv(&t),
            None => bail!("this report has no CSV form; use --format json"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Sample {
        b: f64,
        a: Vec<f64>,
        missing: f64,
    }

    impl Report for Sample {}

    #[test]
    fn json_keeps_declaration_order_and_full_precision() {
        let s = Sample { b: 0.1, a: vec![1.0 / 3.0, -2.5e-300], missing: f64::NAN };
        let text = String::from_utf8(to_json(&s).unwrap()).unwrap();
        assert!(text.find("\"b\"").unwrap() < text.find("\"a\"").unwrap());
        assert!(text.contains("1.0000000000000001e-1"));
        assert!(text.contains("\"missing\": null"));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"][0].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(back["a"][1].as_f64().unwrap(), -2.5e-300);
    }

    #[test]
    fn csv_without_rows_is_header_only() {
        let t = Table { header: vec!["alpha", "lambda"], rows: vec![] };
        assert_eq!(to_csv(&t).unwrap(), b"alpha,lambda\n");
    }

    #[test]
    fn csv_cells() {
        let t = Table {
            header: vec!["x", "n", "ok", "label"],
            rows: vec![vec![Cell::from(f64::INFINITY), 3usize.into(), true.into(), "odd".into()]],
        };
        assert_eq!(String::from_utf8(to_csv(&t).unwrap()).unwrap(), "x,n,ok,label\ninf,3,true,odd\n");
    }

    #[test]
    fn json_only_reports_reject_csv() {
        let s = Sample { b: 1.0, a: vec![], missing: 0.0 };
        assert!(emit(&s, Format::Csv).is_err());
    }
}
