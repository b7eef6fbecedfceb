//! Pass/fail reports shared by the CLI and the test suites.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

use crate::error::Result;
use crate::grid::TimeGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<TimeGrid>,
    pub inputs: Map<String, Value>,
    pub quantities: Map<String, Value>,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    pub fn with_grid(mut self, grid: TimeGrid) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.inputs.insert(key.to_owned(), to_value(value));
        self
    }

    pub fn quantity(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.quantities.insert(key.to_owned(), to_value(value));
        self
    }

    /// Records `lhs ≤ rhs`. NaN fails.
    pub fn assert_le(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) -> bool {
        let pass = lhs <= rhs;
        self.assertions.push(Assertion { name: name.into(), lhs, rhs, pass });
        pass
    }

    /// Records `lhs > rhs`.
    pub fn assert_gt(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) -> bool {
        let pass = lhs > rhs;
        self.assertions.push(Assertion { name: name.into(), lhs, rhs, pass });
        pass
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }

    /// Appends `other`'s assertions and quantities, keys prefixed by `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for (k, v) in other.quantities {
            self.quantities.insert(format!("{prefix}.{k}"), v);
        }
        for mut a in other.assertions {
            a.name = format!("{prefix}.{}", a.name);
            self.assertions.push(a);
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloat::default());
        self.serialize(&mut ser).expect("report values are always serializable");
        out.push(b'\n');
        out
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "lhs", "rhs", "pass"])?;
        for a in &self.assertions {
            w.write_record([a.name.as_str(), &fmt_f64(a.lhs), &fmt_f64(a.rhs), if a.pass { "true" } else { "false" }])?;
        }
        w.into_inner().map_err(|e| io::Error::other(e.to_string()).into())
    }

    pub fn emit(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report values are always serializable")
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Pretty printer that writes every float as `fmt_f64` does.
#[derive(Default)]
struct FixedFloat<'a>(serde_json::ser::PrettyFormatter<'a>);

impl Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
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

/// Writes any serializable value with the report float format.
pub fn to_json_bytes(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloat::default());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_a_valid_document() {
        let r = Report::new("verify");
        let back: Report = serde_json::from_slice(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.to_csv().unwrap(), b"name,lhs,rhs,pass\n");
    }

    #[test]
    fn one_assertion_one_row() {
        let mut r = Report::new("x");
        r.assert_le("residual", 1e-13, 1e-10);
        let csv = String::from_utf8(r.to_csv().unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 2);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "residual");
        assert_eq!(row[1].parse::<f64>().unwrap(), 1e-13);
        assert_eq!(row[2], "1.0000000000000000e-10");
        assert_eq!(row[3], "true");
        let v: Value = serde_json::from_slice(&r.to_json()).unwrap();
        assert_eq!(v["assertions"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn floats_round_trip_exactly() {
        let mut r = Report::new("x").with_grid(TimeGrid::new(3, 0.1).unwrap());
        r.quantity("third", 1.0 / 3.0).quantity("tiny", 5e-324).quantity("inf", f64::INFINITY);
        r.assert_le("nan", f64::NAN, 1.0);
        assert!(!r.passed());
        let text = String::from_utf8(r.to_json()).unwrap();
        assert!(text.contains("3.3333333333333331e-1"));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["quantities"]["third"].as_f64(), Some(1.0 / 3.0));
        assert_eq!(back["quantities"]["tiny"].as_f64(), Some(5e-324));
        assert!(back["quantities"]["inf"].is_null());
    }
}
