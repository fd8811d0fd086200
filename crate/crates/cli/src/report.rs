//! JSON reports and plot-ready CSV.
//!
//! Reports are one JSON object with a fixed key order. Every float is
//! written with 17 significant digits, so a report pins down the exact
//! binary value of each number.

use std::io::{self, Write};

use coordproj_core::entropy::FittedConstant;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

pub const SCHEMA: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: Map<String, Value>,
    pub seed: u64,
    pub results: Value,
    pub fitted_constants: Vec<Value>,
    pub flags: Vec<String>,
    pub timing_ms: Option<f64>,
    pub curves: Vec<CurvePoint>,
}

/// One `(x, y)` point of a named curve for the CSV side output.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub curve: String,
    pub x: f64,
    pub y: f64,
}

impl Report {
    pub fn new(command: &str, config: Map<String, Value>, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            config,
            seed,
            results: Value::Null,
            fitted_constants: Vec::new(),
            flags: Vec::new(),
            timing_ms: None,
            curves: Vec::new(),
        }
    }

    pub fn flag(&mut self, code: &str) {
        if !self.flags.iter().any(|f| f == code) {
            self.flags.push(code.to_string());
        }
    }

    pub fn constant(&mut self, c: &FittedConstant) {
        self.fitted_constants.push(json!({
            "name": c.name.symbol(),
            "value": c.value,
            "protocol": c.protocol,
            "inputs_digest": c.inputs_digest,
        }));
    }

    pub fn curve(&mut self, curve: &str, x: f64, y: f64) {
        self.curves.push(CurvePoint {
            curve: curve.to_string(),
            x,
            y,
        });
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), json!(SCHEMA));
        m.insert("tool_version".into(), json!(TOOL_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("config".into(), Value::Object(self.config.clone()));
        m.insert("seed".into(), json!(self.seed));
        m.insert("results".into(), self.results.clone());
        m.insert("fitted_constants".into(), Value::Array(self.fitted_constants.clone()));
        m.insert("flags".into(), json!(self.flags));
        m.insert("timing_ms".into(), self.timing_ms.map_or(Value::Null, |t| json!(t)));
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        to_json_string(&self.to_value())
    }

    pub fn curves_csv(&self) -> String {
        let mut out = String::from("curve,x,y\n");
        for p in &self.curves {
            out.push_str(&format!("{},{},{}\n", p.curve, sig17(p.x), sig17(p.y)));
        }
        out
    }
}

/// `v` with 17 significant digits in exponent form; non-finite values
/// become `null`.
pub fn sig17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigs(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Pretty printing with 17-significant-digit floats.
struct SigFigs<'a>(PrettyFormatter<'a>);

impl Formatter for SigFigs<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(sig17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// JSON body of an error report.
pub fn error_json(reason: &str, message: &str) -> String {
    to_json_string(&json!({
        "schema": SCHEMA,
        "tool_version": TOOL_VERSION,
        "error": { "reason": reason, "message": message },
    }))
}
