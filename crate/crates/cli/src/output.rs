//! Tabular reports rendered as JSON or CSV.

use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parameters that produced a result plus one or more result rows.
#[derive(Default)]
pub struct Report {
    params: Map<String, Value>,
    rows: Vec<Map<String, Value>>,
    extra: Map<String, Value>,
}

/// Round to 12 significant digits.
pub fn sig12(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
}

/// Small-denominator fraction equal to `x` within 1e-12, if there is one.
pub fn fraction(x: f64) -> Option<String> {
    let sign = if x < 0.0 { "-" } else { "" };
    let y = x.abs();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = y;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a as i64;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > 100_000 {
            return None;
        }
        if (h2 as f64 / k2 as f64 - y).abs() < 1e-12 {
            return Some(if k2 == 1 { format!("{sign}{h2}") } else { format!("{sign}{h2}/{k2}") });
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac < 1e-15 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

pub struct Row(Map<String, Value>);

impl Row {
    pub fn new() -> Self {
        Row(Map::new())
    }

    pub fn num(mut self, key: &str, x: f64) -> Self {
        self.0.insert(key.into(), sig12(x));
        self
    }

    /// Value from a closed form; also records the exact fraction.
    pub fn exact(mut self, key: &str, x: f64) -> Self {
        self.0.insert(key.into(), sig12(x));
        if let Some(f) = fraction(x) {
            self.0.insert(format!("{key}_exact"), Value::String(f));
        }
        self
    }

    pub fn val(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.0.insert(key.into(), v.into());
        self
    }
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.into(), v.into());
        self
    }

    pub fn row(mut self, row: Row) -> Self {
        self.rows.push(row.0);
        self
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row.0);
    }

    /// Non-tabular attachment; shown in JSON only.
    pub fn extra(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.extra.insert(key.into(), v.into());
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut top = Map::new();
                top.insert("params".into(), Value::Object(self.params.clone()));
                if self.rows.len() == 1 {
                    top.insert("result".into(), Value::Object(self.rows[0].clone()));
                } else {
                    let rows = self.rows.iter().cloned().map(Value::Object).collect();
                    top.insert("results".into(), Value::Array(rows));
                }
                for (k, v) in &self.extra {
                    top.insert(k.clone(), v.clone());
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut keys: Vec<String> = self.params.keys().cloned().collect();
                for row in &self.rows {
                    for k in row.keys() {
                        if !keys.contains(k) {
                            keys.push(k.clone());
                        }
                    }
                }
                let mut out = keys.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = keys
                        .iter()
                        .map(|k| row.get(k).or_else(|| self.params.get(k)).map(csv_cell).unwrap_or_default())
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(fraction(17.0 / 45.0).as_deref(), Some("17/45"));
        assert_eq!(fraction(-2.0 / 35.0).as_deref(), Some("-2/35"));
        assert_eq!(fraction(0.0).as_deref(), Some("0"));
        assert_eq!(fraction(std::f64::consts::PI), None);
    }

    #[test]
    fn rounding() {
        assert_eq!(sig12(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(sig12(-0.0).to_string(), "0.0");
    }

    #[test]
    fn csv_layout() {
        let r = Report::new()
            .param("d", 2)
            .row(Row::new().num("x", 0.5))
            .row(Row::new().num("x", 0.25));
        assert_eq!(r.render(Format::Csv), "d,x\n2,0.5\n2,0.25\n");
    }
}
