//! Key/value reports and their `records` and `text` renderings.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Vector(Vec<f64>),
    /// Row-major.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    entries: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Records,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, value: Value) {
        self.entries.insert(key.into(), value);
    }

    pub fn num(&mut self, key: impl Into<String>, x: f64) {
        self.insert(key, Value::Num(x));
    }

    pub fn int(&mut self, key: impl Into<String>, x: usize) {
        self.insert(key, Value::Int(x as i64));
    }

    pub fn flag(&mut self, key: impl Into<String>, x: bool) {
        self.insert(key, Value::Bool(x));
    }

    pub fn text(&mut self, key: impl Into<String>, x: impl Into<String>) {
        self.insert(key, Value::Text(x.into()));
    }

    pub fn vector(&mut self, key: impl Into<String>, v: &DVector<f64>) {
        self.insert(key, Value::Vector(v.iter().copied().collect()));
    }

    pub fn matrix(&mut self, key: impl Into<String>, m: &DMatrix<f64>) {
        let rows = (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect();
        self.insert(key, Value::Matrix(rows));
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.entries.iter()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Records => emit_records(self),
            Format::Text => emit_text(self),
        }
    }
}

/// `digits` significant digits; fixed notation for decimal exponents in
/// `[-5, 16)`, scientific otherwise. Negative zero prints as zero.
pub fn format_number(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..16).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn render_value(v: &Value, digits: usize) -> String {
    let join = |xs: &[f64]| {
        let parts: Vec<String> = xs.iter().map(|&x| format_number(x, digits)).collect();
        format!("[{}]", parts.join(", "))
    };
    match v {
        Value::Num(x) => format_number(*x, digits),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) => format!("\"{s}\""),
        Value::Vector(xs) => join(xs),
        Value::Matrix(rows) => {
            let parts: Vec<String> = rows.iter().map(|r| join(r)).collect();
            format!("[{}]", parts.join("; "))
        }
    }
}

/// One `key = value` line per record, in sorted key order.
pub fn emit_records(r: &Report) -> String {
    r.iter()
        .map(|(k, v)| format!("{k} = {}\n", render_value(v, 17)))
        .collect()
}

/// Aligned two-column table; matrices continue on following lines.
pub fn emit_text(r: &Report) -> String {
    let width = r.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in r.iter() {
        match v {
            Value::Matrix(rows) if !rows.is_empty() => {
                for (i, row) in rows.iter().enumerate() {
                    let key = if i == 0 { k.as_str() } else { "" };
                    let cells: Vec<String> = row.iter().map(|&x| format!("{:>17}", format_number(x, 10))).collect();
                    out.push_str(&format!("{key:<width$}  [{}]\n", cells.join(" ")));
                }
            }
            Value::Text(s) => out.push_str(&format!("{k:<width$}  {s}\n")),
            _ => out.push_str(&format!("{k:<width$}  {}\n", render_value(v, 10))),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("E_RECORDS line {line}: {message}")]
pub struct RecordsError {
    pub line: usize,
    pub message: String,
}

fn parse_num(s: &str, line: usize) -> Result<f64, RecordsError> {
    s.trim().parse::<f64>().map_err(|_| RecordsError {
        line,
        message: format!("invalid number `{}`", s.trim()),
    })
}

fn parse_list(s: &str, line: usize) -> Result<Vec<f64>, RecordsError> {
    let inner = s.trim();
    let inner = inner
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| RecordsError {
            line,
            message: format!("expected `[..]`, got `{inner}`"),
        })?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|t| parse_num(t, line)).collect()
}

fn parse_value(s: &str, line: usize) -> Result<Value, RecordsError> {
    let s = s.trim();
    if let Some(body) = s.strip_prefix("[[") {
        let body = body.strip_suffix("]]").ok_or_else(|| RecordsError {
            line,
            message: "unterminated matrix".into(),
        })?;
        let rows = body
            .split(';')
            .map(|r| {
                let r = r.trim().trim_start_matches('[').trim_end_matches(']');
                parse_list(&format!("[{r}]"), line)
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Value::Matrix(rows));
    }
    if s.starts_with('[') {
        return Ok(Value::Vector(parse_list(s, line)?));
    }
    if let Some(t) = s.strip_prefix('"').and_then(|x| x.strip_suffix('"')) {
        return Ok(Value::Text(t.into()));
    }
    match s {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    if let Ok(i) = s.parse::<i64>() {
        return Ok(Value::Int(i));
    }
    Ok(Value::Num(parse_num(s, line)?))
}

/// Parses the `records` rendering back into a report.
pub fn parse_records(text: &str) -> Result<Report, RecordsError> {
    let mut r = Report::new();
    for (i, l) in text.lines().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let (k, v) = l.split_once(" = ").ok_or_else(|| RecordsError {
            line: i + 1,
            message: "expected `key = value`".into(),
        })?;
        r.insert(k.trim(), parse_value(v, i + 1)?);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_number(-6.0, 17), "-6.0000000000000000");
        assert_eq!(format_number(0.0, 17), "0.0000000000000000");
        assert_eq!(format_number(-0.0, 17), "0.0000000000000000");
        assert_eq!(format_number(0.5, 17), "0.50000000000000000");
        assert_eq!(format_number(2f64.powi(-24), 17), "5.9604644775390625e-8");
        assert_eq!(format_number(1e20, 17), "1.0000000000000000e20");
        assert_eq!(format_number(123.0, 17), "123.00000000000000");
        assert_eq!(format_number(9.999999999999999999, 17), "10.000000000000000");
    }

    #[test]
    fn empty_report_renders_nothing() {
        let r = Report::new();
        assert_eq!(r.render(Format::Records), "");
        assert_eq!(r.render(Format::Text), "");
    }

    #[test]
    fn records_are_sorted_and_round_trip() {
        let mut r = Report::new();
        r.num("ricci.scalar", -6.0);
        r.text("aa.case", "NoWE");
        r.flag("b", true);
        r.int("count", 3);
        r.vector("v", &DVector::from_vec(vec![1.0 / 3.0, -2e-9]));
        r.matrix("m", &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.5]));
        let text = emit_records(&r);
        assert!(text.starts_with("aa.case = \"NoWE\"\nb = true\ncount = 3\n"));
        assert!(text.contains("m = [[1.0000000000000000, 2.0000000000000000]; [3.0000000000000000, 4.5000000000000000]]"));
        assert_eq!(parse_records(&text).unwrap(), r);
    }
}
