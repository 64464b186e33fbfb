// SPDX-License-Identifier: MIT OR Apache-2.0

//! Deterministic CSV rendering: comma-separated, header row, decimal point,
//! ten significant digits, LF line endings. Identical inputs produce
//! byte-identical files on every platform and worker count.

/// Formats a float with ten significant digits, trimming trailing zeros.
pub fn sig10(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..=9).contains(&exp) {
        let s = format!("{:.9e}", v);
        return trim_exponential(&s);
    }
    let decimals = (9 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, v);
    trim_decimal(&s)
}

fn trim_decimal(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}

fn trim_exponential(s: &str) -> String {
    match s.split_once('e') {
        Some((mantissa, exp)) => format!("{}e{}", trim_decimal(mantissa), exp),
        None => s.to_string(),
    }
}

/// Column-checked CSV accumulator.
pub struct CsvBuilder {
    buf: String,
    columns: usize,
}

impl CsvBuilder {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "row width mismatch");
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
