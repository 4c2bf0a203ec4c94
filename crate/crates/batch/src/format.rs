//! Text serialization of chain tables.
//!
//! CSV and JSON floats use the shortest representation that parses back to
//! the same double. Plain text rounds to eight significant digits.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::BatchError;
use crate::table::{ChainTable, Column};
use vol_core::{OptionFlag, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Plain,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "plain" | "text" => Ok(Format::Plain),
            other => Err(format!("unknown format {other:?} (expected csv, json or plain)")),
        }
    }
}

/// Shortest round-trip rendering, switching to exponent form far from unity.
pub fn format_real(v: f64) -> String {
    let a = v.abs();
    if !v.is_finite() || a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Eight significant digits, positional unless the exponent is extreme.
pub fn format_plain(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{v:.7e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..16).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = mantissa.strip_prefix('-').map_or(("", mantissa), |m| ("-", m));
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let point = exp as usize + 1;
        if point >= digits.len() {
            format!("{digits}{}", "0".repeat(point - digits.len()))
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    };
    format!("{sign}{body}")
}

fn cell(column: &Column, i: usize, real: fn(f64) -> String) -> String {
    match column {
        Column::Flag(v) => v[i].to_string(),
        Column::Real(v) => real(v[i]),
        Column::Status(v) => v[i].as_str().to_owned(),
    }
}

pub fn format_output(table: &ChainTable, format: Format) -> String {
    match format {
        Format::Csv => to_csv(table),
        Format::Json => to_json(table),
        Format::Plain => to_plain(table),
    }
}

fn to_csv(table: &ChainTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, rec: Vec<String>| w.write_record(rec).expect("in-memory write");
    write(&mut w, table.names().map(str::to_owned).collect());
    for i in 0..table.len() {
        write(&mut w, table.columns().map(|(_, c)| cell(c, i, format_real)).collect());
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

fn to_json(table: &ChainTable) -> String {
    let mut out = String::from("{");
    for (k, (name, column)) in table.columns().enumerate() {
        if k > 0 {
            out.push(',');
        }
        let values = match column {
            Column::Flag(v) => serde_json::to_string(&v.iter().map(|f| f.to_string()).collect::<Vec<_>>()),
            Column::Real(v) => serde_json::to_string(v),
            Column::Status(v) => serde_json::to_string(&v.iter().map(|s| s.as_str()).collect::<Vec<_>>()),
        };
        let key = serde_json::to_string(name).expect("string key");
        write!(out, "{key}:{}", values.expect("plain values")).expect("string write");
    }
    out.push_str("}\n");
    out
}

fn to_plain(table: &ChainTable) -> String {
    let header: Vec<String> = table.names().map(str::to_owned).collect();
    let rows: Vec<Vec<String>> =
        (0..table.len()).map(|i| table.columns().map(|(_, c)| cell(c, i, format_plain)).collect()).collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|j| rows.iter().map(|r| r[j].len()).chain([header[j].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:>w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Reads a CSV table. A `flag` column holds `c`/`p`, a `status` column holds
/// solver statuses, every other column is numeric.
pub fn parse_csv(text: &str) -> Result<ChainTable, BatchError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let parse_err = |index: usize, column: &str, detail: String| BatchError::Parse { index, column: column.to_owned(), detail };
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(0, "header", e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(parse_err(0, "header", "missing header row".into()));
    }
    if let Some(dup) = header.iter().enumerate().find_map(|(i, h)| header[..i].contains(h).then_some(h)) {
        return Err(parse_err(0, dup, "duplicate column".into()));
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(index, "record", e.to_string()))?;
        for (j, field) in record.iter().enumerate() {
            cells[j].push(field.to_owned());
        }
    }

    let n = cells.first().map_or(0, Vec::len);
    let mut table = ChainTable::new(n);
    for (name, raw) in header.iter().zip(cells) {
        let column = match name.as_str() {
            "flag" => Column::Flag(parse_cells::<OptionFlag>(name, &raw)?),
            "status" => Column::Status(parse_cells::<SolveStatus>(name, &raw)?),
            _ => Column::Real(parse_cells::<f64>(name, &raw)?),
        };
        table.insert(name, column)?;
    }
    Ok(table)
}

fn parse_cells<T: FromStr>(name: &str, raw: &[String]) -> Result<Vec<T>, BatchError> {
    raw.iter()
        .enumerate()
        .map(|(index, s)| {
            s.parse().map_err(|_| {
                if name == "flag" {
                    BatchError::BadFlag { index, token: s.clone() }
                } else {
                    BatchError::Parse { index, column: name.to_owned(), detail: format!("cannot parse {s:?}") }
                }
            })
        })
        .collect()
}
