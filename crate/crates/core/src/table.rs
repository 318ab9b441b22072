//! Error-versus-order tables and their CSV, JSON and plain-text forms.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Complex, PrecisionContext};

pub const CSV_HEADER: [&str; 4] = ["order", "value", "abs_error", "ratio"];

/// One row: the partial sum at `order`, its distance to the reference, and
/// `|err(K)|/|err(K-1)|` (empty on the first row or after an exact zero).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorTableRow {
    pub order: usize,
    pub value: String,
    pub abs_error: String,
    pub ratio: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Plain,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "plain" => Ok(OutputFormat::Plain),
            other => Err(Error::Parse(format!(
                "unknown format {other:?}; expected csv, json or plain"
            ))),
        }
    }
}

/// `x` in fixed-point notation with `digits` digits after the point,
/// rounded to nearest.
pub fn fixed_point(x: &Float, digits: u32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let bits = x.prec() + (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16;
    let scale = Integer::from(Integer::u_pow_u(10, digits));
    let scaled = Float::with_val(bits, x * &scale);
    let (mut n, _) = scaled.to_integer_round(rug::float::Round::Nearest).expect("finite");
    let negative = n < 0;
    n.abs_mut();
    let mut text = n.to_string();
    if digits > 0 {
        let width = digits as usize + 1;
        if text.len() < width {
            text = format!("{}{}", "0".repeat(width - text.len()), text);
        }
        text.insert(text.len() - digits as usize, '.');
    }
    if negative && text.chars().any(|c| c != '0' && c != '.') {
        text.insert(0, '-');
    }
    text
}

fn format_value(z: &Complex, digits: u32) -> String {
    if z.is_real() {
        return fixed_point(&z.re, digits);
    }
    let im = fixed_point(&z.im, digits);
    if im.starts_with('-') {
        format!("{}{}i", fixed_point(&z.re, digits), im)
    } else {
        format!("{}+{}i", fixed_point(&z.re, digits), im)
    }
}

/// Rows for `(order, value)` pairs measured against `reference`, printed
/// with `target + guard` fractional digits. Rows are sorted by order.
pub fn build_rows(points: &[(usize, Complex)], reference: &Complex, ctx: &PrecisionContext) -> Vec<ErrorTableRow> {
    let digits = ctx.target_digits() + ctx.guard_digits();
    let mut points: Vec<&(usize, Complex)> = points.iter().collect();
    points.sort_by_key(|p| p.0);
    let mut rows = Vec::with_capacity(points.len());
    let mut previous: Option<Float> = None;
    for (order, value) in points {
        let err = value.sub(reference).abs();
        let ratio = match &previous {
            Some(prev) if !prev.is_zero() => fixed_point(&Float::with_val(err.prec(), &err / prev), digits),
            _ => String::new(),
        };
        rows.push(ErrorTableRow {
            order: *order,
            value: format_value(value, digits),
            abs_error: fixed_point(&err, digits),
            ratio,
        });
        previous = Some(err);
    }
    rows
}

/// Real-valued convenience wrapper around [`build_rows`].
pub fn build_real_rows(points: &[(usize, Float)], reference: &Float, ctx: &PrecisionContext) -> Vec<ErrorTableRow> {
    let complex: Vec<(usize, Complex)> = points
        .iter()
        .map(|(k, v)| (*k, Complex::from_real(v.clone())))
        .collect();
    build_rows(&complex, &Complex::from_real(reference.clone()), ctx)
}

/// Writes `rows` in `format`. CSV always carries the header, so an empty
/// table is header-only.
pub fn write_table<W: Write>(rows: &[ErrorTableRow], format: OutputFormat, out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: "<output>".into(),
        source: e,
    };
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_HEADER).map_err(csv_error)?;
            for row in rows {
                w.serialize(row).map_err(csv_error)?;
            }
            w.flush().map_err(io)?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer(&mut out, rows).map_err(|e| Error::Parse(e.to_string()))?;
            out.write_all(b"\n").map_err(io)?;
        }
        OutputFormat::Plain => {
            let mut out = out;
            out.write_all(plain(rows).as_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

fn plain(rows: &[ErrorTableRow]) -> String {
    let mut widths = CSV_HEADER.map(str::len);
    for r in rows {
        widths[0] = widths[0].max(r.order.to_string().len());
        widths[1] = widths[1].max(r.value.len());
        widths[2] = widths[2].max(r.abs_error.len());
        widths[3] = widths[3].max(r.ratio.len());
    }
    let mut text = String::new();
    let line = |text: &mut String, cells: [&str; 4]| {
        let _ = writeln!(
            text,
            "{:>w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3]
        );
    };
    line(&mut text, CSV_HEADER);
    for r in rows {
        let order = r.order.to_string();
        line(&mut text, [&order, &r.value, &r.abs_error, &r.ratio]);
    }
    text
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(rows: &[ErrorTableRow], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| Error::Io {
                path: p.to_path_buf(),
                source: e,
            })?;
            write_table(rows, format, std::io::BufWriter::new(file)).map_err(|e| match e {
                Error::Io { source, .. } => Error::Io {
                    path: p.to_path_buf(),
                    source,
                },
                other => other,
            })
        }
        None => write_table(rows, format, std::io::stdout().lock()),
    }
}

/// Parses CSV produced by [`write_table`].
pub fn parse_csv(text: &str) -> Result<Vec<ErrorTableRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    reader.deserialize().map(|r| r.map_err(csv_error)).collect()
}
