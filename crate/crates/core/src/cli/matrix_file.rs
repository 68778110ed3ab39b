use std::path::Path;

use serde_json::Value;

use crate::circle::FourierSymbol;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

/// A complex literal such as `3`, `-0.5`, `2i`, `1-2.5i` or `(1+2i)`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let sym: FourierSymbol = text.parse()?;
    if sym.is_zero() {
        return Ok(ZERO);
    }
    match sym.as_monomial() {
        Some((0, c)) => Ok(c),
        _ => Err(Error::Parse(format!("`{text}` is not a complex number"))),
    }
}

fn json_entry(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(|x| C64::new(x, 0.0))
            .ok_or_else(|| Error::Parse(format!("{n} is not a finite number"))),
        Value::String(s) => parse_complex(s),
        Value::Array(pair) if pair.len() == 2 => match (pair[0].as_f64(), pair[1].as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(Error::Parse(format!("{v} is not a [re, im] pair"))),
        },
        _ => Err(Error::Parse(format!("{v} is not a matrix entry"))),
    }
}

/// Matrix from JSON text: an array of rows, or `{"rows": [...]}`. Entries are
/// numbers, `[re, im]` pairs or complex literals.
pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let value: Value = serde_json::from_str(text)?;
    let rows = match &value {
        Value::Array(rows) => rows,
        Value::Object(map) => match map.get("rows") {
            Some(Value::Array(rows)) if map.len() == 1 => rows,
            _ => return Err(Error::Parse("expected an object with a single `rows` array".into())),
        },
        _ => return Err(Error::Parse("expected an array of rows".into())),
    };
    let rows = rows
        .iter()
        .map(|r| match r {
            Value::Array(entries) => entries.iter().map(json_entry).collect::<Result<Vec<_>>>(),
            _ => Err(Error::Parse(format!("row {r} is not an array"))),
        })
        .collect::<Result<Vec<_>>>()?;
    CMatrix::from_rows(&rows)
}

/// Matrix from CSV text without a header row; every cell is a complex literal.
pub fn matrix_from_csv(text: &str) -> Result<CMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let rows = reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::Parse(format!("csv: {e}")))?;
            rec.iter().map(parse_complex).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CMatrix::from_rows(&rows)
}

/// Reads a matrix file; JSON is recognised by a leading `[` or `{`, anything
/// else is parsed as CSV.
pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path)?;
    let m = if text.trim_start().starts_with(['[', '{']) {
        matrix_from_json(&text)?
    } else {
        matrix_from_csv(&text)?
    };
    if m.is_empty() {
        return Err(Error::invalid(format!("`{}` holds an empty matrix", path.display())));
    }
    Ok(m)
}
