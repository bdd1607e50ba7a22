//! Matrix file formats and JSON helpers shared by the reports.
//!
//! Text format: a line holding `n`, then `n` rows of `n` whitespace-separated
//! integers; `n` further rows make it an extended matrix (lower part).
//! Blank lines and `#` comments are ignored.
//!
//! JSON format: `{"n": 2, "b": [[0, 1], [-2, 0]]}` with an optional `"c"`
//! lower part. Entries are JSON integers, or decimal strings for values
//! beyond 64 bits. Writers emit numbers whenever the value fits in `i64`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

use crate::matrix::{ExchangeMatrix, ExtendedMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid matrix: {0}")]
    Matrix(#[from] MatrixError),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> InputError {
    InputError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixInput {
    Plain(ExchangeMatrix),
    Extended(ExtendedMatrix),
}

impl MatrixInput {
    pub fn upper(&self) -> &ExchangeMatrix {
        match self {
            MatrixInput::Plain(b) => b,
            MatrixInput::Extended(e) => e.upper(),
        }
    }

    /// The extended matrix, taking the identity lower part for plain input.
    pub fn extended(&self) -> ExtendedMatrix {
        match self {
            MatrixInput::Plain(b) => b.extended(),
            MatrixInput::Extended(e) => e.clone(),
        }
    }
}

/// Parses either format; JSON is recognized by a leading `{`.
pub fn parse_matrix(text: &str) -> Result<MatrixInput, InputError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

fn parse_text(text: &str) -> Result<MatrixInput, InputError> {
    // (line number, [(column, token)])
    let mut lines: Vec<(usize, Vec<(usize, &str)>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut offset = 0;
        for tok in content.split_whitespace() {
            let start = content[offset..].find(tok).expect("token present") + offset;
            tokens.push((start + 1, tok));
            offset = start + tok.len();
        }
        if !tokens.is_empty() {
            lines.push((idx + 1, tokens));
        }
    }
    let Some((first_line, header)) = lines.first() else {
        return Err(syntax(1, 1, "empty input, expected the rank n"));
    };
    if header.len() != 1 {
        return Err(syntax(*first_line, header[1].0, "first line must hold only the rank n"));
    }
    let (col, tok) = header[0];
    let n: usize = tok
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| syntax(*first_line, col, format!("rank must be a positive integer, got `{tok}`")))?;
    let rows = &lines[1..];
    if rows.len() != n && rows.len() != 2 * n {
        let (line, column) = rows.last().map_or((*first_line, 1), |(l, t)| (*l, t[0].0));
        return Err(syntax(
            line,
            column,
            format!("expected {n} or {} matrix rows, found {}", 2 * n, rows.len()),
        ));
    }
    let mut parsed: Vec<Vec<BigInt>> = Vec::with_capacity(rows.len());
    for (line, tokens) in rows {
        if tokens.len() != n {
            let column = tokens.get(n).map_or(tokens.last().map_or(1, |t| t.0), |t| t.0);
            return Err(syntax(*line, column, format!("expected {n} entries, found {}", tokens.len())));
        }
        let row = tokens
            .iter()
            .map(|&(column, tok)| {
                tok.parse::<BigInt>()
                    .map_err(|_| syntax(*line, column, format!("`{tok}` is not an integer")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        parsed.push(row);
    }
    if parsed.len() == n {
        Ok(MatrixInput::Plain(ExchangeMatrix::from_rows(&parsed)?))
    } else {
        Ok(MatrixInput::Extended(ExtendedMatrix::from_rows(&parsed)?))
    }
}

fn json_location(text: &str, pointer: &str) -> (usize, usize) {
    // best effort: position of the first occurrence of the key
    let needle = format!("\"{pointer}\"");
    match text.find(&needle) {
        Some(pos) => {
            let before = &text[..pos];
            let line = before.matches('\n').count() + 1;
            let column = pos - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            (line, column)
        }
        None => (1, 1),
    }
}

fn json_entry(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(num) => num.as_i64().map(BigInt::from).or_else(|| num.to_string().parse().ok()),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn json_rows(text: &str, doc: &Value, key: &str, n: usize) -> Result<Vec<Vec<BigInt>>, InputError> {
    let (line, column) = json_location(text, key);
    let rows = doc
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| syntax(line, column, format!("`{key}` must be an array of rows")))?;
    if rows.len() != n {
        return Err(syntax(line, column, format!("`{key}` has {} rows, expected {n}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let row = row
                .as_array()
                .filter(|r| r.len() == n)
                .ok_or_else(|| syntax(line, column, format!("`{key}` row {} must hold {n} entries", i + 1)))?;
            row.iter()
                .enumerate()
                .map(|(j, v)| {
                    json_entry(v).ok_or_else(|| {
                        syntax(line, column, format!("`{key}` entry ({}, {}) is not an integer", i + 1, j + 1))
                    })
                })
                .collect()
        })
        .collect()
}

fn parse_json(text: &str) -> Result<MatrixInput, InputError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| syntax(e.line(), e.column(), e.to_string()))?;
    let (line, column) = json_location(text, "n");
    let n = doc
        .get("n")
        .and_then(Value::as_u64)
        .filter(|&n| n > 0)
        .ok_or_else(|| syntax(line, column, "`n` must be a positive integer"))? as usize;
    let b = json_rows(text, &doc, "b", n)?;
    let upper = ExchangeMatrix::from_rows(&b)?;
    if doc.get("c").is_some() {
        let c = json_rows(text, &doc, "c", n)?;
        Ok(MatrixInput::Extended(ExtendedMatrix::new(
            upper,
            c.into_iter().flatten().collect(),
        )?))
    } else {
        Ok(MatrixInput::Plain(upper))
    }
}

fn rows_text(rows: &[Vec<BigInt>]) -> String {
    let mut s = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

pub fn matrix_text(b: &ExchangeMatrix) -> String {
    format!("{}\n{}", b.rank(), rows_text(&b.rows()))
}

pub fn extended_text(c: &ExtendedMatrix) -> String {
    format!("{}\n{}", c.rank(), rows_text(&c.rows()))
}

/// A JSON number when the value fits in `i64`, otherwise a decimal string.
pub fn bigint_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(small) => json!(small),
        None => json!(v.to_string()),
    }
}

fn rows_json(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(bigint_json).collect()))
            .collect(),
    )
}

pub fn matrix_json(b: &ExchangeMatrix) -> Value {
    json!({ "n": b.rank(), "b": rows_json(&b.rows()) })
}

pub fn extended_json(c: &ExtendedMatrix) -> Value {
    let n = c.rank();
    let lower: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| c.lower(i, j).clone()).collect()).collect();
    json!({ "n": n, "b": rows_json(&c.upper().rows()), "c": rows_json(&lower) })
}

pub fn input_json(input: &MatrixInput) -> Value {
    match input {
        MatrixInput::Plain(b) => matrix_json(b),
        MatrixInput::Extended(c) => extended_json(c),
    }
}

/// Mutation word as a 1-based JSON array.
pub fn word_json(word: &[usize]) -> Value {
    Value::Array(word.iter().map(|&k| json!(k + 1)).collect())
}

/// Mutation word as 1-based text, e.g. `(1,2,1)`; `()` for the empty word.
pub fn word_text(word: &[usize]) -> String {
    let parts: Vec<String> = word.iter().map(|k| (k + 1).to_string()).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let b = ExchangeMatrix::rank2(2, 1).unwrap();
        let text = matrix_text(&b);
        assert_eq!(text, "2\n0 1\n-2 0\n");
        assert_eq!(parse_matrix(&text).unwrap(), MatrixInput::Plain(b.clone()));
        let ext = b.extended().mutate(0).unwrap();
        let text = extended_text(&ext);
        assert_eq!(text, "2\n0 -1\n2 0\n-1 1\n0 1\n");
        assert_eq!(parse_matrix(&text).unwrap(), MatrixInput::Extended(ext));
    }

    #[test]
    fn json_round_trip_with_big_entries() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let b = ExchangeMatrix::from_rows(&[vec![BigInt::from(0), big.clone()], vec![-big, BigInt::from(0)]]).unwrap();
        let text = matrix_json(&b).to_string();
        assert!(text.contains("\"123456789012345678901234567890\""));
        assert_eq!(parse_matrix(&text).unwrap(), MatrixInput::Plain(b.clone()));
        let ext = b.extended();
        assert_eq!(parse_matrix(&extended_json(&ext).to_string()).unwrap(), MatrixInput::Extended(ext));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# B_{2,1}\n2\n\n0 1   # first row\n-2 0\n";
        assert_eq!(parse_matrix(text).unwrap().upper(), &ExchangeMatrix::rank2(2, 1).unwrap());
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse_matrix("2\n0 x\n-2 0\n").unwrap_err();
        assert_eq!(e, syntax(2, 3, "`x` is not an integer"));
        let e = parse_matrix("2\n0 1 3\n-2 0\n").unwrap_err();
        assert!(matches!(e, InputError::Syntax { line: 2, column: 5, .. }), "{e}");
        let e = parse_matrix("3\n0 1 0\n").unwrap_err();
        assert!(matches!(e, InputError::Syntax { line: 2, .. }), "{e}");
        let e = parse_matrix("{\"n\": 2, \"b\": [[0, 1], [1, 0]]}").unwrap_err();
        assert!(matches!(e, InputError::Matrix(_)), "{e}");
        let e = parse_matrix("{\"n\": 2,\n \"b\": [[0, 1]]}").unwrap_err();
        assert!(matches!(e, InputError::Syntax { line: 2, column: 2, .. }), "{e}");
        let e = parse_matrix("{\"n\": 2, ").unwrap_err();
        assert!(matches!(e, InputError::Syntax { .. }));
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("0\n").is_err());
    }

    #[test]
    fn words() {
        assert_eq!(word_text(&[0, 1, 0]), "(1,2,1)");
        assert_eq!(word_json(&[]), json!([]));
    }
}
