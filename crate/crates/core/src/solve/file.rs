//! Text interchange format for QUBO problems (`.qubo.txt`).
//!
//! Line 1 is `n m c` (variable count, coefficient count, constant); then m
//! lines `u v value` with `u <= v`, sorted lexicographically. Values are
//! written with Rust's shortest round-trip decimal formatting, so import
//! followed by export reproduces the file and the coefficients exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

pub fn export_qubo(problem: &QuboProblem) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{} {} {}\n",
        problem.n(),
        problem.coefficients().len(),
        problem.constant()
    ));
    for &(u, v, val) in problem.coefficients() {
        out.push_str(&format!("{u} {v} {val}\n"));
    }
    out
}

pub fn export_qubo_to_path(problem: &QuboProblem, path: &Path) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(export_qubo(problem).as_bytes())?;
    Ok(())
}

pub fn import_qubo(text: &str) -> Result<QuboProblem> {
    let parse_err = |line: usize, message: String| Error::Parse { line, message };
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(1, format!("expected 'n m c', got '{header}'")));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|e| parse_err(1, format!("bad variable count: {e}")))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|e| parse_err(1, format!("bad coefficient count: {e}")))?;
    let constant: f64 = fields[2]
        .parse()
        .map_err(|e| parse_err(1, format!("bad constant: {e}")))?;
    if !constant.is_finite() {
        return Err(parse_err(1, "constant must be finite".into()));
    }

    let mut coefficients = Vec::with_capacity(m);
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if coefficients.len() == m {
            return Err(parse_err(
                line_no,
                format!("more than {m} coefficient lines"),
            ));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected 'u v value', got '{line}'"),
            ));
        }
        let u: u32 = fields[0]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad index: {e}")))?;
        let v: u32 = fields[1]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad index: {e}")))?;
        let value: f64 = fields[2]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad value: {e}")))?;
        if u > v {
            return Err(parse_err(
                line_no,
                format!("lower-triangle entry {u} > {v}"),
            ));
        }
        if v as usize >= n {
            return Err(parse_err(
                line_no,
                format!("index {v} out of range for n = {n}"),
            ));
        }
        if !value.is_finite() {
            return Err(parse_err(line_no, "coefficient must be finite".into()));
        }
        coefficients.push((u, v, value));
    }
    if coefficients.len() != m {
        return Err(parse_err(
            text.lines().count(),
            format!(
                "expected {m} coefficient lines, found {}",
                coefficients.len()
            ),
        ));
    }
    QuboProblem::new(n, coefficients, constant, None)
}

pub fn import_qubo_from_path(path: &Path) -> Result<QuboProblem> {
    let text = fs::read_to_string(path)?;
    import_qubo(&text)
}
