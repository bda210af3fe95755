//! Plain-text matrix (`QMAT 1`) and POVM (`QPOVM 1`) files.
//!
//! Entries are `<re> <im>` pairs in row-major order, written with 17
//! significant digits so that parsing a written file restores every bit.

use std::fmt::Write as _;

use qtime_core::{BipartiteState, ComplexMatrix, C64};

use crate::error::ParseError;

#[derive(Debug, Clone)]
pub enum QmatContent {
    Matrix(ComplexMatrix),
    State(BipartiteState),
}

impl QmatContent {
    pub fn matrix(&self) -> &ComplexMatrix {
        match self {
            QmatContent::Matrix(m) => m,
            QmatContent::State(s) => s.rho(),
        }
    }
}

/// Non-comment lines with their 1-based line numbers.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    tag: &str,
) -> Result<(), ParseError> {
    match lines.next() {
        Some((_, l)) if l.split_whitespace().collect::<Vec<_>>() == [tag, "1"] => Ok(()),
        Some((n, l)) => Err(ParseError::new(n, format!("expected header `{tag} 1`, found `{l}`"))),
        None => Err(ParseError::new(1, format!("empty file, expected header `{tag} 1`"))),
    }
}

fn parse_keyword_pair(line: usize, text: &str, keyword: &str) -> Result<(usize, usize), ParseError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != keyword {
        return Err(ParseError::new(line, format!("expected `{keyword} <a> <b>`, found `{text}`")));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| ParseError::new(line, format!("`{s}` is not a positive integer")))
    };
    Ok((num(parts[1])?, num(parts[2])?))
}

/// Reads `count` complex numbers from the remaining lines.
fn parse_entries<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    count: usize,
    after_line: usize,
) -> Result<Vec<C64>, ParseError> {
    let mut values: Vec<(usize, f64)> = Vec::with_capacity(2 * count);
    let mut first_line = None;
    let mut last_line = after_line;
    for (n, l) in lines {
        first_line.get_or_insert(n);
        last_line = n;
        for tok in l.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| ParseError::new(n, format!("`{tok}` is not a number")))?;
            if !v.is_finite() {
                return Err(ParseError::new(n, format!("non-finite entry `{tok}`")));
            }
            values.push((n, v));
        }
    }
    if values.len() % 2 == 1 {
        return Err(ParseError::new(last_line, "entries must come in `<re> <im>` pairs".to_string()));
    }
    if values.len() != 2 * count {
        return Err(ParseError::new(
            first_line.unwrap_or(after_line),
            format!("expected {count} entries, found {}", values.len() / 2),
        ));
    }
    Ok(values.chunks(2).map(|p| C64::new(p[0].1, p[1].1)).collect())
}

pub fn parse_qmat(text: &str) -> Result<QmatContent, ParseError> {
    let mut lines = significant_lines(text).peekable();
    expect_header(&mut lines, "QMAT")?;
    let (dims_line, dims_text) = lines
        .next()
        .ok_or_else(|| ParseError::new(text.lines().count().max(1), "missing `dims` line".to_string()))?;
    let (rows, cols) = parse_keyword_pair(dims_line, dims_text, "dims")?;
    let mut bipartite = None;
    let mut last = dims_line;
    if let Some(&(n, l)) = lines.peek() {
        if l.starts_with("bipartite") {
            let (d_a, d_b) = parse_keyword_pair(n, l, "bipartite")?;
            if rows != cols || rows != d_a * d_b {
                return Err(ParseError::new(
                    n,
                    format!("bipartite {d_a} {d_b} needs a square {0}x{0} matrix, dims are {rows}x{cols}", d_a * d_b),
                ));
            }
            bipartite = Some((n, d_a, d_b));
            last = n;
            lines.next();
        }
    }
    let data = parse_entries(lines, rows * cols, last)?;
    let m = ComplexMatrix::new(rows, cols, data).expect("entry count checked");
    match bipartite {
        None => Ok(QmatContent::Matrix(m)),
        Some((n, d_a, d_b)) => BipartiteState::new(m, d_a, d_b)
            .map(QmatContent::State)
            .map_err(|e| ParseError::new(n, format!("not a valid bipartite state: {e}"))),
    }
}

fn push_entries(out: &mut String, m: &ComplexMatrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| format!("{:.16e} {:.16e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

pub fn write_qmat(m: &ComplexMatrix, bipartite: Option<(usize, usize)>) -> String {
    let mut out = String::new();
    writeln!(out, "QMAT 1").unwrap();
    writeln!(out, "dims {} {}", m.rows(), m.cols()).unwrap();
    if let Some((d_a, d_b)) = bipartite {
        writeln!(out, "bipartite {d_a} {d_b}").unwrap();
    }
    push_entries(&mut out, m);
    out
}

pub fn write_state(rho: &BipartiteState) -> String {
    write_qmat(rho.rho(), Some(rho.dims()))
}

pub fn parse_qpovm(text: &str) -> Result<Vec<ComplexMatrix>, ParseError> {
    let mut lines = significant_lines(text);
    expect_header(&mut lines, "QPOVM")?;
    let (dims_line, dims_text) = lines
        .next()
        .ok_or_else(|| ParseError::new(text.lines().count().max(1), "missing `dims` line".to_string()))?;
    let (d, k) = parse_keyword_pair(dims_line, dims_text, "dims")?;
    let data = parse_entries(lines, d * d * k, dims_line)?;
    Ok(data
        .chunks(d * d)
        .map(|block| ComplexMatrix::new(d, d, block.to_vec()).expect("block size checked"))
        .collect())
}

pub fn write_qpovm(povm: &[ComplexMatrix]) -> String {
    let d = povm.first().map_or(0, |m| m.rows());
    let mut out = String::new();
    writeln!(out, "QPOVM 1").unwrap();
    writeln!(out, "dims {d} {}", povm.len()).unwrap();
    for (k, m) in povm.iter().enumerate() {
        writeln!(out, "# element {k}").unwrap();
        push_entries(&mut out, m);
    }
    out
}
