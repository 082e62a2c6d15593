//! The QGATE text format.
//!
//! ```text
//! qgate 1
//! dims: 2 2 2
//! kind: diagonal
//! 1,0 1,0 1,0 1,0 1,0 1,0 1,0 -1,0
//! ```
//!
//! A `dense` file carries one line per matrix row, each holding the row's
//! entries as `re,im` tokens. A `diagonal` file carries a single line with
//! the diagonal. `#` starts a comment; blank lines are ignored.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{CMatrix, Operator};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Dense,
    Diagonal,
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dense" => Ok(Kind::Dense),
            "diagonal" => Ok(Kind::Diagonal),
            other => Err(format!("unknown kind '{other}'")),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_entry(tok: &str, line: usize) -> Result<Complex64> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| parse_err(line, format!("entry '{tok}' is not of the form re,im")))?;
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| parse_err(line, format!("bad number '{s}' in entry '{tok}'")))
    };
    Ok(Complex64::new(num(re)?, num(im)?))
}

/// Parses QGATE text into an operator.
pub fn parse(text: &str) -> Result<Operator> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty file"))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("qgate") || head.next() != Some("1") || head.next().is_some() {
        return Err(parse_err(
            ln,
            format!("expected 'qgate 1', found '{header}'"),
        ));
    }

    let mut field = |name: &str| -> Result<(usize, String)> {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("missing '{name}:' line")))?;
        let (key, value) = l
            .split_once(':')
            .ok_or_else(|| parse_err(ln, format!("expected '{name}: ...'")))?;
        if key.trim() != name {
            return Err(parse_err(ln, format!("expected '{name}:', found '{key}:'")));
        }
        Ok((ln, value.trim().to_string()))
    };

    let (dims_ln, dims_str) = field("dims")?;
    let dims = dims_str
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| parse_err(dims_ln, format!("bad dimension '{t}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(parse_err(
            dims_ln,
            "every local dimension must be at least 2",
        ));
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&t| t <= crate::tensor::MAX_TOTAL_DIM)
        .ok_or_else(|| parse_err(dims_ln, "total dimension too large"))?;

    let (kind_ln, kind_str) = field("kind")?;
    let kind: Kind = kind_str
        .parse()
        .map_err(|m: String| parse_err(kind_ln, m))?;

    let rows: Vec<(usize, Vec<Complex64>)> = lines
        .map(|(ln, l)| {
            l.split_whitespace()
                .map(|tok| parse_entry(tok, ln))
                .collect::<Result<Vec<_>>>()
                .map(|v| (ln, v))
        })
        .collect::<Result<_>>()?;

    let matrix = match kind {
        Kind::Diagonal => {
            let [(ln, diag)] = rows.as_slice() else {
                return Err(parse_err(
                    rows.get(1).map_or(kind_ln, |r| r.0),
                    format!(
                        "diagonal kind needs exactly one data line, found {}",
                        rows.len()
                    ),
                ));
            };
            if diag.len() != total {
                return Err(parse_err(
                    *ln,
                    format!("expected {total} diagonal entries, found {}", diag.len()),
                ));
            }
            CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag))
        }
        Kind::Dense => {
            if rows.len() != total {
                return Err(parse_err(
                    rows.last().map_or(kind_ln, |r| r.0),
                    format!("expected {total} rows, found {}", rows.len()),
                ));
            }
            for (ln, row) in &rows {
                if row.len() != total {
                    return Err(parse_err(
                        *ln,
                        format!("expected {total} entries in row, found {}", row.len()),
                    ));
                }
            }
            CMatrix::from_fn(total, total, |r, c| rows[r].1[c])
        }
    };
    Operator::new(dims, matrix)
}

pub fn read(path: impl AsRef<Path>) -> Result<Operator> {
    parse(&std::fs::read_to_string(path)?)
}

fn entry(z: Complex64) -> String {
    // shortest round-trip representation
    format!("{:?},{:?}", z.re, z.im)
}

/// Serializes `op`; exactly diagonal operators use the `diagonal` kind.
pub fn to_string(op: &Operator) -> String {
    let kind = if op.off_diagonal_max() == 0.0 {
        Kind::Diagonal
    } else {
        Kind::Dense
    };
    to_string_as(op, kind)
}

pub fn to_string_as(op: &Operator, kind: Kind) -> String {
    let mut out = String::from("qgate 1\n");
    let dims: Vec<String> = op.dims().iter().map(usize::to_string).collect();
    let _ = writeln!(out, "dims: {}", dims.join(" "));
    let m = op.matrix();
    match kind {
        Kind::Diagonal => {
            out.push_str("kind: diagonal\n");
            let diag: Vec<String> = m.diagonal().iter().map(|&z| entry(z)).collect();
            out.push_str(&diag.join(" "));
            out.push('\n');
        }
        Kind::Dense => {
            out.push_str("kind: dense\n");
            for row in m.row_iter() {
                let row: Vec<String> = row.iter().map(|&z| entry(z)).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
    }
    out
}

pub fn write(path: impl AsRef<Path>, op: &Operator) -> Result<()> {
    std::fs::write(path, to_string(op))?;
    Ok(())
}
