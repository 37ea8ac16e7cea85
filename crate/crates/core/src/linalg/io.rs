//! Plain-text matrix formats.
//!
//! Dense: a header line `m n`, then `m` lines of `n` space-separated values.
//! Factored: a header line `m n k`, then `k` blocks of three lines (the
//! weight, the `m` entries of `u`, the `n` entries of `v`).
//! Vectors: one value per line.
//!
//! Values are written with Rust's shortest round-trip formatting, so a write
//! followed by a read reproduces every bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{DenseMatrix, FactoredMatrix, Triplet};
use crate::error::{Error, Result};

pub(crate) struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }

    /// Next non-blank line, with its 1-based line number.
    pub(crate) fn next_line(&mut self) -> Result<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            if !line.trim().is_empty() {
                return Ok((i + 1, line));
            }
        }
        Err(Error::Parse {
            line: 0,
            message: "unexpected end of input".into(),
        })
    }

    pub(crate) fn next_values<T: std::str::FromStr>(&mut self, expected: usize) -> Result<Vec<T>> {
        let (line_no, line) = self.next_line()?;
        let vals = parse_tokens(line_no, line)?;
        if vals.len() != expected {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {expected} values, found {}", vals.len()),
            });
        }
        Ok(vals)
    }

    pub(crate) fn finish(mut self) -> Result<()> {
        match self.next_line() {
            Ok((line, _)) => Err(Error::Parse {
                line,
                message: "trailing content".into(),
            }),
            Err(_) => Ok(()),
        }
    }
}

pub(crate) fn parse_tokens<T: std::str::FromStr>(line_no: usize, line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("cannot parse {tok:?}"),
            })
        })
        .collect()
}

fn join(values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 20);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{v}").unwrap();
    }
    s
}

pub fn format_dense(m: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        out.push_str(&join(m.row(i)));
        out.push('\n');
    }
    out
}

pub fn parse_dense(text: &str) -> Result<DenseMatrix> {
    let mut lines = Lines::new(text);
    let dims: Vec<usize> = lines.next_values(2)?;
    let (m, n) = (dims[0], dims[1]);
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..m {
        data.extend(lines.next_values::<f64>(n)?);
    }
    lines.finish()?;
    DenseMatrix::new(m, n, data)
}

pub fn format_factored(f: &FactoredMatrix) -> String {
    let mut out = format!("{} {} {}\n", f.rows(), f.cols(), f.len());
    for t in f.triplets() {
        writeln!(out, "{}", t.sigma).unwrap();
        out.push_str(&join(&t.u));
        out.push('\n');
        out.push_str(&join(&t.v));
        out.push('\n');
    }
    out
}

pub fn parse_factored(text: &str) -> Result<FactoredMatrix> {
    let mut lines = Lines::new(text);
    let dims: Vec<usize> = lines.next_values(3)?;
    let (m, n, k) = (dims[0], dims[1], dims[2]);
    let mut triplets = Vec::with_capacity(k);
    for _ in 0..k {
        let sigma = lines.next_values::<f64>(1)?[0];
        let u = lines.next_values(m)?;
        let v = lines.next_values(n)?;
        triplets.push(Triplet { sigma, u, v });
    }
    lines.finish()?;
    FactoredMatrix::new(m, n, triplets)
}

pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::with_capacity(v.len() * 20);
    for x in v {
        writeln!(out, "{x}").unwrap();
    }
    out
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = parse_tokens(i + 1, line)?;
        if vals.len() != 1 {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected one value per line".into(),
            });
        }
        out.push(vals[0]);
    }
    Ok(out)
}

pub fn read_dense(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_dense(&fs::read_to_string(path)?)
}

pub fn write_dense(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    Ok(fs::write(path, format_dense(m))?)
}

pub fn read_factored(path: impl AsRef<Path>) -> Result<FactoredMatrix> {
    parse_factored(&fs::read_to_string(path)?)
}

pub fn write_factored(path: impl AsRef<Path>, f: &FactoredMatrix) -> Result<()> {
    Ok(fs::write(path, format_factored(f))?)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    Ok(fs::write(path, format_vector(v))?)
}
