//! Operator files.
//!
//! Sampling: a header `m n p`, then `p` lines `i j` with 1-based indices.
//! Gaussian: the single line `m n p seed`, from which the frames are
//! regenerated.

use std::fs;
use std::path::Path;

use super::{GaussianOperator, MeasurementOperator, Operator, SamplingOperator};
use crate::error::{Error, Result};
use crate::linalg::io::{parse_tokens, Lines};

pub fn format_operator(op: &Operator) -> String {
    match op {
        Operator::Gaussian(g) => format!("{} {} {} {}\n", g.rows(), g.cols(), g.len(), g.seed()),
        Operator::Sampling(s) => {
            let mut out = format!("{} {} {}\n", s.rows(), s.cols(), s.len());
            for &(i, j) in s.omega() {
                out.push_str(&format!("{} {}\n", i + 1, j + 1));
            }
            out
        }
    }
}

pub fn parse_operator(text: &str) -> Result<Operator> {
    let mut lines = Lines::new(text);
    let (line_no, header) = lines.next_line()?;
    let head: Vec<u64> = parse_tokens(line_no, header)?;
    match head.as_slice() {
        &[m, n, p, seed] => {
            lines.finish()?;
            Ok(Operator::Gaussian(GaussianOperator::new(
                m as usize, n as usize, p as usize, seed,
            )?))
        }
        &[m, n, p] => {
            let mut omega = Vec::with_capacity(p as usize);
            for _ in 0..p {
                let (line_no, line) = lines.next_line()?;
                let ij: Vec<usize> = parse_tokens(line_no, line)?;
                match ij.as_slice() {
                    &[i, j] if i >= 1 && j >= 1 => omega.push((i - 1, j - 1)),
                    _ => {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "expected a 1-based index pair `i j`".into(),
                        })
                    }
                }
            }
            lines.finish()?;
            Ok(Operator::Sampling(SamplingOperator::new(m as usize, n as usize, omega)?))
        }
        _ => Err(Error::Parse {
            line: line_no,
            message: "operator header must be `m n p` or `m n p seed`".into(),
        }),
    }
}

pub fn read_operator(path: impl AsRef<Path>) -> Result<Operator> {
    parse_operator(&fs::read_to_string(path)?)
}

pub fn write_operator(path: impl AsRef<Path>, op: &Operator) -> Result<()> {
    Ok(fs::write(path, format_operator(op))?)
}
