//! Plain-text matrix and vector files.
//!
//! Matrix: a header line `m n`, then `m` lines of `n` whitespace-separated
//! numbers. Vector: a header line `n`, then `n` numbers separated by any
//! whitespace, newlines included. NaN and infinities are rejected.

use std::io::{BufRead, Write};

use super::{Matrix, Vector};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_count(token: &str, line: usize, what: &str) -> Result<usize> {
    match token.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(parse_err(
            line,
            format!("{what} must be a positive integer, got `{token}`"),
        )),
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("`{token}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value `{token}`")));
    }
    Ok(v)
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines<R: BufRead>(reader: R) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

pub fn read_matrix<R: BufRead>(reader: R) -> Result<Matrix> {
    let lines = content_lines(reader)?;
    let (header_no, header) = lines
        .first()
        .ok_or_else(|| parse_err(1, "empty matrix file"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(*header_no, "matrix header must be `m n`"));
    }
    let m = parse_count(dims[0], *header_no, "row count")?;
    let n = parse_count(dims[1], *header_no, "column count")?;
    let rows = &lines[1..];
    if rows.len() != m {
        let line = rows.last().map_or(*header_no, |(l, _)| *l);
        return Err(parse_err(
            line,
            format!("expected {m} matrix rows, found {}", rows.len()),
        ));
    }
    let mut entries = Vec::with_capacity(m * n);
    for (line_no, line) in rows {
        let before = entries.len();
        for token in line.split_whitespace() {
            entries.push(parse_value(token, *line_no)?);
        }
        let got = entries.len() - before;
        if got != n {
            return Err(parse_err(
                *line_no,
                format!("expected {n} values, found {got}"),
            ));
        }
    }
    Matrix::from_row_major(m, n, &entries)
}

pub fn read_vector<R: BufRead>(reader: R) -> Result<Vector> {
    let lines = content_lines(reader)?;
    let (header_no, header) = lines
        .first()
        .ok_or_else(|| parse_err(1, "empty vector file"))?;
    let mut head = header.split_whitespace();
    let n = parse_count(head.next().unwrap_or(""), *header_no, "vector length")?;
    if head.next().is_some() {
        return Err(parse_err(
            *header_no,
            "vector header must contain only the length",
        ));
    }
    let mut values = Vec::with_capacity(n);
    let mut last_line = *header_no;
    for (line_no, line) in &lines[1..] {
        last_line = *line_no;
        for token in line.split_whitespace() {
            if values.len() == n {
                return Err(parse_err(*line_no, format!("more than {n} values")));
            }
            values.push(parse_value(token, *line_no)?);
        }
    }
    if values.len() != n {
        return Err(parse_err(
            last_line,
            format!("expected {n} values, found {}", values.len()),
        ));
    }
    Ok(Vector::from_vec(values))
}

/// Writes `a` in the matrix file format with round-trip precision.
pub fn write_matrix<W: Write>(mut w: W, a: &Matrix) -> Result<()> {
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    let data = a.as_dmatrix();
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| data[(i, j)].to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Writes `v` as a header line followed by one value per line.
pub fn write_vector<W: Write>(mut w: W, v: &Vector) -> Result<()> {
    writeln!(w, "{}", v.len())?;
    for x in v.iter() {
        writeln!(w, "{x}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_line(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn reads_matrix() {
        let a = read_matrix("2 3\n1 2 3\n4 5 6\n".as_bytes()).unwrap();
        assert_eq!(a.rows(), 2);
        assert_eq!(a.as_dmatrix()[(1, 2)], 6.0);
    }

    #[test]
    fn matrix_errors_carry_line_numbers() {
        assert_eq!(
            parse_line(read_matrix("2 2\n1 2\n3\n".as_bytes()).unwrap_err()),
            3
        );
        assert_eq!(
            parse_line(read_matrix("2 2\n1 2\n3 NaN\n".as_bytes()).unwrap_err()),
            3
        );
        assert_eq!(
            parse_line(read_matrix("2 2\n1 inf\n3 4\n".as_bytes()).unwrap_err()),
            2
        );
        assert_eq!(
            parse_line(read_matrix("2\n1 2\n".as_bytes()).unwrap_err()),
            1
        );
        assert_eq!(parse_line(read_matrix("0 2\n".as_bytes()).unwrap_err()), 1);
        assert_eq!(
            parse_line(read_matrix("2 2\n1 x\n3 4\n".as_bytes()).unwrap_err()),
            2
        );
        assert!(read_matrix("2 2\n1 2\n".as_bytes()).is_err());
    }

    #[test]
    fn reads_vector_across_lines() {
        let v = read_vector("4\n1 2\n3\n\n4\n".as_bytes()).unwrap();
        assert_eq!(v, Vector::from_column_slice(&[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(
            parse_line(read_vector("2\n1 2 3\n".as_bytes()).unwrap_err()),
            2
        );
        assert_eq!(
            parse_line(read_vector("3\n1\n2\n".as_bytes()).unwrap_err()),
            3
        );
        assert_eq!(
            parse_line(read_vector("2\n1\n-inf\n".as_bytes()).unwrap_err()),
            3
        );
    }

    #[test]
    fn write_then_read_is_lossless() {
        let a = Matrix::from_row_major(2, 2, &[0.1, -1e-300, 1.0 / 3.0, 7.0]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &a).unwrap();
        assert_eq!(read_matrix(buf.as_slice()).unwrap(), a);
        let v = Vector::from_column_slice(&[std::f64::consts::PI, -0.0, 2.5e17]);
        let mut buf = Vec::new();
        write_vector(&mut buf, &v).unwrap();
        assert_eq!(read_vector(buf.as_slice()).unwrap(), v);
    }
}
