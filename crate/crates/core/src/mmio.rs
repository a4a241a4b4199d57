//! Matrix Market (coordinate, integer, general) and dense CSV exchange for
//! integer matrices.
//!
//! Both writers emit comment lines first: `%` lines for Matrix Market, `#`
//! lines for CSV. The readers skip them.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::SubspaceFamily;
use crate::intmat::IntMatrix;

pub const MM_HEADER: &str = "%%MatrixMarket matrix coordinate integer general";

pub fn write_matrix_market<W: Write>(m: &IntMatrix, comments: &[String], mut w: W) -> Result<()> {
    writeln!(w, "{MM_HEADER}")?;
    for c in comments {
        writeln!(w, "% {c}")?;
    }
    let entries: Vec<(usize, usize, BigInt)> = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let x = m.get(i, j);
            (!x.is_zero()).then_some((i, j, x))
        })
        .collect();
    writeln!(w, "{} {} {}", m.rows(), m.cols(), entries.len())?;
    for (i, j, x) in entries {
        writeln!(w, "{} {} {}", i + 1, j + 1, x)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

pub fn read_matrix_market<R: BufRead>(r: R) -> Result<IntMatrix> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let header = header?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens
        != [
            "%%matrixmarket",
            "matrix",
            "coordinate",
            "integer",
            "general",
        ]
    {
        return Err(parse_err(1, format!("unsupported header {header:?}")));
    }
    let mut size: Option<(usize, usize, usize)> = None;
    let mut data: Vec<BigInt> = Vec::new();
    let mut seen = 0;
    for (k, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                let [r, c, nnz] = fields[..] else {
                    return Err(parse_err(k + 1, "expected `rows cols nnz`"));
                };
                let parse = |s: &str| s.parse::<usize>().map_err(|e| parse_err(k + 1, e));
                let (r, c, nnz) = (parse(r)?, parse(c)?, parse(nnz)?);
                size = Some((r, c, nnz));
                data = vec![BigInt::zero(); r * c];
            }
            Some((rows, cols, _)) => {
                let [i, j, v] = fields[..] else {
                    return Err(parse_err(k + 1, "expected `row col value`"));
                };
                let i: usize = i.parse().map_err(|e| parse_err(k + 1, e))?;
                let j: usize = j.parse().map_err(|e| parse_err(k + 1, e))?;
                let v: BigInt = v.parse().map_err(|e| parse_err(k + 1, e))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(
                        k + 1,
                        format!("index ({i}, {j}) outside {rows}x{cols}"),
                    ));
                }
                data[(i - 1) * cols + (j - 1)] = v;
                seen += 1;
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| Error::Parse("missing size line".into()))?;
    if seen != nnz {
        return Err(Error::Parse(format!(
            "size line promises {nnz} entries, found {seen}"
        )));
    }
    IntMatrix::from_big(rows, cols, data)
}

pub fn write_csv<W: Write>(m: &IntMatrix, comments: &[String], mut w: W) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<IntMatrix> {
    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row: Vec<BigInt> = t
            .split(',')
            .map(|s| s.trim().parse::<BigInt>().map_err(|e| parse_err(k + 1, e)))
            .collect::<Result<_>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(parse_err(
                    k + 1,
                    format!("{} fields, expected {c}", row.len()),
                ));
            }
            Some(_) => {}
        }
        data.extend(row);
        rows += 1;
    }
    IntMatrix::from_big(rows, cols.unwrap_or(0), data)
}

fn basis_string(s: &crate::geometry::Subspace) -> String {
    let b = s.basis();
    let rows: Vec<String> = (0..b.rows())
        .map(|i| {
            b.row(i)
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    format!("[{}]", rows.join(" | "))
}

/// Comment lines describing the ordering of a family, one line per member
/// when `list_members` is set.
pub fn ordering_comments(label: &str, family: &SubspaceFamily, list_members: bool) -> Vec<String> {
    let mut out = vec![format!(
        "{label}: {} {}-subspaces of F_{}^{}, sorted lexicographically by their \
         reduced row echelon basis read row-major",
        family.len(),
        family.dim(),
        family.prime(),
        family.ambient_dim()
    )];
    if list_members {
        out.extend(
            family
                .iter()
                .enumerate()
                .map(|(i, s)| format!("{label} {}: {}", i + 1, basis_string(s))),
        );
    }
    out
}
