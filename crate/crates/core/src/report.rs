//! Serialization: complex numbers as `[re, im]`, the matrix CSV export and
//! spectrum tables.
//!
//! Matrix export layout:
//!
//! ```text
//! # {"trunc":4,"u_spec":{...},"phi_spec":{...},"m":1}
//! m,n,re,im
//! 0,0,0,0
//! ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! the file back reproduces every entry bit for bit.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::operators::OperatorMatrix;

/// Serde adapter for `Complex64` as a two-element array.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Serde adapter for `Vec<Complex64>` as a list of pairs.
pub mod complex_list {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        zs.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect())
    }
}

/// Header line of a matrix export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixHeader {
    pub trunc: usize,
    pub u_spec: FunctionSpec,
    pub phi_spec: FunctionSpec,
    pub m: usize,
}

pub fn write_matrix_csv<W: Write>(
    out: &mut W,
    header: &MatrixHeader,
    op: &OperatorMatrix,
) -> Result<()> {
    writeln!(out, "# {}", serde_json::to_string(header)?)?;
    writeln!(out, "m,n,re,im")?;
    let e = op.entries();
    for row in 0..op.trunc() {
        for col in 0..op.trunc() {
            let z = e[(row, col)];
            writeln!(out, "{row},{col},{:?},{:?}", z.re, z.im)?;
        }
    }
    Ok(())
}

pub fn read_matrix_csv<R: BufRead>(input: R) -> Result<(MatrixHeader, OperatorMatrix)> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))??;
    let json = first
        .strip_prefix("# ")
        .ok_or_else(|| Error::Parse("missing JSON header line".into()))?;
    let header: MatrixHeader = serde_json::from_str(json)?;
    let columns = lines
        .next()
        .ok_or_else(|| Error::Parse("missing column header".into()))??;
    if columns.trim() != "m,n,re,im" {
        return Err(Error::Parse(format!(
            "unexpected column header {columns:?}"
        )));
    }
    let n = header.trunc;
    let mut entries = DMatrix::zeros(n, n);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let bad = || Error::Parse(format!("bad row {}: {line:?}", lineno + 3));
        if fields.len() != 4 {
            return Err(bad());
        }
        let row: usize = fields[0].parse().map_err(|_| bad())?;
        let col: usize = fields[1].parse().map_err(|_| bad())?;
        let re: f64 = fields[2].parse().map_err(|_| bad())?;
        let im: f64 = fields[3].parse().map_err(|_| bad())?;
        if row >= n || col >= n {
            return Err(bad());
        }
        entries[(row, col)] = Complex64::new(re, im);
    }
    Ok((header, OperatorMatrix::from_matrix(entries)?))
}

/// `n,re,im` table of a coefficient or eigenvalue list.
pub fn write_values_csv<W: Write>(out: &mut W, values: &[Complex64]) -> Result<()> {
    writeln!(out, "n,re,im")?;
    for (n, z) in values.iter().enumerate() {
        writeln!(out, "{n},{:?},{:?}", z.re, z.im)?;
    }
    Ok(())
}
