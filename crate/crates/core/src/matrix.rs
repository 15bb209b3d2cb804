//! Dense square matrices and their text formats.
//!
//! Input is either CSV (one row per line, entries as integers, decimals, or
//! `p/q` fractions) or JSON `{"n": 3, "entries": [[...], ...]}` where entries
//! may be numbers or strings.

use std::fmt;
use std::ops::Index;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rational_to_f64, value_to_rational};
use crate::semiring::{Field, Semiring};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        Ok(Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = &T> {
        (0..self.n).map(move |i| self.get(i, j))
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Submatrix on the given rows and columns (both 0-based, in order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::Dimension("submatrix must be square".into()));
        }
        Ok(Matrix::from_fn(rows.len(), |i, j| self.get(rows[i], cols[j]).clone()))
    }
}

impl<T: Semiring> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn ones(n: usize) -> Self {
        Matrix::from_fn(n, |_, _| T::one())
    }
}

impl<T: Field> Matrix<T> {
    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from_int(x)).collect())
                .collect(),
        )
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl Matrix<BigRational> {
    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(rational_to_f64)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<Vec<String>> = self.rows().map(|r| r.iter().map(format_rational).collect()).collect();
        serde_json::json!({ "n": self.n, "entries": entries })
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: Option<usize>,
    entries: Vec<Vec<serde_json::Value>>,
}

/// Parses an exact matrix from CSV or JSON text; the format is detected from
/// the first non-blank character.
pub fn parse_matrix(text: &str) -> Result<Matrix<BigRational>> {
    if text.trim_start().starts_with('{') {
        parse_matrix_json(text)
    } else {
        parse_matrix_csv(text)
    }
}

pub fn parse_matrix_json(text: &str) -> Result<Matrix<BigRational>> {
    let raw: MatrixJson = serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
    let rows = raw
        .entries
        .iter()
        .map(|r| r.iter().map(value_to_rational).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let m = Matrix::from_rows(rows)?;
    if let Some(n) = raw.n {
        if n != m.n() {
            return Err(Error::Dimension(format!("declared n = {n} but found {} rows", m.n())));
        }
    }
    Ok(m)
}

pub fn parse_matrix_csv(text: &str) -> Result<Matrix<BigRational>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse(e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(record.iter().map(parse_rational).collect::<Result<Vec<_>>>()?);
    }
    Matrix::from_rows(rows)
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.data[i * self.n + j].to_string()).collect();
            writeln!(f, "{}", row.join(", "))?;
        }
        Ok(())
    }
}
