//! Dense, named, row-major feature matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are samples, columns are named features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    names: Vec<String>,
    n_rows: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(names: Vec<String>, n_rows: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * names.len() {
            return Err(Error::Shape(format!(
                "{} values for {} rows x {} columns",
                data.len(),
                n_rows,
                names.len()
            )));
        }
        Ok(Self {
            names,
            n_rows,
            data,
        })
    }

    /// Builds a matrix from rows; every row must have `names.len()` entries.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let p = names.len();
        let mut data = Vec::with_capacity(rows.len() * p);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != p {
                return Err(Error::Shape(format!(
                    "row {i} has {} values, expected {p}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(names, rows.len(), data)
    }

    /// Unnamed matrix with generated column names `x0, x1, ...`.
    pub fn from_unnamed_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        Self::from_rows((0..p).map(|j| format!("x{j}")).collect(), rows)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_cols();
        &self.data[i * p..(i + 1) * p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Copies the given rows, in order, into a new matrix.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.n_cols());
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            names: self.names.clone(),
            n_rows: idx.len(),
            data,
        }
    }

    /// Copies the given columns, in order, into a new matrix.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let names = idx.iter().map(|&j| self.names[j].clone()).collect();
        let mut data = Vec::with_capacity(idx.len() * self.n_rows);
        for r in self.rows() {
            data.extend(idx.iter().map(|&j| r[j]));
        }
        Self {
            names,
            n_rows: self.n_rows,
            data,
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
