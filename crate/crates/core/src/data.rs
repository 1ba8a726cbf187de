//! Dense row-major point sets.

use crate::error::{Error, Result};

/// `n` points in `p` dimensions, with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    n: usize,
    dim: usize,
    points: Vec<f64>,
    labels: Option<Vec<usize>>,
}

impl Dataset {
    pub fn from_rows(name: impl Into<String>, rows: Vec<Vec<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let dim = rows[0].len();
        let mut points = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::LengthMismatch { left: dim, right: row.len() });
            }
            points.extend_from_slice(row);
        }
        Self::from_flat(name, rows.len(), dim, points, labels)
    }

    pub fn from_flat(
        name: impl Into<String>,
        n: usize,
        dim: usize,
        points: Vec<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if dim == 0 {
            return Err(Error::InvalidConfig("points must have at least one coordinate".into()));
        }
        if points.len() != n * dim {
            return Err(Error::LengthMismatch { left: n * dim, right: points.len() });
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite coordinate".into()));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::LengthMismatch { left: n, right: l.len() });
            }
        }
        Ok(Self { name: name.into(), n, dim, points, labels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::LengthMismatch { left: self.n, right: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
