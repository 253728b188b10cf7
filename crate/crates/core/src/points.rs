//! Flat storage for ordered point lists in R^d.

use crate::error::{Error, Result};

/// Ordered list of points in R^d, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be positive".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::LengthMismatch {
                expected: (coords.len() / dim + 1) * dim,
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("point coordinates must be finite".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim: dim.max(1), coords: Vec::new() }
    }

    /// Points on the real line.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(1, values.to_vec())
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn push(&mut self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: point.len() });
        }
        self.coords.extend_from_slice(point);
        Ok(())
    }

    pub fn set(&mut self, i: usize, point: &[f64]) {
        self.coords[i * self.dim..(i + 1) * self.dim].copy_from_slice(point);
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// First `n` points.
    pub fn prefix(&self, n: usize) -> PointSet {
        PointSet { dim: self.dim, coords: self.coords[..n * self.dim].to_vec() }
    }

    pub fn select(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.get(i));
        }
        PointSet { dim: self.dim, coords }
    }

    /// Index pair of the first exact duplicate, if any.
    pub fn first_duplicate(&self) -> Option<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.get(a)
                .iter()
                .zip(self.get(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        order
            .windows(2)
            .find(|w| self.get(w[0]) == self.get(w[1]))
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    sq_dist(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_duplicates() {
        let p = PointSet::from_scalars(&[0.3, 0.1, 0.3]).unwrap();
        assert_eq!(p.first_duplicate(), Some((0, 2)));
        let q = PointSet::from_scalars(&[0.3, 0.1]).unwrap();
        assert_eq!(q.first_duplicate(), None);
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(PointSet::from_rows(2, &[vec![0.0, 1.0], vec![0.5]]).is_err());
        assert!(PointSet::new(2, vec![0.0, 1.0, 2.0]).is_err());
    }
}
