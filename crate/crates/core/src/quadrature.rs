//! Tensor-product quadrature rules on axis-aligned boxes.
//!
//! Two families are provided. The composite midpoint rule has uniform weights
//! and is the default discretization for Nyström spectra. The composite
//! trapezoid rule includes the box boundary among its nodes, so the same rule
//! serves both as an L_p quadrature and as the evaluation grid for sup norms.

use crate::error::{Error, Result};
use crate::kernel::BoxDomain;
use crate::points::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Midpoint,
    Trapezoid,
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: PointSet,
    weights: Vec<f64>,
    kind: RuleKind,
    cells_per_axis: usize,
    exactness_hint: String,
}

impl QuadratureRule {
    /// Arbitrary rule; weights must be positive.
    pub fn new(nodes: PointSet, weights: Vec<f64>, exactness_hint: impl Into<String>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: nodes.len(), got: weights.len() });
        }
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("quadrature rule has no nodes".into()));
        }
        if let Some(&w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("quadrature weight {w} is not positive")));
        }
        Ok(Self { nodes, weights, kind: RuleKind::Custom, cells_per_axis: 0, exactness_hint: exactness_hint.into() })
    }

    /// Composite midpoint rule with `cells` cells along every axis.
    pub fn midpoint(domain: &BoxDomain, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidParameter("midpoint rule needs at least one cell".into()));
        }
        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..domain.dim())
            .map(|a| {
                let (lo, hi) = domain.axis(a);
                let h = (hi - lo) / cells as f64;
                let nodes = (0..cells).map(|j| lo + (j as f64 + 0.5) * h).collect();
                (nodes, vec![h; cells])
            })
            .collect();
        let (nodes, weights) = tensor(&axes)?;
        Ok(Self {
            nodes,
            weights,
            kind: RuleKind::Midpoint,
            cells_per_axis: cells,
            exactness_hint: "composite midpoint, exact for affine integrands per cell".into(),
        })
    }

    /// Composite trapezoid rule on the closed grid with `cells` cells per axis
    /// (`cells + 1` nodes per axis, boundary included).
    pub fn trapezoid(domain: &BoxDomain, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidParameter("trapezoid rule needs at least one cell".into()));
        }
        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..domain.dim())
            .map(|a| {
                let (lo, hi) = domain.axis(a);
                let h = (hi - lo) / cells as f64;
                // last node pinned to the boundary to avoid drift from lo + cells * h
                let nodes = (0..=cells).map(|j| if j == cells { hi } else { lo + j as f64 * h }).collect();
                let weights = (0..=cells).map(|j| if j == 0 || j == cells { 0.5 * h } else { h }).collect();
                (nodes, weights)
            })
            .collect();
        let (nodes, weights) = tensor(&axes)?;
        Ok(Self {
            nodes,
            weights,
            kind: RuleKind::Trapezoid,
            cells_per_axis: cells,
            exactness_hint: "composite trapezoid on the closed grid, exact for affine integrands per cell".into(),
        })
    }

    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn exactness_hint(&self) -> &str {
        &self.exactness_hint
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Grid spacing along the coarsest axis, when the rule is a tensor grid.
    pub fn spacing(&self, domain: &BoxDomain) -> Option<f64> {
        if self.cells_per_axis == 0 {
            return None;
        }
        (0..domain.dim())
            .map(|a| {
                let (lo, hi) = domain.axis(a);
                (hi - lo) / self.cells_per_axis as f64
            })
            .reduce(f64::max)
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Checks that the rule lives on `domain` and that its weights sum to the
    /// domain volume.
    pub fn check_covers(&self, domain: &BoxDomain) -> Result<()> {
        if self.dim() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: self.dim() });
        }
        if let Some(p) = self.nodes.iter().find(|p| !domain.contains(p)) {
            return Err(Error::Domain { point: p.to_vec() });
        }
        let vol = domain.volume();
        if (self.total_weight() - vol).abs() > 1e-12 * vol.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature weights sum to {} but the domain volume is {vol}",
                self.total_weight()
            )));
        }
        Ok(())
    }

    /// Stable identifier used in cache keys.
    pub fn signature(&self) -> String {
        match self.kind {
            RuleKind::Midpoint => format!("midpoint{}^{}", self.cells_per_axis, self.dim()),
            RuleKind::Trapezoid => format!("trapezoid{}^{}", self.cells_per_axis, self.dim()),
            RuleKind::Custom => format!("custom{}x{}", self.len(), self.dim()),
        }
    }
}

fn tensor(axes: &[(Vec<f64>, Vec<f64>)]) -> Result<(PointSet, Vec<f64>)> {
    let dim = axes.len();
    let total: usize = axes.iter().map(|a| a.0.len()).product();
    let mut coords = Vec::with_capacity(total * dim);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        let mut w = 1.0;
        for (a, &i) in idx.iter().enumerate() {
            coords.push(axes[a].0[i]);
            w *= axes[a].1[i];
        }
        weights.push(w);
        // last axis fastest
        for a in (0..dim).rev() {
            idx[a] += 1;
            if idx[a] < axes[a].0.len() {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok((PointSet::new(dim, coords)?, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_weights_sum_to_volume() {
        let d = BoxDomain::unit(2);
        let q = QuadratureRule::midpoint(&d, 64).unwrap();
        assert_eq!(q.len(), 64 * 64);
        q.check_covers(&d).unwrap();
        let d1 = BoxDomain::new(vec![(0.0, 3.0)]).unwrap();
        QuadratureRule::midpoint(&d1, 2000).unwrap().check_covers(&d1).unwrap();
    }

    #[test]
    fn trapezoid_includes_boundary() {
        let d = BoxDomain::unit(1);
        let q = QuadratureRule::trapezoid(&d, 4096).unwrap();
        assert_eq!(q.len(), 4097);
        assert_eq!(q.nodes().get(0), &[0.0]);
        assert_eq!(q.nodes().get(4096), &[1.0]);
        q.check_covers(&d).unwrap();
        // exact for t on [0, 1]
        let vals: Vec<f64> = q.nodes().iter().map(|p| p[0]).collect();
        assert!((q.integrate(&vals) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let nodes = PointSet::from_scalars(&[0.1, 0.2]).unwrap();
        assert!(QuadratureRule::new(nodes, vec![0.5, 0.0], "bad").is_err());
    }
}
