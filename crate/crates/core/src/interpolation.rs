//! Kernel interpolation: cardinal weights, the interpolation operator `A_D`,
//! power functions, P-greedy designs and interpolation widths.
//!
//! For a design `D = (x_1, ..., x_n)` with Gram matrix `K = L L^T`, the
//! cardinal weights solve `K α = k_x` and the power function is
//! `P_D(x)^2 = k(x, x) - |L^{-1} k_x|^2`, the worst-case error of `A_D` at `x`
//! over the unit ball of the RKHS.

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{gram_matrix, Kernel};
use crate::points::PointSet;
use crate::quadrature::QuadratureRule;

/// Relative tolerance under which greedy candidates count as tied.
pub const GREEDY_TIE_TOL: f64 = 1e-12;

/// Norm exponent `p ∈ [2, ∞]` of the target space `L_p(μ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 2.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `1 / p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    pub fn label(self) -> String {
        match self {
            Exponent::Finite(p) => format!("{p}"),
            Exponent::Infinity => "inf".into(),
        }
    }
}

/// Ordered interpolation points with a cached Cholesky factor of their Gram matrix.
#[derive(Clone, Debug)]
pub struct DesignSet {
    kernel: Kernel,
    points: PointSet,
    chol: Mat<f64>,
    jitter: f64,
}

impl DesignSet {
    /// Factors the Gram matrix. When the plain factorization fails a ridge of
    /// `1e-12 · trace(K) / n` is added once and recorded in [`DesignSet::jitter`].
    pub fn new(kernel: &Kernel, points: PointSet) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            kernel.check_points(&points)?;
            return Ok(Self { kernel: kernel.clone(), points, chol: Mat::zeros(0, 0), jitter: 0.0 });
        }
        let gram = gram_matrix(kernel, &points)?;
        if let Ok(llt) = gram.llt(Side::Lower) {
            return Ok(Self { kernel: kernel.clone(), points, chol: llt.L().to_owned(), jitter: 0.0 });
        }
        let trace: f64 = (0..n).map(|i| gram[(i, i)]).sum();
        let jitter = 1e-12 * trace / n as f64;
        if !(jitter > 0.0) {
            return Err(Error::DegenerateDesign("Gram matrix is zero".into()));
        }
        let ridged = Mat::from_fn(n, n, |i, j| gram[(i, j)] + if i == j { jitter } else { 0.0 });
        let llt = ridged
            .llt(Side::Lower)
            .map_err(|_| Error::DegenerateDesign(format!("Gram matrix singular after jitter {jitter:e}")))?;
        Ok(Self { kernel: kernel.clone(), points, chol: llt.L().to_owned(), jitter })
    }

    pub fn empty(kernel: &Kernel) -> Self {
        Self { kernel: kernel.clone(), points: PointSet::empty(kernel.dim()), chol: Mat::zeros(0, 0), jitter: 0.0 }
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn kernel_id(&self) -> String {
        self.kernel.name()
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ridge added to the Gram diagonal, 0 when none was needed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Lower Cholesky factor of the (possibly ridged) Gram matrix.
    pub fn cholesky(&self) -> &Mat<f64> {
        &self.chol
    }

    fn kernel_column(&self, x: &[f64]) -> Vec<f64> {
        self.points.iter().map(|p| self.kernel.value(x, p)).collect()
    }

    /// `L^{-1} b` in place.
    fn forward(&self, b: &mut [f64]) {
        let l = &self.chol;
        for i in 0..b.len() {
            let mut s = b[i];
            for j in 0..i {
                s -= l[(i, j)] * b[j];
            }
            b[i] = s / l[(i, i)];
        }
    }

    /// `L^{-T} b` in place.
    fn backward(&self, b: &mut [f64]) {
        let l = &self.chol;
        for i in (0..b.len()).rev() {
            let mut s = b[i];
            for j in i + 1..b.len() {
                s -= l[(j, i)] * b[j];
            }
            b[i] = s / l[(i, i)];
        }
    }

    /// Unchecked power function squared, clamped at zero.
    fn power_sq(&self, x: &[f64]) -> f64 {
        let mut v = self.kernel_column(x);
        self.forward(&mut v);
        (self.kernel.diag(x) - v.iter().map(|c| c * c).sum::<f64>()).max(0.0)
    }

    /// `L^{-1} K_{D, grid}` as an `n x m` matrix.
    fn whitened_cross(&self, grid: &PointSet) -> Mat<f64> {
        let n = self.len();
        let mut b = self.kernel.cross_matrix(&self.points, grid);
        let l = &self.chol;
        for c in 0..b.ncols() {
            for i in 0..n {
                let mut s = b[(i, c)];
                for j in 0..i {
                    s -= l[(i, j)] * b[(j, c)];
                }
                b[(i, c)] = s / l[(i, i)];
            }
        }
        b
    }
}

/// Solution of `K α = k_x`.
pub fn cardinal_weights(design: &DesignSet, x: &[f64]) -> Result<Vec<f64>> {
    design.kernel.check_point(x)?;
    let mut a = design.kernel_column(x);
    design.forward(&mut a);
    design.backward(&mut a);
    Ok(a)
}

/// `A_D f(x) = Σ α_i(x) f(x_i)`.
pub fn apply_interpolant(design: &DesignSet, f_values: &[f64], x: &[f64]) -> Result<f64> {
    if f_values.len() != design.len() {
        return Err(Error::LengthMismatch { expected: design.len(), got: f_values.len() });
    }
    Ok(cardinal_weights(design, x)?.iter().zip(f_values).map(|(a, f)| a * f).sum())
}

/// `P_D(x) = sup_{|f|_H ≤ 1} |f(x) - A_D f(x)|`; `√k(x, x)` for the empty design.
pub fn power_function(design: &DesignSet, x: &[f64]) -> Result<f64> {
    design.kernel.check_point(x)?;
    Ok(design.power_sq(x).sqrt())
}

/// Power function sampled on a grid.
#[derive(Clone, Debug)]
pub struct PowerFunctionProfile {
    pub grid: PointSet,
    pub values: Vec<f64>,
    pub sup_value: f64,
    /// Index of the first grid point attaining the supremum.
    pub argmax: usize,
}

pub fn power_function_profile(design: &DesignSet, grid: &PointSet) -> Result<PowerFunctionProfile> {
    design.kernel.check_points(grid)?;
    if grid.is_empty() {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }
    let values: Vec<f64> = (0..grid.len()).into_par_iter().map(|j| design.power_sq(grid.get(j)).sqrt()).collect();
    let (argmax, sup_value) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(PowerFunctionProfile { grid: grid.clone(), values, sup_value, argmax })
}

/// `(∫ P_D^p dμ)^{1/p}` for finite `p`, `max_j P_D(x_j)` over the rule's nodes for `p = ∞`.
///
/// The sup norm uses the rule as its evaluation grid and requires at least
/// four grid points per design point.
pub fn interpolation_width(design: &DesignSet, rule: &QuadratureRule, p: Exponent) -> Result<f64> {
    rule.check_covers(design.kernel.domain())?;
    let profile_sq: Vec<f64> =
        (0..rule.len()).into_par_iter().map(|j| design.power_sq(rule.nodes().get(j))).collect();
    match p {
        Exponent::Infinity => {
            if rule.len() < 4 * design.len() {
                return Err(Error::InsufficientResolution { requested: 4 * design.len(), available: rule.len() });
            }
            Ok(profile_sq.iter().copied().fold(0.0, f64::max).sqrt())
        }
        Exponent::Finite(p) => {
            let s: f64 = profile_sq.iter().zip(rule.weights()).map(|(q, w)| w * q.powf(p / 2.0)).sum();
            Ok(s.powf(1.0 / p))
        }
    }
}

/// `sup_{|f|_H ≤ 1} |f - A_D f|_{L_2(μ)}`: the square root of the largest
/// eigenvalue of the integral operator of the residual kernel
/// `k_D(x, y) = k(x, y) - k_x^T K^{-1} k_y`, discretized by a quadrature rule.
///
/// This is the operator-norm form of the interpolation error in `L_2`; the
/// quadrature kernel matrix is built once and reused across designs.
#[derive(Clone, Debug)]
pub struct ResidualL2Norm {
    kernel: Kernel,
    quad: QuadratureRule,
    sqrt_w: Vec<f64>,
    /// `W^{1/2} K W^{1/2}` on the rule's nodes.
    kq: Mat<f64>,
}

impl ResidualL2Norm {
    pub fn new(kernel: &Kernel, quad: &QuadratureRule) -> Result<Self> {
        quad.check_covers(kernel.domain())?;
        let sqrt_w: Vec<f64> = quad.weights().iter().map(|w| w.sqrt()).collect();
        let nodes = quad.nodes();
        let kq = Mat::from_fn(quad.len(), quad.len(), |i, j| sqrt_w[i] * kernel.value(nodes.get(i), nodes.get(j)) * sqrt_w[j]);
        Ok(Self { kernel: kernel.clone(), quad: quad.clone(), sqrt_w, kq })
    }

    pub fn quad(&self) -> &QuadratureRule {
        &self.quad
    }

    /// Operator norm for `design`: largest eigenvalue of the discretized
    /// residual operator `W^{1/2} (K - B^T B) W^{1/2}` by a dense symmetric
    /// eigensolve (power iteration can miss the top eigenvector when the
    /// design is symmetric).
    pub fn norm(&self, design: &DesignSet) -> Result<f64> {
        if design.kernel != self.kernel {
            return Err(Error::InvalidParameter("design and residual operator use different kernels".into()));
        }
        let m = self.quad.len();
        let mut b = design.whitened_cross(self.quad.nodes());
        for c in 0..m {
            for i in 0..b.nrows() {
                b[(i, c)] *= self.sqrt_w[c];
            }
        }
        let btb = b.transpose() * &b;
        let r = Mat::from_fn(m, m, |i, j| {
            let (i, j) = if i >= j { (i, j) } else { (j, i) };
            self.kq[(i, j)] - btb[(i, j)]
        });
        let ev = r
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Linalg(format!("residual operator eigensolve: {e:?}")))?;
        Ok(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt())
    }
}

/// P-greedy design with its sup-norm history over the candidate grid.
#[derive(Clone, Debug)]
pub struct GreedyDesign {
    pub design: DesignSet,
    /// Candidate indices in selection order.
    pub selected: Vec<usize>,
    /// `sup_history[j]` is `max_x P_{D_j}(x)` over the candidates, `j = 0..=len`.
    pub sup_history: Vec<f64>,
    /// Set when the power function vanished on every candidate before `n` points were chosen.
    pub saturated: bool,
}

/// P-greedy selection: repeatedly appends the candidate maximizing the
/// current power function, starting from the maximizer of `k(x, x)`. Ties
/// within a relative `GREEDY_TIE_TOL` go to the lowest candidate index.
/// Power values are updated through the Newton basis in `O(n m)` per step.
pub fn greedy_design(k: &Kernel, candidates: &PointSet, n: usize) -> Result<GreedyDesign> {
    k.check_points(candidates)?;
    if candidates.is_empty() {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }
    if n > candidates.len() {
        return Err(Error::InsufficientPoints { needed: n, got: candidates.len() });
    }
    let m = candidates.len();
    let mut p2: Vec<f64> = candidates.iter().map(|x| k.diag(x)).collect();
    let scale = p2.iter().copied().fold(0.0, f64::max);
    let mut newton: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut selected = Vec::with_capacity(n);
    let mut sup_history = vec![scale.sqrt()];
    let mut saturated = false;

    for _ in 0..n {
        let best = p2.iter().copied().fold(0.0, f64::max);
        if best <= 1e-14 * scale {
            saturated = true;
            break;
        }
        let sel = p2.iter().position(|&v| v >= best * (1.0 - GREEDY_TIE_TOL)).unwrap_or(0);
        let xs = candidates.get(sel);
        let pivot = p2[sel].sqrt();
        let at_sel: Vec<f64> = newton.iter().map(|v| v[sel]).collect();
        let basis: Vec<f64> = (0..m)
            .into_par_iter()
            .map(|j| {
                let s: f64 = newton.iter().zip(&at_sel).map(|(v, a)| v[j] * a).sum();
                (k.value(candidates.get(j), xs) - s) / pivot
            })
            .collect();
        for (q, b) in p2.iter_mut().zip(&basis) {
            *q = (*q - b * b).max(0.0);
        }
        p2[sel] = 0.0;
        newton.push(basis);
        selected.push(sel);
        // nested designs: the sup cannot grow, guard against rounding
        let sup = p2.iter().copied().fold(0.0, f64::max).sqrt();
        let prev = *sup_history.last().unwrap();
        sup_history.push(sup.min(prev));
    }
    let design = DesignSet::new(k, candidates.select(&selected))?;
    Ok(GreedyDesign { design, selected, sup_history, saturated })
}

/// Uniform design with `n` points.
///
/// In one dimension, boundary points where `k(x, x) = 0` carry no information
/// and are treated as pinned: with a pinned left end the design is
/// `a + (b - a) i / n`, with both ends pinned `a + (b - a) i / (n + 1)`, with a
/// pinned right end `a + (b - a)(i - 1) / n`, and otherwise the cell midpoints
/// `a + (b - a)(i - 1/2) / n`. In `d > 1` dimensions the design is the tensor
/// grid of cell centres with `s = ⌊n^{1/d}⌋` points per axis, so it has
/// `s^d ≤ n` points.
pub fn uniform_design(k: &Kernel, n: usize) -> Result<DesignSet> {
    if n == 0 {
        return Ok(DesignSet::empty(k));
    }
    let dom = k.domain();
    if dom.dim() == 1 {
        let (a, b) = dom.axis(0);
        let left = k.diag(&[a]) == 0.0;
        let right = k.diag(&[b]) == 0.0;
        let nf = n as f64;
        let pts: Vec<f64> = (1..=n)
            .map(|i| {
                let i = i as f64;
                let u = match (left, right) {
                    (true, false) => i / nf,
                    (true, true) => i / (nf + 1.0),
                    (false, true) => (i - 1.0) / nf,
                    (false, false) => (i - 0.5) / nf,
                };
                if u == 1.0 {
                    b
                } else {
                    a + (b - a) * u
                }
            })
            .collect();
        return DesignSet::new(k, PointSet::from_scalars(&pts)?);
    }
    let d = dom.dim();
    let mut s = (n as f64).powf(1.0 / d as f64).round() as usize;
    while s.pow(d as u32) > n {
        s -= 1;
    }
    let s = s.max(1);
    let rule = QuadratureRule::midpoint(dom, s)?;
    DesignSet::new(k, rule.nodes().clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Uniform,
    Greedy,
    Multistart,
}

impl Strategy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(Strategy::Uniform),
            "greedy" => Some(Strategy::Greedy),
            "multistart" => Some(Strategy::Multistart),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::Greedy => "greedy",
            Strategy::Multistart => "multistart",
        }
    }
}

/// Best design found by a search strategy; `value` upper-bounds `I_n(H, L_p(μ))`.
#[derive(Clone, Debug)]
pub struct OptimizedDesign {
    pub design: DesignSet,
    pub value: f64,
    pub strategy: Strategy,
    pub seed: u64,
    /// Number of random starts used by multistart (0 otherwise).
    pub random_starts: usize,
}

/// Random starts used by multistart in addition to the uniform and greedy designs.
pub const MULTISTART_RANDOM_STARTS: usize = 4;

/// Searches for an `n`-point design with small interpolation width.
///
/// The quadrature rule is both the width functional and, for greedy, the
/// candidate grid. Multistart refines the uniform design, the greedy design
/// and seeded random designs by pattern-search coordinate descent and keeps
/// the best, so its value never exceeds the uniform or greedy value.
pub fn optimize_interpolation_width(
    k: &Kernel,
    quad: &QuadratureRule,
    p: Exponent,
    n: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<OptimizedDesign> {
    if n == 0 {
        return Err(Error::InvalidParameter("design size must be positive".into()));
    }
    let finish = |design: DesignSet, random_starts| -> Result<OptimizedDesign> {
        let value = interpolation_width(&design, quad, p)?;
        Ok(OptimizedDesign { design, value, strategy, seed, random_starts })
    };
    match strategy {
        Strategy::Uniform => finish(uniform_design(k, n)?, 0),
        Strategy::Greedy => finish(greedy_design(k, quad.nodes(), n)?.design, 0),
        Strategy::Multistart => {
            let mut starts = vec![uniform_design(k, n)?, greedy_design(k, quad.nodes(), n)?.design];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dom = k.domain();
            for _ in 0..MULTISTART_RANDOM_STARTS {
                let coords: Vec<f64> = (0..n)
                    .flat_map(|_| (0..dom.dim()).map(|a| dom.axis(a)).collect::<Vec<_>>())
                    .map(|(lo, hi)| rng.random_range(lo..=hi))
                    .collect();
                if let Ok(d) = DesignSet::new(k, PointSet::new(dom.dim(), coords)?) {
                    starts.push(d);
                }
            }
            let mut best: Option<(DesignSet, f64)> = None;
            for start in starts {
                let (d, v) = pattern_search(k, quad, p, start)?;
                if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                    best = Some((d, v));
                }
            }
            let (design, value) = best.expect("at least the uniform start");
            Ok(OptimizedDesign { design, value, strategy, seed, random_starts: MULTISTART_RANDOM_STARTS })
        }
    }
}

/// Coordinate pattern search on the design points; only strict improvements
/// are accepted, so the result never exceeds the starting value.
fn pattern_search(k: &Kernel, quad: &QuadratureRule, p: Exponent, start: DesignSet) -> Result<(DesignSet, f64)> {
    let dom = k.domain().clone();
    let n = start.len();
    let extent = (0..dom.dim()).map(|a| dom.axis(a).1 - dom.axis(a).0).fold(0.0, f64::max);
    let mut step = extent / (2.0 * (n as f64).powf(1.0 / dom.dim() as f64));
    let mut value = interpolation_width(&start, quad, p)?;
    let mut design = start;
    let mut sweeps = 0;
    while step > 1e-7 * extent && sweeps < 400 {
        sweeps += 1;
        let mut improved = false;
        for i in 0..n {
            for a in 0..dom.dim() {
                for dir in [1.0, -1.0] {
                    let mut pt = design.points().get(i).to_vec();
                    pt[a] += dir * step;
                    dom.clamp(&mut pt);
                    if pt == design.points().get(i) {
                        continue;
                    }
                    let mut pts = design.points().clone();
                    pts.set(i, &pt);
                    let Ok(cand) = DesignSet::new(k, pts) else { continue };
                    let v = interpolation_width(&cand, quad, p)?;
                    if v < value {
                        value = v;
                        design = cand;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok((design, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::BoxDomain;

    fn bm_design(pts: &[f64]) -> DesignSet {
        DesignSet::new(&Kernel::brownian_motion(), PointSet::from_scalars(pts).unwrap()).unwrap()
    }

    #[test]
    fn cardinal_weight_examples() {
        let d = bm_design(&[1.0]);
        assert!((cardinal_weights(&d, &[0.5]).unwrap()[0] - 0.5).abs() < 1e-15);
        let d = bm_design(&[0.5, 1.0]);
        let a = cardinal_weights(&d, &[0.25]).unwrap();
        assert!((a[0] - 0.5).abs() < 1e-14 && a[1].abs() < 1e-14);
        let a = cardinal_weights(&d, &[1.0]).unwrap();
        assert!(a[0].abs() < 1e-14 && (a[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn interpolant_examples() {
        let d = bm_design(&[1.0]);
        assert!((apply_interpolant(&d, &[1.0], &[0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(apply_interpolant(&d, &[0.0], &[0.3]).unwrap(), 0.0);
        assert!(matches!(apply_interpolant(&d, &[1.0, 2.0], &[0.3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn power_function_examples() {
        assert!((power_function(&bm_design(&[1.0]), &[0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert!((power_function(&bm_design(&[0.8]), &[1.0]).unwrap() - 0.2f64.sqrt()).abs() < 1e-12);
        assert!(power_function(&bm_design(&[0.3, 0.9]), &[0.3]).unwrap() < 1e-7);
        let empty = DesignSet::empty(&Kernel::brownian_motion());
        assert!((power_function(&empty, &[0.49]).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn greedy_examples() {
        let grid = QuadratureRule::trapezoid(&BoxDomain::unit(1), 4096).unwrap();
        let g = greedy_design(&Kernel::brownian_motion(), grid.nodes(), 2).unwrap();
        assert_eq!(g.design.points().get(0), &[1.0]);
        // after choosing 1, P^2 = x - x^2 peaks at 0.5
        assert!((g.design.points().get(1)[0] - 0.5).abs() < 1e-12);
        assert!(g.sup_history[2] < g.sup_history[1]);
        let g0 = greedy_design(&Kernel::brownian_motion(), grid.nodes(), 0).unwrap();
        assert!(g0.design.is_empty() && g0.sup_history == vec![1.0]);
    }

    #[test]
    fn uniform_rules() {
        let bm = uniform_design(&Kernel::brownian_motion(), 4).unwrap();
        assert_eq!(bm.points().coords(), &[0.25, 0.5, 0.75, 1.0]);
        let br = uniform_design(&Kernel::brownian_bridge(), 3).unwrap();
        assert_eq!(br.points().coords(), &[0.25, 0.5, 0.75]);
    }

    #[test]
    fn uniform_closed_form() {
        let grid = QuadratureRule::trapezoid(&BoxDomain::unit(1), 4096).unwrap();
        for n in [4, 16, 64] {
            let d = uniform_design(&Kernel::brownian_motion(), n).unwrap();
            let v = interpolation_width(&d, &grid, Exponent::Infinity).unwrap();
            assert!((v - 0.5 / (n as f64).sqrt()).abs() < 1e-4, "n = {n}: {v}");
        }
    }

    #[test]
    fn exponent_validation() {
        assert!(Exponent::new(1.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert_eq!(Exponent::new(f64::INFINITY).unwrap(), Exponent::Infinity);
    }

    #[test]
    fn residual_norm_of_uniform_bm_design() {
        // residual of a uniform BM design is a bridge on each cell: top eigenvalue h^2 / π^2
        let quad = QuadratureRule::midpoint(&BoxDomain::unit(1), 1024).unwrap();
        let r = ResidualL2Norm::new(&Kernel::brownian_motion(), &quad).unwrap();
        let d = uniform_design(&Kernel::brownian_motion(), 4).unwrap();
        let v = r.norm(&d).unwrap();
        assert!((v - 0.25 / std::f64::consts::PI).abs() < 1e-4, "{v}");
    }
}
