//! Entropy numbers `e_n`: the smallest radius for which `2^{n-1}` balls cover
//! the image of the unit ball.
//!
//! General operators are out of reach, so estimates cover diagonal operators
//! `ℓ_2 → ℓ_2` (the surrogate `σ_i = √λ_i` of an embedding `H → L_2`) and
//! small point clouds, where covering numbers can be computed directly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::{dist, PointSet};

/// Universal factor applied to the volume bound in the diagonal upper estimate.
pub const DIAG_UPPER_FACTOR: f64 = 6.0;
/// Flag attached when the upper estimate rests on [`DIAG_UPPER_FACTOR`].
pub const CONSTANT_UNVERIFIED: &str = "asymptotic-constant-unverified";
/// Largest number of leading coordinates covered by the explicit grid construction.
pub const GRID_COVER_MAX_DIM: usize = 3;

/// `diag(σ_1, σ_2, ...)` with `σ_1 ≥ σ_2 ≥ ... ≥ 0`.
///
/// A diagonal operator between `ℓ_2` spaces coincides with its adjoint, so the
/// entropy numbers of the dual operator are the same; no general duality
/// computation is attempted.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator {
    sigma: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(sigma: Vec<f64>) -> Result<Self> {
        if let Some(i) = sigma.iter().position(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter(format!("diagonal entry {i} is negative or not finite")));
        }
        if let Some(i) = sigma.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(format!("diagonal increases at index {}", i + 1)));
        }
        Ok(Self { sigma })
    }

    /// `σ_i = √λ_i` for a nonincreasing eigenvalue sequence.
    pub fn from_eigenvalues(lambda: &[f64]) -> Result<Self> {
        Self::new(lambda.iter().map(|l| l.max(0.0).sqrt()).collect())
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// The adjoint operator, which is the operator itself.
    pub fn adjoint(&self) -> Self {
        self.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub method: String,
    pub flags: Vec<String>,
}

/// Volume-comparison lower bound `max_k 2^{-(n-1)/k} (σ_1 ⋯ σ_k)^{1/k}` and
/// the upper bound `min(6 × that, explicit grid covering)`.
///
/// The grid covering keeps `k ≤ 3` leading axes, splits `[-σ_i, σ_i]` into
/// `m_i = 2^{a_i}` cells with `Σ a_i ≤ n - 1`, and bounds the remaining
/// coordinates by `σ_{k+1}`, giving radius `√(Σ_{i≤k} (σ_i/m_i)^2 + σ_{k+1}^2)`.
pub fn diag_entropy_bounds(op: &DiagonalOperator, n: usize) -> Result<EntropyEstimate> {
    if n == 0 {
        return Err(Error::InvalidParameter("entropy numbers start at n = 1".into()));
    }
    let s = op.sigma();
    let method = "volume-lower/grid-cover-upper".to_string();
    if s.first().is_none_or(|&v| v == 0.0) {
        return Ok(EntropyEstimate { n, lower: 0.0, upper: 0.0, method, flags: Vec::new() });
    }
    // log2 domain keeps 2^{1-n} exact and avoids underflow of long products
    let budget = (n - 1) as f64;
    let mut log_sum = 0.0;
    let mut best = f64::NEG_INFINITY;
    for (k, &v) in s.iter().enumerate().take_while(|(_, v)| **v > 0.0) {
        log_sum += v.log2();
        let k = (k + 1) as f64;
        best = best.max((log_sum - budget) / k);
    }
    let lower = best.exp2();
    let volume_upper = DIAG_UPPER_FACTOR * lower;
    let grid_upper = grid_cover_radius(s, n - 1);
    let mut flags = Vec::new();
    let upper = if volume_upper < grid_upper {
        flags.push(CONSTANT_UNVERIFIED.to_string());
        volume_upper
    } else {
        grid_upper
    };
    Ok(EntropyEstimate { n, lower, upper, method, flags })
}

/// Smallest radius of the dyadic grid coverings with `2^{bits}` centres.
fn grid_cover_radius(s: &[f64], bits: usize) -> f64 {
    let at = |i: usize| s.get(i).copied().unwrap_or(0.0);
    let mut best = at(0);
    let kmax = GRID_COVER_MAX_DIM.min(s.len());
    let cell = |i: usize, a: usize| (at(i) / (a as f64).exp2()).powi(2);
    for k in 1..=kmax {
        let tail = at(k).powi(2);
        match k {
            1 => best = best.min((cell(0, bits) + tail).sqrt()),
            2 => {
                for a0 in 0..=bits {
                    best = best.min((cell(0, a0) + cell(1, bits - a0) + tail).sqrt());
                }
            }
            _ => {
                for a0 in 0..=bits {
                    for a1 in 0..=bits - a0 {
                        best = best.min((cell(0, a0) + cell(1, a1) + cell(2, bits - a0 - a1) + tail).sqrt());
                    }
                }
            }
        }
    }
    best
}

/// Largest number of centres `2^{n-1}` accepted by [`brute_cover_entropy`].
pub const MAX_CENTRES: usize = 4096;
/// Largest point cloud accepted by [`brute_cover_entropy`].
pub const MAX_POINTS: usize = 20_000;

/// Entropy number of a finite point cloud in `R^d`, `d ≤ 3`, with centres anywhere.
///
/// In one dimension the covering radius is found by bisection on an exact
/// greedy sweep. Otherwise farthest-first traversal with `c = 2^{n-1}` centres
/// yields radius `r` and `c + 1` points that are pairwise `r` apart, so
/// `r/2 ≤ e_n ≤ r`; the upper bound is then tightened by reassigning points
/// and moving each centre to the centre of the minimum enclosing ball of its cluster.
pub fn brute_cover_entropy(points: &PointSet, n: usize) -> Result<EntropyEstimate> {
    if n == 0 {
        return Err(Error::InvalidParameter("entropy numbers start at n = 1".into()));
    }
    if points.dim() > 3 {
        return Err(Error::InvalidParameter(format!("point clouds up to dimension 3, got {}", points.dim())));
    }
    if n - 1 >= usize::BITS as usize || (1usize << (n - 1)) > MAX_CENTRES {
        return Err(Error::BudgetExceeded(format!("2^{} centres exceed the limit {MAX_CENTRES}", n - 1)));
    }
    if points.len() > MAX_POINTS {
        return Err(Error::BudgetExceeded(format!("{} points exceed the limit {MAX_POINTS}", points.len())));
    }
    if points.is_empty() {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }
    let centres = 1usize << (n - 1);
    if points.dim() == 1 {
        return Ok(cover_line(points.coords(), centres, n));
    }

    let m = points.len();
    let mut chosen = vec![0usize];
    let mut near: Vec<f64> = points.iter().map(|p| dist(p, points.get(0))).collect();
    while chosen.len() < centres.min(m) {
        let (far, d) = argmax(&near);
        if d == 0.0 {
            break;
        }
        chosen.push(far);
        let c = points.get(far);
        near.par_iter_mut().enumerate().for_each(|(j, v)| *v = v.min(dist(points.get(j), c)));
    }
    let r = argmax(&near).1;
    let lower = if chosen.len() < centres || r == 0.0 { 0.0 } else { r / 2.0 };
    let mut cs: Vec<Vec<f64>> = chosen.iter().map(|&i| points.get(i).to_vec()).collect();
    let mut upper = r;
    for _ in 0..20 {
        let assign: Vec<usize> = (0..m)
            .into_par_iter()
            .map(|j| {
                let p = points.get(j);
                (0..cs.len()).min_by(|&a, &b| dist(p, &cs[a]).total_cmp(&dist(p, &cs[b]))).unwrap()
            })
            .collect();
        let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); cs.len()];
        for (j, &a) in assign.iter().enumerate() {
            clusters[a].push(j);
        }
        cs = clusters
            .par_iter()
            .zip(cs.par_iter())
            .map(|(idx, c)| if idx.is_empty() { c.clone() } else { enclosing_centre(points, idx) })
            .collect();
        let radius = (0..m)
            .into_par_iter()
            .map(|j| cs.iter().map(|c| dist(points.get(j), c)).fold(f64::INFINITY, f64::min))
            .reduce(|| 0.0, f64::max);
        if radius >= upper * (1.0 - 1e-12) {
            upper = upper.min(radius);
            break;
        }
        upper = radius;
    }
    Ok(EntropyEstimate {
        n,
        lower: lower.min(upper),
        upper,
        method: "farthest-first-packing/refined-k-center".into(),
        flags: Vec::new(),
    })
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter().enumerate().fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) })
}

/// Approximate minimum-enclosing-ball centre by Bădoiu–Clarkson iterations.
fn enclosing_centre(points: &PointSet, idx: &[usize]) -> Vec<f64> {
    let mut c = points.get(idx[0]).to_vec();
    if idx.len() == 2 {
        return c.iter().zip(points.get(idx[1])).map(|(a, b)| 0.5 * (a + b)).collect();
    }
    for t in 1..=1000 {
        let far = idx.iter().copied().max_by(|&a, &b| dist(points.get(a), &c).total_cmp(&dist(points.get(b), &c))).unwrap();
        let p = points.get(far);
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += (pi - *ci) / (t as f64 + 1.0);
        }
    }
    c
}

/// Exact covering of points on a line by `centres` intervals.
fn cover_line(values: &[f64], centres: usize, n: usize) -> EntropyEstimate {
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let needed = |r: f64| -> usize {
        let mut count = 0;
        let mut i = 0;
        while i < xs.len() {
            count += 1;
            let reach = xs[i] + 2.0 * r;
            while i < xs.len() && xs[i] <= reach {
                i += 1;
            }
        }
        count
    };
    let method = "interval-sweep-bisection".to_string();
    if needed(0.0) <= centres {
        return EntropyEstimate { n, lower: 0.0, upper: 0.0, method, flags: Vec::new() };
    }
    let (mut lo, mut hi) = (0.0, (xs[xs.len() - 1] - xs[0]) / 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if needed(mid) <= centres {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    EntropyEstimate { n, lower: lo, upper: hi, method, flags: Vec::new() }
}

/// `C_p = 128 (32 + 16/p)^{1/p}`.
pub fn carl_constant(p: f64) -> f64 {
    128.0 * (32.0 + 16.0 / p).powf(1.0 / p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlReport {
    pub p: f64,
    pub constant: f64,
    /// `sup_{k≤n} k^{1/p} e_k / sup_{k≤n} k^{1/p} s_k` for `n = 1..=n_max`.
    pub ratios: Vec<f64>,
    /// Indices `n` whose ratio exceeds the constant.
    pub violations: Vec<usize>,
}

impl CarlReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares weighted running suprema of entropy and s-number sequences with
/// Carl's inequality. A violation indicates a data or implementation error.
pub fn carl_check(e_values: &[f64], s_values: &[f64], p: f64, n_max: usize) -> Result<CarlReport> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    for seq in [e_values, s_values] {
        if seq.len() < n_max {
            return Err(Error::InsufficientPoints { needed: n_max, got: seq.len() });
        }
        if let Some(i) = seq[..n_max].iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositive { index: i + 1, value: seq[i] });
        }
    }
    let constant = carl_constant(p);
    let (mut se, mut ss) = (0.0f64, 0.0f64);
    let mut ratios = Vec::with_capacity(n_max);
    let mut violations = Vec::new();
    for k in 1..=n_max {
        let w = (k as f64).powf(1.0 / p);
        se = se.max(w * e_values[k - 1]);
        ss = ss.max(w * s_values[k - 1]);
        let r = se / ss;
        if r > constant {
            violations.push(k);
        }
        ratios.push(r);
    }
    Ok(CarlReport { p, constant, ratios, violations })
}
