//! Kernel catalog, Gram matrices, Mercer expansions and power kernels.
//!
//! Every kernel lives on an axis-aligned box and is integrated against the
//! Lebesgue measure of that box. The catalog covers the Brownian family on
//! intervals (motion, bridge, once-integrated motion) and the isotropic
//! Matérn-1/2, Matérn-3/2 and Gaussian kernels in any dimension.

use faer::Mat;

use crate::error::{Error, Result};
use crate::points::{dist, sq_dist, PointSet};
use crate::quadrature::QuadratureRule;

const DOMAIN_SLACK: f64 = 1e-12;

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    axes: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(axes: Vec<(f64, f64)>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("domain needs at least one axis".into()));
        }
        for &(lo, hi) in &axes {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParameter(format!("invalid domain axis [{lo}, {hi}]")));
            }
        }
        Ok(Self { axes })
    }

    /// `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Self {
        Self { axes: vec![(0.0, 1.0); dim.max(1)] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, a: usize) -> (f64, f64) {
        self.axes[a]
    }

    pub fn axes(&self) -> &[(f64, f64)] {
        &self.axes
    }

    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|(lo, hi)| hi - lo).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.axes).all(|(&v, &(lo, hi))| {
                let slack = DOMAIN_SLACK * (hi - lo).max(1.0);
                v >= lo - slack && v <= hi + slack
            })
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.axes) {
            *v = v.clamp(lo, hi);
        }
    }
}

/// Kernels with a closed-form Mercer system on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticSystem {
    /// `min(s, t)`: `λ_i = 4 / ((2i-1)^2 π^2)`, `e_i(t) = √2 sin((2i-1) π t / 2)`.
    BrownianMotion,
    /// `min(s, t) - s t`: `λ_i = 1 / (i^2 π^2)`, `e_i(t) = √2 sin(i π t)`.
    BrownianBridge,
}

impl AnalyticSystem {
    /// Eigenvalue with zero-based index `k` (i = k + 1).
    pub fn eigenvalue(self, k: usize) -> f64 {
        let i = (k + 1) as f64;
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        match self {
            AnalyticSystem::BrownianMotion => 4.0 / ((2.0 * i - 1.0).powi(2) * pi2),
            AnalyticSystem::BrownianBridge => 1.0 / (i * i * pi2),
        }
    }

    pub fn eigenfunction(self, k: usize, t: f64) -> f64 {
        let i = (k + 1) as f64;
        let pi = std::f64::consts::PI;
        let arg = match self {
            AnalyticSystem::BrownianMotion => (2.0 * i - 1.0) * pi * t / 2.0,
            AnalyticSystem::BrownianBridge => i * pi * t,
        };
        std::f64::consts::SQRT_2 * arg.sin()
    }

    /// `Σ_i λ_i = ∫ k(t, t) dt`.
    pub fn trace(self) -> f64 {
        match self {
            AnalyticSystem::BrownianMotion => 0.5,
            AnalyticSystem::BrownianBridge => 1.0 / 6.0,
        }
    }

    pub fn kernel_id(self) -> &'static str {
        match self {
            AnalyticSystem::BrownianMotion => "brownian_motion",
            AnalyticSystem::BrownianBridge => "brownian_bridge",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "brownian_motion" => Some(AnalyticSystem::BrownianMotion),
            "brownian_bridge" => Some(AnalyticSystem::BrownianBridge),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelFamily {
    BrownianMotion,
    BrownianBridge,
    /// Covariance of `∫_0^t W(u) du`.
    IntegratedBrownianMotion,
    Matern12 { length_scale: f64 },
    Matern32 { length_scale: f64 },
    Gaussian { length_scale: f64 },
}

/// Whether the L_2 eigenfunctions are known to be uniformly bounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenfunctionBound {
    Verified(f64),
    Unverified,
}

/// A symmetric positive definite kernel on a box.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    family: KernelFamily,
    domain: BoxDomain,
}

pub const KERNEL_IDS: [&str; 6] =
    ["brownian_motion", "brownian_bridge", "integrated_brownian_motion", "matern12", "matern32", "gaussian"];

impl Kernel {
    pub fn new(family: KernelFamily, domain: BoxDomain) -> Result<Self> {
        match family {
            KernelFamily::BrownianMotion | KernelFamily::IntegratedBrownianMotion => {
                if domain.dim() != 1 || domain.axis(0).0 < 0.0 {
                    return Err(Error::InvalidParameter(
                        "Brownian motion kernels need a one-dimensional domain inside [0, inf)".into(),
                    ));
                }
            }
            KernelFamily::BrownianBridge => {
                let (lo, hi) = domain.axis(0);
                if domain.dim() != 1 || lo < 0.0 || hi > 1.0 {
                    return Err(Error::InvalidParameter(
                        "the Brownian bridge kernel needs a one-dimensional domain inside [0, 1]".into(),
                    ));
                }
            }
            KernelFamily::Matern12 { length_scale }
            | KernelFamily::Matern32 { length_scale }
            | KernelFamily::Gaussian { length_scale } => {
                if !(length_scale > 0.0 && length_scale.is_finite()) {
                    return Err(Error::InvalidParameter(format!("length scale {length_scale} must be positive")));
                }
            }
        }
        Ok(Self { family, domain })
    }

    pub fn brownian_motion() -> Self {
        Self { family: KernelFamily::BrownianMotion, domain: BoxDomain::unit(1) }
    }

    pub fn brownian_bridge() -> Self {
        Self { family: KernelFamily::BrownianBridge, domain: BoxDomain::unit(1) }
    }

    /// Builds a catalog kernel from its identifier.
    pub fn from_id(id: &str, length_scale: Option<f64>, domain: BoxDomain) -> Result<Self> {
        let ls = || {
            length_scale.ok_or_else(|| Error::Config {
                field: "kernel.length_scale".into(),
                message: format!("kernel `{id}` needs a length scale"),
            })
        };
        let family = match id {
            "brownian_motion" => KernelFamily::BrownianMotion,
            "brownian_bridge" => KernelFamily::BrownianBridge,
            "integrated_brownian_motion" => KernelFamily::IntegratedBrownianMotion,
            "matern12" => KernelFamily::Matern12 { length_scale: ls()? },
            "matern32" => KernelFamily::Matern32 { length_scale: ls()? },
            "gaussian" => KernelFamily::Gaussian { length_scale: ls()? },
            other => {
                return Err(Error::Config {
                    field: "kernel.id".into(),
                    message: format!("unknown kernel `{other}` (known: {})", KERNEL_IDS.join(", ")),
                })
            }
        };
        Self::new(family, domain)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn id(&self) -> &'static str {
        match self.family {
            KernelFamily::BrownianMotion => "brownian_motion",
            KernelFamily::BrownianBridge => "brownian_bridge",
            KernelFamily::IntegratedBrownianMotion => "integrated_brownian_motion",
            KernelFamily::Matern12 { .. } => "matern12",
            KernelFamily::Matern32 { .. } => "matern32",
            KernelFamily::Gaussian { .. } => "gaussian",
        }
    }

    /// Identifier including parameters, e.g. `matern32(l=0.5)`.
    pub fn name(&self) -> String {
        match self.family {
            KernelFamily::Matern12 { length_scale }
            | KernelFamily::Matern32 { length_scale }
            | KernelFamily::Gaussian { length_scale } => format!("{}(l={length_scale})", self.id()),
            _ => self.id().to_string(),
        }
    }

    /// Sobolev order of the RKHS, used for preset rate targets.
    pub fn smoothness_hint(&self) -> Option<f64> {
        let d = self.dim() as f64;
        match self.family {
            KernelFamily::BrownianMotion | KernelFamily::BrownianBridge => Some(1.0),
            KernelFamily::IntegratedBrownianMotion => Some(2.0),
            KernelFamily::Matern12 { .. } => Some(0.5 + d / 2.0),
            KernelFamily::Matern32 { .. } => Some(1.5 + d / 2.0),
            KernelFamily::Gaussian { .. } => None,
        }
    }

    pub fn eigenfunction_bound(&self) -> EigenfunctionBound {
        match self.analytic_system() {
            Some(_) => EigenfunctionBound::Verified(std::f64::consts::SQRT_2),
            None => EigenfunctionBound::Unverified,
        }
    }

    /// Closed-form Mercer system, available for Brownian motion and bridge on `[0, 1]`.
    pub fn analytic_system(&self) -> Option<AnalyticSystem> {
        if self.domain != BoxDomain::unit(1) {
            return None;
        }
        match self.family {
            KernelFamily::BrownianMotion => Some(AnalyticSystem::BrownianMotion),
            KernelFamily::BrownianBridge => Some(AnalyticSystem::BrownianBridge),
            _ => None,
        }
    }

    /// Kernel value without domain checks.
    #[inline]
    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.family {
            KernelFamily::BrownianMotion => x[0].min(y[0]),
            KernelFamily::BrownianBridge => x[0].min(y[0]) - x[0] * y[0],
            KernelFamily::IntegratedBrownianMotion => {
                let (s, t) = (x[0].min(y[0]), x[0].max(y[0]));
                s * s * t / 2.0 - s * s * s / 6.0
            }
            KernelFamily::Matern12 { length_scale } => (-dist(x, y) / length_scale).exp(),
            KernelFamily::Matern32 { length_scale } => {
                let a = 3f64.sqrt() * dist(x, y) / length_scale;
                (1.0 + a) * (-a).exp()
            }
            KernelFamily::Gaussian { length_scale } => (-sq_dist(x, y) / (2.0 * length_scale * length_scale)).exp(),
        }
    }

    #[inline]
    pub fn diag(&self, x: &[f64]) -> f64 {
        self.value(x, x)
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if !self.domain.contains(x) {
            return Err(Error::Domain { point: x.to_vec() });
        }
        Ok(())
    }

    pub fn check_points(&self, points: &PointSet) -> Result<()> {
        if points.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: points.dim() });
        }
        points.iter().try_for_each(|p| self.check_point(p))
    }

    /// Cross-kernel matrix `[k(a_i, b_j)]`.
    pub fn cross_matrix(&self, a: &PointSet, b: &PointSet) -> Mat<f64> {
        Mat::from_fn(a.len(), b.len(), |i, j| self.value(a.get(i), b.get(j)))
    }
}

/// `k(x, x2)` with domain validation.
pub fn eval_kernel(k: &Kernel, x: &[f64], x2: &[f64]) -> Result<f64> {
    k.check_point(x)?;
    k.check_point(x2)?;
    Ok(k.value(x, x2))
}

/// Gram matrix of pairwise distinct points.
pub fn gram_matrix(k: &Kernel, points: &PointSet) -> Result<Mat<f64>> {
    k.check_points(points)?;
    if let Some((i, j)) = points.first_duplicate() {
        return Err(Error::DegenerateDesign(format!("points {i} and {j} coincide")));
    }
    let n = points.len();
    let mut g = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = k.value(points.get(i), points.get(j));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// `∫ k(x, x) dμ(x)` by quadrature.
pub fn trace_integral(k: &Kernel, quad: &QuadratureRule) -> Result<f64> {
    quad.check_covers(k.domain())?;
    Ok(quad.nodes().iter().zip(quad.weights()).map(|(x, w)| w * k.diag(x)).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionSource {
    Analytic,
    Nystrom,
}

/// Eigenfunction representation behind a Mercer expansion.
#[derive(Clone, Debug)]
pub enum EigenBasis {
    Analytic(AnalyticSystem),
    /// Node values at a quadrature rule, extended off the nodes by
    /// `e_i(x) = λ_i^{-1} Σ_j w_j k(x, x_j) e_i(x_j)`.
    Nystrom { kernel: Kernel, quad: QuadratureRule, node_values: Mat<f64> },
}

/// Truncated eigensystem `(λ_i, e_i)_{i ≤ N}` of the integral operator.
#[derive(Clone, Debug)]
pub struct MercerExpansion {
    eigenvalues: Vec<f64>,
    basis: EigenBasis,
}

impl MercerExpansion {
    pub fn analytic(system: AnalyticSystem, n_terms: usize) -> Self {
        Self { eigenvalues: (0..n_terms).map(|k| system.eigenvalue(k)).collect(), basis: EigenBasis::Analytic(system) }
    }

    /// Expansion from Nyström data. Eigenvalues must be nonincreasing and
    /// nonnegative; `node_values` is `nodes x N`.
    pub fn nystrom(kernel: Kernel, quad: QuadratureRule, eigenvalues: Vec<f64>, node_values: Mat<f64>) -> Result<Self> {
        if node_values.nrows() != quad.len() {
            return Err(Error::LengthMismatch { expected: quad.len(), got: node_values.nrows() });
        }
        if node_values.ncols() != eigenvalues.len() {
            return Err(Error::LengthMismatch { expected: eigenvalues.len(), got: node_values.ncols() });
        }
        check_spectrum_order(&eigenvalues)?;
        Ok(Self { eigenvalues, basis: EigenBasis::Nystrom { kernel, quad, node_values } })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn n_terms(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    pub fn source(&self) -> ExpansionSource {
        match self.basis {
            EigenBasis::Analytic(_) => ExpansionSource::Analytic,
            EigenBasis::Nystrom { .. } => ExpansionSource::Nystrom,
        }
    }

    /// Value of the eigenfunction with zero-based index `k` at `x`.
    pub fn eigenfunction(&self, k: usize, x: &[f64]) -> f64 {
        match &self.basis {
            EigenBasis::Analytic(sys) => sys.eigenfunction(k, x[0]),
            EigenBasis::Nystrom { kernel, quad, node_values } => {
                let lambda = self.eigenvalues[k];
                if lambda <= 0.0 {
                    return 0.0;
                }
                let s: f64 = quad
                    .nodes()
                    .iter()
                    .zip(quad.weights())
                    .enumerate()
                    .map(|(j, (xj, w))| w * kernel.value(x, xj) * node_values[(j, k)])
                    .sum();
                s / lambda
            }
        }
    }

    /// Matrix `[e_i(x_j)]`, one row per point and one column per term.
    pub fn eigenfunctions_at(&self, points: &PointSet, n_terms: usize) -> Result<Mat<f64>> {
        if n_terms > self.n_terms() {
            return Err(Error::Truncation { requested: n_terms, available: self.n_terms() });
        }
        match &self.basis {
            EigenBasis::Analytic(sys) => {
                Ok(Mat::from_fn(points.len(), n_terms, |j, k| sys.eigenfunction(k, points.get(j)[0])))
            }
            EigenBasis::Nystrom { kernel, quad, node_values } => {
                let cross = kernel.cross_matrix(points, quad.nodes());
                let w = quad.weights();
                let scaled = Mat::from_fn(quad.len(), n_terms, |j, k| {
                    let lambda = self.eigenvalues[k];
                    if lambda > 0.0 {
                        w[j] * node_values[(j, k)] / lambda
                    } else {
                        0.0
                    }
                });
                Ok(&cross * &scaled)
            }
        }
    }

    /// Largest entry of `|E^T diag(w) E - I|` over the first `n_terms` eigenfunctions.
    pub fn orthonormality_defect(&self, quad: &QuadratureRule, n_terms: usize) -> Result<f64> {
        let e = self.eigenfunctions_at(quad.nodes(), n_terms)?;
        let w = quad.weights();
        let mut worst = 0.0f64;
        for a in 0..n_terms {
            for b in 0..=a {
                let g: f64 = (0..quad.len()).map(|j| w[j] * e[(j, a)] * e[(j, b)]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        Ok(worst)
    }
}

pub(crate) fn check_spectrum_order(eigenvalues: &[f64]) -> Result<()> {
    if let Some(i) = eigenvalues.iter().position(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(Error::InvalidParameter(format!("eigenvalue {i} is negative or not finite")));
    }
    if let Some(i) = eigenvalues.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::InvalidParameter(format!("eigenvalues increase at index {}", i + 1)));
    }
    Ok(())
}

/// Kernel `Σ_{i ≤ N} λ_i^γ e_i(x) e_i(x')` of the power scale between L_2 and the RKHS.
#[derive(Clone, Copy, Debug)]
pub struct PowerKernelSpec<'a> {
    base: &'a MercerExpansion,
    gamma: f64,
    n_terms: usize,
}

impl<'a> PowerKernelSpec<'a> {
    pub fn new(base: &'a MercerExpansion, gamma: f64, n_terms: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("power exponent {gamma} must be positive")));
        }
        if n_terms == 0 {
            return Err(Error::InvalidParameter("power kernel needs at least one term".into()));
        }
        if n_terms > base.n_terms() {
            return Err(Error::Truncation { requested: n_terms, available: base.n_terms() });
        }
        Ok(Self { base, gamma, n_terms })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// `Σ_{i ≤ N} λ_i^γ`.
    pub fn truncated_trace(&self) -> f64 {
        self.base.eigenvalues()[..self.n_terms].iter().map(|l| l.powf(self.gamma)).sum()
    }
}

pub fn power_kernel_eval(spec: &PowerKernelSpec<'_>, x: &[f64], x2: &[f64]) -> Result<f64> {
    if let EigenBasis::Nystrom { kernel, .. } = spec.base.basis() {
        kernel.check_point(x)?;
        kernel.check_point(x2)?;
    } else {
        let unit = BoxDomain::unit(1);
        for p in [x, x2] {
            if !unit.contains(p) {
                return Err(Error::Domain { point: p.to_vec() });
            }
        }
    }
    Ok((0..spec.n_terms)
        .map(|k| spec.base.eigenvalues()[k].powf(spec.gamma) * spec.base.eigenfunction(k, x) * spec.base.eigenfunction(k, x2))
        .sum())
}
