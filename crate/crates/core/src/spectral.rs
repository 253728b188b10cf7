//! Eigensystems of the integral operator `T_k f = ∫ k(·, x) f(x) dμ(x)`.
//!
//! [`nystrom_spectrum`] discretizes `T_k` with a quadrature rule and solves the
//! symmetrized eigenproblem `W^{1/2} K W^{1/2} u = λ u` densely. Node values of
//! the eigenfunctions are `u_j / √w_j`, which makes them orthonormal in the
//! discrete `L_2(μ)` inner product. [`analytic_spectrum`] returns the closed
//! forms for the Brownian kernels and serves as the reference oracle.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::format::{num, parse_num, sha256_hex};
use crate::kernel::{AnalyticSystem, EigenBasis, ExpansionSource, Kernel, MercerExpansion};
use crate::quadrature::QuadratureRule;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpectrumDiagnostics {
    /// Number of negative eigenvalues of the discretized operator (clamped to 0).
    pub clamped_negative: usize,
    /// Most negative raw eigenvalue, 0 when none.
    pub min_raw_eigenvalue: f64,
}

/// Ordered eigenvalue and eigenfunction estimates.
#[derive(Clone, Debug)]
pub struct SpectrumEstimate {
    kernel_id: String,
    expansion: MercerExpansion,
    diagnostics: SpectrumDiagnostics,
}

impl SpectrumEstimate {
    pub fn kernel_id(&self) -> &str {
        &self.kernel_id
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.expansion.eigenvalues()
    }

    /// Eigenvalue with zero-based index.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        self.eigenvalues()
            .get(k)
            .copied()
            .ok_or(Error::IndexOutOfRange { index: k + 1, available: self.len() })
    }

    pub fn len(&self) -> usize {
        self.expansion.n_terms()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn expansion(&self) -> &MercerExpansion {
        &self.expansion
    }

    pub fn diagnostics(&self) -> SpectrumDiagnostics {
        self.diagnostics
    }

    pub fn is_analytic(&self) -> bool {
        self.expansion.source() == ExpansionSource::Analytic
    }

    pub fn quad(&self) -> Option<&QuadratureRule> {
        match self.expansion.basis() {
            EigenBasis::Nystrom { quad, .. } => Some(quad),
            EigenBasis::Analytic(_) => None,
        }
    }

    /// Eigenfunction values at the quadrature nodes (`nodes x N`).
    pub fn node_values(&self) -> Option<&Mat<f64>> {
        match self.expansion.basis() {
            EigenBasis::Nystrom { node_values, .. } => Some(node_values),
            EigenBasis::Analytic(_) => None,
        }
    }

    /// Largest deviation of `V^T diag(w) V` from the identity.
    pub fn weight_orthonormality_defect(&self) -> Option<f64> {
        let (quad, v) = (self.quad()?, self.node_values()?);
        let w = quad.weights();
        let n = v.ncols();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..=a {
                let g: f64 = (0..quad.len()).map(|j| w[j] * v[(j, a)] * v[(j, b)]).sum();
                worst = worst.max((g - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
        Some(worst)
    }
}

/// Nyström eigensystem of `T_k` under `quad`, largest `n_eigs` pairs.
pub fn nystrom_spectrum(k: &Kernel, quad: &QuadratureRule, n_eigs: usize) -> Result<SpectrumEstimate> {
    if n_eigs == 0 {
        return Err(Error::InvalidParameter("n_eigs must be positive".into()));
    }
    let m = quad.len();
    if n_eigs > m {
        return Err(Error::InsufficientResolution { requested: n_eigs, available: m });
    }
    quad.check_covers(k.domain())?;

    let sw: Vec<f64> = quad.weights().iter().map(|w| w.sqrt()).collect();
    let nodes = quad.nodes();
    let mut a = Mat::<f64>::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = sw[i] * k.value(nodes.get(i), nodes.get(j)) * sw[j];
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();

    let mut diagnostics = SpectrumDiagnostics::default();
    for i in 0..m {
        if s[i] < 0.0 {
            diagnostics.clamped_negative += 1;
            diagnostics.min_raw_eigenvalue = diagnostics.min_raw_eigenvalue.min(s[i]);
        }
    }

    // faer sorts ascending
    let mut eigenvalues = Vec::with_capacity(n_eigs);
    let mut node_values = Mat::<f64>::zeros(m, n_eigs);
    for r in 0..n_eigs {
        let col = m - 1 - r;
        eigenvalues.push(s[col].max(0.0));
        let lead = (0..m).map(|j| u[(j, col)]).find(|v| v.abs() > 1e-300).unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        for j in 0..m {
            node_values[(j, r)] = sign * u[(j, col)] / sw[j];
        }
    }
    let expansion = MercerExpansion::nystrom(k.clone(), quad.clone(), eigenvalues, node_values)?;
    Ok(SpectrumEstimate { kernel_id: k.name(), expansion, diagnostics })
}

/// Closed-form spectrum for `brownian_motion` or `brownian_bridge` on `[0, 1]`.
pub fn analytic_spectrum(kernel_id: &str, n_eigs: usize) -> Result<SpectrumEstimate> {
    let system = AnalyticSystem::from_id(kernel_id).ok_or_else(|| Error::NoAnalyticSpectrum(kernel_id.to_string()))?;
    if n_eigs == 0 {
        return Err(Error::InvalidParameter("n_eigs must be positive".into()));
    }
    Ok(SpectrumEstimate {
        kernel_id: system.kernel_id().to_string(),
        expansion: MercerExpansion::analytic(system, n_eigs),
        diagnostics: SpectrumDiagnostics::default(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailSum {
    pub value: f64,
    /// Set when the raw difference was negative and clamped to 0.
    pub clamped: bool,
}

/// `Σ_{i > n} λ_i`. With a trace the result is `trace - Σ_{i ≤ n} λ_i`, which
/// also accounts for eigenvalues beyond the resolved range.
pub fn tail_sum(spec: &SpectrumEstimate, n: usize, trace: Option<f64>) -> Result<TailSum> {
    let ev = spec.eigenvalues();
    if n > ev.len() {
        return Err(Error::InsufficientTail { n, available: ev.len() });
    }
    let raw = match trace {
        Some(t) => t - ev[..n].iter().sum::<f64>(),
        None => ev[n..].iter().sum::<f64>(),
    };
    Ok(if raw < 0.0 { TailSum { value: 0.0, clamped: true } } else { TailSum { value: raw, clamped: false } })
}

/// Disk cache for Nyström spectra.
///
/// Two files per entry: `spectrum-<key>.csv` holds a `#` header line followed
/// by `index,eigenvalue` rows; `spectrum-<key>-eigvec.csv` holds
/// `node,weight,x1..xd,e1..eN` rows. The key hashes the kernel name, domain,
/// quadrature signature and number of eigenpairs.
pub mod cache {
    use super::*;

    pub fn key(k: &Kernel, quad: &QuadratureRule, n_eigs: usize) -> String {
        let text = format!("{}|{:?}|{}|{}", k.name(), k.domain().axes(), quad.signature(), n_eigs);
        sha256_hex(&text)[..16].to_string()
    }

    pub fn paths(dir: &Path, key: &str) -> (PathBuf, PathBuf) {
        (dir.join(format!("spectrum-{key}.csv")), dir.join(format!("spectrum-{key}-eigvec.csv")))
    }

    pub fn write(dir: &Path, k: &Kernel, spec: &SpectrumEstimate) -> Result<(PathBuf, PathBuf)> {
        let quad = spec.quad().ok_or(Error::MissingEigenfunctions)?;
        let v = spec.node_values().ok_or(Error::MissingEigenfunctions)?;
        fs::create_dir_all(dir)?;
        let key = key(k, quad, spec.len());
        let (sp, ep) = paths(dir, &key);
        let header = format!(
            "# nwidth spectrum kernel={} quad={} n_eigs={} clamped_negative={}\n",
            k.name(),
            quad.signature(),
            spec.len(),
            spec.diagnostics().clamped_negative
        );
        let mut out = String::with_capacity(40 * spec.len());
        out.push_str(&header);
        out.push_str("index,eigenvalue\n");
        for (i, l) in spec.eigenvalues().iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, num(*l)));
        }
        fs::write(&sp, out)?;

        let mut f = std::io::BufWriter::new(fs::File::create(&ep)?);
        f.write_all(header.replace("spectrum", "eigenvectors").as_bytes())?;
        let mut cols = vec!["node".to_string(), "weight".to_string()];
        cols.extend((1..=quad.dim()).map(|a| format!("x{a}")));
        cols.extend((1..=spec.len()).map(|i| format!("e{i}")));
        writeln!(f, "{}", cols.join(","))?;
        for j in 0..quad.len() {
            let mut row = vec![j.to_string(), num(quad.weights()[j])];
            row.extend(quad.nodes().get(j).iter().map(|c| num(*c)));
            row.extend((0..spec.len()).map(|i| num(v[(j, i)])));
            writeln!(f, "{}", row.join(","))?;
        }
        f.flush()?;
        Ok((sp, ep))
    }

    /// Loads a cached spectrum for exactly this kernel, rule and size, or
    /// `None` when no entry exists. A present but inconsistent entry is an error.
    pub fn read(dir: &Path, k: &Kernel, quad: &QuadratureRule, n_eigs: usize) -> Result<Option<SpectrumEstimate>> {
        let key = key(k, quad, n_eigs);
        let (sp, ep) = paths(dir, &key);
        if !sp.exists() || !ep.exists() {
            return Ok(None);
        }
        let bad = |p: &Path, msg: String| Error::Format { path: p.display().to_string(), message: msg };

        let text = fs::read_to_string(&sp)?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let clamped_negative = header
            .split_whitespace()
            .find_map(|t| t.strip_prefix("clamped_negative="))
            .and_then(|v| v.parse().ok())
            .unwrap_or(0);
        lines.next();
        let mut eigenvalues = Vec::with_capacity(n_eigs);
        for line in lines {
            let val = line.split(',').nth(1).and_then(parse_num).ok_or_else(|| bad(&sp, format!("bad row `{line}`")))?;
            eigenvalues.push(val);
        }
        if eigenvalues.len() != n_eigs {
            return Err(bad(&sp, format!("expected {n_eigs} eigenvalues, found {}", eigenvalues.len())));
        }

        let text = fs::read_to_string(&ep)?;
        let mut node_values = Mat::<f64>::zeros(quad.len(), n_eigs);
        let d = quad.dim();
        let mut rows = 0;
        for line in text.lines().skip(2) {
            let fields: Vec<f64> =
                line.split(',').map(parse_num).collect::<Option<_>>().ok_or_else(|| bad(&ep, format!("bad row `{line}`")))?;
            if fields.len() != 2 + d + n_eigs {
                return Err(bad(&ep, format!("row has {} fields", fields.len())));
            }
            let j = fields[0] as usize;
            if j >= quad.len()
                || fields[1].to_bits() != quad.weights()[j].to_bits()
                || fields[2..2 + d].iter().zip(quad.nodes().get(j)).any(|(a, b)| a.to_bits() != b.to_bits())
            {
                return Err(bad(&ep, format!("node {j} does not match the quadrature rule")));
            }
            for i in 0..n_eigs {
                node_values[(j, i)] = fields[2 + d + i];
            }
            rows += 1;
        }
        if rows != quad.len() {
            return Err(bad(&ep, format!("expected {} nodes, found {rows}", quad.len())));
        }
        let expansion = MercerExpansion::nystrom(k.clone(), quad.clone(), eigenvalues, node_values)?;
        let diagnostics = SpectrumDiagnostics { clamped_negative, min_raw_eigenvalue: 0.0 };
        Ok(Some(SpectrumEstimate { kernel_id: k.name(), expansion, diagnostics }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::BoxDomain;

    #[test]
    fn analytic_examples() {
        let bm = analytic_spectrum("brownian_motion", 5).unwrap();
        assert!((bm.eigenvalue(0).unwrap() - 0.405285).abs() < 1e-6);
        let br = analytic_spectrum("brownian_bridge", 5).unwrap();
        assert!((br.eigenvalue(0).unwrap() - 0.101321).abs() < 1e-6);
        assert!(matches!(analytic_spectrum("matern32", 3), Err(Error::NoAnalyticSpectrum(_))));
    }

    #[test]
    fn analytic_trace_identity() {
        let bm = analytic_spectrum("brownian_motion", 1_000_000).unwrap();
        let total: f64 = bm.eigenvalues().iter().sum();
        assert!((total - 0.5).abs() < 1e-6);
    }

    #[test]
    fn tail_examples() {
        let bm = analytic_spectrum("brownian_motion", 10).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert_eq!(tail_sum(&bm, 0, Some(0.5)).unwrap().value, 0.5);
        assert!((tail_sum(&bm, 1, Some(0.5)).unwrap().value - (0.5 - 4.0 / pi2)).abs() < 1e-15);
        let by_hand = 0.5 - (4.0 / pi2) * (1.0 + 1.0 / 9.0 + 1.0 / 25.0 + 1.0 / 49.0);
        let t4 = tail_sum(&bm, 4, Some(0.5)).unwrap().value;
        assert!((t4 - by_hand).abs() < 1e-15);
        assert!((t4 - 0.0252011).abs() < 1e-6);
        assert!(matches!(tail_sum(&bm, 11, None), Err(Error::InsufficientTail { .. })));
        let clamped = tail_sum(&bm, 3, Some(0.1)).unwrap();
        assert!(clamped.clamped && clamped.value == 0.0);
    }

    #[test]
    fn nystrom_rejects_undersized_rule() {
        let q = QuadratureRule::midpoint(&BoxDomain::unit(1), 8).unwrap();
        assert!(matches!(
            nystrom_spectrum(&Kernel::brownian_motion(), &q, 9),
            Err(Error::InsufficientResolution { requested: 9, available: 8 })
        ));
    }

    #[test]
    fn nystrom_small_rule_is_ordered_and_orthonormal() {
        let q = QuadratureRule::midpoint(&BoxDomain::unit(1), 200).unwrap();
        let s = nystrom_spectrum(&Kernel::brownian_bridge(), &q, 20).unwrap();
        assert!(s.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
        assert!(s.weight_orthonormality_defect().unwrap() < 1e-8);
        let v = s.node_values().unwrap();
        assert!((0..20).all(|i| v[(0, i)] > 0.0));
    }
}
