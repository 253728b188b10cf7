//! Rate fitting and asymptotic-equivalence judgments.
//!
//! `a_n ≍ b_n` cannot be verified on a finite window, so it is operationalized
//! as agreement of log-log slopes within a tolerance plus a bounded ratio
//! `a_n / b_n ∈ [1/C, C]`. Every judgment is a [`Verdict`] carrying its
//! premises, so numeric certificates and theorem-based conclusions stay
//! distinguishable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positive sequence sampled at strictly increasing indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSeries {
    pub label: String,
    pairs: Vec<(usize, f64)>,
}

impl RateSeries {
    pub fn new(label: impl Into<String>, pairs: Vec<(usize, f64)>) -> Result<Self> {
        for (i, &(n, v)) in pairs.iter().enumerate() {
            if n == 0 {
                return Err(Error::InvalidParameter("series indices start at 1".into()));
            }
            if i > 0 && n <= pairs[i - 1].0 {
                return Err(Error::InvalidParameter(format!("series index {n} is not increasing")));
            }
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositive { index: n, value: v });
            }
        }
        Ok(Self { label: label.into(), pairs })
    }

    /// Series `n ↦ f(n)` for `n` in `ns`.
    pub fn from_fn(label: impl Into<String>, ns: impl IntoIterator<Item = usize>, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new(label, ns.into_iter().map(|n| (n, f(n))).collect())
    }

    pub fn pairs(&self) -> &[(usize, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.pairs.binary_search_by_key(&n, |p| p.0).ok().map(|i| self.pairs[i].1)
    }

    fn window(&self, window: (usize, usize), dyadic: bool) -> Vec<(usize, f64)> {
        self.pairs
            .iter()
            .copied()
            .filter(|&(n, _)| n >= window.0 && n <= window.1 && (!dyadic || n.is_power_of_two()))
            .collect()
    }
}

/// Least-squares fit of `ln value = intercept + slope · ln n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub label: String,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// First and last index actually used.
    pub window: (usize, usize),
    pub points: usize,
    pub dyadic: bool,
}

impl SlopeReport {
    /// `slope ± z · stderr`.
    pub fn confidence(&self, z: f64) -> (f64, f64) {
        (self.slope - z * self.stderr, self.slope + z * self.stderr)
    }
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if xs.len() > 2 { (ssr / (k - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, intercept, stderr)
}

/// Log-log OLS fit over `window` (inclusive), optionally keeping only `n = 2^j`.
pub fn fit_loglog(series: &RateSeries, window: (usize, usize), dyadic: bool) -> Result<SlopeReport> {
    let pts = series.window(window, dyadic);
    if pts.len() < 4 {
        return Err(Error::InsufficientPoints { needed: 4, got: pts.len() });
    }
    let xs: Vec<f64> = pts.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, stderr) = ols(&xs, &ys);
    Ok(SlopeReport {
        label: series.label.clone(),
        slope,
        intercept,
        stderr,
        window: (pts[0].0, pts[pts.len() - 1].0),
        points: pts.len(),
        dyadic,
    })
}

/// Default cap below which regularity constants count as bounded.
pub const REGULARITY_CAP: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    /// `max a_n / a_{2n}` over observed dyadic pairs.
    pub c_half: f64,
    /// `max_{m ≤ n} a_n / a_m`, the almost-decreasing constant.
    pub c_mono: f64,
    pub dyadic_pairs: usize,
    pub regular: bool,
}

/// Smallest constants with `a_n ≤ c a_{2n}` and `a_n ≤ c a_m` for all observed `m ≤ n`.
pub fn regular_check(series: &RateSeries, cap: f64) -> Result<Regularity> {
    let mut c_half = 0.0f64;
    let mut dyadic_pairs = 0;
    for &(n, v) in series.pairs() {
        if let Some(w) = series.get(2 * n) {
            c_half = c_half.max(v / w);
            dyadic_pairs += 1;
        }
    }
    if dyadic_pairs < 3 {
        return Err(Error::MissingDyadicPairs(series.label.clone()));
    }
    let mut c_mono = 0.0f64;
    let mut running_min = f64::INFINITY;
    for &(_, v) in series.pairs() {
        running_min = running_min.min(v);
        c_mono = c_mono.max(v / running_min);
    }
    let regular = c_half.is_finite() && c_mono.is_finite() && c_half <= cap && c_mono <= cap;
    Ok(Regularity { c_half, c_mono, dyadic_pairs, regular })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Certified,
    Inconclusive,
    HypothesisViolation,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::Certified => "certified",
            VerdictStatus::Inconclusive => "inconclusive",
            VerdictStatus::HypothesisViolation => "hypothesis-violation",
        }
    }
}

/// Whether a verdict rests on numeric evidence alone or applies a theorem to numeric premises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictBasis {
    Numeric,
    TheoremRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Premise {
    pub report: SlopeReport,
    pub target_slope: Option<f64>,
    pub satisfied: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub citation: String,
    pub status: VerdictStatus,
    pub basis: VerdictBasis,
    pub premises: Vec<Premise>,
    /// Observed ratio constant `C`, for equivalence verdicts.
    pub observed_constant: Option<f64>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        self.status == VerdictStatus::Certified
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivTolerances {
    pub slope_tol: f64,
    pub ratio_cap: f64,
}

impl Default for EquivTolerances {
    fn default() -> Self {
        Self { slope_tol: 0.1, ratio_cap: 32.0 }
    }
}

/// Numeric judgment of `a_n ≍ b_n` on the common indices inside `window`.
pub fn asymp_equiv(a: &RateSeries, b: &RateSeries, window: (usize, usize), tol: EquivTolerances) -> Result<Verdict> {
    let common: Vec<(usize, f64, f64)> = a
        .window(window, false)
        .into_iter()
        .filter_map(|(n, va)| b.get(n).map(|vb| (n, va, vb)))
        .collect();
    if common.len() < 4 {
        return Err(Error::GridMismatch(format!(
            "`{}` and `{}` share {} indices in [{}, {}], need 4",
            a.label,
            b.label,
            common.len(),
            window.0,
            window.1
        )));
    }
    let ns: Vec<usize> = common.iter().map(|c| c.0).collect();
    let sa = RateSeries::new(a.label.clone(), common.iter().map(|c| (c.0, c.1)).collect())?;
    let sb = RateSeries::new(b.label.clone(), common.iter().map(|c| (c.0, c.2)).collect())?;
    let fa = fit_loglog(&sa, (ns[0], ns[ns.len() - 1]), false)?;
    let fb = fit_loglog(&sb, (ns[0], ns[ns.len() - 1]), false)?;
    let (rmin, rmax) = common.iter().map(|c| c.1 / c.2).fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let constant = rmax.max(1.0 / rmin);
    let gap = (fa.slope - fb.slope).abs();
    let slope_ok = gap < tol.slope_tol;
    let ratio_ok = constant <= tol.ratio_cap;
    let status = if slope_ok && ratio_ok { VerdictStatus::Certified } else { VerdictStatus::Inconclusive };
    let mut notes = vec![format!("slope gap {gap:.4} against tolerance {}", tol.slope_tol)];
    if !ratio_ok {
        notes.push(format!("ratio constant {constant:.4} exceeds cap {}", tol.ratio_cap));
    }
    Ok(Verdict {
        claim: format!("{} ≍ {}", a.label, b.label),
        citation: "two-sided asymptotic equivalence: slope agreement and bounded ratio on the window".into(),
        status,
        basis: VerdictBasis::Numeric,
        premises: vec![
            Premise { report: fa, target_slope: Some(fb.slope), satisfied: slope_ok, note: "slope of the first series".into() },
            Premise { report: fb, target_slope: None, satisfied: ratio_ok, note: "slope of the second series".into() },
        ],
        observed_constant: Some(constant),
        notes,
    })
}

/// Slope of the pointwise ratio `upper_n / lower_n`. Both series must share their index grid.
pub fn gap_report(upper: &RateSeries, lower: &RateSeries, window: (usize, usize), dyadic: bool) -> Result<SlopeReport> {
    let nu: Vec<usize> = upper.pairs().iter().map(|p| p.0).collect();
    let nl: Vec<usize> = lower.pairs().iter().map(|p| p.0).collect();
    if nu != nl {
        return Err(Error::GridMismatch(format!("`{}` and `{}` have different index grids", upper.label, lower.label)));
    }
    let ratio = RateSeries::new(
        format!("{}/{}", upper.label, lower.label),
        upper.pairs().iter().zip(lower.pairs()).map(|(u, l)| (u.0, u.1 / l.1)).collect(),
    )?;
    fit_loglog(&ratio, window, dyadic)
}

/// Joint fit of `ln value = c + s ln n + β ln ln n`, reported without a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFactorDiagnostic {
    pub slope: f64,
    pub beta: f64,
    pub points: usize,
}

pub fn log_factor_diagnostic(series: &RateSeries, window: (usize, usize)) -> Result<LogFactorDiagnostic> {
    // ln ln n must be positive and varying
    let pts: Vec<(usize, f64)> = series.window((window.0.max(3), window.1), false);
    if pts.len() < 5 {
        return Err(Error::InsufficientPoints { needed: 5, got: pts.len() });
    }
    let rows: Vec<[f64; 3]> = pts.iter().map(|&(n, v)| [(n as f64).ln(), (n as f64).ln().ln(), v.ln()]).collect();
    let k = rows.len() as f64;
    let mean = |c: usize| rows.iter().map(|r| r[c]).sum::<f64>() / k;
    let (m1, m2, my) = (mean(0), mean(1), mean(2));
    let s = |a: usize, ma: f64, b: usize, mb: f64| rows.iter().map(|r| (r[a] - ma) * (r[b] - mb)).sum::<f64>();
    let (s11, s12, s22) = (s(0, m1, 0, m1), s(0, m1, 1, m2), s(1, m2, 1, m2));
    let (s1y, s2y) = (s(0, m1, 2, my), s(1, m2, 2, my));
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-14 * s11 * s22 {
        return Err(Error::Linalg("log-factor regressors are collinear on this window".into()));
    }
    Ok(LogFactorDiagnostic {
        slope: (s22 * s1y - s12 * s2y) / det,
        beta: (s11 * s2y - s12 * s1y) / det,
        points: rows.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn powers(label: &str, c: f64, e: f64) -> RateSeries {
        RateSeries::from_fn(label, 1..=64, |n| c * (n as f64).powf(e)).unwrap()
    }

    #[test]
    fn exact_power_laws() {
        let r = fit_loglog(&powers("a", 1.0, -1.0), (4, 64), false).unwrap();
        assert!((r.slope + 1.0).abs() < 1e-12 && r.stderr < 1e-12);
        let r = fit_loglog(&powers("b", 7.0, -0.5), (4, 64), true).unwrap();
        assert!((r.slope + 0.5).abs() < 1e-12);
        assert!((r.intercept - 7f64.ln()).abs() < 1e-12);
        assert_eq!((r.window, r.points), ((4, 64), 5));
        assert!(matches!(fit_loglog(&powers("c", 1.0, -1.0), (4, 8), true), Err(Error::InsufficientPoints { .. })));
    }

    #[test]
    fn regularity_examples() {
        let r = regular_check(&powers("a", 1.0, -1.0), REGULARITY_CAP).unwrap();
        assert!((r.c_half - 2.0).abs() < 1e-12 && r.c_mono == 1.0 && r.regular);
        let log = RateSeries::from_fn("log", 1..=64, |n| 1.0 / (n as f64 * (1.0 + (n as f64).ln()))).unwrap();
        let r = regular_check(&log, REGULARITY_CAP).unwrap();
        assert!(r.c_half <= 4.0 && r.c_half > 2.0);
        let r = regular_check(&powers("c", 3.0, 0.0), REGULARITY_CAP).unwrap();
        assert_eq!((r.c_half, r.c_mono), (1.0, 1.0));
        let sparse = RateSeries::new("s", vec![(1, 1.0), (3, 0.5), (5, 0.2)]).unwrap();
        assert!(matches!(regular_check(&sparse, 16.0), Err(Error::MissingDyadicPairs(_))));
    }

    #[test]
    fn equivalence_examples() {
        let a = powers("a", 1.0, -1.0);
        let v = asymp_equiv(&a, &a, (1, 64), EquivTolerances::default()).unwrap();
        assert!(v.is_certified() && v.observed_constant == Some(1.0));
        let b = powers("b", 3.0, -1.0);
        let v = asymp_equiv(&a, &b, (1, 64), EquivTolerances::default()).unwrap();
        assert!(v.is_certified() && (v.observed_constant.unwrap() - 3.0).abs() < 1e-12);
        let c = powers("c", 1.0, -0.5);
        assert!(!asymp_equiv(&a, &c, (1, 64), EquivTolerances::default()).unwrap().is_certified());
        let far = RateSeries::from_fn("far", 100..=200, |n| 1.0 / n as f64).unwrap();
        assert!(matches!(asymp_equiv(&a, &far, (1, 64), EquivTolerances::default()), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn gap_examples() {
        let r = gap_report(&powers("u", 1.0, -0.5), &powers("l", 1.0, -1.0), (4, 64), false).unwrap();
        assert!((r.slope - 0.5).abs() < 1e-12);
        let short = RateSeries::from_fn("s", 1..=32, |n| 1.0 / n as f64).unwrap();
        assert!(matches!(gap_report(&short, &powers("l", 1.0, -1.0), (4, 64), false), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn log_factor_recovers_beta() {
        let s = RateSeries::from_fn("s", 2..=4096, |n| (n as f64).powf(-1.0) * (n as f64).ln().powf(0.5)).unwrap();
        let d = log_factor_diagnostic(&s, (3, 4096)).unwrap();
        // ln n = e^{ln ln n}, so the model is exact
        assert!((d.slope + 1.0).abs() < 1e-9 && (d.beta - 0.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_series() {
        assert!(matches!(RateSeries::new("x", vec![(1, 1.0), (2, 0.0)]), Err(Error::NonPositive { .. })));
        assert!(RateSeries::new("x", vec![(2, 1.0), (2, 0.5)]).is_err());
    }

    proptest! {
        #[test]
        fn fit_is_scale_invariant(scale in 1e-6f64..1e6, e in -2.0f64..0.5, noise in proptest::collection::vec(-0.2f64..0.2, 61)) {
            let base = RateSeries::from_fn("b", 4..=64, |n| (n as f64).powf(e) * noise[n - 4].exp()).unwrap();
            let scaled = RateSeries::from_fn("s", 4..=64, |n| scale * (n as f64).powf(e) * noise[n - 4].exp()).unwrap();
            let (fb, fs) = (fit_loglog(&base, (4, 64), false).unwrap(), fit_loglog(&scaled, (4, 64), false).unwrap());
            prop_assert!((fb.slope - fs.slope).abs() < 1e-9);
            prop_assert!((fs.intercept - fb.intercept - scale.ln()).abs() < 1e-9);
            let (rb, rs) = (regular_check(&base, 16.0).unwrap(), regular_check(&scaled, 16.0).unwrap());
            prop_assert!((rb.c_half - rs.c_half).abs() < 1e-9 * rb.c_half);
            prop_assert!((rb.c_mono - rs.c_mono).abs() < 1e-9 * rb.c_mono);
        }

        #[test]
        fn equivalence_is_symmetric(c in 0.05f64..50.0, e1 in -1.5f64..-0.3, de in -0.3f64..0.3) {
            let a = RateSeries::from_fn("a", 1..=64, |n| (n as f64).powf(e1)).unwrap();
            let b = RateSeries::from_fn("b", 1..=64, |n| c * (n as f64).powf(e1 + de)).unwrap();
            let tol = EquivTolerances::default();
            let (ab, ba) = (asymp_equiv(&a, &b, (1, 64), tol).unwrap(), asymp_equiv(&b, &a, (1, 64), tol).unwrap());
            prop_assert_eq!(ab.status, ba.status);
            prop_assert!((ab.observed_constant.unwrap() - ba.observed_constant.unwrap()).abs() < 1e-9 * ab.observed_constant.unwrap());
        }

        #[test]
        fn gap_slope_is_slope_difference(e1 in -1.5f64..0.0, e2 in -1.5f64..0.0, noise in proptest::collection::vec(-0.1f64..0.1, 61)) {
            let u = RateSeries::from_fn("u", 4..=64, |n| (n as f64).powf(e1) * noise[n - 4].exp()).unwrap();
            let l = RateSeries::from_fn("l", 4..=64, |n| (n as f64).powf(e2)).unwrap();
            let g = gap_report(&u, &l, (4, 64), false).unwrap();
            let d = fit_loglog(&u, (4, 64), false).unwrap().slope - fit_loglog(&l, (4, 64), false).unwrap().slope;
            prop_assert!((g.slope - d).abs() <= g.stderr.max(1e-9));
        }
    }
}
