//! Campaigns: spectrum → widths → entropy → slope fits → verdicts, with the
//! result kept as one serializable [`CampaignReport`].

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    asymp_equiv, fit_loglog, gap_report, log_factor_diagnostic, regular_check, EquivTolerances, LogFactorDiagnostic,
    RateSeries, Regularity, SlopeReport, Verdict, VerdictBasis,
};
use crate::entropy::CarlReport;
use crate::error::{Error, Result};
use crate::format::num;
use crate::interpolation::{Exponent, Strategy};
use crate::widths::{verdict_gap1_with, verdict_main1_with, ScaleId, VerdictTolerances};

use super::emit::{width_rows, Emitter, VERSION, WIDTH_COLUMNS};
use super::run::{entropy_curve, EntropyStage, Lab, WidthsStage};

/// Outcome of one slope target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetCheck {
    pub series: String,
    pub target: f64,
    pub tol: f64,
    pub observed: Option<f64>,
    pub stderr: Option<f64>,
    /// `pass`, `miss`, or `exploratory-miss`.
    pub status: String,
}

impl TargetCheck {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedRegularity {
    pub series: String,
    pub regularity: Regularity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedLogFactor {
    pub series: String,
    pub diagnostic: LogFactorDiagnostic,
}

/// Everything a campaign concluded; `report` re-renders it from `campaign.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub name: String,
    pub kernel: String,
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub window: (usize, usize),
    pub dyadic: bool,
    pub exploratory: bool,
    pub premise_flags: Vec<String>,
    pub alpha: Option<f64>,
    pub series: Vec<RateSeries>,
    pub fits: Vec<SlopeReport>,
    pub targets: Vec<TargetCheck>,
    pub verdicts: Vec<Verdict>,
    pub regularity: Vec<NamedRegularity>,
    pub log_factors: Vec<NamedLogFactor>,
    pub carl: Vec<CarlReport>,
    pub chain_violations: Vec<String>,
    pub invariant_failures: Vec<String>,
    pub warnings: Vec<String>,
}

impl CampaignReport {
    pub fn fit(&self, label: &str) -> Option<&SlopeReport> {
        self.fits.iter().find(|f| f.label == label)
    }

    pub fn series(&self, label: &str) -> Option<&RateSeries> {
        self.series.iter().find(|s| s.label == label)
    }

    pub fn target(&self, series: &str) -> Option<&TargetCheck> {
        self.targets.iter().find(|t| t.series == series)
    }

    /// Failures that make the campaign exit nonzero: broken invariants, Carl
    /// violations and missed non-exploratory targets.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.chain_violations.iter().map(|v| format!("chain violation: {v}")).collect();
        out.extend(self.invariant_failures.iter().map(|f| format!("invariant failure: {f}")));
        for c in self.carl.iter().filter(|c| !c.passed()) {
            out.push(format!("Carl inequality (p = {}) violated at n = {:?}", c.p, c.violations));
        }
        for t in self.targets.iter().filter(|t| t.status == "miss") {
            out.push(format!("target miss: {} slope {} outside {} ± {}", t.series, t.observed.map_or("n/a".into(), |s| format!("{s:.4}")), t.target, t.tol));
        }
        out
    }

    /// Human-readable report; contains no timings, so identical inputs render identically.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "campaign {} — kernel {}", self.name, self.kernel);
        let _ = writeln!(s, "config_hash={} version={} seed={}", self.config_hash, self.version, self.seed);
        let _ = writeln!(
            s,
            "fit window [{}, {}], {}",
            self.window.0,
            self.window.1,
            if self.dyadic { "dyadic indices" } else { "all indices" }
        );
        if let Some(a) = self.alpha {
            let _ = writeln!(s, "entropy exponent α = {a} (e_n ≍ n^(-1/α))");
        }
        if self.exploratory {
            let _ = writeln!(s, "exploratory campaign: target misses are reported, not failures");
        }
        for f in &self.premise_flags {
            let _ = writeln!(s, "premise flag: {f}");
        }

        let _ = writeln!(s, "\nslope targets");
        for t in &self.targets {
            let obs = match (t.observed, t.stderr) {
                (Some(o), Some(e)) => format!("{o:+.4} (stderr {e:.4})"),
                _ => "not produced".into(),
            };
            let _ = writeln!(s, "  {:<28} target {:+.2} ± {:.2}  observed {obs}  [{}]", t.series, t.target, t.tol, t.status);
        }

        let _ = writeln!(s, "\nlog-log fits");
        for f in &self.fits {
            let _ = writeln!(
                s,
                "  {:<28} slope {:+.4} ± {:.4}  n ∈ [{}, {}] ({} points)",
                f.label, f.slope, f.stderr, f.window.0, f.window.1, f.points
            );
        }

        let _ = writeln!(s, "\nverdicts");
        for v in &self.verdicts {
            let basis = match v.basis {
                VerdictBasis::Numeric => "numeric certificate",
                VerdictBasis::TheoremRule => "theorem rule applied to numeric premises",
            };
            let _ = writeln!(s, "  [{}] {}  ({basis})", v.status.as_str(), v.claim);
            let _ = writeln!(s, "      citation: {}", v.citation);
            for p in &v.premises {
                let _ = writeln!(
                    s,
                    "      premise {}: slope {:+.4} ± {:.4}{} — {}",
                    p.report.label,
                    p.report.slope,
                    p.report.stderr,
                    if p.satisfied { "" } else { " (not satisfied)" },
                    p.note
                );
            }
            if let Some(c) = v.observed_constant {
                let _ = writeln!(s, "      observed ratio constant C = {c:.4}");
            }
            for n in &v.notes {
                let _ = writeln!(s, "      note: {n}");
            }
        }

        let _ = writeln!(s, "\nregularity (a_n ≤ c a_2n, almost decreasing)");
        for r in &self.regularity {
            let g = &r.regularity;
            let _ = writeln!(
                s,
                "  {:<28} c_half {:.4}  c_mono {:.4}  {} dyadic pairs  {}",
                r.series,
                g.c_half,
                g.c_mono,
                g.dyadic_pairs,
                if g.regular { "regular" } else { "not regular" }
            );
        }
        let _ = writeln!(s, "\nlog-factor diagnostics (ln a_n = c + s ln n + β ln ln n; no verdict)");
        for l in &self.log_factors {
            let _ = writeln!(s, "  {:<28} s {:+.4}  β {:+.4}  ({} points)", l.series, l.diagnostic.slope, l.diagnostic.beta, l.diagnostic.points);
        }

        let _ = writeln!(s, "\nCarl inequality sup k^(1/p) e_k ≤ C_p sup k^(1/p) a_k");
        for c in &self.carl {
            let worst = c.ratios.iter().copied().fold(0.0, f64::max);
            let _ = writeln!(
                s,
                "  p = {}: C_p = {:.2}, largest ratio {:.4}, {}",
                c.p,
                c.constant,
                worst,
                if c.passed() { "no violations".to_string() } else { format!("violations at n = {:?}", c.violations) }
            );
        }

        let failures = self.failures();
        let _ = writeln!(s, "\ninvariants: {} chain violations, {} curve failures", self.chain_violations.len(), self.invariant_failures.len());
        for f in &failures {
            let _ = writeln!(s, "  FAIL {f}");
        }
        if !self.warnings.is_empty() {
            let _ = writeln!(s, "\nwarnings");
            for w in &self.warnings {
                let _ = writeln!(s, "  {w}");
            }
        }
        let _ = writeln!(s, "\nstatus: {}", if failures.is_empty() { "ok" } else { "FAILED" });
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Format { path: path.display().to_string(), message: e.to_string() })
    }
}

fn series_of(label: &str, pairs: Vec<(usize, f64)>) -> Option<RateSeries> {
    let pairs: Vec<(usize, f64)> = pairs.into_iter().filter(|&(n, v)| n >= 1 && v > 0.0).collect();
    RateSeries::new(label, pairs).ok().filter(|s| !s.is_empty())
}

/// Restricts `b` to the indices of `a` (and vice versa) so both share one grid.
fn common_grid(a: &RateSeries, b: &RateSeries) -> Option<(RateSeries, RateSeries)> {
    let pa: Vec<(usize, f64)> = a.pairs().iter().copied().filter(|(n, _)| b.get(*n).is_some()).collect();
    let pb: Vec<(usize, f64)> = pa.iter().map(|(n, _)| (*n, b.get(*n).expect("filtered"))).collect();
    Some((RateSeries::new(a.label.clone(), pa).ok()?, RateSeries::new(b.label.clone(), pb).ok()?))
}

impl Lab {
    /// Runs every stage and writes `widths.csv`, `entropy.csv`, `carl.csv`,
    /// `fits.csv`, `verdicts.json`, `campaign.json` and `report.txt`.
    pub fn campaign(&self, em: &mut Emitter) -> Result<CampaignReport> {
        let spec = self.spectrum(em)?;
        let widths = self.widths(em, &spec)?;
        let entropy = self.entropy(em, &spec)?;
        let mut curves = widths.curves.clone();
        curves.push(entropy_curve(&self.kernel().name(), &entropy.estimates));
        em.csv("widths.csv", &WIDTH_COLUMNS, &width_rows(&curves))?;
        let eigenvalues = spec.eigenvalues().to_vec();
        let report = self.timed(em, "fits", |em| self.assemble(em, &eigenvalues, &widths, &entropy))?;
        em.csv("fits.csv", &["label", "slope", "intercept", "stderr", "window_lo", "window_hi", "points", "status"], &fit_rows(&report))?;
        em.json("verdicts.json", &report.verdicts)?;
        em.json("campaign.json", &report)?;
        em.text("report.txt", &report.render())?;
        Ok(report)
    }

    fn assemble(&self, em: &mut Emitter, lambda: &[f64], w: &WidthsStage, e: &EntropyStage) -> Result<CampaignReport> {
        let cfg = &self.cfg;
        let window = (cfg.fit.window[0], cfg.fit.window[1]);
        let ns = cfg.n_grid()?;
        let inf = Some(Exponent::Infinity);
        let l2 = Some(Exponent::Finite(2.0));
        let mut series: Vec<RateSeries> = Vec::new();
        let mut push = |s: Option<RateSeries>| {
            if let Some(s) = s {
                series.push(s);
            }
        };
        push(series_of("lambda", ns.iter().filter(|&&n| n >= 1 && n <= lambda.len()).map(|&n| (n, lambda[n - 1])).collect()));
        let spec_method = w.curves.iter().find(|c| c.scale_id == ScaleId::DL2).and_then(|c| c.entries.first()).map(|e| e.method.clone());
        if let Some(m) = &spec_method {
            push(series_of("d_L2", w.values(ScaleId::DL2, m, l2)));
        }
        for s in cfg.strategies() {
            push(series_of(&format!("I_Linf_{}", s.name()), w.values(ScaleId::ILpUpper, s.name(), inf)));
            push(series_of(&format!("I_L2_{}", s.name()), w.values(ScaleId::ILpUpper, s.name(), l2)));
            push(series_of(&format!("I_L2_{}_opnorm", s.name()), w.values(ScaleId::ILpUpper, &format!("{}-opnorm", s.name()), l2)));
        }
        push(series_of("a_Linf_mercer", w.values(ScaleId::ALpUpper, "mercer-projection", inf)));
        push(series_of("a_L2_mercer", w.values(ScaleId::ALpUpper, "mercer-projection", l2)));
        push(series_of("I_Linf_lower_tail", w.values(ScaleId::ILinfLowerTail, "trace-tail", inf)));
        push(series_of("e_L2_lower", e.estimates.iter().map(|x| (x.n, x.lower)).collect()));
        push(series_of("e_L2_upper", e.estimates.iter().map(|x| (x.n, x.upper)).collect()));
        let kernel = self.kernel();
        let rate = kernel.smoothness_hint().map(|m| m / kernel.dim() as f64);
        if let Some(r) = rate {
            push(series_of("e_Linf_prior", (1..=cfg.entropy.n_max).map(|n| (n, (n as f64).powf(-r))).collect()));
        }
        let alpha = cfg.fit.alpha.or(rate.map(|r| 1.0 / r)).filter(|a| *a > 0.0 && *a < 2.0);

        let get = |label: &str| series.iter().find(|s| s.label == label).cloned();
        let mut fits: Vec<SlopeReport> = Vec::new();
        for s in &series {
            match fit_loglog(s, window, cfg.fit.dyadic) {
                Ok(f) => fits.push(f),
                Err(err) => em.warn(format!("fit `{}`: {err}", s.label)),
            }
        }
        // gaps of interpolation widths over d_n(H, L_2)
        if let Some(d) = get("d_L2") {
            for s in cfg.strategies() {
                for (gap, upper) in [
                    (format!("gap_Linf_{}", s.name()), format!("I_Linf_{}", s.name())),
                    (format!("gap_L2_{}_opnorm", s.name()), format!("I_L2_{}_opnorm", s.name())),
                    (format!("gap_L2_{}", s.name()), format!("I_L2_{}", s.name())),
                ] {
                    let Some(u) = get(&upper) else { continue };
                    let Some((u, d)) = common_grid(&u, &d) else { continue };
                    match gap_report(&u, &d, window, cfg.fit.dyadic) {
                        Ok(mut f) => {
                            f.label = gap;
                            fits.push(f);
                        }
                        Err(err) => em.warn(format!("fit `{gap}`: {err}")),
                    }
                }
            }
        }
        let fit = |label: &str| fits.iter().find(|f| f.label == label);

        let exploratory = cfg.campaign.exploratory;
        let targets: Vec<TargetCheck> = cfg
            .campaign
            .targets
            .iter()
            .map(|t| {
                let f = fit(&t.series);
                let ok = f.is_some_and(|f| (f.slope - t.slope).abs() <= t.tol);
                let status = if ok {
                    "pass"
                } else if exploratory {
                    "exploratory-miss"
                } else {
                    "miss"
                };
                TargetCheck {
                    series: t.series.clone(),
                    target: t.slope,
                    tol: t.tol,
                    observed: f.map(|f| f.slope),
                    stderr: f.map(|f| f.stderr),
                    status: status.into(),
                }
            })
            .collect();

        let mut verdicts = Vec::new();
        let vtol = VerdictTolerances { slope_tol: cfg.fit.slope_tol, ..VerdictTolerances::default() };
        match (alpha, fit("e_L2_lower"), fit("e_Linf_prior")) {
            (Some(a), Some(el2), Some(prior)) => {
                let mut prior = prior.clone();
                prior.label = "e_Linf_prior (Sobolev-order prior, not measured)".into();
                verdicts.push(verdict_main1_with(el2, &prior, Exponent::Infinity, a, vtol)?);
                verdicts.push(verdict_gap1_with(el2, Some(&prior), a, vtol)?);
            }
            _ => em.warn("verdicts: no entropy exponent α in (0, 2) available; theorem rules skipped"),
        }
        let etol = EquivTolerances { slope_tol: cfg.fit.slope_tol, ratio_cap: cfg.fit.ratio_cap };
        let greedy = Strategy::Greedy.name();
        for (a, b) in [
            ("d_L2".to_string(), "e_L2_lower".to_string()),
            (format!("I_L2_{greedy}_opnorm"), "d_L2".to_string()),
            ("a_Linf_mercer".to_string(), "I_Linf_lower_tail".to_string()),
        ] {
            if let (Some(sa), Some(sb)) = (get(&a), get(&b)) {
                match asymp_equiv(&sa, &sb, window, etol) {
                    Ok(v) => verdicts.push(v),
                    Err(err) => em.warn(format!("equivalence `{a}` ≍ `{b}`: {err}")),
                }
            }
        }

        let mut regularity = Vec::new();
        let mut log_factors = Vec::new();
        for label in ["d_L2".to_string(), format!("I_Linf_{greedy}"), "e_L2_lower".into()] {
            let Some(s) = get(&label) else { continue };
            match regular_check(&s, cfg.fit.regularity_cap) {
                Ok(r) => regularity.push(NamedRegularity { series: label.clone(), regularity: r }),
                Err(err) => em.warn(format!("regularity `{label}`: {err}")),
            }
            if let Ok(d) = log_factor_diagnostic(&s, window) {
                log_factors.push(NamedLogFactor { series: label, diagnostic: d });
            }
        }

        Ok(CampaignReport {
            name: cfg.campaign.name.clone().unwrap_or_else(|| "custom".into()),
            kernel: kernel.name(),
            config_hash: cfg.hash(),
            version: VERSION.into(),
            seed: cfg.run.seed,
            window,
            dyadic: cfg.fit.dyadic,
            exploratory,
            premise_flags: cfg.campaign.premise_flags.clone(),
            alpha,
            series,
            fits,
            targets,
            verdicts,
            regularity,
            log_factors,
            carl: e.carl.clone(),
            chain_violations: w.chain_violations.iter().map(ToString::to_string).collect(),
            invariant_failures: w.invariant_failures.clone(),
            warnings: em.manifest.warnings.clone(),
        })
    }
}

pub fn fit_rows(report: &CampaignReport) -> Vec<Vec<String>> {
    report
        .fits
        .iter()
        .map(|f| {
            let status = report.target(&f.label).map_or("-".to_string(), |t| t.status.clone());
            vec![
                f.label.clone(),
                num(f.slope),
                num(f.intercept),
                num(f.stderr),
                f.window.0.to_string(),
                f.window.1.to_string(),
                f.points.to_string(),
                status,
            ]
        })
        .collect()
}
