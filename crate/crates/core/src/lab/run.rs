//! Stage runners behind the CLI subcommands.
//!
//! Stages run sequentially; inside a stage independent `(n, strategy, p)`
//! cells run on a worker pool and are collected in grid order, so output is
//! independent of the worker count.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::entropy::{carl_check, diag_entropy_bounds, CarlReport, DiagonalOperator, EntropyEstimate};
use crate::error::{Error, Result};
use crate::format::num;
use crate::interpolation::{
    greedy_design, interpolation_width, optimize_interpolation_width, uniform_design, DesignSet, Exponent, GreedyDesign,
    ResidualL2Norm, Strategy,
};
use crate::kernel::{trace_integral, Kernel};
use crate::quadrature::QuadratureRule;
use crate::spectral::{analytic_spectrum, cache, nystrom_spectrum, SpectrumEstimate};
use crate::widths::{
    check_chain, interp_linf_lower_tail, l2_widths, lp_kolmogorov_lower, mercer_projection_curve, subspace_residual_upper,
    ChainViolation, EllipsoidModel, ScaleId, TailCorrection, WidthCurve, WidthEntry, WidthKind,
};

use super::config::{ExperimentConfig, SpectrumSource};
use super::emit::{width_rows, Emitter, WIDTH_COLUMNS};

/// A validated configuration bound to its kernel and worker pool.
pub struct Lab {
    pub cfg: ExperimentConfig,
    kernel: Kernel,
    pool: rayon::ThreadPool,
    started: Instant,
}

/// Output of the widths stage.
#[derive(Clone, Debug)]
pub struct WidthsStage {
    pub curves: Vec<WidthCurve>,
    pub chain_violations: Vec<ChainViolation>,
    /// Per-curve monotonicity or bound-order failures.
    pub invariant_failures: Vec<String>,
}

impl WidthsStage {
    /// Bundles curves with their invariant and chain checks.
    pub fn from_curves(curves: Vec<WidthCurve>) -> Self {
        let invariant_failures = curves.iter().filter_map(|c| c.check_invariants().err()).map(|e| e.to_string()).collect();
        let chain_violations = check_chain(&curves);
        Self { curves, chain_violations, invariant_failures }
    }

    /// One line per failed check, citing the offending rows.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.chain_violations.iter().map(|v| format!("chain violation: {v}")).collect();
        out.extend(self.invariant_failures.iter().map(|f| format!("invariant failure: {f}")));
        out
    }

    /// `(n, value)` of the entries of one curve with the given method and exponent.
    pub fn values(&self, scale: ScaleId, method: &str, p: Option<Exponent>) -> Vec<(usize, f64)> {
        self.curves
            .iter()
            .filter(|c| c.scale_id == scale)
            .flat_map(|c| &c.entries)
            .filter(|e| e.method == method && e.p == p)
            .map(|e| (e.n, e.value))
            .collect()
    }
}

/// Output of the entropy stage.
#[derive(Clone, Debug)]
pub struct EntropyStage {
    pub estimates: Vec<EntropyEstimate>,
    pub carl: Vec<CarlReport>,
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Stage { .. } => e,
        other => Error::Stage { stage: name.into(), source: Box::new(other) },
    })
}

fn p_of(p: Exponent) -> Option<Exponent> {
    Some(p)
}

impl Lab {
    pub fn new(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let kernel = cfg.kernel()?;
        // dense kernels run sequentially; the pool parallelizes across cells only
        faer::set_global_parallelism(faer::Par::Seq);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.run.workers.unwrap_or(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
        Ok(Self { cfg, kernel, pool, started: Instant::now() })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn emitter(&self, command: &str) -> Result<Emitter> {
        Emitter::new(&self.cfg.out_dir(), command, &self.cfg.hash(), self.cfg.run.seed)
    }

    fn check_budget(&self, next: &str) -> Result<()> {
        if let Some(b) = self.cfg.run.time_budget_s {
            let elapsed = self.started.elapsed();
            if elapsed > Duration::from_secs_f64(b) {
                return Err(Error::BudgetExceeded(format!(
                    "{:.1} s elapsed before stage `{next}`, budget {b} s",
                    elapsed.as_secs_f64()
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn timed<T>(&self, em: &mut Emitter, name: &str, f: impl FnOnce(&mut Emitter) -> Result<T>) -> Result<T> {
        self.check_budget(name)?;
        let t0 = Instant::now();
        let out = stage(name, f(em))?;
        em.manifest.timings.push((name.into(), t0.elapsed().as_secs_f64()));
        Ok(out)
    }

    fn spectrum_quad(&self) -> Result<QuadratureRule> {
        QuadratureRule::midpoint(self.kernel.domain(), self.cfg.spectrum_cells())
    }

    /// Spectrum estimate (cached for Nyström) and `spectrum.csv`.
    pub fn spectrum(&self, em: &mut Emitter) -> Result<SpectrumEstimate> {
        self.timed(em, "spectrum", |em| {
            let n_eigs = self.cfg.n_eigs();
            let spec = match self.cfg.spectrum.source {
                SpectrumSource::Analytic => analytic_spectrum(self.kernel.id(), n_eigs)?,
                SpectrumSource::Nystrom => {
                    let quad = self.spectrum_quad()?;
                    let dir = self.cfg.cache_dir();
                    let cached = if self.cfg.spectrum.cache { cache::read(&dir, &self.kernel, &quad, n_eigs)? } else { None };
                    match cached {
                        Some(s) => {
                            em.manifest.cache_hits += 1;
                            s
                        }
                        None => {
                            let s = nystrom_spectrum(&self.kernel, &quad, n_eigs)?;
                            if self.cfg.spectrum.cache {
                                em.manifest.cache_misses += 1;
                                cache::write(&dir, &self.kernel, &s)?;
                            }
                            s
                        }
                    }
                }
            };
            let diag = spec.diagnostics();
            if diag.clamped_negative > 0 {
                em.warn(format!(
                    "spectrum: {} negative eigenvalues clamped to 0 (rows flagged `clamped`)",
                    diag.clamped_negative
                ));
            }
            let rows: Vec<Vec<String>> = spec
                .eigenvalues()
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let flag = if *l == 0.0 && diag.clamped_negative > 0 { "clamped" } else { "-" };
                    vec![(i + 1).to_string(), num(*l), spec.kernel_id().to_string(), source_label(&spec).into(), flag.into()]
                })
                .collect();
            em.csv("spectrum.csv", &["index", "eigenvalue", "kernel_id", "source", "flag"], &rows)?;
            Ok(spec)
        })
    }

    fn trace(&self, spec: &SpectrumEstimate) -> Result<f64> {
        match (spec.quad(), self.kernel.analytic_system()) {
            (Some(q), _) => trace_integral(&self.kernel, q),
            (None, Some(sys)) => Ok(sys.trace()),
            (None, None) => Err(Error::NoAnalyticSpectrum(self.kernel.id().into())),
        }
    }

    /// Greedy design over the sup-norm evaluation grid, up to the largest `n`, and `greedy.csv`.
    pub fn greedy(&self, em: &mut Emitter) -> Result<GreedyDesign> {
        self.timed(em, "greedy", |em| {
            let n_max = self.cfg.n_grid()?.last().copied().unwrap_or(0);
            let eval = QuadratureRule::trapezoid(self.kernel.domain(), self.cfg.eval_cells())?;
            let g = greedy_design(&self.kernel, eval.nodes(), n_max)?;
            if g.saturated {
                em.warn(format!("greedy: power function vanished after {} points (row flagged `saturated`)", g.selected.len()));
            }
            let d = self.kernel.dim();
            let rows: Vec<Vec<String>> = (0..g.sup_history.len())
                .map(|j| {
                    let mut row = vec![j.to_string(), num(g.sup_history[j])];
                    match g.selected.get(j) {
                        Some(&c) => {
                            row.push(c.to_string());
                            row.extend(eval.nodes().get(c).iter().map(|x| num(*x)));
                        }
                        None => row.extend(std::iter::repeat_n("-".to_string(), d + 1)),
                    }
                    let last = j == g.sup_history.len() - 1;
                    row.push(if g.saturated && last { "saturated".into() } else { "-".into() });
                    row
                })
                .collect();
            let mut cols = vec!["n".to_string(), "sup_power".into(), "next_index".into()];
            cols.extend((1..=d).map(|a| format!("next_x{a}")));
            cols.push("flag".into());
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            em.csv("greedy.csv", &cols, &rows)?;
            Ok(g)
        })
    }

    /// All width scales on the configured grid, the chain check, and `widths.csv`.
    pub fn widths(&self, em: &mut Emitter, spec: &SpectrumEstimate) -> Result<WidthsStage> {
        self.timed(em, "widths", |em| {
            let stage = self.compute_widths(em, spec)?;
            em.csv("widths.csv", &WIDTH_COLUMNS, &width_rows(&stage.curves))?;
            for f in stage.failures() {
                em.warn(f);
            }
            Ok(stage)
        })
    }

    fn compute_widths(&self, em: &mut Emitter, spec: &SpectrumEstimate) -> Result<WidthsStage> {
        let k = &self.kernel;
        let ns = self.cfg.n_grid()?;
        let resolved: Vec<usize> = ns.iter().copied().filter(|&n| n < spec.len()).collect();
        if resolved.len() < ns.len() {
            em.warn(format!(
                "widths: spectral scales stop at n = {} ({} eigenpairs resolved)",
                resolved.last().map_or(0, |n| *n),
                spec.len()
            ));
        }
        let exps = self.cfg.exponents();
        let mu = k.domain().volume();
        let eval = QuadratureRule::trapezoid(k.domain(), self.cfg.eval_cells())?;
        let l2q = QuadratureRule::midpoint(k.domain(), self.cfg.l2_cells())?;
        let rule_for = |p: Exponent| if p == Exponent::Infinity { &eval } else { &l2q };
        let kid = k.name();
        let entry = |n, value, kind, method: &str, p, seed| WidthEntry { n, value, kind, method: method.into(), p, seed };
        let l2 = p_of(Exponent::Finite(2.0));
        let spec_method = if spec.is_analytic() { "closed-form" } else { "nystrom" };

        let mut d_l2 = WidthCurve::new(ScaleId::DL2, &kid);
        let mut a_l2 = WidthCurve::new(ScaleId::AL2, &kid);
        let mut d_lower = WidthCurve::new(ScaleId::DLpLower, &kid);
        let mut i_lower = WidthCurve::new(ScaleId::ILinfLowerTail, &kid);
        let trace = self.trace(spec)?;
        for &n in &resolved {
            let w = l2_widths(spec, n)?;
            d_l2.push(entry(n, w.value, w.kind, spec_method, l2, None));
            a_l2.push(entry(n, w.value, w.kind, spec_method, l2, None));
            for &p in &exps {
                d_lower.push(entry(n, lp_kolmogorov_lower(spec, mu, n, p)?, WidthKind::Lower, "holder", Some(p), None));
            }
            if exps.contains(&Exponent::Infinity) {
                let v = interp_linf_lower_tail(spec, mu, n, Some(trace))?;
                i_lower.push(entry(n, v, WidthKind::Lower, "trace-tail", Some(Exponent::Infinity), None));
            }
        }

        let mut a_upper = WidthCurve::new(ScaleId::ALpUpper, &kid);
        for &p in &exps {
            let vals = self.pool.install(|| mercer_projection_curve(spec, &resolved, p, rule_for(p), TailCorrection::MercerDiagonal))?;
            for (&n, v) in resolved.iter().zip(vals) {
                a_upper.push(entry(n, v, WidthKind::Upper, "mercer-projection", Some(p), None));
            }
        }
        if !self.cfg.widths.subspace_n.is_empty() && exps.contains(&Exponent::Infinity) {
            let grid = QuadratureRule::trapezoid(k.domain(), self.cfg.widths.subspace_cells)?;
            let model = EllipsoidModel::new(spec, grid.nodes(), spec.len())?;
            for &n in &self.cfg.widths.subspace_n {
                let seed = self.cfg.run.seed.wrapping_add(n as u64);
                let r = subspace_residual_upper(&model, n, self.cfg.widths.subspace_restarts, seed)?;
                if r.resolution_flag {
                    em.warn(format!("a_Lp_upper n={n} method=subspace-residual: grid too coarse for 8n points"));
                }
                a_upper.push(entry(n, r.value, WidthKind::Upper, "subspace-residual", Some(Exponent::Infinity), Some(seed)));
            }
        }

        let i_upper = self.interpolation_curve(em, &ns, &exps, &eval, &l2q)?;

        Ok(WidthsStage::from_curves(vec![d_l2, a_l2, d_lower, a_upper, i_upper, i_lower]))
    }

    fn interpolation_curve(
        &self,
        em: &mut Emitter,
        ns: &[usize],
        exps: &[Exponent],
        eval: &QuadratureRule,
        l2q: &QuadratureRule,
    ) -> Result<WidthCurve> {
        let k = &self.kernel;
        let strategies = self.cfg.strategies();
        let n_max = ns.last().copied().unwrap_or(0);
        let greedy = if strategies.contains(&Strategy::Greedy) { Some(greedy_design(k, eval.nodes(), n_max)?) } else { None };
        if let Some(g) = greedy.as_ref().filter(|g| g.saturated) {
            em.warn(format!("I_Lp_upper method=greedy: saturated after {} points; larger n omitted", g.selected.len()));
        }
        let opnorm = if exps.contains(&Exponent::Finite(2.0)) { Some(ResidualL2Norm::new(k, l2q)?) } else { None };

        // (strategy, n) cells; multistart only up to its size cap
        let mut cells: Vec<(Strategy, usize)> = Vec::new();
        for &s in &strategies {
            for &n in ns {
                let ok = match s {
                    Strategy::Uniform => true,
                    Strategy::Greedy => greedy.as_ref().is_some_and(|g| n <= g.selected.len()),
                    Strategy::Multistart => n >= 1 && n <= self.cfg.widths.multistart_max_n,
                };
                if ok {
                    cells.push((s, n));
                }
            }
        }
        let seed = self.cfg.run.seed;
        let rule_for = |p: Exponent| if p == Exponent::Infinity { eval } else { l2q };
        let eval_design = |design: &DesignSet, s: Strategy, n: usize, seed: Option<u64>| -> Result<Vec<WidthEntry>> {
            let mut out = Vec::new();
            for &p in exps {
                let value = interpolation_width(design, rule_for(p), p)?;
                out.push(WidthEntry { n, value, kind: WidthKind::Upper, method: s.name().into(), p: Some(p), seed });
                if p == Exponent::Finite(2.0) {
                    let value = opnorm.as_ref().expect("built for p = 2").norm(design)?;
                    out.push(WidthEntry { n, value, kind: WidthKind::Upper, method: format!("{}-opnorm", s.name()), p: Some(p), seed });
                }
            }
            Ok(out)
        };
        let results: Vec<Result<(Vec<WidthEntry>, f64)>> = self.pool.install(|| {
            cells
                .par_iter()
                .map(|&(s, n)| -> Result<(Vec<WidthEntry>, f64)> {
                    match s {
                        Strategy::Uniform => {
                            let d = uniform_design(k, n)?;
                            Ok((eval_design(&d, s, n, None)?, d.jitter()))
                        }
                        Strategy::Greedy => {
                            let g = greedy.as_ref().expect("greedy computed");
                            let d = if n == 0 {
                                DesignSet::empty(k)
                            } else {
                                DesignSet::new(k, eval.nodes().select(&g.selected[..n]))?
                            };
                            Ok((eval_design(&d, s, n, None)?, d.jitter()))
                        }
                        Strategy::Multistart => {
                            // each exponent gets its own optimized design
                            let cell_seed = seed.wrapping_add(n as u64);
                            let mut out = Vec::new();
                            let mut jitter = 0.0f64;
                            for &p in exps {
                                let o = optimize_interpolation_width(k, rule_for(p), p, n, Strategy::Multistart, cell_seed)?;
                                jitter = jitter.max(o.design.jitter());
                                out.push(WidthEntry {
                                    n,
                                    value: o.value,
                                    kind: WidthKind::Upper,
                                    method: "multistart".into(),
                                    p: Some(p),
                                    seed: Some(cell_seed),
                                });
                            }
                            Ok((out, jitter))
                        }
                    }
                })
                .collect()
        });
        let mut curve = WidthCurve::new(ScaleId::ILpUpper, k.name());
        for (r, &(s, n)) in results.into_iter().zip(&cells) {
            let (entries, jitter) = r?;
            if jitter > 0.0 {
                em.warn(format!("I_Lp_upper n={n} method={}: Gram matrix regularized with jitter {jitter:e}", s.name()));
            }
            for e in entries {
                curve.push(e);
            }
        }
        Ok(curve)
    }

    /// Entropy bounds of the diagonal surrogate `σ_i = √λ_i`, Carl checks, `entropy.csv` and `carl.csv`.
    pub fn entropy(&self, em: &mut Emitter, spec: &SpectrumEstimate) -> Result<EntropyStage> {
        self.timed(em, "entropy", |em| {
            let n_max = self.cfg.entropy.n_max;
            if n_max + 1 > spec.len() {
                return Err(Error::Truncation { requested: n_max + 1, available: spec.len() });
            }
            let op = DiagonalOperator::from_eigenvalues(spec.eigenvalues())?;
            let estimates = (1..=n_max).map(|n| diag_entropy_bounds(&op, n)).collect::<Result<Vec<_>>>()?;
            let flagged = estimates.iter().filter(|e| !e.flags.is_empty()).count();
            if flagged > 0 {
                em.warn(format!("entropy: {flagged} upper bounds use the volume constant (rows flagged)"));
            }
            let rows: Vec<Vec<String>> = estimates
                .iter()
                .map(|e| {
                    let flags = if e.flags.is_empty() { "-".to_string() } else { e.flags.join(";") };
                    vec![e.n.to_string(), num(e.lower), num(e.upper), e.method.clone(), flags]
                })
                .collect();
            em.csv("entropy.csv", &["n", "lower", "upper", "method", "flags"], &rows)?;

            let e_upper: Vec<f64> = estimates.iter().map(|e| e.upper).collect();
            let s_next: Vec<f64> = (1..=n_max).map(|k| spec.eigenvalue(k).map(f64::sqrt)).collect::<Result<_>>()?;
            let carl = self
                .cfg
                .entropy
                .carl_p
                .iter()
                .map(|&p| carl_check(&e_upper, &s_next, p, n_max))
                .collect::<Result<Vec<_>>>()?;
            let mut rows = Vec::new();
            for r in &carl {
                for (i, ratio) in r.ratios.iter().enumerate() {
                    let flag = if r.violations.contains(&(i + 1)) { "violation" } else { "-" };
                    rows.push(vec![num(r.p), (i + 1).to_string(), num(*ratio), num(r.constant), flag.into()]);
                }
                if !r.passed() {
                    em.warn(format!("carl: p = {} violated at n = {:?}", r.p, r.violations));
                }
            }
            em.csv("carl.csv", &["p", "n", "ratio", "constant", "flag"], &rows)?;
            Ok(EntropyStage { estimates, carl })
        })
    }
}

fn source_label(spec: &SpectrumEstimate) -> &'static str {
    if spec.is_analytic() {
        "closed-form"
    } else {
        "nystrom"
    }
}

/// Entropy estimates as a width curve (lower and upper entries per `n`).
pub fn entropy_curve(kernel_id: &str, estimates: &[EntropyEstimate]) -> WidthCurve {
    let mut c = WidthCurve::new(ScaleId::EDiagEst, kernel_id);
    for e in estimates {
        c.push(WidthEntry { n: e.n, value: e.lower, kind: WidthKind::Lower, method: "volume-lower".into(), p: None, seed: None });
        let method = if e.flags.is_empty() { "grid-cover-upper" } else { "volume-upper" };
        c.push(WidthEntry { n: e.n, value: e.upper, kind: WidthKind::Upper, method: method.into(), p: None, seed: None });
    }
    c
}
