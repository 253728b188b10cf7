//! Log-log slopes, regularity constants, numeric equivalence and gap reports.

use nwidth::asymptotics::{asymp_equiv, fit_loglog, gap_report, log_factor_diagnostic, regular_check, EquivTolerances, RateSeries};

fn main() -> nwidth::Result<()> {
    let pi = std::f64::consts::PI;
    let d = RateSeries::from_fn("√λ_(n+1)", 1..=64, |n| 2.0 / ((2 * n + 1) as f64 * pi))?;
    let i = RateSeries::from_fn("n^(-1/2)", 1..=64, |n| (n as f64).powf(-0.5))?;
    let f = fit_loglog(&d, (4, 64), false)?;
    println!("BM √λ_(n+1): slope {:.5} ± {:.5}", f.slope, f.stderr);
    let f = fit_loglog(&d, (4, 64), true)?;
    println!("dyadic subsample: slope {:.5} on {} points", f.slope, f.points);

    let r = regular_check(&d, 16.0)?;
    println!("regularity: c_half {:.4}, c_mono {:.4}, regular = {}", r.c_half, r.c_mono, r.regular);

    let three = RateSeries::from_fn("3/n", 1..=64, |n| 3.0 / n as f64)?;
    let one = RateSeries::from_fn("1/n", 1..=64, |n| 1.0 / n as f64)?;
    let v = asymp_equiv(&one, &three, (4, 64), EquivTolerances::default())?;
    println!("1/n ≍ 3/n: {} with C = {:.3}", v.status.as_str(), v.observed_constant.unwrap_or(f64::NAN));
    let v = asymp_equiv(&one, &i, (4, 64), EquivTolerances::default())?;
    println!("1/n ≍ n^(-1/2): {}", v.status.as_str());

    let g = gap_report(&i, &d, (4, 64), false)?;
    println!("gap n^(-1/2) / √λ_(n+1): slope {:+.4}", g.slope);

    let log = RateSeries::from_fn("n^(-1) ln n", 3..=4096, |n| (n as f64).ln() / n as f64)?;
    let l = log_factor_diagnostic(&log, (3, 4096))?;
    println!("log-factor diagnostic for n^(-1) ln n: s {:.3}, β {:.3}", l.slope, l.beta);
    Ok(())
}
