//! Theorem-rule verdicts: entropy-rate premises turned into width-rate
//! conclusions, with hypothesis checks on the entropy exponent.

use nwidth::asymptotics::{fit_loglog, RateSeries};
use nwidth::interpolation::Exponent;
use nwidth::widths::{verdict_gap1, verdict_main1};

fn main() -> nwidth::Result<()> {
    let e_l2 = fit_loglog(&RateSeries::from_fn("e_L2", 1..=64, |n| 1.3 / n as f64 * (1.0 + 0.05 * (n as f64).sin()))?, (4, 64), false)?;
    let e_linf = fit_loglog(&RateSeries::from_fn("e_Linf", 1..=64, |n| 2.0 / n as f64)?, (4, 64), false)?;
    for v in [verdict_main1(&e_l2, &e_linf, Exponent::Infinity, 1.0)?, verdict_gap1(&e_l2, Some(&e_linf), 1.0)?, verdict_gap1(&e_l2, None, 1.0)?] {
        println!("[{}] {} ({:?})", v.status.as_str(), v.claim, v.basis);
        for n in &v.notes {
            println!("    {n}");
        }
    }
    let slow = fit_loglog(&RateSeries::from_fn("e_L2", 1..=64, |n| (n as f64).powf(-0.4))?, (4, 64), false)?;
    let v = verdict_main1(&slow, &slow, Exponent::Finite(4.0), 1.0)?;
    println!("[{}] slope -0.4 implies α = 2.5: {:?}", v.status.as_str(), v.notes);
    println!("α = 2 rejected: {}", verdict_main1(&e_l2, &e_linf, Exponent::Infinity, 2.0).unwrap_err());
    Ok(())
}
