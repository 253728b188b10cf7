//! P-greedy point selection for Brownian motion and the decay of the
//! sup-norm power function along the greedy sequence.

use nwidth::asymptotics::{fit_loglog, RateSeries};
use nwidth::interpolation::greedy_design;
use nwidth::{BoxDomain, Kernel, QuadratureRule};

fn main() -> nwidth::Result<()> {
    let k = Kernel::brownian_motion();
    let grid = QuadratureRule::trapezoid(&BoxDomain::unit(1), 4096)?;
    let g = greedy_design(&k, grid.nodes(), 64)?;
    let first: Vec<f64> = g.selected.iter().take(8).map(|&i| grid.nodes().get(i)[0]).collect();
    println!("first greedy points: {first:?}");
    for n in [0, 1, 2, 4, 8, 16, 32, 64] {
        println!("n = {n:2}: sup P = {:.6}", g.sup_history[n]);
    }
    let series = RateSeries::from_fn("sup P greedy", 4..=64, |n| g.sup_history[n])?;
    let fit = fit_loglog(&series, (4, 64), false)?;
    println!("log-log slope over n ∈ [4, 64]: {:.4} ± {:.4}", fit.slope, fit.stderr);
    Ok(())
}
