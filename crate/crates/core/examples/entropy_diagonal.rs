//! Entropy-number bounds for diagonal operators and brute-force coverings of
//! point clouds.

use nwidth::asymptotics::{fit_loglog, RateSeries};
use nwidth::entropy::{brute_cover_entropy, diag_entropy_bounds, DiagonalOperator};
use nwidth::PointSet;

fn main() -> nwidth::Result<()> {
    let single = DiagonalOperator::new(vec![1.0, 0.0, 0.0])?;
    for n in [1, 2, 5] {
        let e = diag_entropy_bounds(&single, n)?;
        println!("σ = (1, 0, …), n = {n}: [{}, {}] (exact 2^(1-n))", e.lower, e.upper);
    }

    let harmonic = DiagonalOperator::new((1..=4096).map(|i| 1.0 / i as f64).collect())?;
    let est: Vec<_> = (1..=64).map(|n| diag_entropy_bounds(&harmonic, n)).collect::<Result<_, _>>()?;
    let lower = RateSeries::new("e_n lower", est.iter().map(|e| (e.n, e.lower)).collect())?;
    println!("σ_i = 1/i: lower-bound slope over [4, 64] = {:.4}", fit_loglog(&lower, (4, 64), false)?.slope);
    println!("σ_i = 1/i: e_8 ∈ [{:.4}, {:.4}] flags {:?}", est[7].lower, est[7].upper, est[7].flags);

    let interval = PointSet::from_scalars(&(0..=1000).map(|i| i as f64 / 1000.0).collect::<Vec<_>>())?;
    let e3 = brute_cover_entropy(&interval, 3)?;
    println!("[0, 1] with 4 centres: e_3 ∈ [{:.4}, {:.4}]", e3.lower, e3.upper);
    Ok(())
}
