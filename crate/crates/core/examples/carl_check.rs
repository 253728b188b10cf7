//! Carl's inequality `sup_(k≤n) k^(1/p) e_k ≤ C_p sup_(k≤n) k^(1/p) a_k` for
//! the Brownian-motion embedding, pairing entropy upper bounds with `√λ_(k+1)`.

use nwidth::entropy::{carl_check, diag_entropy_bounds, DiagonalOperator};
use nwidth::analytic_spectrum;

fn main() -> nwidth::Result<()> {
    let spec = analytic_spectrum("brownian_motion", 4096)?;
    let op = DiagonalOperator::from_eigenvalues(spec.eigenvalues())?;
    let e: Vec<f64> = (1..=64).map(|n| diag_entropy_bounds(&op, n).map(|x| x.upper)).collect::<Result<_, _>>()?;
    let a: Vec<f64> = (1..=64).map(|k| spec.eigenvalue(k).map(f64::sqrt)).collect::<Result<_, _>>()?;
    for p in [1.0, 2.0] {
        let r = carl_check(&e, &a, p, 64)?;
        let worst = r.ratios.iter().copied().fold(0.0, f64::max);
        println!("p = {p}: C_p = {:.2}, largest ratio {worst:.4}, passed = {}", r.constant, r.passed());
    }
    Ok(())
}
