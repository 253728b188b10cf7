//! Nyström eigenvalues of the Brownian-motion kernel against the closed form
//! `λ_i = 4 / ((2i - 1)^2 π^2)`, plus the trace identity and a tail sum.

use nwidth::{analytic_spectrum, nystrom_spectrum, tail_sum, BoxDomain, Kernel, QuadratureRule};

fn main() -> nwidth::Result<()> {
    let k = Kernel::brownian_motion();
    let quad = QuadratureRule::midpoint(&BoxDomain::unit(1), 2000)?;
    let nys = nystrom_spectrum(&k, &quad, 2000)?;
    let exact = analytic_spectrum("brownian_motion", 2000)?;
    println!(" i  nystrom            closed form        rel. error");
    for i in 0..8 {
        let (a, b) = (nys.eigenvalue(i)?, exact.eigenvalue(i)?);
        println!("{:2}  {a:.12}  {b:.12}  {:.2e}", i + 1, (a - b).abs() / b);
    }
    let trace: f64 = nys.eigenvalues().iter().sum();
    println!("sum of all {} Nyström eigenvalues: {trace:.9} (∫ k(x, x) dx = 0.5)", nys.len());
    let t = tail_sum(&exact, 4, Some(0.5))?;
    println!("closed-form tail Σ_(i>4) λ_i = {:.7}, √ = {:.6}", t.value, t.value.sqrt());
    println!("weighted orthonormality defect of the Nyström vectors: {:.1e}", nys.weight_orthonormality_defect().unwrap_or(0.0));
    Ok(())
}
