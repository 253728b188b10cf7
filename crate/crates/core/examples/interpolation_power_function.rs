//! Kernel interpolation on a uniform Brownian-motion design: cardinal
//! weights, the interpolant, and the power function bounding its error.

use nwidth::interpolation::{
    apply_interpolant, cardinal_weights, interpolation_width, power_function, power_function_profile, uniform_design,
    Exponent,
};
use nwidth::{BoxDomain, Kernel, QuadratureRule};

fn main() -> nwidth::Result<()> {
    let k = Kernel::brownian_motion();
    let design = uniform_design(&k, 4)?;
    println!("design: {:?}", design.points().iter().map(|p| p[0]).collect::<Vec<_>>());
    println!("cardinal weights at x = 0.6: {:?}", cardinal_weights(&design, &[0.6])?);

    // f = k(·, 0.3) lies in the RKHS with norm √0.3; its error is at most √0.3 · P(x)
    let f = |x: f64| x.min(0.3);
    let values: Vec<f64> = design.points().iter().map(|p| f(p[0])).collect();
    for x in [0.1, 0.375, 0.6] {
        let s = apply_interpolant(&design, &values, &[x])?;
        let p = power_function(&design, &[x])?;
        println!("x = {x}: f = {:.4}, interpolant = {s:.4}, |err| = {:.4} ≤ {:.4}", f(x), (f(x) - s).abs(), 0.3f64.sqrt() * p);
    }

    let grid = QuadratureRule::trapezoid(&BoxDomain::unit(1), 4096)?;
    let prof = power_function_profile(&design, grid.nodes())?;
    println!("sup P = {:.6} at x = {} (closed form 1/(2√n) = 0.25)", prof.sup_value, prof.grid.get(prof.argmax)[0]);
    println!("‖P‖_L2 = {:.6}", interpolation_width(&design, &grid, Exponent::Finite(2.0))?);
    Ok(())
}
