//! The width chain `d_n ≤ a_n ≤ I_n` for Brownian motion in `L_∞`, with the
//! trace-tail lower bound on `I_n`.

use nwidth::interpolation::{greedy_design, interpolation_width, DesignSet, Exponent};
use nwidth::widths::{interp_linf_lower_tail, l2_widths, linf_kolmogorov_lower, mercer_projection_upper, TailCorrection};
use nwidth::{analytic_spectrum, BoxDomain, Kernel, QuadratureRule};

fn main() -> nwidth::Result<()> {
    let k = Kernel::brownian_motion();
    let spec = analytic_spectrum("brownian_motion", 400)?;
    let grid = QuadratureRule::trapezoid(&BoxDomain::unit(1), 4096)?;
    let g = greedy_design(&k, grid.nodes(), 32)?;
    println!(" n   d_n(L2)   d_n(Linf)≥  a_n(Linf)≤  I_n(Linf)≥  I_n(Linf)≤ greedy");
    for n in [1, 2, 4, 8, 16, 32] {
        let design = DesignSet::new(&k, grid.nodes().select(&g.selected[..n]))?;
        println!(
            "{n:2}   {:.5}   {:.5}     {:.5}     {:.5}     {:.5}",
            l2_widths(&spec, n)?.value,
            linf_kolmogorov_lower(&spec, 1.0, n)?,
            mercer_projection_upper(&spec, n, Exponent::Infinity, &grid, TailCorrection::MercerDiagonal)?,
            interp_linf_lower_tail(&spec, 1.0, n, Some(0.5))?,
            interpolation_width(&design, &grid, Exponent::Infinity)?,
        );
    }
    Ok(())
}
