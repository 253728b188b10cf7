//! Sup-norm upper bound on `a_n(H, L_∞)` from an optimized `n`-dimensional
//! subspace of the discretized unit-ball image (Lawson-weighted alternating
//! minimization with seeded restarts).

use nwidth::widths::{subspace_residual_upper, EllipsoidModel};
use nwidth::{analytic_spectrum, BoxDomain, QuadratureRule};

fn main() -> nwidth::Result<()> {
    let spec = analytic_spectrum("brownian_motion", 64)?;
    let grid = QuadratureRule::trapezoid(&BoxDomain::unit(1), 255)?;
    let model = EllipsoidModel::new(&spec, grid.nodes(), 64)?;
    for n in [1, 2, 4, 8] {
        let r = subspace_residual_upper(&model, n, 2, 7)?;
        println!(
            "n = {n}: certified upper {:.5} (residual {:.5}), √λ_(n+1) = {:.5}, {} iterations",
            r.value,
            r.residual,
            spec.eigenvalue(n)?.sqrt(),
            r.iterations
        );
    }
    Ok(())
}
