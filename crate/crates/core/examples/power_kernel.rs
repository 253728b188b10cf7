//! Power kernels `k^γ(x, y) = Σ λ_i^γ e_i(x) e_i(y)`: `γ = 1` recovers the
//! kernel up to the truncation tail, smaller `γ` moves towards `L_2`.

use nwidth::kernel::{power_kernel_eval, AnalyticSystem};
use nwidth::{Kernel, MercerExpansion, PowerKernelSpec};

fn main() -> nwidth::Result<()> {
    let bridge = Kernel::brownian_bridge();
    let exp = MercerExpansion::analytic(AnalyticSystem::BrownianBridge, 200);
    let spec = PowerKernelSpec::new(&exp, 1.0, 200)?;
    let bound = 2.0 * (1.0 / 6.0 - spec.truncated_trace());
    println!("truncation tail bound 2·(1/6 - Σ_(i≤200) λ_i) = {bound:.3e}");
    for (x, y) in [(0.1, 0.7), (0.3, 0.3), (0.5, 0.9), (0.25, 0.75)] {
        let approx = power_kernel_eval(&spec, &[x], &[y])?;
        let exact = bridge.value(&[x], &[y]);
        println!("k({x}, {y}) = {exact:.6}, γ = 1 truncation {approx:.6}, |diff| = {:.1e}", (approx - exact).abs());
    }
    for gamma in [1.0, 0.75, 0.5] {
        let s = PowerKernelSpec::new(&exp, gamma, 200)?;
        println!("γ = {gamma}: k^γ(0.5, 0.5) = {:.6}", power_kernel_eval(&s, &[0.5], &[0.5])?);
    }
    Ok(())
}
