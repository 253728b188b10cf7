//! Numerical laboratory for the n-width scales of reproducing kernel Hilbert
//! space embeddings into `L_p(μ)`.
//!
//! The crate computes, bounds and compares four families of quantities for a
//! kernel `k` on a box `X` with Lebesgue measure `μ`:
//!
//! - eigenvalues `λ_i` of the integral operator `T_k` ([`spectral`]),
//! - interpolation widths `I_n`, i.e. worst-case kernel interpolation errors
//!   ([`interpolation`]),
//! - Kolmogorov widths `d_n` and approximation widths `a_n` ([`widths`]),
//! - entropy numbers `e_n` of diagonal surrogates ([`entropy`]),
//!
//! and turns rate estimates into asymptotic-equivalence verdicts
//! ([`asymptotics`]). The [`lab`] module drives batch campaigns from TOML
//! configuration and emits deterministic CSV.

pub mod asymptotics;
pub mod entropy;
pub mod error;
pub mod format;
pub mod interpolation;
pub mod kernel;
pub mod lab;
pub mod points;
pub mod quadrature;
pub mod spectral;
pub mod widths;

pub use error::{Error, Result};
pub use kernel::{BoxDomain, Kernel, KernelFamily, MercerExpansion, PowerKernelSpec};
pub use points::PointSet;
pub use quadrature::QuadratureRule;
pub use spectral::{analytic_spectrum, nystrom_spectrum, tail_sum, SpectrumEstimate};
