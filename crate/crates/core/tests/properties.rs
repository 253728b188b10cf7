//! Property tests across modules: kernel symmetry and positive
//! semidefiniteness, spectrum invariants, interpolation monotonicity, the
//! width chain and cache round trips.

use nwidth::interpolation::{greedy_design, interpolation_width, power_function, uniform_design, DesignSet, Exponent};
use nwidth::kernel::{gram_matrix, power_kernel_eval, AnalyticSystem};
use nwidth::lab::WidthsStage;
use nwidth::spectral::cache;
use nwidth::widths::{ScaleId, WidthCurve, WidthEntry, WidthKind};
use nwidth::{analytic_spectrum, nystrom_spectrum, BoxDomain, Kernel, MercerExpansion, PointSet, PowerKernelSpec, QuadratureRule};
use proptest::prelude::*;

fn kernels() -> Vec<Kernel> {
    let unit = BoxDomain::unit(1);
    let square = BoxDomain::unit(2);
    vec![
        Kernel::brownian_motion(),
        Kernel::brownian_bridge(),
        Kernel::from_id("integrated_brownian_motion", None, unit.clone()).unwrap(),
        Kernel::from_id("matern12", Some(0.3), unit.clone()).unwrap(),
        Kernel::from_id("matern32", Some(0.5), square.clone()).unwrap(),
        Kernel::from_id("gaussian", Some(0.4), square).unwrap(),
    ]
}

fn min_eigenvalue(k: &Kernel, pts: &PointSet) -> f64 {
    let g = gram_matrix(k, pts).unwrap();
    g.self_adjoint_eigenvalues(faer::Side::Lower).unwrap()[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_are_symmetric(which in 0usize..6, a in proptest::collection::vec(0.0f64..=1.0, 2), b in proptest::collection::vec(0.0f64..=1.0, 2)) {
        let k = &kernels()[which];
        let d = k.dim();
        prop_assert_eq!(k.value(&a[..d], &b[..d]), k.value(&b[..d], &a[..d]));
    }

    #[test]
    fn gram_matrices_are_positive_semidefinite(which in 0usize..6, coords in proptest::collection::vec(0.0f64..=1.0, 24)) {
        let k = &kernels()[which];
        let d = k.dim();
        let pts = PointSet::new(d, coords[..(24 / d) * d].to_vec()).unwrap();
        let scale = (0..pts.len()).map(|i| k.diag(pts.get(i))).fold(0.0, f64::max).max(1.0);
        prop_assert!(min_eigenvalue(k, &pts) >= -1e-10 * scale);
    }

    #[test]
    fn power_kernel_converges_to_bridge(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let exp = MercerExpansion::analytic(AnalyticSystem::BrownianBridge, 400);
        let bridge = Kernel::brownian_bridge();
        for n in [25, 100, 400] {
            let spec = PowerKernelSpec::new(&exp, 1.0, n).unwrap();
            let err = (power_kernel_eval(&spec, &[x], &[y]).unwrap() - bridge.value(&[x], &[y])).abs();
            // |k − k_N| ≤ √(t_N(x) t_N(y)) with t_N the pointwise tail; bounded via the trace tail
            prop_assert!(err <= 2.0 * (1.0 / 6.0 - spec.truncated_trace()) + 1e-12);
        }
    }

    #[test]
    fn adding_points_never_raises_the_power_function(extra in 0.0f64..=1.0, x in 0.0f64..=1.0) {
        let k = Kernel::brownian_motion();
        let base = uniform_design(&k, 3).unwrap();
        let mut pts = base.points().clone();
        if pts.iter().all(|p| (p[0] - extra).abs() > 1e-6) {
            pts.push(&[extra]).unwrap();
            let bigger = DesignSet::new(&k, pts).unwrap();
            prop_assert!(power_function(&bigger, &[x]).unwrap() <= power_function(&base, &[x]).unwrap() + 1e-12);
        }
    }

    #[test]
    fn widths_stage_flags_any_crossing(lower in 0.0f64..1.0, upper in 0.0f64..1.0) {
        let e = |value, kind, method: &str| WidthEntry { n: 3, value, kind, method: method.into(), p: Some(Exponent::Infinity), seed: None };
        let mut lo = WidthCurve::new(ScaleId::ILinfLowerTail, "bm");
        lo.push(e(lower, WidthKind::Lower, "trace-tail"));
        let mut up = WidthCurve::new(ScaleId::ILpUpper, "bm");
        up.push(e(upper, WidthKind::Upper, "uniform"));
        let stage = WidthsStage::from_curves(vec![lo, up]);
        let crossing = lower > upper + 1e-6;
        prop_assert_eq!(!stage.failures().is_empty(), crossing);
        if crossing {
            let msg = &stage.failures()[0];
            prop_assert!(msg.contains("n=3") && msg.contains("uniform") && msg.contains("trace-tail"), "{}", msg);
        }
    }
}

#[test]
fn nystrom_spectrum_invariants() {
    for k in [Kernel::brownian_motion(), Kernel::from_id("matern32", Some(0.5), BoxDomain::unit(1)).unwrap()] {
        let quad = QuadratureRule::midpoint(k.domain(), 300).unwrap();
        let s = nystrom_spectrum(&k, &quad, 300).unwrap();
        let ev = s.eigenvalues();
        assert!(ev.windows(2).all(|w| w[1] <= w[0]));
        assert!(ev.iter().all(|l| *l >= 0.0));
        let diag_integral: f64 = (0..quad.len()).map(|j| quad.weights()[j] * k.diag(quad.nodes().get(j))).sum();
        assert!((ev.iter().sum::<f64>() - diag_integral).abs() < 1e-10);
        assert!(s.weight_orthonormality_defect().unwrap() < 1e-10);
    }
}

#[test]
fn cache_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let k = Kernel::brownian_bridge();
    let quad = QuadratureRule::midpoint(k.domain(), 120).unwrap();
    let s = nystrom_spectrum(&k, &quad, 30).unwrap();
    assert!(cache::read(dir.path(), &k, &quad, 30).unwrap().is_none());
    cache::write(dir.path(), &k, &s).unwrap();
    let back = cache::read(dir.path(), &k, &quad, 30).unwrap().unwrap();
    assert!(s.eigenvalues().iter().zip(back.eigenvalues()).all(|(a, b)| a.to_bits() == b.to_bits()));
    let (va, vb) = (s.node_values().unwrap(), back.node_values().unwrap());
    for j in 0..quad.len() {
        for i in 0..30 {
            assert_eq!(va[(j, i)].to_bits(), vb[(j, i)].to_bits());
        }
    }
    // a different rule must not hit the entry
    let other = QuadratureRule::midpoint(k.domain(), 121).unwrap();
    assert!(cache::read(dir.path(), &k, &other, 30).unwrap().is_none());
}

#[test]
fn greedy_values_are_nonincreasing_and_bounded_below_by_the_tail() {
    let k = Kernel::brownian_bridge();
    let spec = analytic_spectrum("brownian_bridge", 20000).unwrap();
    let grid = QuadratureRule::trapezoid(k.domain(), 1024).unwrap();
    let g = greedy_design(&k, grid.nodes(), 32).unwrap();
    let mut prev = f64::INFINITY;
    for n in 1..=32 {
        let d = DesignSet::new(&k, grid.nodes().select(&g.selected[..n])).unwrap();
        let v = interpolation_width(&d, &grid, Exponent::Infinity).unwrap();
        let tail = nwidth::tail_sum(&spec, n, Some(1.0 / 6.0)).unwrap().value.sqrt();
        assert!(v <= prev + 1e-12 && v >= tail - 1e-6, "n = {n}: {v} vs tail {tail}");
        prev = v;
    }
}
