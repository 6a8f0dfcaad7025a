use num_complex::Complex64;
use polyosc::fock::{build_finite_rep, build_truncated_rep, verify_wh_relations};
use polyosc::grassmann::{measure_element, verify_grassmann_resolution};
use polyosc::quon::{build_kfermion_ops, verify_quon_relations};
use polyosc::{AlgebraSpec, GrassmannElement, QuonParams, ResolutionMode, Variable};
use proptest::prelude::*;

fn kappas() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..2.0, 1..=3)
}

fn element(k: usize) -> impl Strategy<Value = GrassmannElement> {
    prop::collection::vec((0..k, 0..k, -1.0f64..1.0, -1.0f64..1.0), 0..8).prop_map(move |terms| {
        GrassmannElement::from_terms(k, terms.into_iter().map(|(a, b, re, im)| (a, b, Complex64::new(re, im))))
    })
}

fn order_and_elements(count: usize) -> impl Strategy<Value = (usize, Vec<GrassmannElement>)> {
    (2usize..=6).prop_flat_map(move |k| (Just(k), prop::collection::vec(element(k), count)))
}

proptest! {
    #[test]
    fn vieta_form_matches_product_form(ks in kappas(), n in 0usize..30) {
        let spec = AlgebraSpec::new(ks, 0.0).unwrap();
        let s = spec.vieta_coeffs();
        let nf = n as f64;
        let vieta = nf * s.iter().enumerate().map(|(i, si)| si * (nf - 1.0).powi(i as i32)).sum::<f64>();
        let product = spec.structure_f(n).unwrap();
        prop_assert!((vieta - product).abs() <= 1e-12 * product.abs().max(1.0));
    }

    #[test]
    fn finite_trace_of_g_vanishes(d in 2usize..=16, extra in prop::collection::vec(0.0f64..2.0, 0..=2)) {
        let spec = AlgebraSpec::finite(d, &extra, 0.0).unwrap();
        let trace: f64 = (0..d).map(|n| spec.structure_g(n).unwrap()).sum();
        let scale = (0..=d).map(|n| spec.structure_f(n).unwrap()).fold(1.0f64, f64::max);
        prop_assert!(trace.abs() <= 1e-12 * scale);
    }

    #[test]
    fn representations_satisfy_relations(d in 2usize..=10, extra in prop::collection::vec(0.0f64..1.0, 0..=2), phi in -3.0f64..3.0) {
        let spec = AlgebraSpec::finite(d, &extra, phi).unwrap();
        prop_assert!(verify_wh_relations(&build_finite_rep(&spec).unwrap(), 1e-10).passed());
        let mut ks = vec![0.5];
        ks.extend(extra);
        let inf = AlgebraSpec::new(ks, phi).unwrap();
        prop_assert!(verify_wh_relations(&build_truncated_rep(&inf, d).unwrap(), 1e-10).passed());
    }

    #[test]
    fn quon_relations(k in 2usize..=12) {
        let params = QuonParams::new(k).unwrap();
        prop_assert!(verify_quon_relations(&params, 1e-12).passed());
        let ops = build_kfermion_ops(&params);
        prop_assert_eq!(ops.f_minus.nrows(), k);
    }

    #[test]
    fn multiplication_is_associative((k, xs) in order_and_elements(3)) {
        let left = &(&xs[0] * &xs[1]) * &xs[2];
        let right = &xs[0] * &(&xs[1] * &xs[2]);
        prop_assert!(left.max_diff(&right) <= 1e-12, "k = {}", k);
    }

    #[test]
    fn derivatives_are_nilpotent((k, xs) in order_and_elements(1)) {
        for which in [Variable::Theta, Variable::ThetaBar] {
            let mut y = xs[0].clone();
            for _ in 0..k {
                y = y.q_derivative(which);
            }
            prop_assert!(y.is_zero());
        }
    }

    #[test]
    fn derivatives_q_commute((k, xs) in order_and_elements(1)) {
        let x = &xs[0];
        let lhs = x.q_derivative(Variable::ThetaBar).q_derivative(Variable::Theta);
        let rhs = x.q_derivative(Variable::Theta).q_derivative(Variable::ThetaBar);
        let q_half = QuonParams::new(k).unwrap().q_half();
        prop_assert!(lhs.max_diff(&rhs.scale(q_half.conj())) <= 1e-12);
    }

    #[test]
    fn theta_and_derivative_realize_the_q_commutator(k in 2usize..=8, coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)) {
        // ∂_θ∘θ − q θ∘∂_θ = id on the θ-only subalgebra.
        let x = GrassmannElement::from_terms(k, coeffs.iter().take(k).enumerate().map(|(a, (re, im))| (a, 0, Complex64::new(*re, *im))));
        let theta = GrassmannElement::theta(k);
        let q = QuonParams::new(k).unwrap().q();
        let first = (&theta * &x).q_derivative(Variable::Theta);
        let second = (&theta * &x.q_derivative(Variable::Theta)).scale(q);
        let out = &first - &second;
        // Holds on θ^{k-1} too, since q[k-1]_q = -1.
        prop_assert!(out.max_diff(&x) <= 1e-12);
    }
}

#[test]
fn resolution_holds_strictly() {
    for k in 2..=8 {
        let finite = AlgebraSpec::finite(k, &[0.5], 0.3).unwrap();
        let truncated = AlgebraSpec::new(vec![0.25, 1.0], 0.3).unwrap();
        for spec in [finite, truncated] {
            let out = verify_grassmann_resolution(&spec, k, ResolutionMode::Strict, 1e-12).unwrap();
            assert!(out.report.passed(), "{}", out.report);
            for p in out.phases {
                assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
        assert_eq!(measure_element(&AlgebraSpec::harmonic(0.0), k).unwrap().terms.len(), k);
    }
}
