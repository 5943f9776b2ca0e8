mod common;

use common::{bell_spec, c, phi_minus, phi_plus, swap_spec, trivial_spec};
use privdist_core::filtering::build_filters_with_variant;
use privdist_core::linalg::permute_subsystems;
use privdist_core::overlap::overlap_for_tuple;
use privdist_core::private_state::tensor_power_dims;
use privdist_core::{
    apply_filter, build_filters, build_private_state, cross_operator, ed_lower_bound,
    ef_certificate, eigenvectors_of_pdit, eta_optimize, hermitian_eig, overlap_for_pair,
    partial_trace, predict_outcome, tensor_power_spec, trace_distance, BoundOptions, ComplexMatrix,
    DensityMatrix, OptimizerOptions, PrivateStateSpec, SubsystemLayout, UnitaryOp, Variant,
};
use proptest::prelude::*;

fn opts() -> OptimizerOptions {
    OptimizerOptions::default()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn swap_shield_cross_operator_is_swap_over_four() {
    let x = cross_operator(&swap_spec(), 0, 1).unwrap();
    assert!(x.max_abs_diff(&common::swap().scale_real(0.25)) < 1e-15);
}

#[test]
fn swap_shield_pipeline() {
    let spec = swap_spec();
    let o = overlap_for_pair(&spec, 0, 1, &opts()).unwrap();
    assert!(close(o.eta, 0.25, 1e-9), "eta {}", o.eta);
    assert!(close(o.a1, 0.25, 1e-9) && close(o.a2, 0.25, 1e-9));
    let state = build_private_state(&spec);
    let out = apply_filter(&state, &build_filters(&o).unwrap()).unwrap();
    assert!(close(out.success_prob, 0.25, 1e-9));
    assert!(close(out.p, 1.0, 1e-9));
    let target = DensityMatrix::new(
        ComplexMatrix::projector(&phi_plus()),
        out.post_state.layout().clone(),
    )
    .unwrap();
    assert!(trace_distance(&out.post_state, &target).unwrap() <= 1e-9);

    let report = ed_lower_bound(&spec, &BoundOptions::default());
    assert!(close(report.best_paper_rate, 0.25, 1e-6));
    assert!(close(report.best_verified_rate, 0.25, 1e-6));
    assert_eq!(report.best_pair, Some((0, 1)));
}

#[test]
fn bell_shield_pipeline() {
    let report = ed_lower_bound(&bell_spec(), &BoundOptions::default());
    let best = report.best().unwrap();
    assert!(close(best.overlap.eta, 0.5, 1e-6));
    assert!(close(best.overlap.a1, 0.5, 1e-9) && close(best.overlap.a2, 0.5, 1e-9));
    assert!(close(best.p, 1.0, 1e-9));
    assert!(close(report.best_verified_rate, 0.5, 1e-6));
}

#[test]
fn trivial_shield_is_one_bit() {
    let report = ed_lower_bound(&trivial_spec(), &BoundOptions::default());
    assert!(close(report.best_verified_rate, 1.0, 1e-12));
    assert!(close(report.best_paper_rate, 1.0, 1e-12));
    assert!(close(report.key_rate, 1.0, 0.0));
    let cert = ef_certificate(&trivial_spec(), 10, 0).unwrap();
    assert!(cert.passed && close(cert.margin, 0.0, 1e-9));
}

#[test]
fn key_measurement_is_perfectly_correlated() {
    for index in [0, 1, 2, 3] {
        let spec = common::corpus_spec(index);
        let state = build_private_state(&spec);
        let keys: Vec<String> = (0..spec.parties())
            .map(privdist_core::layout::key_label)
            .collect();
        let keep: Vec<&str> = keys.iter().map(|s| s.as_str()).collect();
        let reduced = partial_trace(state.rho().matrix(), &spec.layout(), &keep).unwrap();
        let d = spec.d();
        for r in 0..reduced.rows() {
            let repeated = (0..d).any(|k| spec.repeated_key(k) == r);
            let expected = if repeated { 1.0 / d as f64 } else { 0.0 };
            assert!(close(reduced[(r, r)].re, expected, 1e-12));
        }
    }
}

#[test]
fn eigenvectors_reconstruct_the_state() {
    for index in 0..4 {
        let spec = common::corpus_spec(index);
        let state = build_private_state(&spec);
        let pairs = eigenvectors_of_pdit(&spec, true).unwrap();
        let mut sum = ComplexMatrix::zeros(spec.total_dim(), spec.total_dim());
        for (lambda, v) in &pairs {
            sum = sum.add(&ComplexMatrix::projector(v).scale_real(*lambda));
        }
        assert!(sum.max_abs_diff(state.rho().matrix()) < 1e-10);
        let direct = hermitian_eig(state.rho().matrix()).unwrap();
        for ((lambda, _), mu) in pairs.iter().zip(&direct.eigenvalues) {
            assert!(close(*lambda, *mu, 1e-10));
        }
    }
    assert!(eigenvectors_of_pdit(&common::corpus_spec(2), false).is_err());
}

#[test]
fn variant_choice_does_not_change_the_post_state() {
    for index in 0..6 {
        let spec = common::corpus_spec(index);
        let state = build_private_state(&spec);
        let o = overlap_for_pair(&spec, 0, 1, &opts()).unwrap();
        let v = apply_filter(&state, &build_filters_with_variant(&o, Variant::V).unwrap()).unwrap();
        let w = apply_filter(&state, &build_filters_with_variant(&o, Variant::W).unwrap()).unwrap();
        assert!(trace_distance(&v.post_state, &w.post_state).unwrap() <= 1e-10);
        let d = spec.d() as f64;
        assert!(close(v.success_prob, 2.0 * o.a1 / d, 1e-10));
        assert!(close(w.success_prob, 2.0 * o.a2 / d, 1e-10));
    }
}

#[test]
fn optimal_filters_are_contractions() {
    for index in 0..6 {
        let spec = common::corpus_spec(index);
        let o = overlap_for_pair(&spec, 0, 1, &opts()).unwrap();
        for norm in build_filters(&o).unwrap().operator_norms().unwrap() {
            assert!(norm <= 1.0 + 1e-9, "norm {norm}");
        }
    }
}

#[test]
fn coherence_is_real_and_nonnegative() {
    for index in 0..8 {
        let spec = common::corpus_spec(index);
        let state = build_private_state(&spec);
        for (i, j) in [(0, 1), (1, 0)] {
            let o = overlap_for_pair(&spec, i, j, &opts()).unwrap();
            let out = apply_filter(&state, &build_filters(&o).unwrap()).unwrap();
            assert!(out.coherence.im.abs() <= 1e-9 && out.coherence.re >= -1e-9);
        }
    }
}

#[test]
fn suboptimal_tuple_still_gives_a_two_projector_mixture() {
    let spec = swap_spec();
    let e = |k: usize| privdist_core::matrix::basis(2, k);
    let o = overlap_for_tuple(&spec, 0, 1, vec![e(0), e(1)], vec![e(1), e(0)], 1e-8).unwrap();
    assert!(close(o.eta, 0.25, 1e-12));
    let off = overlap_for_tuple(&spec, 0, 1, vec![e(0), e(0)], vec![e(1), e(1)], 1e-8).unwrap();
    assert!(off.degenerate && off.eta < 1e-15);
    let state = build_private_state(&spec);
    let out = apply_filter(&state, &build_filters(&off).unwrap()).unwrap();
    assert!(close(out.p, 0.5, 1e-12));
    assert!(out.residual <= 1e-9);
    // The reconstructed Bell mixture: equal weights of Φ+ and Φ-.
    let mix = ComplexMatrix::projector(&phi_plus())
        .add(&ComplexMatrix::projector(&phi_minus()))
        .scale_real(0.5);
    assert!(out.post_state.matrix().max_abs_diff(&mix) < 1e-12);
}

#[test]
fn rates_are_ordered_and_in_range() {
    for index in 0..8 {
        let report = ed_lower_bound(&common::corpus_spec(index), &BoundOptions::default());
        for r in report.rates() {
            assert!((0.0..=1.0).contains(&r.hashing_rate));
            assert!(r.verified_rate <= r.paper_rate + 1e-12);
            assert!(r.overlap.eta <= (r.overlap.a1 * r.overlap.a2).sqrt() + 1e-9);
            let (success, p) = predict_outcome(&r.overlap);
            assert!(close(success, r.simulation.success_prob, 1e-9));
            assert!(close(p.max(1.0 - p), r.p, 1e-9));
        }
        let max_verified = report.rates().map(|r| r.verified_rate).fold(0.0, f64::max);
        assert_eq!(max_verified, report.best_verified_rate);
    }
}

#[test]
fn tensor_square_matches_permuted_kron() {
    let spec = swap_spec();
    let (square, order) = tensor_power_spec(&spec, 2, 4096).unwrap();
    assert_eq!(square.d(), 4);
    let gamma = build_private_state(&spec);
    let kron = gamma.rho().matrix().kron(gamma.rho().matrix());
    let permuted = permute_subsystems(&kron, &tensor_power_dims(&spec, 2), &order).unwrap();
    assert!(permuted.max_abs_diff(build_private_state(&square).rho().matrix()) <= 1e-12);
    let cert = ef_certificate(&square, 50, 4).unwrap();
    assert!(cert.passed && cert.min_entropy_found >= 2.0 - 1e-9);
}

#[test]
fn rank_one_shield_saturates_the_certificate() {
    let spec = bell_spec();
    let cert = ef_certificate(&spec, 40, 2).unwrap();
    assert!(cert.passed);
    // Pure product shield branches: the branch term vanishes exactly.
    let pure = PrivateStateSpec::new(
        2,
        vec![2, 2],
        vec![UnitaryOp::identity(4), UnitaryOp::identity(4)],
        DensityMatrix::new(
            ComplexMatrix::projector(&privdist_core::matrix::basis(4, 0)),
            SubsystemLayout::flat(4),
        )
        .unwrap(),
    )
    .unwrap();
    let cert = ef_certificate(&pure, 20, 2).unwrap();
    assert!(close(cert.margin, 0.0, 1e-9) && close(cert.mean_entropy, 1.0, 1e-9));
}

#[test]
fn optimizer_is_deterministic() {
    let spec = common::corpus_spec(5);
    let x = cross_operator(&spec, 0, 1).unwrap();
    let o = OptimizerOptions { seed: 9, ..opts() };
    assert_eq!(
        eta_optimize(&x, spec.shield_dims(), &o).unwrap(),
        eta_optimize(&x, spec.shield_dims(), &o).unwrap()
    );
    assert_eq!(
        ed_lower_bound(&spec, &BoundOptions::default()),
        ed_lower_bound(&spec, &BoundOptions::default())
    );
}

#[test]
fn cross_operators_are_adjoint_symmetric() {
    let spec = common::corpus_spec(3);
    let x01 = cross_operator(&spec, 0, 1).unwrap();
    let x10 = cross_operator(&spec, 1, 0).unwrap();
    assert!(x01.adjoint().max_abs_diff(&x10) < 1e-14);
    assert!(close(x01.trace().norm(), x10.trace().norm(), 1e-14));
    let _ = c(0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn optimizer_respects_cauchy_schwarz_and_entry_bound(seed in 0u64..100_000, d in 2usize..4, s0 in 1usize..4, s1 in 1usize..4) {
        let spec = PrivateStateSpec::random(d, &[s0, s1], None, seed).unwrap();
        let o = overlap_for_pair(&spec, 0, d - 1, &opts()).unwrap();
        let x = cross_operator(&spec, 0, d - 1).unwrap();
        prop_assert!(o.eta <= (o.a1 * o.a2).sqrt() + 1e-9);
        prop_assert!(o.eta >= x.max_abs() - 1e-9);
        prop_assert!(!o.degenerate);
    }

    #[test]
    fn filtered_state_is_a_ghz_mixture(seed in 0u64..100_000, parties in 2usize..4) {
        let dims = vec![2; parties];
        let spec = PrivateStateSpec::random(2, &dims, Some(1 + seed as usize % 3), seed).unwrap();
        let state = build_private_state(&spec);
        let o = overlap_for_pair(&spec, 0, 1, &opts()).unwrap();
        let out = apply_filter(&state, &build_filters(&o).unwrap()).unwrap();
        let (success, p) = predict_outcome(&o);
        prop_assert!(out.residual <= 1e-9);
        prop_assert!((out.success_prob - success).abs() <= 1e-9);
        prop_assert!((out.p - p).abs() <= 1e-9);
    }
}
