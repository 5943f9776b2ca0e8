//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{bell_spec, phi_plus, swap_spec};
use privdist_core::linalg::permute_subsystems;
use privdist_core::private_state::tensor_power_dims;
use privdist_core::{
    binary_entropy, brute_force_eta, build_private_state, cross_operator, ed_lower_bound,
    ef_certificate, eta_optimize, predict_outcome, tensor_power_spec, trace_distance,
    von_neumann_entropy, BoundOptions, BoundReport, ComplexMatrix, DensityMatrix, OptimizerOptions,
    PrivateStateSpec,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn runtime_ok(elapsed: Duration, limit: Duration) -> (bool, String) {
    (
        elapsed < limit,
        format!("{:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn swap_shield() -> Outcome {
    let start = Instant::now();
    let report = ed_lower_bound(&swap_spec(), &BoundOptions::default());
    let Some(best) = report.best() else {
        return check(false, "no pair produced a rate");
    };
    let o = &best.overlap;
    let sim = &best.simulation;
    let target = DensityMatrix::new(
        ComplexMatrix::projector(&phi_plus()),
        sim.post_state.layout().clone(),
    )
    .unwrap();
    let distance = trace_distance(&sim.post_state, &target).unwrap();
    let (fast, time) = runtime_ok(start.elapsed(), Duration::from_secs(1));
    let ok = within(o.eta, 0.25, 1e-6)
        && within(o.a1, 0.25, 1e-9)
        && within(o.a2, 0.25, 1e-9)
        && within(sim.success_prob, 0.25, 1e-9)
        && distance <= 1e-9
        && within(report.best_verified_rate, 0.25, 1e-6)
        && within(report.best_paper_rate, 0.25, 1e-6)
        && fast;
    check(
        ok,
        format!(
            "eta={:.12} a1={:.12} a2={:.12} success={:.12} dist(Phi+)={:.2e} rate={:.12} time={time}",
            o.eta, o.a1, o.a2, sim.success_prob, distance, report.best_verified_rate
        ),
    )
}

fn bell_shield() -> Outcome {
    let start = Instant::now();
    let report = ed_lower_bound(&bell_spec(), &BoundOptions::default());
    let eta = report.best().map_or(f64::NAN, |b| b.overlap.eta);
    let (fast, time) = runtime_ok(start.elapsed(), Duration::from_secs(1));
    let ok = within(eta, 0.5, 1e-6) && within(report.best_verified_rate, 0.5, 1e-6) && fast;
    check(
        ok,
        format!(
            "eta={eta:.12} rate={:.12} time={time}",
            report.best_verified_rate
        ),
    )
}

struct CorpusRun {
    spec: PrivateStateSpec,
    report: BoundReport,
}

fn positivity(corpus: &[CorpusRun], elapsed: Duration) -> Outcome {
    let min = corpus
        .iter()
        .map(|r| r.report.best_verified_rate)
        .fold(f64::INFINITY, f64::min);
    let failures: Vec<usize> = corpus
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            r.report.best_verified_rate.is_nan() || r.report.best_verified_rate <= 1e-6
        })
        .map(|(k, _)| k)
        .collect();
    let (fast, time) = runtime_ok(elapsed, Duration::from_secs(300));
    check(
        failures.is_empty() && fast,
        format!(
            "{} specs, min best_verified_rate={min:.6e}, failing={failures:?}, time={time}",
            corpus.len()
        ),
    )
}

fn post_filter_structure(corpus: &[CorpusRun]) -> Outcome {
    let mut worst_residual = 0.0f64;
    let mut worst_success = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut pairs = 0;
    let mut errors = 0;
    for run in corpus {
        for pair in &run.report.per_pair {
            let Ok(r) = &pair.result else {
                errors += 1;
                continue;
            };
            pairs += 1;
            let (success, p) = predict_outcome(&r.overlap);
            worst_residual = worst_residual.max(r.simulation.residual);
            worst_success = worst_success.max((success - r.simulation.success_prob).abs());
            worst_p = worst_p.max((p - r.simulation.p).abs());
        }
    }
    check(
        errors == 0 && worst_residual <= 1e-9 && worst_success <= 1e-9 && worst_p <= 1e-9,
        format!(
            "{pairs} pairs, {errors} errors, max residual={worst_residual:.2e}, max |dsuccess|={worst_success:.2e}, max |dp|={worst_p:.2e}"
        ),
    )
}

fn cauchy_schwarz(corpus: &[CorpusRun]) -> Outcome {
    let mut worst_cs = f64::NEG_INFINITY;
    let mut worst_entry = f64::NEG_INFINITY;
    for run in corpus {
        for r in run.report.rates() {
            let o = &r.overlap;
            worst_cs = worst_cs.max(o.eta - (o.a1 * o.a2).sqrt());
            let x = cross_operator(&run.spec, o.pair.0, o.pair.1).unwrap();
            worst_entry = worst_entry.max(x.max_abs() - o.eta);
        }
    }
    check(
        worst_cs <= 1e-9 && worst_entry <= 1e-9,
        format!("max(eta - sqrt(a1 a2))={worst_cs:.2e}, max(max|X| - eta)={worst_entry:.2e}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let shapes: [&[usize]; 10] = [
        &[2, 2],
        &[2, 3],
        &[3, 3],
        &[4, 3],
        &[6, 6],
        &[2, 2, 2],
        &[2, 3, 3],
        &[3, 3, 3],
        &[3, 3, 4],
        &[1, 5],
    ];
    let opts = OptimizerOptions::default();
    let mut worst_gap = f64::NEG_INFINITY;
    for k in 0..50u64 {
        let dims = shapes[k as usize % shapes.len()];
        let d = 2 + (k as usize / shapes.len()) % 2;
        let rank = if k % 3 == 0 { Some(1) } else { None };
        let spec = PrivateStateSpec::random(d, dims, rank, 500 + k).unwrap();
        let x = cross_operator(&spec, 0, d - 1).unwrap();
        let optimised = eta_optimize(&x, dims, &opts).unwrap().eta;
        let brute = brute_force_eta(&x, dims, 200, k).unwrap();
        worst_gap = worst_gap.max(brute - optimised);
    }
    let mut analytic_error = 0.0f64;
    for (spec, hand) in [(swap_spec(), 0.25), (bell_spec(), 0.5)] {
        let x = cross_operator(&spec, 0, 1).unwrap();
        let optimised = eta_optimize(&x, spec.shield_dims(), &opts).unwrap().eta;
        let brute = brute_force_eta(&x, spec.shield_dims(), 200, 1).unwrap();
        analytic_error = analytic_error
            .max((optimised - hand).abs())
            .max((brute - hand).abs());
    }
    check(
        worst_gap <= 1e-6 && analytic_error <= 1e-6,
        format!("50 operators, max(brute - optimised)={worst_gap:.2e}, analytic max error={analytic_error:.2e}"),
    )
}

fn certificates() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (d, dims, seed) in [
        (2usize, [2usize, 2usize], 70u64),
        (3, [3, 3], 71),
        (4, [2, 2], 72),
    ] {
        let spec = PrivateStateSpec::random(d, &dims, None, seed).unwrap();
        let cert = ef_certificate(&spec, 200, seed).unwrap();
        let log_d = (d as f64).log2();
        let pass = cert.min_entropy_found >= log_d - 1e-9 && cert.max_identity_error <= 1e-9;
        ok &= pass;
        parts.push(format!(
            "d={d}: min={:.9} (log2 d={log_d:.9}) id_err={:.2e}",
            cert.min_entropy_found, cert.max_identity_error
        ));
    }
    let (fast, time) = runtime_ok(start.elapsed(), Duration::from_secs(60));
    check(ok && fast, format!("{}; time={time}", parts.join("; ")))
}

fn tensor_power() -> Outcome {
    let spec = PrivateStateSpec::random(2, &[2, 2], None, 80).unwrap();
    let (square, order) = tensor_power_spec(&spec, 2, 4096).unwrap();
    let gamma = build_private_state(&spec);
    let kron = gamma.rho().matrix().kron(gamma.rho().matrix());
    let permuted = permute_subsystems(&kron, &tensor_power_dims(&spec, 2), &order).unwrap();
    let error = permuted.max_abs_diff(build_private_state(&square).rho().matrix());
    let cert = ef_certificate(&square, 200, 81).unwrap();
    check(
        error <= 1e-12 && cert.min_entropy_found >= 2.0 - 1e-9,
        format!(
            "permutation error={error:.2e}, certificate min entropy={:.9}",
            cert.min_entropy_found
        ),
    )
}

fn hashing_consistency(corpus: &[CorpusRun]) -> Outcome {
    let mut worst = 0.0f64;
    for run in corpus {
        for r in run.report.rates() {
            let entropy = von_neumann_entropy(&r.simulation.post_state).unwrap();
            let h = binary_entropy(r.p).unwrap();
            worst = worst.max(((1.0 - h) - (1.0 - entropy)).abs());
            worst = worst.max((r.hashing_rate - (1.0 - entropy)).abs());
        }
    }
    check(
        worst <= 1e-9,
        format!("max |(1 - H(p)) - (1 - S(post))|={worst:.2e}"),
    )
}

fn determinism(corpus: &[CorpusRun]) -> Outcome {
    let mut mismatches = 0;
    for run in corpus.iter().take(10) {
        let again = ed_lower_bound(&run.spec, &BoundOptions::default());
        if format!("{:?}", again) != format!("{:?}", run.report) {
            mismatches += 1;
        }
    }
    let a = ef_certificate(&swap_spec(), 50, 3).unwrap();
    let b = ef_certificate(&swap_spec(), 50, 3).unwrap();
    if format!("{a:?}") != format!("{b:?}") {
        mismatches += 1;
    }
    check(
        mismatches == 0,
        format!("10 bound reports + 1 certificate re-run, {mismatches} differ"),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("1 swap-shield p-bit", swap_shield()));
    results.push(("2 bell-shield p-bit", bell_shield()));

    let start = Instant::now();
    let corpus: Vec<CorpusRun> = common::corpus(100)
        .into_iter()
        .map(|spec| CorpusRun {
            report: ed_lower_bound(&spec, &BoundOptions::default()),
            spec,
        })
        .collect();
    let elapsed = start.elapsed();

    results.push((
        "3 every private state distillable",
        positivity(&corpus, elapsed),
    ));
    results.push(("4 post-filter structure", post_filter_structure(&corpus)));
    results.push(("5 cauchy-schwarz and entry bound", cauchy_schwarz(&corpus)));
    results.push(("6 optimiser vs brute-force oracle", oracle_equivalence()));
    results.push(("7 formation-entropy certificate", certificates()));
    results.push(("8 tensor-square structure", tensor_power()));
    results.push(("9 hashing-rate consistency", hashing_consistency(&corpus)));
    results.push(("10 determinism", determinism(&corpus)));

    let mut failed = 0;
    for (name, outcome) in &results {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
