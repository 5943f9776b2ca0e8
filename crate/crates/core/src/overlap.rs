//! Maximal product-vector overlap of a cross operator,
//! `η = max |<f_1 ⊗ … ⊗ f_N| X |g_1 ⊗ … ⊗ g_N>|`, together with the diagonal
//! weights `a1`, `a2` and the phase `Θ` that the filters need.
//!
//! The optimiser alternates exact block maximisations: with every local
//! vector but one fixed the objective is linear in the remaining one, whose
//! optimum is the normalised partial contraction. For two parties the whole
//! bra (or ket) side is updated at once through the top Schmidt pair.
//! The maximum is a tensor injective norm, so global optimality is not
//! certified; any feasible product tuple still yields a valid filter.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::layout::digits;
use crate::linalg::schmidt_max;
use crate::matrix::{basis, kron_all, normalized, ComplexMatrix, C64, ZERO};
use crate::private_state::PrivateStateSpec;
use crate::state::{derive_seed, random_unit_vector, seeded_rng};

/// Cross operators with every entry at or below this are rejected.
pub const ZERO_OPERATOR_THRESHOLD: f64 = 1e-14;

/// Largest total dimension accepted by [`brute_force_eta`].
pub const BRUTE_FORCE_MAX_DIM: usize = 64;

/// Relative gain below which two starts count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Alternating sweeps applied to each brute-force sample.
pub const BRUTE_FORCE_SWEEPS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub conv_tol: f64,
    pub seed: u64,
    /// `η` below this marks the pair as degenerate.
    pub eta_floor: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 200,
            conv_tol: 1e-12,
            seed: 0,
            eta_floor: 1e-8,
        }
    }
}

/// Outcome of one alternating-maximisation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartRun {
    pub bra: Vec<Vec<C64>>,
    pub ket: Vec<Vec<C64>>,
    /// `<bra|X|ket>` at the final point.
    pub value: C64,
    /// `|<bra|X|ket>|` at the start and after every sweep.
    pub history: Vec<f64>,
    pub converged: bool,
}

/// Best product tuple found by [`eta_optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProductOverlap {
    pub eta: f64,
    pub theta: f64,
    pub bra: Vec<Vec<C64>>,
    pub ket: Vec<Vec<C64>>,
    /// Index of the winning start; 0 is the largest-entry start.
    pub best_restart: usize,
    /// Whether the winning start met the convergence tolerance.
    pub converged: bool,
    /// True when no start converged within `max_iters`.
    pub non_converged: bool,
    pub sweeps: usize,
    pub history: Vec<f64>,
}

/// Overlap data for one key pair `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapResult {
    pub pair: (usize, usize),
    pub key_dim: usize,
    pub eta: f64,
    pub bra_vectors: Vec<Vec<C64>>,
    pub ket_vectors: Vec<Vec<C64>>,
    pub a1: f64,
    pub a2: f64,
    /// `arg <bra|X_ij|ket>` in `(-π, π]`.
    pub theta: f64,
    pub converged: bool,
    pub non_converged: bool,
    /// `η` fell below the configured floor.
    pub degenerate: bool,
}

/// `X_ij = U_i ϱ U_j^dag`.
pub fn cross_operator(spec: &PrivateStateSpec, i: usize, j: usize) -> Result<ComplexMatrix> {
    let d = spec.d();
    if i >= d || j >= d {
        return Err(Error::InvalidArgument(alloc::format!(
            "key indices ({i}, {j}) out of range for d = {d}"
        )));
    }
    let x = spec.twisted_block(i, j);
    if x.max_abs() <= ZERO_OPERATOR_THRESHOLD {
        return Err(Error::ZeroCrossOperator { i, j });
    }
    Ok(x)
}

/// `(⊗_{l≠k} <v_l| ⊗ I_k) y`: contracts every factor but `k` against the
/// conjugated local vectors.
fn contract_except(y: &[C64], dims: &[usize], vs: &[Vec<C64>], k: usize) -> Vec<C64> {
    let mut w = vec![ZERO; dims[k]];
    let mut idx = vec![0; dims.len()];
    for (flat, &z) in y.iter().enumerate() {
        if z == ZERO {
            continue;
        }
        digits(flat, dims, &mut idx);
        let mut coeff = z;
        for (l, v) in vs.iter().enumerate() {
            if l != k {
                coeff *= v[idx[l]].conj();
            }
        }
        w[idx[k]] += coeff;
    }
    w
}

fn objective(x: &ComplexMatrix, bra: &[Vec<C64>], ket: &[Vec<C64>]) -> C64 {
    x.sandwich(&kron_all(bra), &kron_all(ket))
}

/// One factor-by-factor sweep over the bra side then the ket side.
fn sweep_per_factor(x: &ComplexMatrix, dims: &[usize], bra: &mut [Vec<C64>], ket: &mut [Vec<C64>]) {
    let y = x.apply(&kron_all(ket));
    for k in 0..dims.len() {
        if let Some(f) = normalized(&contract_except(&y, dims, bra, k)) {
            bra[k] = f;
        }
    }
    let y = x.apply_adjoint(&kron_all(bra));
    for k in 0..dims.len() {
        if let Some(g) = normalized(&contract_except(&y, dims, ket, k)) {
            ket[k] = g;
        }
    }
}

/// Joint two-party sweep: the bra pair is the top Schmidt pair of `X|g>`,
/// then the ket pair is the top Schmidt pair of `X^dag|f>`.
fn sweep_bipartite(
    x: &ComplexMatrix,
    dims: &[usize],
    bra: &mut [Vec<C64>],
    ket: &mut [Vec<C64>],
) -> Result<()> {
    let y = x.apply(&kron_all(ket));
    let (sigma, left, right) = schmidt_max(&y, dims[0], dims[1])?;
    if sigma > 0.0 {
        bra[0] = left;
        bra[1] = right;
    }
    let y = x.apply_adjoint(&kron_all(bra));
    let (sigma, left, right) = schmidt_max(&y, dims[0], dims[1])?;
    if sigma > 0.0 {
        ket[0] = left;
        ket[1] = right;
    }
    Ok(())
}

/// Alternating maximisation from a given start. `joint` enables the
/// two-party Schmidt update; otherwise every factor is updated separately.
pub fn optimize_from(
    x: &ComplexMatrix,
    dims: &[usize],
    bra: Vec<Vec<C64>>,
    ket: Vec<Vec<C64>>,
    max_iters: usize,
    conv_tol: f64,
    joint: bool,
) -> Result<RestartRun> {
    let (mut bra, mut ket) = (bra, ket);
    let mut current = objective(x, &bra, &ket).norm();
    let mut history = vec![current];
    let mut converged = false;
    for _ in 0..max_iters {
        if joint && dims.len() == 2 {
            sweep_bipartite(x, dims, &mut bra, &mut ket)?;
        } else {
            sweep_per_factor(x, dims, &mut bra, &mut ket);
        }
        let next = objective(x, &bra, &ket).norm();
        history.push(next);
        let gain = next - current;
        current = next;
        if gain < conv_tol {
            converged = true;
            break;
        }
    }
    Ok(RestartRun {
        value: objective(x, &bra, &ket),
        bra,
        ket,
        history,
        converged,
    })
}

fn check_dims(x: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || !x.is_square() || x.rows() != total {
        return Err(Error::DimensionMismatch {
            context: "overlap local dimensions",
            expected: x.rows(),
            found: total,
        });
    }
    Ok(())
}

/// Standard-basis product tuple at the largest entry of `X` (first in
/// row-major order on ties).
fn largest_entry_start(x: &ComplexMatrix, dims: &[usize]) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let n = x.cols();
    let (pos, _) = x.data().iter().enumerate().fold((0, -1.0), |best, (p, z)| {
        if z.norm() > best.1 {
            (p, z.norm())
        } else {
            best
        }
    });
    let mut row = vec![0; dims.len()];
    let mut col = vec![0; dims.len()];
    digits(pos / n, dims, &mut row);
    digits(pos % n, dims, &mut col);
    let side = |idx: &[usize]| dims.iter().zip(idx).map(|(&d, &k)| basis(d, k)).collect();
    (side(&row), side(&col))
}

fn random_start(dims: &[usize], seed: u64) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let mut rng = seeded_rng(seed);
    let bra = dims
        .iter()
        .map(|&d| random_unit_vector(d, &mut rng))
        .collect();
    let ket = dims
        .iter()
        .map(|&d| random_unit_vector(d, &mut rng))
        .collect();
    (bra, ket)
}

/// Rotates the global phase of `v` so that its first largest-modulus
/// component is real and positive; the overlap phase then lives in `Θ`.
fn fix_gauge(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied() {
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            v.iter_mut().for_each(|z| *z *= phase);
        }
    }
}

/// Multistart alternating maximisation of the product overlap of `x`.
///
/// Start 0 is the standard-basis tuple at the largest entry of `x`, so the
/// result never falls below `max |X_{st}|`; starts `1..=restarts` are
/// Haar-random product tuples drawn from per-start seeds.
pub fn eta_optimize(
    x: &ComplexMatrix,
    local_dims: &[usize],
    opts: &OptimizerOptions,
) -> Result<ProductOverlap> {
    check_dims(x, local_dims)?;
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be >= 1".into()));
    }
    let mut best: Option<(usize, RestartRun)> = None;
    let mut any_converged = false;
    for r in 0..=opts.restarts {
        let (bra, ket) = if r == 0 {
            largest_entry_start(x, local_dims)
        } else {
            random_start(local_dims, derive_seed(opts.seed, r as u64))
        };
        let run = optimize_from(x, local_dims, bra, ket, opts.max_iters, opts.conv_tol, true)?;
        any_converged |= run.converged;
        let better = match &best {
            None => true,
            // Gains within rounding count as ties and keep the earlier start.
            Some((_, b)) => run.value.norm() > b.value.norm() * (1.0 + TIE_TOLERANCE),
        };
        if better {
            best = Some((r, run));
        }
    }
    let (best_restart, mut run) = best.expect("at least one start");
    for v in run.bra.iter_mut().chain(run.ket.iter_mut()) {
        fix_gauge(v);
    }
    run.value = objective(x, &run.bra, &run.ket);
    let mut theta = run.value.arg();
    if theta <= -core::f64::consts::PI {
        theta += 2.0 * core::f64::consts::PI;
    }
    Ok(ProductOverlap {
        eta: run.value.norm(),
        theta,
        sweeps: run.history.len() - 1,
        converged: run.converged,
        non_converged: !any_converged,
        bra: run.bra,
        ket: run.ket,
        best_restart,
        history: run.history,
    })
}

/// `a1 = <bra| U_i ϱ U_i^dag |bra>`, `a2 = <ket| U_j ϱ U_j^dag |ket>`.
pub fn a_values(
    spec: &PrivateStateSpec,
    i: usize,
    j: usize,
    bra: &[Vec<C64>],
    ket: &[Vec<C64>],
) -> Result<(f64, f64)> {
    let value = |k: usize, v: &[Vec<C64>], index: usize| -> Result<f64> {
        let a = spec
            .twisted_block(k, k)
            .sandwich(&kron_all(v), &kron_all(v))
            .re;
        if a < -1e-12 {
            return Err(Error::NegativeDiagonal { index, value: a });
        }
        Ok(a.max(0.0))
    };
    if bra.len() != spec.parties() || ket.len() != spec.parties() {
        return Err(Error::DimensionMismatch {
            context: "product vector count",
            expected: spec.parties(),
            found: bra.len().min(ket.len()),
        });
    }
    Ok((value(i, bra, 1)?, value(j, ket, 2)?))
}

/// Runs the optimiser on `X_ij` over the per-party shield factors and
/// evaluates `a1`, `a2`.
pub fn overlap_for_pair(
    spec: &PrivateStateSpec,
    i: usize,
    j: usize,
    opts: &OptimizerOptions,
) -> Result<OverlapResult> {
    if i == j {
        return Err(Error::InvalidArgument("key pair needs i != j".into()));
    }
    let x = cross_operator(spec, i, j)?;
    let found = eta_optimize(&x, spec.shield_dims(), opts)?;
    let (a1, a2) = a_values(spec, i, j, &found.bra, &found.ket)?;
    Ok(OverlapResult {
        pair: (i, j),
        key_dim: spec.d(),
        eta: found.eta,
        bra_vectors: found.bra,
        ket_vectors: found.ket,
        a1,
        a2,
        theta: found.theta,
        converged: found.converged,
        non_converged: found.non_converged,
        degenerate: found.eta < opts.eta_floor,
    })
}

/// Evaluates `<bra|X|ket>` for a user-supplied product tuple, e.g. to run
/// the filters with non-optimal vectors.
pub fn overlap_for_tuple(
    spec: &PrivateStateSpec,
    i: usize,
    j: usize,
    bra: Vec<Vec<C64>>,
    ket: Vec<Vec<C64>>,
    eta_floor: f64,
) -> Result<OverlapResult> {
    let x = cross_operator(spec, i, j)?;
    for (v, &d) in bra
        .iter()
        .chain(&ket)
        .zip(spec.shield_dims().iter().cycle())
    {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                context: "product vector",
                expected: d,
                found: v.len(),
            });
        }
    }
    let bra: Vec<Vec<C64>> = bra
        .iter()
        .map(|v| normalized(v).ok_or_else(zero_vector))
        .collect::<Result<_>>()?;
    let ket: Vec<Vec<C64>> = ket
        .iter()
        .map(|v| normalized(v).ok_or_else(zero_vector))
        .collect::<Result<_>>()?;
    let (a1, a2) = a_values(spec, i, j, &bra, &ket)?;
    let value = objective(&x, &bra, &ket);
    Ok(OverlapResult {
        pair: (i, j),
        key_dim: spec.d(),
        eta: value.norm(),
        theta: value.arg(),
        bra_vectors: bra,
        ket_vectors: ket,
        a1,
        a2,
        converged: false,
        non_converged: false,
        degenerate: value.norm() < eta_floor,
    })
}

fn zero_vector() -> Error {
    Error::InvalidArgument("product vector has zero norm".into())
}

/// Independent lower bound on `η`: the best of `samples` Haar-random
/// product tuples, each refined by factor-by-factor sweeps only.
pub fn brute_force_eta(
    x: &ComplexMatrix,
    local_dims: &[usize],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    check_dims(x, local_dims)?;
    if x.rows() > BRUTE_FORCE_MAX_DIM {
        return Err(Error::DimensionCap {
            dim: x.rows(),
            cap: BRUTE_FORCE_MAX_DIM,
        });
    }
    let mut best = 0.0f64;
    for s in 0..samples {
        let (mut bra, mut ket) = random_start(
            local_dims,
            derive_seed(seed ^ 0xB7E1_5162_8AED_2A6B, s as u64),
        );
        for _ in 0..BRUTE_FORCE_SWEEPS {
            sweep_per_factor(x, local_dims, &mut bra, &mut ket);
        }
        best = best.max(objective(x, &bra, &ket).norm());
    }
    Ok(best)
}

/// `<bra|X|ket>` for explicit product tuples.
pub fn product_overlap(x: &ComplexMatrix, bra: &[Vec<C64>], ket: &[Vec<C64>]) -> C64 {
    objective(x, bra, ket)
}
