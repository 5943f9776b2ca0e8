//! Local filters `V`/`W` (first party) and `P_k` (other parties) for a key
//! pair `(i, j)`, and exact simulation of the filtering branch.
//!
//! Every filter maps `key_k ⊗ shield_k` onto a qubit: `|i>` becomes `|0>`
//! and `|j>` becomes `|1>`. The heralded output is therefore a state of `N`
//! qubits, ideally `p |GHZ+><GHZ+| + (1-p) |GHZ-><GHZ-|`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::layout::{digits, key_label, Factor, Role, SubsystemLayout};
use crate::linalg::{hermitian_eig, trace_distance_matrices};
use crate::matrix::{ComplexMatrix, C64, ONE};
use crate::overlap::OverlapResult;
use crate::private_state::PrivateState;
use crate::state::{bell_vector, validate_state_with, DensityMatrix, Tolerances};

/// Successful branches with probability at or below this are rejected.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `a2 >= a1`: the `|j>` branch of the first party is scaled down.
    V,
    /// `a1 > a2`: the `|i>` branch of the first party is scaled down.
    W,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSet {
    /// `party_ops[k]` is a `2 × (d · shield_dim_k)` operator.
    pub party_ops: Vec<ComplexMatrix>,
    pub branch: (usize, usize),
    pub scaled_party: usize,
    pub variant: Variant,
    pub key_dim: usize,
}

impl FilterSet {
    /// Operator norm of each party's filter.
    pub fn operator_norms(&self) -> Result<Vec<f64>> {
        self.party_ops
            .iter()
            .map(|op| {
                let gram = op.matmul(&op.adjoint());
                Ok(hermitian_eig(&gram)?.eigenvalues[0].max(0.0).sqrt())
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    /// Normalised output on `N` qubits.
    pub post_state: DensityMatrix,
    pub success_prob: f64,
    /// Weight of `(|0…0> + |1…1>)/√2`.
    pub p: f64,
    /// Trace distance to the ideal two-projector mixture with weight `p`.
    pub residual: f64,
    /// `<0…0|post_state|1…1>`.
    pub coherence: C64,
}

fn party_filter(
    d: usize,
    (i, j): (usize, usize),
    bra: &[C64],
    ket: &[C64],
    scale_i: C64,
    scale_j: C64,
) -> ComplexMatrix {
    let s = bra.len();
    let mut op = ComplexMatrix::zeros(2, d * s);
    for t in 0..s {
        op[(0, i * s + t)] = scale_i * bra[t].conj();
        op[(1, j * s + t)] = scale_j * ket[t].conj();
    }
    op
}

/// Builds the filter set for the pair recorded in `overlap`.
pub fn build_filters(overlap: &OverlapResult) -> Result<FilterSet> {
    let (a1, a2) = (overlap.a1, overlap.a2);
    if a1 <= 0.0 {
        return Err(Error::NegativeDiagonal {
            index: 1,
            value: a1,
        });
    }
    if a2 <= 0.0 {
        return Err(Error::NegativeDiagonal {
            index: 2,
            value: a2,
        });
    }
    let d = overlap.key_dim;
    let (i, j) = overlap.pair;
    if i >= d || j >= d || i == j {
        return Err(Error::InvalidArgument(alloc::format!(
            "invalid key pair ({i}, {j})"
        )));
    }
    let phase = C64::from_polar(1.0, overlap.theta);
    let (variant, scale_i, scale_j) = if a2 >= a1 {
        (Variant::V, ONE, phase * (a1 / a2).sqrt())
    } else {
        (Variant::W, phase.conj() * (a2 / a1).sqrt(), ONE)
    };
    let party_ops = overlap
        .bra_vectors
        .iter()
        .zip(&overlap.ket_vectors)
        .enumerate()
        .map(|(k, (bra, ket))| {
            if k == 0 {
                party_filter(d, (i, j), bra, ket, scale_i, scale_j)
            } else {
                party_filter(d, (i, j), bra, ket, ONE, ONE)
            }
        })
        .collect();
    Ok(FilterSet {
        party_ops,
        branch: (i, j),
        scaled_party: 0,
        variant,
        key_dim: d,
    })
}

/// Builds the filters with an explicit variant, regardless of which of
/// `a1`, `a2` is larger. The resulting operators may have norm above one.
pub fn build_filters_with_variant(overlap: &OverlapResult, variant: Variant) -> Result<FilterSet> {
    let mut set = build_filters(overlap)?;
    if set.variant != variant {
        let (a1, a2) = (overlap.a1, overlap.a2);
        let phase = C64::from_polar(1.0, overlap.theta);
        let (si, sj) = match variant {
            Variant::V => (ONE, phase * (a1 / a2).sqrt()),
            Variant::W => (phase.conj() * (a2 / a1).sqrt(), ONE),
        };
        set.party_ops[0] = party_filter(
            overlap.key_dim,
            overlap.pair,
            &overlap.bra_vectors[0],
            &overlap.ket_vectors[0],
            si,
            sj,
        );
        set.variant = variant;
    }
    Ok(set)
}

/// `⊗_k F_k`, reordered to act on the canonical `keys…, shields…` layout.
fn joint_filter(state: &PrivateState, filters: &FilterSet) -> Result<ComplexMatrix> {
    let spec = state.spec();
    let n = spec.parties();
    let d = spec.d();
    if filters.party_ops.len() != n || filters.key_dim != d {
        return Err(Error::DimensionMismatch {
            context: "filter set parties",
            expected: n,
            found: filters.party_ops.len(),
        });
    }
    for (op, &s) in filters.party_ops.iter().zip(spec.shield_dims()) {
        if op.rows() != 2 || op.cols() != d * s {
            return Err(Error::DimensionMismatch {
                context: "party filter width",
                expected: d * s,
                found: op.cols(),
            });
        }
    }
    let layout_dims = spec.layout().dims();
    let total = spec.total_dim();
    let outputs = 1usize << n;
    let mut idx = vec![0; 2 * n];
    let mut full = ComplexMatrix::zeros(outputs, total);
    for col in 0..total {
        digits(col, &layout_dims, &mut idx);
        for out in 0..outputs {
            let mut z = ONE;
            for (k, op) in filters.party_ops.iter().enumerate() {
                let bit = (out >> (n - 1 - k)) & 1;
                let s = spec.shield_dims()[k];
                z *= op[(bit, idx[k] * s + idx[n + k])];
                if z == C64::new(0.0, 0.0) {
                    break;
                }
            }
            full[(out, col)] = z;
        }
    }
    Ok(full)
}

pub fn apply_filter(state: &PrivateState, filters: &FilterSet) -> Result<FilterOutcome> {
    apply_filter_with(state, filters, &Tolerances::default())
}

/// Heralded output `F Γ F^dag / Tr(F Γ F^dag)` and its Bell/GHZ analysis.
pub fn apply_filter_with(
    state: &PrivateState,
    filters: &FilterSet,
    tol: &Tolerances,
) -> Result<FilterOutcome> {
    let f = joint_filter(state, filters)?;
    let unnormalised = f.matmul(state.rho().matrix()).matmul(&f.adjoint());
    let success_prob = unnormalised.trace().re;
    if success_prob <= MIN_SUCCESS_PROBABILITY {
        return Err(Error::DegenerateFilter {
            probability: success_prob,
        });
    }
    let n = state.spec().parties();
    let layout = SubsystemLayout::new(
        (0..n)
            .map(|k| Factor::new(key_label(k), 2, k, Role::Key))
            .collect(),
    )?;
    let post = unnormalised.scale_real(1.0 / success_prob).hermitian_part();
    let post_state = validate_state_with(post, layout, tol)?;

    let plus = bell_vector(1, 0, 1, 2, n)?;
    let minus = bell_vector(-1, 0, 1, 2, n)?;
    let p = post_state.matrix().sandwich(&plus, &plus).re;
    let ideal = ComplexMatrix::projector(&plus)
        .scale_real(p)
        .add(&ComplexMatrix::projector(&minus).scale_real(1.0 - p));
    let residual = trace_distance_matrices(post_state.matrix(), &ideal)?;
    let last = (1usize << n) - 1;
    Ok(FilterOutcome {
        coherence: post_state.matrix()[(0, last)],
        post_state,
        success_prob,
        p,
        residual,
    })
}

/// Success probability and Bell weight the filters achieve for an overlap:
/// `(2/d) · min(a1, a2)` and `1/2 + η / (2 √(a1 a2))`.
pub fn predict_outcome(overlap: &OverlapResult) -> (f64, f64) {
    let (a1, a2) = (overlap.a1, overlap.a2);
    let success = 2.0 * a1.min(a2) / overlap.key_dim as f64;
    let denom = (a1 * a2).sqrt();
    let p = if denom > 0.0 {
        0.5 + overlap.eta / (2.0 * denom)
    } else {
        0.5
    };
    (success, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overlap(eta: f64, a1: f64, a2: f64) -> OverlapResult {
        OverlapResult {
            pair: (0, 1),
            key_dim: 2,
            eta,
            bra_vectors: vec![vec![ONE], vec![ONE]],
            ket_vectors: vec![vec![ONE], vec![ONE]],
            a1,
            a2,
            theta: 0.0,
            converged: true,
            non_converged: false,
            degenerate: false,
        }
    }

    #[test]
    fn predictions() {
        let (s, p) = predict_outcome(&overlap(0.25, 0.25, 0.25));
        assert!((s - 0.25).abs() < 1e-15 && (p - 1.0).abs() < 1e-15);
        let (s, p) = predict_outcome(&overlap(0.0, 0.3, 0.3));
        assert!((s - 0.3).abs() < 1e-15 && (p - 0.5).abs() < 1e-15);
        let (s, p) = predict_outcome(&overlap(0.5, 0.5, 0.5));
        assert!((s - 0.5).abs() < 1e-15 && (p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_shield_filter_is_identity_on_key() {
        let f = build_filters(&overlap(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(f.variant, Variant::V);
        assert_eq!(f.party_ops[0], ComplexMatrix::identity(2));
        assert_eq!(f.party_ops[1], ComplexMatrix::identity(2));
        for norm in f.operator_norms().unwrap() {
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn variant_follows_larger_weight() {
        let mut o = overlap(0.1, 0.4, 0.2);
        o.theta = 0.7;
        let f = build_filters(&o).unwrap();
        assert_eq!(f.variant, Variant::W);
        let expected = C64::from_polar((0.5f64).sqrt(), -0.7);
        assert!((f.party_ops[0][(0, 0)] - expected).norm() < 1e-15);
        assert_eq!(f.party_ops[0][(1, 1)], ONE);
        assert!(build_filters(&overlap(0.1, 0.0, 0.2)).is_err());
    }
}
