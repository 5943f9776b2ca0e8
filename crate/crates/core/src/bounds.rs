//! Distillable-entanglement lower bounds from the filtering protocol and
//! one-sided entanglement-of-formation certificates for bipartite p-dits.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::filtering::{apply_filter_with, build_filters, predict_outcome, FilterOutcome};
use crate::layout::{key_label, shield_label, SubsystemLayout};
use crate::linalg::{matrix_entropy, pure_reduced_state};
use crate::matrix::{normalized, C64, ZERO};
use crate::overlap::{overlap_for_pair, OptimizerOptions, OverlapResult};
use crate::private_state::{build_private_state, eigenvectors_of_pdit, PrivateStateSpec};
use crate::state::{complex_gaussian, derive_seed, random_density, seeded_rng, Tolerances};

/// Entropy slack allowed by the formation certificate, in bits.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;

const PROBABILITY_SLACK: f64 = 1e-12;

/// `H(p) = -p log2 p - (1-p) log2 (1-p)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::InvalidArgument(alloc::format!(
            "probability {p} outside [0, 1]"
        )));
    }
    let p = p.clamp(0.0, 1.0);
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

/// Hashing yield `1 - H(p)` of a two-projector Bell/GHZ mixture with
/// weight `p >= 1/2` on the `+` state.
pub fn hashing_rate(p: f64) -> Result<f64> {
    if p < 0.5 - PROBABILITY_SLACK {
        return Err(Error::InvalidArgument(alloc::format!(
            "Bell weight {p} < 1/2; relabel the +/- states first"
        )));
    }
    Ok((1.0 - binary_entropy(p.max(0.5))?).clamp(0.0, 1.0))
}

/// `log2 d`, the key carried by a p-dit.
pub fn key_rate(spec: &PrivateStateSpec) -> f64 {
    (spec.d() as f64).log2()
}

/// Folds a Bell weight into `[1/2, 1]` (swapping `+` and `-` is a local phase
/// flip).
fn relabel(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    if p < 0.5 {
        1.0 - p
    } else {
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundOptions {
    pub optimizer: OptimizerOptions,
    pub tolerances: Tolerances,
}

/// Rates for one key pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRates {
    pub overlap: OverlapResult,
    /// `1/2 + η / (2 √(a1 a2))`, folded into `[1/2, 1]`.
    pub p: f64,
    pub predicted_success: f64,
    pub hashing_rate: f64,
    /// `max(a1, a2) · (1 - H(p))`.
    pub paper_rate: f64,
    /// Simulated success probability times `1 - H(p)`.
    pub verified_rate: f64,
    pub simulation: FilterOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairBound {
    pub pair: (usize, usize),
    pub result: core::result::Result<PairRates, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub key_dim: usize,
    pub parties: usize,
    pub key_rate: f64,
    pub per_pair: Vec<PairBound>,
    /// Pair with the largest verified rate.
    pub best_pair: Option<(usize, usize)>,
    pub best_paper_rate: f64,
    pub best_verified_rate: f64,
}

impl BoundReport {
    pub fn rates(&self) -> impl Iterator<Item = &PairRates> {
        self.per_pair.iter().filter_map(|b| b.result.as_ref().ok())
    }

    pub fn best(&self) -> Option<&PairRates> {
        let best = self.best_pair?;
        self.rates().find(|r| r.overlap.pair == best)
    }
}

fn pair_rates(
    spec: &PrivateStateSpec,
    state: &crate::private_state::PrivateState,
    pair: (usize, usize),
    opts: &BoundOptions,
) -> Result<PairRates> {
    let overlap = overlap_for_pair(spec, pair.0, pair.1, &opts.optimizer)?;
    let (predicted_success, p) = predict_outcome(&overlap);
    let p = relabel(p);
    let filters = build_filters(&overlap)?;
    let simulation = apply_filter_with(state, &filters, &opts.tolerances)?;
    let hashing = hashing_rate(p)?;
    Ok(PairRates {
        p,
        predicted_success,
        hashing_rate: hashing,
        paper_rate: overlap.a1.max(overlap.a2) * hashing,
        verified_rate: simulation.success_prob * hashing,
        overlap,
        simulation,
    })
}

/// Runs overlap optimisation, filtering and hashing for every pair `i < j`.
pub fn ed_lower_bound(spec: &PrivateStateSpec, opts: &BoundOptions) -> BoundReport {
    let state = build_private_state(spec);
    let d = spec.d();
    let per_pair: Vec<PairBound> = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .map(|pair| PairBound {
            pair,
            result: pair_rates(spec, &state, pair, opts),
        })
        .collect();
    let mut best_pair = None;
    let mut best_verified = 0.0f64;
    let mut best_paper = 0.0f64;
    for r in per_pair.iter().filter_map(|b| b.result.as_ref().ok()) {
        best_paper = best_paper.max(r.paper_rate);
        if best_pair.is_none() || r.verified_rate > best_verified {
            best_verified = r.verified_rate;
            best_pair = Some(r.overlap.pair);
        }
    }
    BoundReport {
        key_dim: d,
        parties: spec.parties(),
        key_rate: key_rate(spec),
        per_pair,
        best_pair,
        best_paper_rate: best_paper,
        best_verified_rate: best_verified,
    }
}

/// Range-sampling certificate for `E_F >= log2 d` on a bipartite p-dit.
#[derive(Debug, Clone, PartialEq)]
pub struct EfCertificate {
    pub d: usize,
    pub log_d: f64,
    pub samples: usize,
    pub min_entropy_found: f64,
    pub mean_entropy: f64,
    /// `min_entropy_found - log_d`.
    pub margin: f64,
    /// Largest `|S(ρ_AA') - (log2 d + (1/d) Σ_j S(Ξ_j))|` over samples.
    pub max_identity_error: f64,
    pub passed: bool,
    /// First range vector violating the bound, when the certificate fails.
    pub witness: Option<Vec<C64>>,
}

/// Entanglement entropy across `key0 shield0 | key1 shield1` of a range
/// vector, and the same quantity recomputed from its per-key shield branches.
fn entropy_and_decomposition(
    spec: &PrivateStateSpec,
    layout: &SubsystemLayout,
    psi: &[C64],
    psd: f64,
) -> Result<(f64, f64)> {
    let alice = [key_label(0), shield_label(0)];
    let keep: Vec<&str> = alice.iter().map(|s| s.as_str()).collect();
    let entropy = matrix_entropy(&pure_reduced_state(psi, layout, &keep)?, psd)?;

    let d = spec.d();
    let s = spec.shield_dim();
    let shields = SubsystemLayout::shields(spec.shield_dims());
    let label = shield_label(0);
    let sqrt_d = (d as f64).sqrt();
    let mut branch_entropy = 0.0;
    for j in 0..d {
        let offset = spec.repeated_key(j) * s;
        let branch: Vec<C64> = psi[offset..offset + s].iter().map(|z| z * sqrt_d).collect();
        if let Some(branch) = normalized(&branch) {
            let xi = pure_reduced_state(&branch, &shields, &[label.as_str()])?;
            branch_entropy += matrix_entropy(&xi, psd)?;
        }
    }
    Ok((entropy, (d as f64).log2() + branch_entropy / d as f64))
}

/// Samples `samples` random unit vectors from the range of the p-dit and
/// checks that each has entanglement entropy at least `log2 d`.
pub fn ef_certificate(spec: &PrivateStateSpec, samples: usize, seed: u64) -> Result<EfCertificate> {
    if spec.parties() != 2 {
        return Err(Error::NotBipartite {
            parties: spec.parties(),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "certificate needs at least one sample".to_string(),
        ));
    }
    let pairs = eigenvectors_of_pdit(spec, false)?;
    let layout = spec.layout();
    let log_d = key_rate(spec);
    let psd = Tolerances::default().psd;
    let mut rng = seeded_rng(derive_seed(seed, 0xEF));
    let mut min_entropy = f64::INFINITY;
    let mut total = 0.0;
    let mut max_identity_error = 0.0f64;
    let mut witness = None;
    for _ in 0..samples {
        let coeffs: Vec<C64> = pairs.iter().map(|_| complex_gaussian(&mut rng)).collect();
        let coeffs = normalized(&coeffs).unwrap_or_else(|| crate::matrix::basis(pairs.len(), 0));
        let mut psi = vec![ZERO; spec.total_dim()];
        for (c, (_, v)) in coeffs.iter().zip(&pairs) {
            for (slot, z) in psi.iter_mut().zip(v) {
                *slot += c * z;
            }
        }
        let (entropy, decomposed) = entropy_and_decomposition(spec, &layout, &psi, psd)?;
        max_identity_error = max_identity_error.max((entropy - decomposed).abs());
        if entropy < log_d - CERTIFICATE_TOLERANCE && witness.is_none() {
            witness = Some(psi);
        }
        min_entropy = min_entropy.min(entropy);
        total += entropy;
    }
    Ok(EfCertificate {
        d: spec.d(),
        log_d,
        samples,
        min_entropy_found: min_entropy,
        mean_entropy: total / samples as f64,
        margin: min_entropy - log_d,
        max_identity_error,
        passed: witness.is_none(),
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKnob {
    /// Mix the shield with white noise: `(1-w) ϱ + w I/D`.
    Depolarize,
    /// Replace the shield by a seeded Wishart state of the given rank.
    ShieldRank,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub knob: f64,
    pub pair: Option<(usize, usize)>,
    pub eta: f64,
    pub p: f64,
    pub paper_rate: f64,
    pub verified_rate: f64,
}

/// Recomputes the bound report while varying one scalar property of the
/// shield; each row describes the best pair.
pub fn sweep(
    spec: &PrivateStateSpec,
    knob: SweepKnob,
    values: &[f64],
    opts: &BoundOptions,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&value| {
            let shield = match knob {
                SweepKnob::Depolarize => spec.shield().depolarize(value)?,
                SweepKnob::ShieldRank => {
                    let s = spec.shield_dim();
                    if value.fract() != 0.0 || value < 1.0 || value > s as f64 {
                        return Err(Error::InvalidArgument(alloc::format!(
                            "shield rank {value} outside 1..={s}"
                        )));
                    }
                    let rank = value as usize;
                    random_density(s, rank, derive_seed(seed, rank as u64))?
                }
            };
            let report = ed_lower_bound(&spec.with_shield(shield)?, opts);
            let best = report.best();
            Ok(SweepRow {
                knob: value,
                pair: report.best_pair,
                eta: best.map_or(0.0, |b| b.overlap.eta),
                p: best.map_or(0.5, |b| b.p),
                paper_rate: report.best_paper_rate,
                verified_rate: report.best_verified_rate,
            })
        })
        .collect()
}
