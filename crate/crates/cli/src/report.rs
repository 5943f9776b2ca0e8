//! Serialisable report bodies. Each report embeds the resolved run config.

use privdist_core::filtering::{FilterOutcome, FilterSet, Variant};
use privdist_core::{EfCertificate, OverlapResult, PairBound, SweepRow};
use serde::Serialize;

use crate::config::RunConfig;
use crate::formats::{complex_to_json, vector_to_json, ComplexJson, MatrixJson, SpecJson};

#[derive(Debug, Serialize)]
pub struct Report<'a, T> {
    pub config: &'a RunConfig,
    pub result: T,
}

/// Output of `gen`/`build`: the file stays a valid matrix or spec input,
/// with the config stored alongside its fields.
#[derive(Debug, Serialize)]
pub struct Artifact<'a, T> {
    #[serde(flatten)]
    pub body: T,
    pub config: &'a RunConfig,
}

#[derive(Debug, Serialize)]
pub struct GeneratedMatrix {
    #[serde(flatten)]
    pub matrix: MatrixJson,
}

#[derive(Debug, Serialize)]
pub struct GeneratedSpec {
    #[serde(flatten)]
    pub spec: SpecJson,
}

#[derive(Debug, Serialize)]
pub struct EtaJson {
    pub pair: (usize, usize),
    pub eta: f64,
    pub theta: f64,
    pub a1: f64,
    pub a2: f64,
    /// `√(a1 a2)`, the Cauchy–Schwarz ceiling on `eta`.
    pub cauchy_schwarz_bound: f64,
    pub bra_vectors: Vec<Vec<ComplexJson>>,
    pub ket_vectors: Vec<Vec<ComplexJson>>,
    pub converged: bool,
    pub non_converged: bool,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force_eta: Option<f64>,
}

impl EtaJson {
    pub fn new(o: &OverlapResult, brute_force_eta: Option<f64>) -> Self {
        Self {
            pair: o.pair,
            eta: o.eta,
            theta: o.theta,
            a1: o.a1,
            a2: o.a2,
            cauchy_schwarz_bound: (o.a1 * o.a2).sqrt(),
            bra_vectors: o.bra_vectors.iter().map(|v| vector_to_json(v)).collect(),
            ket_vectors: o.ket_vectors.iter().map(|v| vector_to_json(v)).collect(),
            converged: o.converged,
            non_converged: o.non_converged,
            degenerate: o.degenerate,
            brute_force_eta,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FiltersJson {
    pub variant: &'static str,
    pub scaled_party: usize,
    pub party_ops: Vec<MatrixJson>,
}

#[derive(Debug, Serialize)]
pub struct OutcomeJson {
    pub success_prob: f64,
    pub p: f64,
    pub residual: f64,
    pub residual_within_tolerance: bool,
    pub coherence: ComplexJson,
    pub post_state: MatrixJson,
}

#[derive(Debug, Serialize)]
pub struct DistillJson {
    pub overlap: EtaJson,
    pub filters: FiltersJson,
    pub predicted_success_prob: f64,
    pub predicted_p: f64,
    pub outcome: OutcomeJson,
}

impl DistillJson {
    pub fn new(
        o: &OverlapResult,
        f: &FilterSet,
        out: &FilterOutcome,
        predicted: (f64, f64),
        residual_tol: f64,
    ) -> Self {
        Self {
            overlap: EtaJson::new(o, None),
            filters: FiltersJson {
                variant: match f.variant {
                    Variant::V => "V",
                    Variant::W => "W",
                },
                scaled_party: f.scaled_party,
                party_ops: f.party_ops.iter().map(MatrixJson::from_matrix).collect(),
            },
            predicted_success_prob: predicted.0,
            predicted_p: predicted.1,
            outcome: OutcomeJson {
                success_prob: out.success_prob,
                p: out.p,
                residual: out.residual,
                residual_within_tolerance: out.residual <= residual_tol,
                coherence: complex_to_json(out.coherence),
                post_state: MatrixJson::from_state(&out.post_state),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PairRatesJson {
    pub eta: f64,
    pub a1: f64,
    pub a2: f64,
    pub p: f64,
    pub hashing_rate: f64,
    pub paper_rate: f64,
    pub verified_rate: f64,
    pub success_prob: f64,
    pub residual: f64,
    pub degenerate: bool,
}

#[derive(Debug, Serialize)]
pub struct PairBoundJson {
    pub pair: (usize, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<PairRatesJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PairBoundJson {
    pub fn new(b: &PairBound) -> Self {
        match &b.result {
            Ok(r) => Self {
                pair: b.pair,
                rates: Some(PairRatesJson {
                    eta: r.overlap.eta,
                    a1: r.overlap.a1,
                    a2: r.overlap.a2,
                    p: r.p,
                    hashing_rate: r.hashing_rate,
                    paper_rate: r.paper_rate,
                    verified_rate: r.verified_rate,
                    success_prob: r.simulation.success_prob,
                    residual: r.simulation.residual,
                    degenerate: r.overlap.degenerate,
                }),
                error: None,
            },
            Err(e) => Self {
                pair: b.pair,
                rates: None,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundJson {
    pub key_dim: usize,
    pub parties: usize,
    pub key_rate: f64,
    pub per_pair: Vec<PairBoundJson>,
    pub best_pair: Option<(usize, usize)>,
    pub best_paper_rate: f64,
    pub best_verified_rate: f64,
}

#[derive(Debug, Serialize)]
pub struct CertificateJson {
    pub tensor_power: usize,
    pub d: usize,
    pub log_d: f64,
    pub samples: usize,
    pub min_entropy_found: f64,
    pub mean_entropy: f64,
    pub margin: f64,
    pub max_identity_error: f64,
    pub passed: bool,
    pub witness: Option<Vec<ComplexJson>>,
}

impl CertificateJson {
    pub fn new(c: &EfCertificate, tensor_power: usize) -> Self {
        Self {
            tensor_power,
            d: c.d,
            log_d: c.log_d,
            samples: c.samples,
            min_entropy_found: c.min_entropy_found,
            mean_entropy: c.mean_entropy,
            margin: c.margin,
            max_identity_error: c.max_identity_error,
            passed: c.passed,
            witness: c.witness.as_deref().map(vector_to_json),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepRowJson {
    pub knob: f64,
    pub pair: Option<(usize, usize)>,
    pub eta: f64,
    pub p: f64,
    pub paper_rate: f64,
    pub verified_rate: f64,
}

impl From<&SweepRow> for SweepRowJson {
    fn from(r: &SweepRow) -> Self {
        Self {
            knob: r.knob,
            pair: r.pair,
            eta: r.eta,
            p: r.p,
            paper_rate: r.paper_rate,
            verified_rate: r.verified_rate,
        }
    }
}
