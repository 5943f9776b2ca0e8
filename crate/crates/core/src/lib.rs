//! Private quantum states, the local-filtering distillation protocol that
//! extracts Bell/GHZ pairs from them, and the resulting distillable
//! entanglement and entanglement-of-formation bounds.
//!
//! Everything here is a pure function of its inputs and builds with
//! `no_std` + `alloc`; randomness is always driven by an explicit seed.
//! File formats and the command-line driver live in the `privdist` crate.
#![no_std]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod filtering;
pub mod layout;
pub mod linalg;
pub mod matrix;
pub mod overlap;
pub mod private_state;
pub mod state;

pub use bounds::{
    binary_entropy, ed_lower_bound, ef_certificate, hashing_rate, key_rate, sweep, BoundOptions,
    BoundReport, EfCertificate, PairBound, PairRates, SweepKnob, SweepRow,
};
pub use error::{Error, Result, Violation};
pub use filtering::{
    apply_filter, build_filters, predict_outcome, FilterOutcome, FilterSet, Variant,
};
pub use layout::{Factor, Role, SubsystemLayout};
pub use linalg::{
    hermitian_eig, partial_trace, permute_subsystems, schmidt_max, trace_distance,
    von_neumann_entropy, HermitianEig,
};
pub use matrix::{kron, ComplexMatrix, C64};
pub use overlap::{
    a_values, brute_force_eta, cross_operator, eta_optimize, overlap_for_pair, OptimizerOptions,
    OverlapResult, ProductOverlap,
};
pub use private_state::{
    build_private_state, eigenvectors_of_pdit, tensor_power_spec, PrivateState, PrivateStateSpec,
};
pub use state::{
    bell_vector, random_density, random_unitary, validate_state, DensityMatrix, Tolerances,
    UnitaryOp,
};
