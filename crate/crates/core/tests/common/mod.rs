#![allow(dead_code)]

use privdist_core::matrix::{ONE, ZERO};
use privdist_core::{
    ComplexMatrix, DensityMatrix, PrivateStateSpec, SubsystemLayout, UnitaryOp, C64,
};

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn swap() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, col)] = ONE;
    }
    m
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

pub fn phi_plus() -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(s), ZERO, ZERO, c(s)]
}

pub fn phi_minus() -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(s), ZERO, ZERO, c(-s)]
}

/// d = 2, shield C² ⊗ C² in state I/4, U_0 = I, U_1 = SWAP.
pub fn swap_spec() -> PrivateStateSpec {
    let shield = DensityMatrix::new(
        ComplexMatrix::identity(4).scale_real(0.25),
        SubsystemLayout::flat(4),
    )
    .unwrap();
    PrivateStateSpec::new(
        2,
        vec![2, 2],
        vec![UnitaryOp::identity(4), UnitaryOp::new(swap()).unwrap()],
        shield,
    )
    .unwrap()
}

/// d = 2, shield |Φ+><Φ+|, U_0 = I, U_1 = σ_z ⊗ I.
pub fn bell_spec() -> PrivateStateSpec {
    let shield = DensityMatrix::new(
        ComplexMatrix::projector(&phi_plus()),
        SubsystemLayout::flat(4),
    )
    .unwrap();
    let u1 = UnitaryOp::new(sigma_z().kron(&ComplexMatrix::identity(2))).unwrap();
    PrivateStateSpec::new(2, vec![2, 2], vec![UnitaryOp::identity(4), u1], shield).unwrap()
}

/// d = 2 with one-dimensional shields: the Bell state itself.
pub fn trivial_spec() -> PrivateStateSpec {
    let one = DensityMatrix::new(ComplexMatrix::identity(1), SubsystemLayout::flat(1)).unwrap();
    PrivateStateSpec::new(2, vec![1, 1], vec![UnitaryOp::identity(1); 2], one).unwrap()
}

/// Seeded random private state with d ∈ {2,3}, N ∈ {2,3}, shield factor
/// dims ∈ {2,3}, cycling through all (d, N) combinations.
pub fn corpus_spec(index: u64) -> PrivateStateSpec {
    let d = 2 + (index % 2) as usize;
    let parties = 2 + ((index / 2) % 2) as usize;
    let dims: Vec<usize> = (0..parties)
        .map(|k| 2 + ((index.wrapping_mul(2654435761) >> (k + 3)) & 1) as usize)
        .collect();
    PrivateStateSpec::random(d, &dims, None, 1000 + index).unwrap()
}

pub fn corpus(n: u64) -> Vec<PrivateStateSpec> {
    (0..n).map(corpus_spec).collect()
}
