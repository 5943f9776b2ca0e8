//! Validated density matrices and unitaries, plus the seeded random
//! ensembles (Haar unitaries, Wishart states) used to fill in shields and
//! twisting unitaries.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result, Violation, Violations};
use crate::layout::SubsystemLayout;
use crate::linalg::hermitian_eig_tol;
use crate::matrix::{ComplexMatrix, C64, ZERO};

/// Numerical tolerances shared by validation and reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise hermiticity, relative to `max(1, max|M_rc|)`.
    pub herm: f64,
    /// Most negative eigenvalue accepted as zero.
    pub psd: f64,
    pub trace: f64,
    /// Largest trace distance to the ideal two-projector mixture that still
    /// counts as an exact filtering outcome.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-12,
            psd: 1e-10,
            trace: 1e-10,
            residual: 1e-9,
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix with a subsystem
/// layout attached.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    layout: SubsystemLayout,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, layout: SubsystemLayout) -> Result<Self> {
        validate_state(matrix, layout)
    }

    /// For matrices that are states by construction (e.g. `W ρ W^dag` with
    /// `W` an isometry). Only the trace is renormalised.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, layout: SubsystemLayout) -> Self {
        debug_assert_eq!(matrix.rows(), layout.total_dim());
        Self { matrix, layout }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Same matrix, different factorisation of the same total dimension.
    pub fn with_layout(self, layout: SubsystemLayout) -> Result<Self> {
        if layout.total_dim() != self.dim() {
            return Err(Error::InvalidState(Violations(vec![Violation::Layout {
                expected: layout.total_dim(),
                found: self.dim(),
            }])));
        }
        Ok(Self {
            matrix: self.matrix,
            layout,
        })
    }

    /// `U ρ U^dag`.
    pub fn conjugate(&self, u: &UnitaryOp) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "unitary conjugation",
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let m = u
            .matrix()
            .matmul(&self.matrix)
            .matmul(&u.matrix().adjoint());
        Ok(Self::from_trusted(m.hermitian_part(), self.layout.clone()))
    }

    /// `(1 - w) ρ + w I/D`.
    pub fn depolarize(&self, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidArgument(alloc::format!(
                "depolarizing weight {weight} outside [0, 1]"
            )));
        }
        let d = self.dim();
        let noise = ComplexMatrix::identity(d).scale_real(weight / d as f64);
        Ok(Self::from_trusted(
            self.matrix.scale_real(1.0 - weight).add(&noise),
            self.layout.clone(),
        ))
    }
}

pub fn validate_state(matrix: ComplexMatrix, layout: SubsystemLayout) -> Result<DensityMatrix> {
    validate_state_with(matrix, layout, &Tolerances::default())
}

/// Checks every density-matrix invariant and reports all violations found.
pub fn validate_state_with(
    matrix: ComplexMatrix,
    layout: SubsystemLayout,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    if !matrix.is_square() {
        return Err(Error::NotSquare {
            rows: matrix.rows(),
            cols: matrix.cols(),
        });
    }
    let mut violations = Vec::new();
    if layout.total_dim() != matrix.rows() {
        violations.push(Violation::Layout {
            expected: layout.total_dim(),
            found: matrix.rows(),
        });
    }
    let herm_dev = matrix.hermiticity_deviation();
    if herm_dev > tol.herm * matrix.max_abs().max(1.0) {
        violations.push(Violation::Hermiticity {
            deviation: herm_dev,
        });
        return Err(Error::InvalidState(Violations(violations)));
    }
    let trace_dev = matrix.trace().re - 1.0;
    if trace_dev.abs() > tol.trace {
        violations.push(Violation::Trace {
            deviation: trace_dev,
        });
    }
    let eig = hermitian_eig_tol(&matrix, tol.herm)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tol.psd {
        violations.push(Violation::Psd {
            min_eigenvalue: min,
        });
    }
    if violations.is_empty() {
        Ok(DensityMatrix { matrix, layout })
    } else {
        Err(Error::InvalidState(Violations(violations)))
    }
}

/// Square matrix with `U^dag U = I` to 1e-10 (Frobenius).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    matrix: ComplexMatrix,
}

impl UnitaryOp {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > Self::TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }
}

/// `||U^dag U - I||_F`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    u.adjoint()
        .matmul(u)
        .sub(&ComplexMatrix::identity(u.cols()))
        .frobenius_norm()
}

/// Deterministic RNG for a seed.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent sub-seed for stream `stream` of a master seed (splitmix64).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Some(v) = crate::matrix::normalized(&v) {
            return v;
        }
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix, with the
/// columns of Q rephased by the phases of diag(R).
pub fn random_unitary(dim: usize, seed: u64) -> Result<UnitaryOp> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "unitary dimension must be >= 1".into(),
        ));
    }
    let mut rng = seeded_rng(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(&mut rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases: Vec<C64> = (0..dim)
        .map(|k| {
            let d = r[(k, k)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    Ok(UnitaryOp::from_trusted(ComplexMatrix::from_fn(
        dim,
        dim,
        |row, col| q[(row, col)] * phases[col],
    )))
}

/// Wishart state `G G^dag / Tr(G G^dag)` with `G` a `dim × rank` complex
/// Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(alloc::format!(
            "rank {rank} outside 1..={dim}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| complex_gaussian(&mut rng));
    let w = g.matmul(&g.adjoint()).hermitian_part();
    let t = w.trace().re;
    Ok(DensityMatrix::from_trusted(
        w.scale_real(1.0 / t),
        SubsystemLayout::flat(dim),
    ))
}

/// `(|i…i> + sign |j…j>) / √2` on `parties` copies of `C^d`.
pub fn bell_vector(sign: i8, i: usize, j: usize, d: usize, parties: usize) -> Result<Vec<C64>> {
    if i >= d || j >= d || i == j {
        return Err(Error::InvalidArgument(alloc::format!(
            "bell_vector needs distinct indices below {d}, got ({i}, {j})"
        )));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument("sign must be +1 or -1".into()));
    }
    let dim = d.pow(parties as u32);
    let repeated = |k: usize| (0..parties).fold(0, |acc, _| acc * d + k);
    let mut v = vec![ZERO; dim];
    let s = core::f64::consts::FRAC_1_SQRT_2;
    v[repeated(i)] = C64::new(s, 0.0);
    v[repeated(j)] = C64::new(f64::from(sign) * s, 0.0);
    Ok(v)
}
