//! Private states `Γ = (1/d) Σ_{i,j} |i…i><j…j| ⊗ U_i ϱ U_j^dag` and their
//! spectral and tensor-power structure.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::layout::{digits, SubsystemLayout};
use crate::linalg::{hermitian_eig, permute_subsystems};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::state::{derive_seed, random_density, random_unitary, DensityMatrix, UnitaryOp};

/// Eigenvalues at or below this are treated as zero when listing the
/// support of a private state.
pub const EIGENVALUE_CUTOFF: f64 = 1e-12;

/// Default bound on the total dimension produced by [`tensor_power_spec`].
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Generating data of a private state.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivateStateSpec {
    d: usize,
    parties: usize,
    shield_dims: Vec<usize>,
    unitaries: Vec<UnitaryOp>,
    shield: DensityMatrix,
}

impl PrivateStateSpec {
    /// Checks the structural invariants and re-tags the shield with the
    /// canonical per-party shield layout.
    pub fn new(
        d: usize,
        shield_dims: Vec<usize>,
        unitaries: Vec<UnitaryOp>,
        shield: DensityMatrix,
    ) -> Result<Self> {
        let parties = shield_dims.len();
        if d < 2 {
            return Err(Error::InvalidArgument(format!("key dimension {d} < 2")));
        }
        if parties < 2 {
            return Err(Error::InvalidArgument(format!(
                "{parties} parties; need at least 2"
            )));
        }
        if shield_dims.contains(&0) {
            return Err(Error::InvalidArgument(
                "shield dimensions must be >= 1".into(),
            ));
        }
        if unitaries.len() != d {
            return Err(Error::DimensionMismatch {
                context: "number of unitaries",
                expected: d,
                found: unitaries.len(),
            });
        }
        let shield_dim: usize = shield_dims.iter().product();
        if let Some(u) = unitaries.iter().find(|u| u.dim() != shield_dim) {
            return Err(Error::DimensionMismatch {
                context: "unitary dimension",
                expected: shield_dim,
                found: u.dim(),
            });
        }
        if shield.dim() != shield_dim {
            return Err(Error::DimensionMismatch {
                context: "shield dimension",
                expected: shield_dim,
                found: shield.dim(),
            });
        }
        let shield = shield.with_layout(SubsystemLayout::shields(&shield_dims))?;
        Ok(Self {
            d,
            parties,
            shield_dims,
            unitaries,
            shield,
        })
    }

    /// Haar-random unitaries and a Wishart shield of the given rank
    /// (full rank when `None`), all derived from one seed.
    pub fn random(
        d: usize,
        shield_dims: &[usize],
        shield_rank: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        let shield_dim: usize = shield_dims.iter().product();
        let rank = shield_rank.unwrap_or(shield_dim);
        let shield = random_density(shield_dim, rank, derive_seed(seed, 0))?;
        let unitaries = (0..d)
            .map(|i| random_unitary(shield_dim, derive_seed(seed, i as u64 + 1)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, shield_dims.to_vec(), unitaries, shield)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn shield_dims(&self) -> &[usize] {
        &self.shield_dims
    }

    pub fn shield_dim(&self) -> usize {
        self.shield.dim()
    }

    pub fn unitaries(&self) -> &[UnitaryOp] {
        &self.unitaries
    }

    pub fn shield(&self) -> &DensityMatrix {
        &self.shield
    }

    /// Same twisting, different shield state.
    pub fn with_shield(&self, shield: DensityMatrix) -> Result<Self> {
        Self::new(
            self.d,
            self.shield_dims.clone(),
            self.unitaries.clone(),
            shield,
        )
    }

    pub fn layout(&self) -> SubsystemLayout {
        SubsystemLayout::private_state(self.d, &self.shield_dims)
    }

    pub fn total_dim(&self) -> usize {
        self.d.pow(self.parties as u32) * self.shield_dim()
    }

    /// Flat index of the key string `|k…k>`.
    pub fn repeated_key(&self, k: usize) -> usize {
        (0..self.parties).fold(0, |acc, _| acc * self.d + k)
    }

    /// `U_i ϱ U_j^dag`.
    pub fn twisted_block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.unitaries[i]
            .matrix()
            .matmul(self.shield.matrix())
            .matmul(&self.unitaries[j].matrix().adjoint())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivateState {
    spec: PrivateStateSpec,
    rho: DensityMatrix,
}

impl PrivateState {
    pub fn spec(&self) -> &PrivateStateSpec {
        &self.spec
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }
}

/// Assembles the private state in the layout `key0…key(N-1), shield0…`.
pub fn build_private_state(spec: &PrivateStateSpec) -> PrivateState {
    let s = spec.shield_dim();
    let dim = spec.total_dim();
    let mut m = ComplexMatrix::zeros(dim, dim);
    let weight = 1.0 / spec.d as f64;
    for i in 0..spec.d {
        let row0 = spec.repeated_key(i) * s;
        for j in 0..spec.d {
            let col0 = spec.repeated_key(j) * s;
            let block = spec.twisted_block(i, j);
            for r in 0..s {
                for c in 0..s {
                    m[(row0 + r, col0 + c)] = block[(r, c)] * weight;
                }
            }
        }
    }
    // Γ = W ϱ W^dag with W = d^{-1/2} Σ_j |j…j> ⊗ U_j an isometry, so Γ is a
    // state whenever ϱ is.
    PrivateState {
        rho: DensityMatrix::from_trusted(m.hermitian_part(), spec.layout()),
        spec: spec.clone(),
    }
}

/// Nonzero eigenpairs `(λ_k, d^{-1/2} Σ_j |j…j> ⊗ U_j |φ_k>)` built from the
/// shield spectrum. Multipartite specs are rejected unless
/// `allow_multipartite` is set.
pub fn eigenvectors_of_pdit(
    spec: &PrivateStateSpec,
    allow_multipartite: bool,
) -> Result<Vec<(f64, Vec<C64>)>> {
    if spec.parties != 2 && !allow_multipartite {
        return Err(Error::NotBipartite {
            parties: spec.parties,
        });
    }
    let s = spec.shield_dim();
    let weight = 1.0 / (spec.d as f64).sqrt();
    let eig = hermitian_eig(spec.shield.matrix())?;
    Ok(eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(l, _)| **l > EIGENVALUE_CUTOFF)
        .map(|(&lambda, phi)| {
            let mut psi = alloc::vec![ZERO; spec.total_dim()];
            for (j, u) in spec.unitaries.iter().enumerate() {
                let branch = u.matrix().apply(phi);
                let offset = spec.repeated_key(j) * s;
                for (slot, z) in psi[offset..offset + s].iter_mut().zip(branch) {
                    *slot = z * weight;
                }
            }
            (lambda, psi)
        })
        .collect())
}

/// Rewrites `Γ^{⊗m}` as a private state with key dimension `d^m`.
///
/// Returns the new spec and the factor order `π` (new position → factor of
/// the `m`-fold tensor product, each copy laid out as `key0…, shield0…`)
/// such that `permute_subsystems(Γ^{⊗m}, π)` equals the built state of the
/// new spec.
pub fn tensor_power_spec(
    spec: &PrivateStateSpec,
    m: usize,
    dim_cap: usize,
) -> Result<(PrivateStateSpec, Vec<usize>)> {
    if m == 0 {
        return Err(Error::InvalidArgument("tensor power must be >= 1".into()));
    }
    let n = spec.parties;
    let too_big = Error::DimensionCap {
        dim: usize::MAX,
        cap: dim_cap,
    };
    let new_d = spec.d.checked_pow(m as u32).ok_or(too_big.clone())?;
    let new_dim = spec.total_dim().checked_pow(m as u32).ok_or(too_big)?;
    if new_dim > dim_cap {
        return Err(Error::DimensionCap {
            dim: new_dim,
            cap: dim_cap,
        });
    }

    let order: Vec<usize> = (0..n)
        .flat_map(|k| (0..m).map(move |c| c * 2 * n + k))
        .chain((0..n).flat_map(|k| (0..m).map(move |c| c * 2 * n + n + k)))
        .collect();

    // Shield copies arrive copy-major; regroup them party-major.
    let shield_copy_dims: Vec<usize> = (0..m)
        .flat_map(|_| spec.shield_dims.iter().copied())
        .collect();
    let shield_order: Vec<usize> = (0..n)
        .flat_map(|k| (0..m).map(move |c| c * n + k))
        .collect();
    let regroup = |op: &ComplexMatrix| permute_subsystems(op, &shield_copy_dims, &shield_order);

    let shield_power = (1..m).fold(spec.shield.matrix().clone(), |acc, _| {
        acc.kron(spec.shield.matrix())
    });
    let new_shield_dims: Vec<usize> = spec.shield_dims.iter().map(|&s| s.pow(m as u32)).collect();
    let shield = DensityMatrix::from_trusted(
        regroup(&shield_power)?,
        SubsystemLayout::shields(&new_shield_dims),
    );

    let base = alloc::vec![spec.d; m];
    let mut word = alloc::vec![0; m];
    let mut unitaries = Vec::with_capacity(new_d);
    for index in 0..new_d {
        digits(index, &base, &mut word);
        let product = word[1..]
            .iter()
            .fold(spec.unitaries[word[0]].matrix().clone(), |acc, &w| {
                acc.kron(spec.unitaries[w].matrix())
            });
        unitaries.push(UnitaryOp::from_trusted(regroup(&product)?));
    }

    let new_spec = PrivateStateSpec::new(new_d, new_shield_dims, unitaries, shield)?;
    Ok((new_spec, order))
}

/// Factor dimensions of `Γ^{⊗m}` in copy-major order, matching the input
/// side of the permutation returned by [`tensor_power_spec`].
pub fn tensor_power_dims(spec: &PrivateStateSpec, m: usize) -> Vec<usize> {
    let one = spec.layout().dims();
    (0..m).flat_map(|_| one.iter().copied()).collect()
}
