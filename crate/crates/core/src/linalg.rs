//! Spectral routines, subsystem bookkeeping and the entropy/distance
//! functionals built on them.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::layout::{compose, digits, SubsystemLayout};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::state::{DensityMatrix, Tolerances};

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl HermitianEig {
    /// `V diag(λ) V^dag`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for r in 0..n {
                let vr = v[r] * *lambda;
                for c in 0..n {
                    out[(r, c)] += vr * v[c].conj();
                }
            }
        }
        out
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    hermitian_eig_tol(m, Tolerances::default().herm)
}

/// Hermitian eigendecomposition; `herm_tol` is applied entrywise after
/// scaling by `max(1, max|M_rc|)`.
pub fn hermitian_eig_tol(m: &ComplexMatrix, herm_tol: f64) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > herm_tol * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEig {
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
        });
    }
    let h = m.hermitian_part();
    let mat = DMatrix::from_fn(n, n, |r, c| h[(r, c)]);
    let eig = SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    Ok(HermitianEig {
        eigenvalues: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        eigenvectors: order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect(),
    })
}

/// Index map sending each flat index of the original factor order to its
/// position after reordering; `order[p]` is the old factor placed at `p`.
fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut old = vec![0; dims.len()];
    (0..total)
        .map(|idx| {
            digits(idx, dims, &mut old);
            compose(order.iter().map(|&o| old[o]), &new_dims)
        })
        .collect()
}

fn check_order(dims: &[usize], order: &[usize]) -> Result<()> {
    let mut seen = vec![false; dims.len()];
    if order.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            context: "subsystem permutation",
            expected: dims.len(),
            found: order.len(),
        });
    }
    for &o in order {
        if o >= dims.len() || core::mem::replace(&mut seen[o], true) {
            return Err(Error::InvalidArgument(
                "subsystem order is not a permutation".into(),
            ));
        }
    }
    Ok(())
}

/// Reorders the tensor factors of a square operator: factor `order[p]` of
/// the input becomes factor `p` of the output.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &[usize],
    order: &[usize],
) -> Result<ComplexMatrix> {
    check_order(dims, order)?;
    let total: usize = dims.iter().product();
    if m.rows() != total || m.cols() != total {
        return Err(Error::DimensionMismatch {
            context: "subsystem permutation",
            expected: total,
            found: m.rows(),
        });
    }
    let map = permutation_map(dims, order);
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Vector version of [`permute_subsystems`].
pub fn permute_vector(v: &[C64], dims: &[usize], order: &[usize]) -> Result<Vec<C64>> {
    check_order(dims, order)?;
    let total: usize = dims.iter().product();
    if v.len() != total {
        return Err(Error::DimensionMismatch {
            context: "subsystem permutation",
            expected: total,
            found: v.len(),
        });
    }
    let map = permutation_map(dims, order);
    let mut out = vec![ZERO; total];
    for (idx, z) in v.iter().enumerate() {
        out[map[idx]] = *z;
    }
    Ok(out)
}

/// Splits factor positions into (kept in layout order, traced).
fn split_keep(layout: &SubsystemLayout, keep: &[&str]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep set is empty".into()));
    }
    let mut flags = vec![false; layout.len()];
    for label in keep {
        flags[layout.position(label)?] = true;
    }
    let kept = (0..layout.len()).filter(|&p| flags[p]).collect();
    let traced = (0..layout.len()).filter(|&p| !flags[p]).collect();
    Ok((kept, traced))
}

/// Traces out every factor whose label is not in `keep`. The result acts
/// on the kept factors in layout order.
pub fn partial_trace(
    m: &ComplexMatrix,
    layout: &SubsystemLayout,
    keep: &[&str],
) -> Result<ComplexMatrix> {
    let dim = layout.total_dim();
    if !m.is_square() || m.rows() != dim {
        return Err(Error::DimensionMismatch {
            context: "partial trace layout",
            expected: dim,
            found: m.rows(),
        });
    }
    let (kept, traced) = split_keep(layout, keep)?;
    let kept_dim: usize = kept.iter().map(|&p| layout.factors()[p].dim).product();
    let traced_dim = dim / kept_dim;
    let order: Vec<usize> = kept.iter().chain(&traced).copied().collect();
    let p = permute_subsystems(m, &layout.dims(), &order)?;
    Ok(ComplexMatrix::from_fn(kept_dim, kept_dim, |a, b| {
        (0..traced_dim)
            .map(|t| p[(a * traced_dim + t, b * traced_dim + t)])
            .sum()
    }))
}

/// Reduced state `Tr_rest |v><v|` of a pure vector, computed without forming
/// the full projector.
pub fn pure_reduced_state(
    v: &[C64],
    layout: &SubsystemLayout,
    keep: &[&str],
) -> Result<ComplexMatrix> {
    let dim = layout.total_dim();
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            context: "pure reduced state layout",
            expected: dim,
            found: v.len(),
        });
    }
    let (kept, traced) = split_keep(layout, keep)?;
    let kept_dim: usize = kept.iter().map(|&p| layout.factors()[p].dim).product();
    let traced_dim = dim / kept_dim;
    let order: Vec<usize> = kept.iter().chain(&traced).copied().collect();
    let w = permute_vector(v, &layout.dims(), &order)?;
    Ok(ComplexMatrix::from_fn(kept_dim, kept_dim, |a, b| {
        (0..traced_dim)
            .map(|t| w[a * traced_dim + t] * w[b * traced_dim + t].conj())
            .sum()
    }))
}

/// Largest Schmidt coefficient of `v` viewed as a `dim_left × dim_right`
/// array, together with unit vectors achieving `<left ⊗ right|v> = sigma`.
pub fn schmidt_max(
    v: &[C64],
    dim_left: usize,
    dim_right: usize,
) -> Result<(f64, Vec<C64>, Vec<C64>)> {
    if v.len() != dim_left * dim_right || dim_left == 0 || dim_right == 0 {
        return Err(Error::DimensionMismatch {
            context: "schmidt_max",
            expected: dim_left * dim_right,
            found: v.len(),
        });
    }
    let m = ComplexMatrix::new(dim_left, dim_right, v.to_vec())?;
    // <l ⊗ r|v> = l^dag M conj(r); maximised by the top singular pair.
    let (left, right) = if dim_left <= dim_right {
        let gram = m.matmul(&m.adjoint());
        let top = hermitian_eig(&gram)?.eigenvectors.swap_remove(0);
        let w = m.apply_adjoint(&top);
        let right = match crate::matrix::normalized(&w) {
            Some(w) => w.iter().map(|z| z.conj()).collect(),
            None => crate::matrix::basis(dim_right, 0),
        };
        (top, right)
    } else {
        let gram = m.adjoint().matmul(&m);
        let top = hermitian_eig(&gram)?.eigenvectors.swap_remove(0);
        let w = m.apply(&top);
        let left =
            crate::matrix::normalized(&w).unwrap_or_else(|| crate::matrix::basis(dim_left, 0));
        (left, top.iter().map(|z| z.conj()).collect())
    };
    let overlap = crate::matrix::inner(&crate::matrix::kron_vec(&left, &right), v);
    // Rotate the global phase into the left vector so the overlap is real.
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let left: Vec<C64> = left.iter().map(|z| z * phase).collect();
    Ok((overlap.norm(), left, right))
}

/// `(1/2) Σ |λ_k(A - B)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    trace_distance_matrices(a.matrix(), b.matrix())
}

pub(crate) fn trace_distance_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            context: "trace distance",
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let eig = hermitian_eig(&a.sub(b))?;
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// Shannon entropy in bits of a spectrum; entries in `(-psd_tol, 0)` are
/// clamped to zero.
pub fn spectrum_entropy(eigenvalues: &[f64], psd_tol: f64) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -psd_tol {
            return Err(Error::NegativeEigenvalue { value: l });
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Von Neumann entropy `-Tr ρ log2 ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    matrix_entropy(rho.matrix(), Tolerances::default().psd)
}

pub(crate) fn matrix_entropy(m: &ComplexMatrix, psd_tol: f64) -> Result<f64> {
    spectrum_entropy(&hermitian_eig(m)?.eigenvalues, psd_tol)
}
