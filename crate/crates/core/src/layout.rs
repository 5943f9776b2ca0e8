use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Key,
    Shield,
}

/// One tensor factor of a Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
    pub party: usize,
    pub role: Role,
}

impl Factor {
    pub fn new(label: impl Into<String>, dim: usize, party: usize, role: Role) -> Self {
        Self {
            label: label.into(),
            dim,
            party,
            role,
        }
    }
}

/// Ordered list of tensor factors; the first factor is the most significant
/// digit of a row-major index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubsystemLayout {
    factors: Vec<Factor>,
}

impl SubsystemLayout {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        for (n, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(Error::InvalidArgument(format!(
                    "factor `{}` has dimension 0",
                    f.label
                )));
            }
            if factors[..n].iter().any(|g| g.label == f.label) {
                return Err(Error::DuplicateLabel(f.label.clone()));
            }
        }
        Ok(Self { factors })
    }

    /// A single anonymous factor of dimension `dim`.
    pub fn flat(dim: usize) -> Self {
        Self {
            factors: alloc::vec![Factor::new("sys", dim.max(1), 0, Role::Shield)],
        }
    }

    /// `parties` key factors of dimension `d`, labelled `key0..`.
    pub fn keys(d: usize, parties: usize) -> Self {
        Self {
            factors: (0..parties)
                .map(|k| Factor::new(key_label(k), d, k, Role::Key))
                .collect(),
        }
    }

    /// One shield factor per party, labelled `shield0..`.
    pub fn shields(dims: &[usize]) -> Self {
        Self {
            factors: dims
                .iter()
                .enumerate()
                .map(|(k, &dim)| Factor::new(shield_label(k), dim, k, Role::Shield))
                .collect(),
        }
    }

    /// Canonical private-state layout: all key factors, then all shields.
    pub fn private_state(d: usize, shield_dims: &[usize]) -> Self {
        let mut layout = Self::keys(d, shield_dims.len());
        layout.factors.extend(Self::shields(shield_dims).factors);
        layout
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|f| f.label.as_str())
    }

    /// Sub-layout made of the given factor positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Self {
        Self {
            factors: positions.iter().map(|&p| self.factors[p].clone()).collect(),
        }
    }
}

pub fn key_label(party: usize) -> String {
    format!("key{party}")
}

pub fn shield_label(party: usize) -> String {
    format!("shield{party}")
}

/// Row-major digits of `index` for the given dimensions.
pub(crate) fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

pub(crate) fn compose(digits: impl IntoIterator<Item = usize>, dims: &[usize]) -> usize {
    digits
        .into_iter()
        .zip(dims)
        .fold(0, |acc, (x, &d)| acc * d + x)
}
