//! JSON interchange: matrices, vectors and private-state specs.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major. Floats are
//! written in shortest round-trip form and parsed exactly, so a matrix
//! written and read back is bit-identical.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use privdist_core::layout::{Factor, Role};
use privdist_core::state::validate_state_with;
use privdist_core::{
    ComplexMatrix, DensityMatrix, PrivateStateSpec, SubsystemLayout, Tolerances, UnitaryOp, C64,
};
use serde::{Deserialize, Serialize};

pub type ComplexJson = [f64; 2];

pub fn complex_to_json(z: C64) -> ComplexJson {
    [z.re, z.im]
}

pub fn vector_to_json(v: &[C64]) -> Vec<ComplexJson> {
    v.iter().map(|&z| complex_to_json(z)).collect()
}

pub fn vector_from_json(v: &[ComplexJson]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorJson {
    pub label: String,
    pub dim: usize,
    pub party: usize,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<FactorJson>>,
    pub data: Vec<ComplexJson>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            layout: None,
            data: vector_to_json(m.data()),
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self {
            layout: Some(layout_to_json(rho.layout())),
            ..Self::from_matrix(rho.matrix())
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        Ok(ComplexMatrix::new(
            self.rows,
            self.cols,
            vector_from_json(&self.data),
        )?)
    }

    /// The stored layout, or a single flat factor.
    pub fn layout(&self) -> Result<SubsystemLayout> {
        match &self.layout {
            None => Ok(SubsystemLayout::flat(self.rows)),
            Some(factors) => layout_from_json(factors),
        }
    }

    pub fn to_state(&self, tol: &Tolerances) -> Result<DensityMatrix> {
        Ok(validate_state_with(self.to_matrix()?, self.layout()?, tol)?)
    }

    pub fn to_unitary(&self) -> Result<UnitaryOp> {
        Ok(UnitaryOp::new(self.to_matrix()?)?)
    }
}

pub fn layout_to_json(layout: &SubsystemLayout) -> Vec<FactorJson> {
    layout
        .factors()
        .iter()
        .map(|f| FactorJson {
            label: f.label.clone(),
            dim: f.dim,
            party: f.party,
            role: match f.role {
                Role::Key => "key".into(),
                Role::Shield => "shield".into(),
            },
        })
        .collect()
}

pub fn layout_from_json(factors: &[FactorJson]) -> Result<SubsystemLayout> {
    let factors = factors
        .iter()
        .map(|f| {
            let role = match f.role.as_str() {
                "key" => Role::Key,
                "shield" => Role::Shield,
                other => bail!(
                    "factor `{}`: unknown role `{other}` (expected key or shield)",
                    f.label
                ),
            };
            Ok(Factor::new(f.label.clone(), f.dim, f.party, role))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SubsystemLayout::new(factors)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecJson {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parties: Option<usize>,
    pub shield_dims: Vec<usize>,
    pub unitaries: Vec<MatrixJson>,
    pub shield: MatrixJson,
}

impl SpecJson {
    pub fn from_spec(spec: &PrivateStateSpec) -> Self {
        Self {
            d: spec.d(),
            parties: Some(spec.parties()),
            shield_dims: spec.shield_dims().to_vec(),
            unitaries: spec
                .unitaries()
                .iter()
                .map(|u| MatrixJson::from_matrix(u.matrix()))
                .collect(),
            shield: MatrixJson::from_state(spec.shield()),
        }
    }

    pub fn to_spec(&self, tol: &Tolerances) -> Result<PrivateStateSpec> {
        if let Some(parties) = self.parties {
            if parties != self.shield_dims.len() {
                bail!(
                    "parties = {parties} but shield_dims lists {} factors",
                    self.shield_dims.len()
                );
            }
        }
        let unitaries = self
            .unitaries
            .iter()
            .enumerate()
            .map(|(k, u)| u.to_unitary().with_context(|| format!("unitaries[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        // The stored layout is informational; the spec re-tags the shield.
        let shield = validate_state_with(
            self.shield.to_matrix().context("shield")?,
            SubsystemLayout::flat(self.shield.rows),
            tol,
        )
        .context("shield")?;
        Ok(PrivateStateSpec::new(
            self.d,
            self.shield_dims.clone(),
            unitaries,
            shield,
        )?)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: malformed JSON", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<MatrixJson> {
    read_json(path)
}

pub fn read_spec(path: &Path, tol: &Tolerances) -> Result<PrivateStateSpec> {
    let json: SpecJson = read_json(path)?;
    json.to_spec(tol)
        .with_context(|| format!("{}: invalid spec", path.display()))
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}
