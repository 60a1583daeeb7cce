//! The JSON bundle format.
//!
//! Scalars are strings `"p/q"` or `"p/q+r/s i"`. Matrices are row-major arrays in
//! which rows index the output. Maps between tensor products are given on plain
//! `K`-tensor coordinates, the index of `(i, j)` being `i·d₂ + j`; they are checked
//! to descend to the tensor products over `A` when the bundle is loaded.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};
use crate::scalar::Field;

pub const FORMAT: &str = "ncdiff-bundle/1";

fn default_degree() -> usize {
    3
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Bundle {
    pub format: String,
    pub name: String,
    pub field: Field,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub description: String,
    pub algebra: AlgebraSpec,
    pub omega1: BimoduleSpec,
    /// `d: A → Ω¹`, a `dim Ω¹ × dim A` matrix.
    pub d: Mat,
    pub dual_basis: DualBasisSpec,
    pub right_connection: RightConnectionSpec,
    #[serde(default)]
    pub modules: Vec<ModuleSpec>,
    #[serde(default)]
    pub inner_products: Vec<InnerProductSpec>,
    #[serde(default)]
    pub states: Vec<StateSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub basis: Vec<String>,
    pub unit: Vector,
    /// `mul[i][j]` holds the coordinates of `e_i·e_j`.
    pub mul: Vec<Vec<Vector>>,
    /// Matrix `S` with `x* = S·conj(x)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<Mat>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BimoduleSpec {
    pub basis: Vec<String>,
    /// One matrix per algebra basis element.
    pub left: Vec<Mat>,
    pub right: Vec<Mat>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DualBasisSpec {
    /// Forms `fⁱ ∈ Ω¹`.
    pub forms: Vec<Vector>,
    /// Functionals `f_i`, each a `dim A × dim Ω¹` matrix.
    pub fields: Vec<Mat>,
    pub names: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RightConnectionSpec {
    /// `□: Ω¹ → Ω¹ ⊗ Ω¹` on plain coordinates.
    #[serde(rename = "box")]
    pub box_: Mat,
    /// `σ⁻¹: Ω¹ ⊗ Ω¹ → Ω¹ ⊗ Ω¹` on plain coordinates.
    pub sigma_inv: Mat,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModuleSpec {
    /// The algebra with `∇ = d`.
    Algebra { name: String },
    /// `Ω¹` with the left connection `σ∘□`.
    Omega1 { name: String },
    /// Vector fields with the dual connection.
    Vec { name: String },
    Custom {
        name: String,
        basis: Vec<String>,
        left: Vec<Mat>,
        right: Vec<Mat>,
        /// `∇: E → Ω¹ ⊗ E` on plain coordinates.
        nabla: Mat,
        /// `σ_E: E ⊗ Ω¹ → Ω¹ ⊗ E` on plain coordinates.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<Mat>,
    },
}

impl ModuleSpec {
    pub fn name(&self) -> &str {
        match self {
            ModuleSpec::Algebra { name }
            | ModuleSpec::Omega1 { name }
            | ModuleSpec::Vec { name }
            | ModuleSpec::Custom { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct InnerProductSpec {
    pub module: String,
    /// `gram[i][j]` holds the coordinates of `⟨e_i, ē_j⟩ ∈ A`.
    pub gram: Vec<Vec<Vector>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
    pub functional: Vector,
}

impl Bundle {
    pub fn from_json(text: &str) -> Result<Bundle> {
        let b: Bundle = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if b.format != FORMAT {
            return Err(Error::Parse(format!("unsupported format `{}`, expected `{FORMAT}`", b.format)));
        }
        Ok(b)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundles serialise")
    }

    /// SHA-256 of the compact serialisation.
    pub fn digest(&self) -> String {
        let compact = serde_json::to_string(self).expect("bundles serialise");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }

    /// Reads a bundle from a path, or a built-in one from `builtin:<name>`.
    pub fn load(source: &str) -> Result<Bundle> {
        if let Some(name) = source.strip_prefix("builtin:") {
            return crate::builtins::builtin(name).ok_or_else(|| Error::UnknownName(source.to_string()));
        }
        let text = std::fs::read_to_string(Path::new(source)).map_err(|e| Error::Io(format!("{source}: {e}")))?;
        Bundle::from_json(&text)
    }
}
