//! File formats: group specs, block-group specs and generic TOML/JSON loading.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::apartment::ApartmentData;
use crate::error::{ApartmentError, GlError, ParseError};
use crate::gl::{point_from_cochar, BlockGroupSpec, Cocharacter, EdificePoint, WeightedFlag};
use crate::lattice::{LatticeMap, QMatrix, SPDForm, WeightVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    /// Guesses the format from a file extension; anything but `.json` is TOML.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Toml,
        }
    }
}

pub fn parse_str<T: DeserializeOwned>(text: &str, format: Format) -> Result<T, ParseError> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(|e| ParseError::Format(format!("JSON: {e}"))),
        Format::Toml => toml::from_str(text).map_err(|e| ParseError::Format(format!("TOML: {e}"))),
    }
}

pub fn to_string<T: Serialize>(value: &T, format: Format) -> Result<String, ParseError> {
    match format {
        Format::Json => serde_json::to_string_pretty(value).map_err(|e| ParseError::Format(e.to_string())),
        Format::Toml => toml::to_string(value).map_err(|e| ParseError::Format(e.to_string())),
    }
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError::Format(format!("{}: {e}", path.display())))?;
    parse_str(&text, Format::from_path(path)).map_err(|e| ParseError::Format(format!("{}: {e}", path.display())))
}

/// On-disk form of an [`ApartmentData`], with an optional metric form and
/// optional labels for parabolic classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub rank: usize,
    pub weights: Vec<Vec<i64>>,
    #[serde(default)]
    pub weyl_gens: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<QMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, Vec<usize>>>,
}

impl GroupSpec {
    pub fn to_apartment(&self) -> Result<ApartmentData, ApartmentError> {
        let a = ApartmentData::new(
            self.name.clone(),
            self.rank,
            self.weights.iter().cloned().map(WeightVec::new).collect(),
            self.weyl_gens.iter().cloned().map(LatticeMap::new).collect(),
            self.roots.clone(),
        )?;
        Ok(match &self.labels {
            Some(l) => a.with_labels(l.clone()),
            None => a,
        })
    }

    pub fn form(&self) -> Result<Option<SPDForm>, crate::error::LatticeError> {
        self.form.clone().map(SPDForm::new).transpose()
    }

    pub fn from_apartment(a: &ApartmentData) -> GroupSpec {
        GroupSpec {
            name: a.name().to_string(),
            rank: a.rank(),
            weights: a.weights().iter().map(|w| w.coeffs.clone()).collect(),
            weyl_gens: a.weyl_gens().iter().map(|g| g.matrix.clone()).collect(),
            roots: a.roots().map(|r| r.to_vec()),
            form: None,
            labels: if a.labels().is_empty() {
                None
            } else {
                Some(a.labels().clone())
            },
        }
    }
}

/// A point given either as a weighted flag or as a cocharacter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointInput {
    Flag(WeightedFlag),
    Cochar(Cocharacter),
}

impl PointInput {
    pub fn to_point(&self, h: &BlockGroupSpec) -> Result<EdificePoint, GlError> {
        match self {
            PointInput::Flag(f) => EdificePoint::new(h, f.clone()),
            PointInput::Cochar(c) => point_from_cochar(h, c),
        }
    }
}

/// Input of the `flag-ops` commands; each command reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagOpsInput {
    pub group: BlockGroupSpec,
    /// The larger group for `include`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<BlockGroupSpec>,
    #[serde(default)]
    pub points: Vec<PointInput>,
    /// The acting element for `act`, or a splitting basis for `oppose`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<QMatrix>,
    /// The cocharacter defining `P_λ` and `L_λ` for `project`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Cocharacter>,
    /// Kept coordinates for `quotient`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kept: Option<Vec<usize>>,
}
