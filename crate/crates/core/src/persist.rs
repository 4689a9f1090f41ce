//! Versioned JSON model document and the per-basis weight listing.
//!
//! Each basis stores its effective weight and decays next to the raw
//! optimisation variables they were squared from, so that reloading a model
//! reproduces its values bit for bit.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::field::Aabb;
use crate::model::{EllipsoidRbf, RbfModel, RotationAngles};
use crate::{Error, Result, Vec3};

pub const FORMAT_NAME: &str = "sparse-gauss-erbf";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub source: String,
    pub atom_count: usize,
    pub decay: f64,
    pub isovalue: f64,
    /// Box of the source molecule used for sampling and meshing.
    pub bounds: Aabb,
    pub iterations: usize,
    pub sparse_iterations: usize,
    /// Effective configuration of the run, as `key = value` pairs.
    #[serde(default)]
    pub config: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisRecord {
    /// `c̃²`
    pub weight: f64,
    /// `d̃_p²`, Å⁻²
    pub decays: [f64; 3],
    pub center: [f64; 3],
    /// `[α, β, γ]` in radians.
    pub angles: [f64; 3],
    pub coeff_sqrt: f64,
    pub decay_sqrt: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format: String,
    pub version: u32,
    pub metadata: ModelMetadata,
    pub bases: Vec<BasisRecord>,
}

impl ModelDocument {
    pub fn new(model: &RbfModel, metadata: ModelMetadata) -> Self {
        let bases = model
            .bases
            .iter()
            .map(|b| BasisRecord {
                weight: b.weight(),
                decays: b.decays().into(),
                center: b.center.into(),
                angles: [b.angles.alpha, b.angles.beta, b.angles.gamma],
                coeff_sqrt: b.coeff_sqrt,
                decay_sqrt: b.decay_sqrt.into(),
            })
            .collect();
        Self {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            metadata,
            bases,
        }
    }

    pub fn model(&self) -> RbfModel {
        RbfModel::new(
            self.bases
                .iter()
                .map(|b| EllipsoidRbf {
                    coeff_sqrt: b.coeff_sqrt,
                    decay_sqrt: Vec3::from(b.decay_sqrt),
                    center: Vec3::from(b.center),
                    angles: RotationAngles::new(b.angles[0], b.angles[1], b.angles[2]),
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.format != FORMAT_NAME {
            return Err(Error::Format(format!("unknown format {:?}", doc.format)));
        }
        if doc.version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported version {}",
                doc.version
            )));
        }
        for (i, b) in doc.bases.iter().enumerate() {
            let consistent = b.weight == b.coeff_sqrt * b.coeff_sqrt
                && (0..3).all(|p| b.decays[p] == b.decay_sqrt[p] * b.decay_sqrt[p]);
            if !consistent {
                return Err(Error::Format(format!(
                    "basis {i}: effective values do not match their square roots"
                )));
            }
        }
        Ok(doc)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Effective weights `c̃²`, one per line, after `# ` header lines.
pub fn write_weights<W: Write>(
    model: &RbfModel,
    mut out: W,
    header: &[String],
) -> std::io::Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    for b in &model.bases {
        writeln!(out, "{:e}", b.weight())?;
    }
    Ok(())
}
