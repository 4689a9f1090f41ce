use serde::{Deserialize, Serialize};

use super::{extract_isosurface, hausdorff, DEFAULT_SAMPLES_PER_TRIANGLE};
use crate::field::{Aabb, ScalarField};
use crate::Result;

/// Shape-preservation metrics between an original and a fitted surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    #[serde(rename = "A_original")]
    pub area_original: f64,
    #[serde(rename = "A_our")]
    pub area_fitted: f64,
    #[serde(rename = "Error_A")]
    pub area_error: f64,
    #[serde(rename = "V_original")]
    pub volume_original: f64,
    #[serde(rename = "V_our")]
    pub volume_fitted: f64,
    #[serde(rename = "Error_V")]
    pub volume_error: f64,
    #[serde(rename = "H")]
    pub hausdorff: f64,
}

/// Meshes both fields on the same grid and measures how far apart they are.
pub fn compare_surfaces<A, B>(
    original: &A,
    fitted: &B,
    bbox: &Aabb,
    spacing: f64,
    isovalue: f64,
) -> Result<SurfaceReport>
where
    A: ScalarField + ?Sized,
    B: ScalarField + ?Sized,
{
    let mesh_a = extract_isosurface(original, bbox, spacing, isovalue)?;
    let mesh_b = extract_isosurface(fitted, bbox, spacing, isovalue)?;
    let (area_original, area_fitted) = (mesh_a.area(), mesh_b.area());
    let (volume_original, volume_fitted) = (mesh_a.volume(), mesh_b.volume());
    Ok(SurfaceReport {
        area_original,
        area_fitted,
        area_error: (area_fitted - area_original).abs() / area_original,
        volume_original,
        volume_fitted,
        volume_error: (volume_fitted - volume_original).abs() / volume_original,
        hausdorff: hausdorff(&mesh_a, &mesh_b, DEFAULT_SAMPLES_PER_TRIANGLE)?,
    })
}

/// Surviving basis functions per atom.
pub fn sparse_ratio(n_erbf: usize, n_atom: usize) -> f64 {
    n_erbf as f64 / n_atom as f64
}
