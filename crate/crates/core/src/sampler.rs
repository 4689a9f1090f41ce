//! Uniform grid over the bounding box and selection of constrained points.

use std::io::Write;

use rayon::prelude::*;

use crate::field::{Aabb, GaussianField, ScalarField};
use crate::{Error, Result, Vec3};

/// `counts[a]` intervals per axis; nodes run from index 0 to `counts[a]`
/// inclusive, so both box corners are grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub bbox: Aabb,
    pub counts: [usize; 3],
}

impl GridSpec {
    pub fn step(&self) -> Vec3 {
        let e = self.bbox.extent();
        Vec3::new(
            e.x / self.counts[0] as f64,
            e.y / self.counts[1] as f64,
            e.z / self.counts[2] as f64,
        )
    }

    /// Nodes per axis (`counts + 1`).
    pub fn nodes(&self) -> [usize; 3] {
        [self.counts[0] + 1, self.counts[1] + 1, self.counts[2] + 1]
    }

    pub fn node_count(&self) -> usize {
        self.nodes().iter().product()
    }

    /// `a + i·(b - a)/N_x` and likewise for y, z.
    pub fn point(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let lo = self.bbox.min;
        let hi = self.bbox.max;
        let n = self.counts;
        Vec3::new(
            lo[0] + i as f64 * (hi[0] - lo[0]) / n[0] as f64,
            lo[1] + j as f64 * (hi[1] - lo[1]) / n[1] as f64,
            lo[2] + k as f64 * (hi[2] - lo[2]) / n[2] as f64,
        )
    }
}

/// Interval counts `max(ceil(extent / spacing), 2)` per axis.
pub fn make_grid(bbox: Aabb, spacing: f64) -> Result<GridSpec> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    let extent = bbox.extent();
    let mut counts = [0usize; 3];
    for axis in 0..3 {
        let e = extent[axis];
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::DegenerateBox { axis });
        }
        // guard against 1.0000000000000002 intervals from rounding
        let n = (e / spacing * (1.0 - 1e-12)).ceil() as usize;
        counts[axis] = n.max(2);
    }
    Ok(GridSpec { bbox, counts })
}

/// Constrained points `y_k` with cached targets `φ(y_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    points: Vec<Vec3>,
    targets: Vec<f64>,
}

impl ConstraintSet {
    pub fn from_parts(points: Vec<Vec3>, targets: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument(
                "constraint set must not be empty".into(),
            ));
        }
        if points.len() != targets.len() {
            return Err(Error::InvalidArgument(format!(
                "{} points but {} targets",
                points.len(),
                targets.len()
            )));
        }
        Ok(Self { points, targets })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Debug dump: `x,y,z,phi`, one point per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,z,phi")?;
        for (p, t) in self.points.iter().zip(&self.targets) {
            writeln!(out, "{},{},{},{}", p.x, p.y, p.z, t)?;
        }
        Ok(())
    }
}

/// Grid nodes with `|φ(p) - c| <= band`, in lexicographic `(i, j, k)` order.
pub fn select_constraints(
    field: &GaussianField,
    grid: &GridSpec,
    band: f64,
) -> Result<ConstraintSet> {
    select_constraints_for(field, field.isovalue(), grid, band)
}

/// [`select_constraints`] for an arbitrary field and isovalue.
pub fn select_constraints_for<F: ScalarField + ?Sized>(
    field: &F,
    c: f64,
    grid: &GridSpec,
    band: f64,
) -> Result<ConstraintSet> {
    if band.is_nan() || band <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "band must be positive, got {band}"
        )));
    }
    let [nx, ny, nz] = grid.nodes();
    let slabs: Vec<Vec<(Vec3, f64)>> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let mut slab = Vec::new();
            for j in 0..ny {
                for k in 0..nz {
                    let p = grid.point(i, j, k);
                    let phi = field.value(&p);
                    if (phi - c).abs() <= band {
                        slab.push((p, phi));
                    }
                }
            }
            slab
        })
        .collect();
    let (points, targets): (Vec<Vec3>, Vec<f64>) = slabs.into_iter().flatten().unzip();
    if points.is_empty() {
        return Err(Error::EmptySelection { band });
    }
    Ok(ConstraintSet { points, targets })
}
