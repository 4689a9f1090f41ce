//! Triangle meshes of level sets and the shape metrics used to compare them.

mod compare;
mod hausdorff;
mod marching;
mod tables;

use std::collections::HashMap;
use std::io::Write;

pub use compare::{compare_surfaces, sparse_ratio, SurfaceReport};
pub use hausdorff::{
    directed_hausdorff, hausdorff, point_triangle_distance, DEFAULT_SAMPLES_PER_TRIANGLE,
};
pub use marching::extract_isosurface;

use crate::Vec3;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Self {
        debug_assert!(triangles.iter().flatten().all(|&i| i < vertices.len()));
        Self {
            vertices,
            triangles,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v + offset).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Axis-aligned unit cube `[0,1]³`, 12 outward-facing triangles.
    pub fn unit_cube() -> Self {
        let vertices = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        let triangles = vec![
            [0, 2, 1],
            [1, 2, 3], // z = 0
            [4, 5, 6],
            [5, 7, 6], // z = 1
            [0, 1, 4],
            [1, 5, 4], // y = 0
            [2, 6, 3],
            [3, 6, 7], // y = 1
            [0, 4, 2],
            [2, 4, 6], // x = 0
            [1, 3, 5],
            [3, 7, 5], // x = 1
        ];
        Self::new(vertices, triangles)
    }

    /// `½ Σ |(V₂ - V₁) × (V₃ - V₁)|`, Å².
    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle(t);
                (b - a).cross(&(c - a)).norm()
            })
            .sum::<f64>()
            * 0.5
    }

    /// Signed enclosed volume, positive for outward-facing triangles.
    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle(t);
                let centroid = (a + b + c) / 3.0;
                (b - a).cross(&(c - a)).dot(&centroid)
            })
            .sum::<f64>()
            / 6.0
    }

    /// Enclosed volume, Å³ (magnitude of the signed volume).
    pub fn volume(&self) -> f64 {
        self.signed_volume().abs()
    }

    /// Edges not shared by exactly one pair of oppositely oriented triangles.
    pub fn open_edges(&self) -> Vec<[usize; 2]> {
        let mut directed: HashMap<[usize; 2], i32> = HashMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                *directed.entry([t[e], t[(e + 1) % 3]]).or_default() += 1;
            }
        }
        let mut open: Vec<[usize; 2]> = directed
            .iter()
            .filter(|(&[a, b], &count)| count != 1 || directed.get(&[b, a]) != Some(&1))
            .map(|(&[a, b], _)| [a.min(b), a.max(b)])
            .collect();
        open.sort_unstable();
        open.dedup();
        open
    }

    /// Wavefront OBJ, 1-based indices, `# ` header lines first.
    pub fn write_obj<W: Write>(&self, mut out: W, header: &[String]) -> std::io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for t in &self.triangles {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }
}
