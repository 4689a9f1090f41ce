//! Sample-based symmetric Hausdorff distance between triangle meshes.
//!
//! Each mesh contributes its vertices plus `k` points per triangle drawn from
//! a fixed low-discrepancy sequence; the point sets for `k` are a prefix of
//! those for `k + 1`. Distances from samples to the other mesh are exact
//! point-to-triangle distances, found through a uniform-grid index.

use rayon::prelude::*;

use super::TriMesh;
use crate::{Error, Result, Vec3};

pub const DEFAULT_SAMPLES_PER_TRIANGLE: usize = 10;

/// Exact Euclidean distance from `p` to the solid triangle `abc`.
///
/// Voronoi-region walk over vertices, edges and face. The face case uses the
/// plane distance, which stays accurate on sliver triangles.
pub fn point_triangle_distance(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (ap - ab * v).norm();
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (ap - ac * w).norm();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bp - (c - b) * w).norm();
    }
    let n = ab.cross(&ac);
    let area2 = n.norm();
    if area2 == 0.0 {
        // collinear corners: the triangle is its longest edge
        return segment_distance(p, a, b)
            .min(segment_distance(p, b, c))
            .min(segment_distance(p, a, c));
    }
    ap.dot(&n).abs() / area2
}

fn segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    };
    (p - (a + ab * t)).norm()
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut result = 0.0;
    let mut f = inv;
    while i > 0 {
        result += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    result
}

/// Vertices followed by `per_triangle` Halton points per triangle.
fn surface_samples(mesh: &TriMesh, per_triangle: usize) -> Vec<Vec3> {
    let mut out = mesh.vertices.clone();
    out.reserve(per_triangle * mesh.triangles.len());
    for t in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle(t);
        for s in 1..=per_triangle {
            let (mut u, mut v) = (radical_inverse(s, 2), radical_inverse(s, 3));
            if u + v > 1.0 {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            out.push(a + (b - a) * u + (c - a) * v);
        }
    }
    out
}

/// Uniform grid of triangle buckets.
struct TriangleIndex<'a> {
    mesh: &'a TriMesh,
    origin: Vec3,
    cell: f64,
    dims: [usize; 3],
    buckets: Vec<Vec<u32>>,
}

impl<'a> TriangleIndex<'a> {
    fn new(mesh: &'a TriMesh, lo: Vec3, hi: Vec3) -> Self {
        let extent = hi - lo;
        let volume = extent.x.max(1e-9) * extent.y.max(1e-9) * extent.z.max(1e-9);
        // about two triangles per cell
        let cell = (2.0 * volume / mesh.triangles.len().max(1) as f64)
            .cbrt()
            .max(extent.max() / 256.0)
            .max(1e-9);
        let dims = [0, 1, 2].map(|a| ((extent[a] / cell).floor() as usize + 1).max(1));
        let mut buckets = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        let mut index = Self {
            mesh,
            origin: lo,
            cell,
            dims,
            buckets: Vec::new(),
        };
        for t in 0..mesh.triangles.len() {
            let [a, b, c] = mesh.triangle(t);
            let (tlo, thi) = (a.inf(&b).inf(&c), a.sup(&b).sup(&c));
            let (l, h) = (index.cell_of(&tlo), index.cell_of(&thi));
            for i in l[0]..=h[0] {
                for j in l[1]..=h[1] {
                    for k in l[2]..=h[2] {
                        buckets[(i * dims[1] + j) * dims[2] + k].push(t as u32);
                    }
                }
            }
        }
        index.buckets = buckets;
        index
    }

    fn cell_of(&self, p: &Vec3) -> [usize; 3] {
        [0, 1, 2].map(|a| {
            let c = ((p[a] - self.origin[a]) / self.cell).floor();
            (c.max(0.0) as usize).min(self.dims[a] - 1)
        })
    }

    /// Distance from `p` (inside the indexed region) to the nearest triangle.
    fn distance(&self, p: &Vec3) -> f64 {
        let c = self.cell_of(p);
        let max_ring = *self.dims.iter().max().unwrap();
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            let lo = c.map(|v| v as isize - ring as isize);
            let hi = c.map(|v| v as isize + ring as isize);
            for i in lo[0].max(0)..=hi[0].min(self.dims[0] as isize - 1) {
                for j in lo[1].max(0)..=hi[1].min(self.dims[1] as isize - 1) {
                    for k in lo[2].max(0)..=hi[2].min(self.dims[2] as isize - 1) {
                        let on_shell = i == lo[0]
                            || i == hi[0]
                            || j == lo[1]
                            || j == hi[1]
                            || k == lo[2]
                            || k == hi[2];
                        if !on_shell {
                            continue;
                        }
                        let bucket = &self.buckets
                            [(i as usize * self.dims[1] + j as usize) * self.dims[2] + k as usize];
                        for &t in bucket {
                            let [a, b, cc] = self.mesh.triangle(t as usize);
                            best = best.min(point_triangle_distance(p, &a, &b, &cc));
                        }
                    }
                }
            }
            // anything unvisited lies at least `ring` whole cells away
            if best <= ring as f64 * self.cell {
                break;
            }
        }
        best
    }
}

fn bounds(meshes: &[&TriMesh]) -> (Vec3, Vec3) {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for m in meshes {
        for v in &m.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
    }
    let pad = Vec3::repeat(1e-9 * (hi - lo).max().max(1.0));
    (lo - pad, hi + pad)
}

/// `max_{p ∈ samples(from)} min_{q ∈ to} |p - q|`.
pub fn directed_hausdorff(
    from: &TriMesh,
    to: &TriMesh,
    samples_per_triangle: usize,
) -> Result<f64> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::InvalidArgument(
            "Hausdorff distance of an empty mesh".into(),
        ));
    }
    let (lo, hi) = bounds(&[from, to]);
    let index = TriangleIndex::new(to, lo, hi);
    let samples = surface_samples(from, samples_per_triangle);
    Ok(samples
        .par_iter()
        .map(|p| index.distance(p))
        .reduce(|| 0.0, f64::max))
}

/// Symmetric Hausdorff distance: the larger of the two directed distances.
pub fn hausdorff(a: &TriMesh, b: &TriMesh, samples_per_triangle: usize) -> Result<f64> {
    Ok(
        directed_hausdorff(a, b, samples_per_triangle)?.max(directed_hausdorff(
            b,
            a,
            samples_per_triangle,
        )?),
    )
}
