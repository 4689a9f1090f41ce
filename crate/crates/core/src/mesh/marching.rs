use std::collections::HashMap;

use rayon::prelude::*;

use super::tables::{CORNER_OFFSETS, EDGE_CORNERS, EDGE_TABLE, TRI_TABLE};
use super::TriMesh;
use crate::field::{Aabb, ScalarField};
use crate::{Error, Result, Vec3};

/// Marching-cubes triangulation of `{p : field(p) = isovalue}`.
///
/// Nodes sit at `box.min + i·spacing` up to the first node at or past
/// `box.max`. Vertices are linear interpolants along cut cell edges and are
/// shared between neighbouring cells, so interior surface patches come out
/// watertight. Triangles face toward decreasing field values.
pub fn extract_isosurface<F: ScalarField + ?Sized>(
    field: &F,
    bbox: &Aabb,
    spacing: f64,
    isovalue: f64,
) -> Result<TriMesh> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    let origin = bbox.min();
    let extent = bbox.extent();
    let mut cells = [0usize; 3];
    for axis in 0..3 {
        if extent[axis].is_nan() || extent[axis] <= 0.0 {
            return Err(Error::DegenerateBox { axis });
        }
        cells[axis] = ((extent[axis] / spacing) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    }
    let [nx, ny, nz] = [cells[0] + 1, cells[1] + 1, cells[2] + 1];
    let node = |i: usize, j: usize, k: usize| {
        origin + Vec3::new(i as f64 * spacing, j as f64 * spacing, k as f64 * spacing)
    };
    let index = |i: usize, j: usize, k: usize| (i * ny + j) * nz + k;

    let values: Vec<f64> = (0..nx)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut slab = Vec::with_capacity(ny * nz);
            for j in 0..ny {
                for k in 0..nz {
                    slab.push(field.value(&node(i, j, k)));
                }
            }
            slab
        })
        .collect();

    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    // keyed by (lower node index, axis) of the cut grid edge
    let mut edge_vertex: HashMap<(usize, usize), usize> = HashMap::new();

    for i in 0..cells[0] {
        for j in 0..cells[1] {
            for k in 0..cells[2] {
                let corner = |c: usize| {
                    let o = CORNER_OFFSETS[c];
                    (i + o[0], j + o[1], k + o[2])
                };
                let mut case = 0usize;
                for c in 0..8 {
                    let (a, b, d) = corner(c);
                    if values[index(a, b, d)] < isovalue {
                        case |= 1 << c;
                    }
                }
                if EDGE_TABLE[case] == 0 {
                    continue;
                }

                let mut cut = [usize::MAX; 12];
                for (e, slot) in cut.iter_mut().enumerate() {
                    if EDGE_TABLE[case] & (1 << e) == 0 {
                        continue;
                    }
                    let (mut p, mut q) = (corner(EDGE_CORNERS[e][0]), corner(EDGE_CORNERS[e][1]));
                    if (q.0, q.1, q.2) < (p.0, p.1, p.2) {
                        std::mem::swap(&mut p, &mut q);
                    }
                    let axis = if p.0 != q.0 {
                        0
                    } else if p.1 != q.1 {
                        1
                    } else {
                        2
                    };
                    let key = (index(p.0, p.1, p.2), axis);
                    *slot = *edge_vertex.entry(key).or_insert_with(|| {
                        let (vp, vq) = (values[index(p.0, p.1, p.2)], values[index(q.0, q.1, q.2)]);
                        let t = (isovalue - vp) / (vq - vp);
                        let (a, b) = (node(p.0, p.1, p.2), node(q.0, q.1, q.2));
                        vertices.push(a + (b - a) * t);
                        vertices.len() - 1
                    });
                }

                for tri in TRI_TABLE[case].chunks(3) {
                    if tri[0] < 0 {
                        break;
                    }
                    let (a, b, c) = (
                        cut[tri[0] as usize],
                        cut[tri[1] as usize],
                        cut[tri[2] as usize],
                    );
                    // table winding faces toward the below-isovalue corners; keep that
                    triangles.push([a, b, c]);
                }
            }
        }
    }

    if triangles.is_empty() {
        return Err(Error::EmptyMesh { isovalue });
    }
    Ok(TriMesh::new(vertices, triangles))
}
