#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{rngs::StdRng, Rng};
use sparse_gauss::model::ObjectiveWeights;
use sparse_gauss::pqr::read_pqr;
use sparse_gauss::{ConstraintSet, EllipsoidRbf, Molecule, RbfModel, RotationAngles, Vec3};

pub fn diala() -> Molecule {
    read_pqr(concat!(env!("CARGO_MANIFEST_DIR"), "/data/diala.pqr"))
        .expect("bundled molecule parses")
}

pub fn random_point(rng: &mut StdRng, half: f64) -> Vec3 {
    Vec3::new(
        rng.gen_range(-half..half),
        rng.gen_range(-half..half),
        rng.gen_range(-half..half),
    )
}

pub fn random_basis(rng: &mut StdRng) -> EllipsoidRbf {
    EllipsoidRbf {
        coeff_sqrt: rng.gen_range(0.3..2.0),
        decay_sqrt: Vec3::new(
            rng.gen_range(0.3..1.2),
            rng.gen_range(0.3..1.2),
            rng.gen_range(0.3..1.2),
        ),
        center: random_point(rng, 2.0),
        angles: RotationAngles::new(
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
        ),
    }
}

/// `w_s Σ (φ̃ - t)² + w_l E_l1` evaluated directly from packed parameters.
pub fn objective(x: &[f64], n: usize, constraints: &ConstraintSet, w: ObjectiveWeights) -> f64 {
    let model = RbfModel::unpack(x, n).unwrap();
    let es: f64 = constraints
        .points()
        .iter()
        .zip(constraints.targets())
        .map(|(p, t)| (model.eval(p) - t).powi(2))
        .sum();
    w.accuracy * es + w.sparse * model.l1_energy()
}

/// Central differences of [`objective`] with step `h`.
pub fn fd_gradient(
    model: &RbfModel,
    constraints: &ConstraintSet,
    w: ObjectiveWeights,
    h: f64,
) -> Vec<f64> {
    let x = model.pack();
    let n = model.len();
    (0..x.len())
        .map(|j| {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[j] += h;
            minus[j] -= h;
            (objective(&plus, n, constraints, w) - objective(&minus, n, constraints, w)) / (2.0 * h)
        })
        .collect()
}

/// Largest componentwise `|a - b| / max(|a|, |b|)`; pairs with both entries
/// below `floor` in magnitude are compared absolutely against `floor`.
pub fn max_relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Rounding noise of a central difference of a sum of magnitude `f` at step `h`.
pub fn fd_noise(f: f64, h: f64) -> f64 {
    8.0 * f64::EPSILON * f.abs().max(1.0) / h
}
