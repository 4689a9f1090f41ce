//! Initial model that reproduces the target field exactly.

use crate::model::{EllipsoidRbf, RbfModel, RotationAngles};
use crate::pqr::Atom;

/// One isotropic basis per atom: centre at the atom, zero angles, decays `d`
/// on every axis and weight `exp(d r²)`, so `φ̃ ≡ φ`.
pub fn init_model(atoms: &[Atom], decay: f64) -> RbfModel {
    assert!(decay > 0.0, "decay must be positive");
    let decay_sqrt = decay.sqrt();
    RbfModel::new(
        atoms
            .iter()
            .map(|a| EllipsoidRbf {
                coeff_sqrt: (decay * a.radius * a.radius).exp().sqrt(),
                decay_sqrt: crate::Vec3::repeat(decay_sqrt),
                center: a.center,
                angles: RotationAngles::default(),
            })
            .collect(),
    )
}
