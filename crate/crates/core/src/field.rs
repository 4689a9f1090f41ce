//! The target Gaussian field `φ(x) = Σ_i exp(-d (|x - x_i|² - r_i²))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pqr::{Atom, Molecule};
use crate::{Error, Result, Vec3};

/// Kernel exponents below this are dropped when the cutoff is enabled.
pub const KERNEL_CUTOFF_EXPONENT: f64 = -30.0;

/// Anything that can be sampled pointwise: the target field, a fitted model.
pub trait ScalarField: Sync {
    fn value(&self, point: &Vec3) -> f64;

    fn values(&self, points: &[Vec3]) -> Vec<f64> {
        points.par_iter().map(|p| self.value(p)).collect()
    }
}

impl<F: Fn(&Vec3) -> f64 + Sync> ScalarField for F {
    fn value(&self, point: &Vec3) -> f64 {
        self(point)
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self {
            min: min.into(),
            max: max.into(),
        }
    }

    pub fn cube(half: f64) -> Self {
        Self::new(Vec3::repeat(-half), Vec3::repeat(half))
    }

    pub fn min(&self) -> Vec3 {
        Vec3::from(self.min)
    }

    pub fn max(&self) -> Vec3 {
        Vec3::from(self.max)
    }

    pub fn extent(&self) -> Vec3 {
        self.max() - self.min()
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    pub fn contains_strictly(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] > self.min[a] && p[a] < self.max[a])
    }
}

/// Box holding every atom sphere inflated by `padding`.
pub fn bounding_box(molecule: &Molecule, padding: f64) -> Aabb {
    assert!(padding >= 0.0, "padding must be non-negative");
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for a in &molecule.atoms {
        let r = Vec3::repeat(a.radius + padding);
        lo = lo.inf(&(a.center - r));
        hi = hi.sup(&(a.center + r));
    }
    Aabb::new(lo, hi)
}

/// Largest atom radius plus 3 Å, so the whole `|φ - c| <= 1` band stays inside the grid.
pub fn default_padding(molecule: &Molecule) -> f64 {
    molecule.max_radius() + 3.0
}

#[derive(Debug, Clone, Copy)]
struct Kernel {
    center: Vec3,
    radius_sq: f64,
}

#[derive(Debug, Clone)]
pub struct GaussianField {
    kernels: Vec<Kernel>,
    decay: f64,
    isovalue: f64,
    cutoff: bool,
}

impl GaussianField {
    pub fn new(atoms: &[Atom], decay: f64, isovalue: f64) -> Result<Self> {
        if !(decay > 0.0 && decay.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "decay must be positive, got {decay}"
            )));
        }
        if !(isovalue > 0.0 && isovalue.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "isovalue must be positive, got {isovalue}"
            )));
        }
        let kernels = atoms
            .iter()
            .map(|a| Kernel {
                center: a.center,
                radius_sq: a.radius * a.radius,
            })
            .collect();
        Ok(Self {
            kernels,
            decay,
            isovalue,
            cutoff: false,
        })
    }

    pub fn from_molecule(molecule: &Molecule, decay: f64, isovalue: f64) -> Result<Self> {
        Self::new(&molecule.atoms, decay, isovalue)
    }

    /// Skip kernels whose exponent is below [`KERNEL_CUTOFF_EXPONENT`]. Approximate.
    pub fn with_cutoff(mut self, enabled: bool) -> Self {
        self.cutoff = enabled;
        self
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn isovalue(&self) -> f64 {
        self.isovalue
    }

    pub fn atom_count(&self) -> usize {
        self.kernels.len()
    }

    pub fn eval(&self, point: &Vec3) -> f64 {
        let d = self.decay;
        let mut sum = 0.0;
        for k in &self.kernels {
            let exponent = -d * ((point - k.center).norm_squared() - k.radius_sq);
            if self.cutoff && exponent < KERNEL_CUTOFF_EXPONENT {
                continue;
            }
            sum += exponent.exp();
        }
        sum
    }

    /// Elementwise [`eval`](Self::eval), order preserved.
    pub fn eval_batch(&self, points: &[Vec3]) -> Vec<f64> {
        points.par_iter().map(|p| self.eval(p)).collect()
    }
}

impl ScalarField for GaussianField {
    fn value(&self, point: &Vec3) -> f64 {
        self.eval(point)
    }
}
