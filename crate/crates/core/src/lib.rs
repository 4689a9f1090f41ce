//! Sparse ellipsoid Gaussian RBF representation of Gaussian molecular surfaces.
//!
//! A Gaussian molecular surface is the level set `φ(x) = c` of
//! `φ(x) = Σ_i exp(-d (|x - x_i|² - r_i²))`, one kernel per atom. This crate
//! re-expresses `φ` as a much shorter sum of rotated anisotropic ("ellipsoid")
//! Gaussians found by an L1-regularised nonlinear least-squares fit, and
//! measures how well the surface shape survives (area, enclosed volume,
//! Hausdorff distance).
//!
//! Pipeline:
//!
//! 1. [`pqr::parse_pqr`] reads atoms.
//! 2. [`field::GaussianField`] evaluates the target `φ`.
//! 3. [`sampler`] picks near-surface grid points where the fit is enforced.
//! 4. [`init::init_model`] builds a model that reproduces `φ` exactly.
//! 5. [`optimizer::optimize`] prunes and reshapes bases.
//! 6. [`mesh`] triangulates either field and compares the two surfaces.

pub mod error;
pub mod field;
pub mod init;
pub mod mesh;
pub mod model;
pub mod optimizer;
pub mod persist;
pub mod pqr;
pub mod sampler;

pub use error::{Error, Result};
pub use field::{bounding_box, Aabb, GaussianField, ScalarField};
pub use init::init_model;
pub use mesh::{compare_surfaces, extract_isosurface, sparse_ratio, SurfaceReport, TriMesh};
pub use model::{EllipsoidRbf, RbfModel, RotationAngles};
pub use optimizer::{optimize, Fit, FitFailure, IterationTrace, OptimizerConfig};
pub use pqr::{parse_pqr, Atom, Molecule};
pub use sampler::{make_grid, select_constraints, select_constraints_for, ConstraintSet, GridSpec};

/// 3-vector in Å.
pub type Vec3 = nalgebra::Vector3<f64>;
