//! Ellipsoid Gaussian RBF model in the squared-variable parameterisation.
//!
//! A basis is `c̃² · exp(-Σ_p d̃_p² u_p²)` with `u = R(α, β, γ)(y - x)`. The
//! optimiser works on the tilde variables directly, so the effective weight
//! `c̃²` and decays `d̃_p²` stay nonnegative without explicit constraints.

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::sampler::ConstraintSet;
use crate::{Error, Result, Vec3};

/// Parameters per basis in the packed layout.
pub const PARAMS_PER_BASIS: usize = 10;

/// Constraint points handled per reduction chunk. Fixed so that chunk
/// boundaries, and therefore floating-point sums, do not depend on thread count.
const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RotationAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl RotationAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }
}

fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

// Note the sign placement: -sin β sits in row 1, column 3.
fn rot_y(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c)
}

fn rot_z(g: f64) -> Matrix3<f64> {
    let (s, c) = g.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_x_prime(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(0.0, 0.0, 0.0, 0.0, -s, -c, 0.0, c, -s)
}

fn rot_y_prime(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(-s, 0.0, -c, 0.0, 0.0, 0.0, c, 0.0, -s)
}

fn rot_z_prime(g: f64) -> Matrix3<f64> {
    let (s, c) = g.sin_cos();
    Matrix3::new(-s, -c, 0.0, c, -s, 0.0, 0.0, 0.0, 0.0)
}

/// `R = R_z(γ) · R_y(β) · R_x(α)`.
pub fn rotation_matrix(angles: &RotationAngles) -> Matrix3<f64> {
    rot_z(angles.gamma) * rot_y(angles.beta) * rot_x(angles.alpha)
}

/// `(∂R/∂α, ∂R/∂β, ∂R/∂γ)`.
pub fn rotation_derivatives(angles: &RotationAngles) -> (Matrix3<f64>, Matrix3<f64>, Matrix3<f64>) {
    let (rx, ry, rz) = (rot_x(angles.alpha), rot_y(angles.beta), rot_z(angles.gamma));
    (
        rz * ry * rot_x_prime(angles.alpha),
        rz * rot_y_prime(angles.beta) * rx,
        rot_z_prime(angles.gamma) * ry * rx,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidRbf {
    /// `c̃`; the basis weight is `c̃²`.
    pub coeff_sqrt: f64,
    /// `d̃`; the decays along the rotated axes are `d̃_p²` (Å⁻²).
    pub decay_sqrt: Vec3,
    pub center: Vec3,
    pub angles: RotationAngles,
}

impl EllipsoidRbf {
    /// Isotropic Gaussian `weight · exp(-decay |y - center|²)`.
    pub fn isotropic(center: Vec3, weight: f64, decay: f64) -> Self {
        Self {
            coeff_sqrt: weight.sqrt(),
            decay_sqrt: Vec3::repeat(decay.sqrt()),
            center,
            angles: RotationAngles::default(),
        }
    }

    pub fn weight(&self) -> f64 {
        self.coeff_sqrt * self.coeff_sqrt
    }

    pub fn decays(&self) -> Vec3 {
        self.decay_sqrt.component_mul(&self.decay_sqrt)
    }

    pub fn eval(&self, point: &Vec3) -> f64 {
        Prepared::new(self).eval(point)
    }
}

/// Per-basis quantities hoisted out of the per-point loops.
#[derive(Debug, Clone)]
struct Prepared {
    coeff_sqrt: f64,
    weight: f64,
    decay_sqrt: Vec3,
    decays: Vec3,
    center: Vec3,
    rot: Matrix3<f64>,
}

impl Prepared {
    fn new(b: &EllipsoidRbf) -> Self {
        Self {
            coeff_sqrt: b.coeff_sqrt,
            weight: b.weight(),
            decay_sqrt: b.decay_sqrt,
            decays: b.decays(),
            center: b.center,
            rot: rotation_matrix(&b.angles),
        }
    }

    #[inline]
    fn eval(&self, point: &Vec3) -> f64 {
        let u = self.rot * (point - self.center);
        let q = u.dot(&u.component_mul(&self.decays));
        self.weight * (-q).exp()
    }
}

#[derive(Debug, Clone)]
struct PreparedWithDerivatives {
    base: Prepared,
    d_alpha: Matrix3<f64>,
    d_beta: Matrix3<f64>,
    d_gamma: Matrix3<f64>,
}

/// How reductions over constraint points are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Fixed chunking with an in-order combine: bit-identical across runs and thread counts.
    #[default]
    Deterministic,
    /// Work-stealing fold; summation order may vary between runs.
    Unordered,
}

/// Weights of the accuracy and sparsity terms in `f = w_s·E_s + w_l·E_l1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub sparse: f64,
    pub accuracy: f64,
}

impl ObjectiveWeights {
    pub fn new(accuracy: f64, sparse: f64) -> Self {
        Self { accuracy, sparse }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RbfModel {
    pub bases: Vec<EllipsoidRbf>,
}

impl RbfModel {
    pub fn new(bases: Vec<EllipsoidRbf>) -> Self {
        Self { bases }
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    fn prepared(&self) -> Vec<Prepared> {
        self.bases.iter().map(Prepared::new).collect()
    }

    pub fn eval(&self, point: &Vec3) -> f64 {
        self.bases.iter().map(|b| b.eval(point)).sum()
    }

    /// Model values at `points`, order preserved.
    pub fn eval_points(&self, points: &[Vec3]) -> Vec<f64> {
        let prep = self.prepared();
        points
            .par_iter()
            .map(|p| prep.iter().map(|b| b.eval(p)).sum())
            .collect()
    }

    /// `E_l1 = Σ_i c̃_i² + Σ_p Σ_i d̃_ip²`.
    pub fn l1_energy(&self) -> f64 {
        self.bases
            .iter()
            .map(|b| b.weight() + b.decays().sum())
            .sum()
    }

    /// Flat layout: `[c̃ | d̃₁ | d̃₂ | d̃₃ | centres xyz-interleaved | α | β | γ]`.
    pub fn pack(&self) -> Vec<f64> {
        let n = self.len();
        let mut x = vec![0.0; PARAMS_PER_BASIS * n];
        for (i, b) in self.bases.iter().enumerate() {
            x[i] = b.coeff_sqrt;
            for p in 0..3 {
                x[(1 + p) * n + i] = b.decay_sqrt[p];
                x[4 * n + 3 * i + p] = b.center[p];
            }
            x[7 * n + i] = b.angles.alpha;
            x[8 * n + i] = b.angles.beta;
            x[9 * n + i] = b.angles.gamma;
        }
        x
    }

    pub fn unpack(x: &[f64], basis_count: usize) -> Result<Self> {
        let n = basis_count;
        if x.len() != PARAMS_PER_BASIS * n {
            return Err(Error::ParameterLength {
                expected: PARAMS_PER_BASIS * n,
                got: x.len(),
            });
        }
        let bases = (0..n)
            .map(|i| EllipsoidRbf {
                coeff_sqrt: x[i],
                decay_sqrt: Vec3::new(x[n + i], x[2 * n + i], x[3 * n + i]),
                center: Vec3::new(x[4 * n + 3 * i], x[4 * n + 3 * i + 1], x[4 * n + 3 * i + 2]),
                angles: RotationAngles::new(x[7 * n + i], x[8 * n + i], x[9 * n + i]),
            })
            .collect();
        Ok(Self { bases })
    }

    /// Gradient of `w_s·E_s + w_l·E_l1` in the packed layout.
    pub fn objective_gradient(
        &self,
        constraints: &ConstraintSet,
        weights: ObjectiveWeights,
    ) -> Vec<f64> {
        let values = self.eval_points(constraints.points());
        let residuals: Vec<f64> = values
            .iter()
            .zip(constraints.targets())
            .map(|(v, t)| v - t)
            .collect();
        self.gradient_from_residuals(
            constraints.points(),
            &residuals,
            weights,
            Reduction::Deterministic,
        )
    }

    /// Same as [`objective_gradient`](Self::objective_gradient) with residuals
    /// `φ̃(y_k) - φ(y_k)` already known.
    pub fn gradient_from_residuals(
        &self,
        points: &[Vec3],
        residuals: &[f64],
        weights: ObjectiveWeights,
        reduction: Reduction,
    ) -> Vec<f64> {
        assert_eq!(
            points.len(),
            residuals.len(),
            "one residual per constraint point"
        );
        let n = self.len();
        let len = PARAMS_PER_BASIS * n;
        let prep: Vec<PreparedWithDerivatives> = self
            .bases
            .iter()
            .map(|b| {
                let (d_alpha, d_beta, d_gamma) = rotation_derivatives(&b.angles);
                PreparedWithDerivatives {
                    base: Prepared::new(b),
                    d_alpha,
                    d_beta,
                    d_gamma,
                }
            })
            .collect();

        let mut grad = if weights.accuracy == 0.0 {
            vec![0.0; len]
        } else {
            let chunk_grad = |(pts, res): (&[Vec3], &[f64])| {
                let mut acc = vec![0.0; len];
                accumulate_accuracy_gradient(&prep, pts, res, weights.accuracy, &mut acc);
                acc
            };
            match reduction {
                Reduction::Deterministic => {
                    let partials: Vec<Vec<f64>> = points
                        .par_chunks(CHUNK)
                        .zip(residuals.par_chunks(CHUNK))
                        .map(chunk_grad)
                        .collect();
                    let mut total = vec![0.0; len];
                    for part in &partials {
                        add_into(&mut total, part);
                    }
                    total
                }
                Reduction::Unordered => points
                    .par_chunks(CHUNK)
                    .zip(residuals.par_chunks(CHUNK))
                    .map(chunk_grad)
                    .reduce(
                        || vec![0.0; len],
                        |mut a, b| {
                            add_into(&mut a, &b);
                            a
                        },
                    ),
            }
        };

        if weights.sparse != 0.0 {
            let wl = weights.sparse;
            for (i, b) in self.bases.iter().enumerate() {
                grad[i] += wl * 2.0 * b.coeff_sqrt;
                for p in 0..3 {
                    grad[(1 + p) * n + i] += wl * 2.0 * b.decay_sqrt[p];
                }
            }
        }
        grad
    }
}

fn add_into(total: &mut [f64], part: &[f64]) {
    for (t, p) in total.iter_mut().zip(part) {
        *t += p;
    }
}

/// Adds `∂(w_s Σ_k r_k²)/∂θ` for the given points into `out`.
fn accumulate_accuracy_gradient(
    prep: &[PreparedWithDerivatives],
    points: &[Vec3],
    residuals: &[f64],
    accuracy_weight: f64,
    out: &mut [f64],
) {
    let n = prep.len();
    for (y, r) in points.iter().zip(residuals) {
        let s = 2.0 * accuracy_weight * r;
        if s == 0.0 {
            continue;
        }
        for (i, pb) in prep.iter().enumerate() {
            let b = &pb.base;
            let v = y - b.center;
            let u = b.rot * v;
            let du = u.component_mul(&b.decays);
            let e = (-u.dot(&du)).exp();
            if e == 0.0 {
                continue;
            }
            let g = b.weight * e;
            let sg2 = 2.0 * s * g;

            out[i] += 2.0 * s * b.coeff_sqrt * e;
            for p in 0..3 {
                out[(1 + p) * n + i] -= sg2 * b.decay_sqrt[p] * u[p] * u[p];
            }
            // ∂q/∂x = -2 Rᵀ D u
            let dx = b.rot.tr_mul(&du) * sg2;
            for a in 0..3 {
                out[4 * n + 3 * i + a] += dx[a];
            }
            out[7 * n + i] -= sg2 * du.dot(&(pb.d_alpha * v));
            out[8 * n + i] -= sg2 * du.dot(&(pb.d_beta * v));
            out[9 * n + i] -= sg2 * du.dot(&(pb.d_gamma * v));
        }
    }
}

impl ScalarField for RbfModel {
    fn value(&self, point: &Vec3) -> f64 {
        self.eval(point)
    }

    fn values(&self, points: &[Vec3]) -> Vec<f64> {
        self.eval_points(points)
    }
}
