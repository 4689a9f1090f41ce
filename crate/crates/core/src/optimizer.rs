//! Alternating sparsity/accuracy minimisation of
//! `f = w_s·E_s + w_l·E_l1` by gradient descent with backtracking line search.
//!
//! Each iteration: prune small bases (every `prune_interval` steps while in the
//! sparse phase), evaluate the model at the constrained points, pick adaptive
//! weights, override them with `(1, 0)` when the fit error exceeds the cap or
//! once the sparse phase is over, then take one Armijo step along `-∇f`.

use std::io::Write;

use rayon::prelude::*;

use crate::model::{ObjectiveWeights, RbfModel, Reduction};
use crate::sampler::ConstraintSet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    /// Armijo sufficient-decrease constant.
    pub c1: f64,
    pub shrink: f64,
    /// Trial step of the very first iteration.
    pub initial_step: f64,
    /// Later iterations start from the previous accepted step times this.
    pub growth: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            shrink: 0.5,
            initial_step: 1e-3,
            growth: 2.0,
            max_backtracks: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub max_iter: usize,
    /// Iterations of the sparse phase; afterwards only `E_s` is minimised.
    pub sparse_iter: usize,
    /// Bases with `|c̃| < prune_tol` are deleted.
    pub prune_tol: f64,
    pub prune_interval: usize,
    /// Lower bound on `w_s`.
    pub epsilon_floor: f64,
    /// Above this max pointwise error the step is pure accuracy.
    pub max_error_cap: f64,
    pub line_search: LineSearchParams,
    pub deterministic: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iter: 8000,
            sparse_iter: 6000,
            prune_tol: 1e-3,
            prune_interval: 20,
            epsilon_floor: 0.01,
            max_error_cap: 0.5,
            line_search: LineSearchParams::default(),
            deterministic: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.sparse_iter > self.max_iter {
            return bad("sparse_iter must not exceed max_iter");
        }
        if self.prune_interval == 0 {
            return bad("prune_interval must be at least 1");
        }
        let ls = &self.line_search;
        let positive = [
            self.prune_tol,
            self.epsilon_floor,
            self.max_error_cap,
            ls.c1,
            ls.initial_step,
            ls.growth,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return bad("tolerances and line-search constants must be positive");
        }
        if !(ls.shrink > 0.0 && ls.shrink < 1.0) || ls.c1 >= 1.0 {
            return bad("line search needs 0 < shrink < 1 and c1 < 1");
        }
        Ok(())
    }

    fn reduction(&self) -> Reduction {
        if self.deterministic {
            Reduction::Deterministic
        } else {
            Reduction::Unordered
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// Objective at the start of the iteration under the weights in force.
    pub f: f64,
    pub es: f64,
    pub el1: f64,
    pub ws: f64,
    pub wl: f64,
    pub nbasis: usize,
    /// Accepted step; 0 when no step was taken.
    pub tau: f64,
    /// Objective after the step, same weights.
    pub f_after: f64,
    pub max_error: f64,
    pub stalled: bool,
    pub pruned: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn stall_count(&self) -> usize {
        self.records.iter().filter(|r| r.stalled).count()
    }

    /// CSV `iter,f,Es,El1,ws,wl,nbasis,tau`, preceded by `# ` comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> std::io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "iter,f,Es,El1,ws,wl,nbasis,tau")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{:e},{},{:e}",
                r.iter, r.f, r.es, r.el1, r.ws, r.wl, r.nbasis, r.tau
            )?;
        }
        Ok(())
    }
}

fn residuals(values: &[f64], constraints: &ConstraintSet) -> Vec<f64> {
    values
        .iter()
        .zip(constraints.targets())
        .map(|(v, t)| v - t)
        .collect()
}

fn sum_squares(r: &[f64], reduction: Reduction) -> f64 {
    match reduction {
        Reduction::Deterministic => r.iter().map(|v| v * v).sum(),
        Reduction::Unordered => r.par_iter().map(|v| v * v).sum(),
    }
}

/// `(E_s, E_l1)`: squared fit error at the constraints and the L1 norm of the
/// effective weights and decays.
pub fn energy_terms(model: &RbfModel, constraints: &ConstraintSet) -> (f64, f64) {
    let values = model.eval_points(constraints.points());
    (
        sum_squares(&residuals(&values, constraints), Reduction::Deterministic),
        model.l1_energy(),
    )
}

/// `w_s = max(E_s/(E_s+E_l1), ε)`, `w_l = E_l1/(E_s+E_l1)`; `(ε, 0)` when both vanish.
pub fn adaptive_weights(es: f64, el1: f64, epsilon_floor: f64) -> ObjectiveWeights {
    let total = es + el1;
    if total == 0.0 {
        return ObjectiveWeights::new(epsilon_floor, 0.0);
    }
    ObjectiveWeights::new((es / total).max(epsilon_floor), el1 / total)
}

/// Drops bases with `|c̃| < tol`, keeping survivor order.
pub fn prune(model: &RbfModel, tol: f64) -> Result<RbfModel> {
    let kept: Vec<_> = model
        .bases
        .iter()
        .filter(|b| b.coeff_sqrt.abs() >= tol)
        .copied()
        .collect();
    if kept.is_empty() {
        return Err(Error::AllPruned { tol });
    }
    Ok(RbfModel::new(kept))
}

/// `max_k |φ̃(y_k) - φ(y_k)|`.
pub fn max_pointwise_error(model: &RbfModel, constraints: &ConstraintSet) -> f64 {
    let values = model.eval_points(constraints.points());
    max_abs(&residuals(&values, constraints))
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchOutcome {
    /// Accepted step, or 0 on stall.
    pub tau: f64,
    /// Objective at the accepted point (the starting value on stall).
    pub f_new: f64,
    pub backtracks: usize,
    pub stalled: bool,
}

/// Armijo backtracking along `-grad` starting from `tau0`.
///
/// Accepts the first `τ` with `f(x - τ∇f) <= f(x) - c₁ τ |∇f|²`. Non-finite
/// trial values count as failures.
pub fn line_search<F>(
    mut objective: F,
    x: &[f64],
    f0: f64,
    grad: &[f64],
    tau0: f64,
    params: &LineSearchParams,
) -> Result<LineSearchOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    let g2: f64 = grad.iter().map(|g| g * g).sum();
    if g2 == 0.0 {
        return Err(Error::InvalidArgument(
            "line search needs a nonzero gradient".into(),
        ));
    }
    let mut tau = tau0;
    let mut trial = vec![0.0; x.len()];
    for backtracks in 0..=params.max_backtracks {
        for ((t, xi), gi) in trial.iter_mut().zip(x).zip(grad) {
            *t = xi - tau * gi;
        }
        let f = objective(&trial);
        if f.is_finite() && f <= f0 - params.c1 * tau * g2 {
            return Ok(LineSearchOutcome {
                tau,
                f_new: f,
                backtracks,
                stalled: false,
            });
        }
        tau *= params.shrink;
    }
    Ok(LineSearchOutcome {
        tau: 0.0,
        f_new: f0,
        backtracks: params.max_backtracks,
        stalled: true,
    })
}

#[derive(Debug, Clone)]
pub struct Fit {
    pub model: RbfModel,
    pub trace: IterationTrace,
}

/// A run that aborted; carries everything computed up to the failure.
#[derive(Debug)]
pub struct FitFailure {
    pub error: Error,
    pub model: RbfModel,
    pub trace: IterationTrace,
}

impl std::fmt::Display for FitFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} iterations)", self.error, self.trace.len())
    }
}

impl std::error::Error for FitFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Runs the full iteration from `initial` against `constraints`.
pub fn optimize(
    initial: &RbfModel,
    constraints: &ConstraintSet,
    config: &OptimizerConfig,
) -> std::result::Result<Fit, Box<FitFailure>> {
    let fail = |error: Error, model: RbfModel, trace: IterationTrace| {
        Err(Box::new(FitFailure {
            error,
            model,
            trace,
        }))
    };
    if let Err(e) = config.validate() {
        return fail(e, initial.clone(), IterationTrace::default());
    }
    if initial.is_empty() {
        return fail(
            Error::InvalidArgument("initial model has no bases".into()),
            initial.clone(),
            IterationTrace::default(),
        );
    }

    let reduction = config.reduction();
    let points = constraints.points();
    let mut model = initial.clone();
    let mut trace = IterationTrace::default();
    // model values at the constraints, valid for the current `model`
    let mut cached: Option<Vec<f64>> = None;
    let mut last_tau: Option<f64> = None;

    for iter in 1..=config.max_iter {
        let sparse_phase = iter <= config.sparse_iter;

        let mut pruned = 0;
        if sparse_phase && iter % config.prune_interval == 0 {
            match prune(&model, config.prune_tol) {
                Ok(kept) => {
                    pruned = model.len() - kept.len();
                    if pruned > 0 {
                        model = kept;
                        cached = None;
                    }
                }
                Err(_) => {
                    return fail(Error::ModelCollapsed { iteration: iter }, model, trace);
                }
            }
        }

        let values = cached.take().unwrap_or_else(|| model.eval_points(points));
        let res = residuals(&values, constraints);
        let es = sum_squares(&res, reduction);
        let el1 = model.l1_energy();
        let max_error = max_abs(&res);

        let mut weights = adaptive_weights(es, el1, config.epsilon_floor);
        if max_error > config.max_error_cap {
            weights = ObjectiveWeights::new(1.0, 0.0);
        }
        if !sparse_phase {
            weights = ObjectiveWeights::new(1.0, 0.0);
        }

        let f = weights.accuracy * es + weights.sparse * el1;
        if !f.is_finite() {
            return fail(Error::NonFiniteObjective { iteration: iter }, model, trace);
        }
        let grad = model.gradient_from_residuals(points, &res, weights, reduction);
        if grad.iter().any(|g| !g.is_finite()) {
            return fail(Error::NonFiniteObjective { iteration: iter }, model, trace);
        }

        let mut record = IterationRecord {
            iter,
            f,
            es,
            el1,
            ws: weights.accuracy,
            wl: weights.sparse,
            nbasis: model.len(),
            tau: 0.0,
            f_after: f,
            max_error,
            stalled: false,
            pruned,
        };

        if grad.iter().all(|g| *g == 0.0) {
            // stationary (e.g. exact fit with w_l = 0): nothing to do
            cached = Some(values);
            trace.records.push(record);
            continue;
        }

        let x = model.pack();
        let n = model.len();
        let tau0 = last_tau
            .map(|t| t * config.line_search.growth)
            .unwrap_or(config.line_search.initial_step);
        let mut trial_values: Vec<f64> = Vec::new();
        let outcome = line_search(
            |trial: &[f64]| {
                let Ok(m) = RbfModel::unpack(trial, n) else {
                    return f64::NAN;
                };
                trial_values = m.eval_points(points);
                let r = residuals(&trial_values, constraints);
                weights.accuracy * sum_squares(&r, reduction) + weights.sparse * m.l1_energy()
            },
            &x,
            f,
            &grad,
            tau0,
            &config.line_search,
        )
        .expect("gradient checked nonzero");

        record.tau = outcome.tau;
        record.f_after = outcome.f_new;
        record.stalled = outcome.stalled;
        if outcome.stalled {
            cached = Some(values);
        } else {
            let stepped: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi - outcome.tau * gi)
                .collect();
            model = RbfModel::unpack(&stepped, n).expect("length preserved");
            cached = Some(trial_values);
            last_tau = Some(outcome.tau);
        }
        trace.records.push(record);
    }

    Ok(Fit { model, trace })
}
