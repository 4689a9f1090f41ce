use clap::Args;
use sparse_gauss::optimizer::LineSearchParams;
use sparse_gauss::OptimizerConfig;

/// Parameters of the Gaussian surface `φ = c`.
#[derive(Args, Debug, Clone, Copy)]
pub struct FieldArgs {
    /// Gaussian decay rate d; defaults to the model's value, else 0.5.
    #[arg(long)]
    pub decay: Option<f64>,
    /// Isovalue c; defaults to the model's value, else 1.0.
    #[arg(long)]
    pub isovalue: Option<f64>,
}

pub const DEFAULT_DECAY: f64 = 0.5;
pub const DEFAULT_ISOVALUE: f64 = 1.0;

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    pub pqr: String,
    #[arg(long, default_value_t = DEFAULT_DECAY)]
    pub decay: f64,
    #[arg(long, default_value_t = DEFAULT_ISOVALUE)]
    pub isovalue: f64,
    /// Constraint points satisfy |φ - c| <= band.
    #[arg(long, default_value_t = 1.0)]
    pub band: f64,
    #[arg(long, default_value_t = 1.0)]
    pub constraint_spacing: f64,
    #[arg(long, default_value_t = 8000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 6000)]
    pub sparse_iter: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub prune_tol: f64,
    #[arg(long, default_value_t = 20)]
    pub prune_interval: usize,
    /// Floor on the accuracy weight w_s.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Max pointwise error above which a step is pure accuracy.
    #[arg(long, default_value_t = 0.5)]
    pub error_cap: f64,
    /// Fixed-order reductions, so reruns produce identical files.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long, default_value = "out")]
    pub out: String,
}

impl FitArgs {
    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            max_iter: self.max_iter,
            sparse_iter: self.sparse_iter,
            prune_tol: self.prune_tol,
            prune_interval: self.prune_interval,
            epsilon_floor: self.epsilon,
            max_error_cap: self.error_cap,
            line_search: LineSearchParams::default(),
            deterministic: self.deterministic,
        }
    }

    /// Everything that influences the result. Output location and thread
    /// count are left out so they cannot change file contents.
    pub fn effective(&self) -> Vec<(String, String)> {
        let ls = LineSearchParams::default();
        let pairs: [(&str, String); 17] = [
            ("input", self.pqr.clone()),
            ("decay", self.decay.to_string()),
            ("isovalue", self.isovalue.to_string()),
            ("band", self.band.to_string()),
            ("constraint_spacing", self.constraint_spacing.to_string()),
            ("max_iter", self.max_iter.to_string()),
            ("sparse_iter", self.sparse_iter.to_string()),
            ("prune_tol", self.prune_tol.to_string()),
            ("prune_interval", self.prune_interval.to_string()),
            ("epsilon", self.epsilon.to_string()),
            ("error_cap", self.error_cap.to_string()),
            ("armijo_c1", ls.c1.to_string()),
            ("armijo_shrink", ls.shrink.to_string()),
            ("initial_step", ls.initial_step.to_string()),
            ("step_growth", ls.growth.to_string()),
            ("max_backtracks", ls.max_backtracks.to_string()),
            ("deterministic", self.deterministic.to_string()),
        ];
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

pub fn header_lines(pairs: &[(String, String)]) -> Vec<String> {
    pairs.iter().map(|(k, v)| format!("{k} = {v}")).collect()
}
