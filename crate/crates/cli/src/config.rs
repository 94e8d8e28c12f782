//! Run configuration: JSON in, validated solver settings out.

use serde::Deserialize;
use timelaw::{CurveSpec, OracleConfig, RhsVariant, SolverConfig};

/// One weight or a sweep list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    Single(f64),
    Sweep(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Auto,
    Shoot,
    Oracle,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default)]
    pub method: Method,
    pub newton_tol: Option<f64>,
    pub max_newton_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub variant: Option<VariantName>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    Paper,
    Expanded,
}

impl From<VariantName> for RhsVariant {
    fn from(v: VariantName) -> Self {
        match v {
            VariantName::Paper => RhsVariant::PaperPrinted,
            VariantName::Expanded => RhsVariant::ExpandedFromFTerms,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv_path: String,
    pub report_path: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub curve: CurveSpec,
    pub alpha: Alpha,
    pub mass: f64,
    pub p0: f64,
    pub p1: f64,
    pub n: usize,
    #[serde(default)]
    pub solver: SolverSection,
    pub output: OutputSection,
}

impl RunConfig {
    /// All weights, ascending; rejects empty and non-positive entries.
    pub fn alphas(&self) -> Result<Vec<f64>, String> {
        let list = match &self.alpha {
            Alpha::Single(a) => vec![*a],
            Alpha::Sweep(v) => v.clone(),
        };
        if list.is_empty() {
            return Err("alpha list is empty".into());
        }
        for a in &list {
            if !(*a > 0.0) || !a.is_finite() {
                return Err(format!("alpha must be positive and finite, got {a}"));
            }
        }
        let mut sorted = list;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(sorted)
    }

    pub fn single_alpha(&self) -> Result<f64, String> {
        match &self.alpha {
            Alpha::Single(a) => {
                if !(*a > 0.0) || !a.is_finite() {
                    Err(format!("alpha must be positive and finite, got {a}"))
                } else {
                    Ok(*a)
                }
            }
            Alpha::Sweep(_) => Err("this command expects a single alpha; use `sweep` for lists".into()),
        }
    }

    /// Solver config for one weight, with the optional CLI variant override.
    pub fn solver_config(&self, alpha: f64, cli_variant: Option<VariantName>) -> SolverConfig {
        let mut cfg = SolverConfig::new(alpha, self.mass, self.p0, self.p1, self.n);
        if let Some(t) = self.solver.newton_tol {
            cfg.newton_tol = t;
        }
        if let Some(i) = self.solver.max_newton_iters {
            cfg.max_newton_iters = i;
        }
        if let Some(v) = cli_variant.or(self.solver.variant) {
            cfg.variant = v.into();
        }
        cfg
    }

    pub fn oracle_config(&self) -> OracleConfig {
        let mut cfg = OracleConfig::with_n(self.n.max(200));
        if let Some(t) = self.solver.grad_tol {
            cfg.grad_tol = t;
        }
        if let Some(i) = self.solver.max_iters {
            cfg.max_iters = i;
        }
        cfg
    }
}
