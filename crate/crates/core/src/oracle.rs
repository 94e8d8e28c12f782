//! Direct transcription oracle: minimize the discretized cost over nodal law
//! values. Validates the Euler-Lagrange pipeline from the outside and serves
//! as the fallback solver.

use crate::cost::{CostBreakdown, TimeLaw};
use crate::curve::Curve;
use crate::discrete;
use crate::error::{Error, Result};

/// Oracle termination settings.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Grid cells (even, >= 200).
    pub n: usize,
    /// Infinity-norm gradient target.
    pub grad_tol: f64,
    /// Iteration budget.
    pub max_iters: usize,
    /// Initial relative step along the preconditioned direction.
    pub step_init: f64,
    /// Step growth on accepted decrease / shrink on rejection.
    pub step_grow: f64,
    pub step_shrink: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            grad_tol: 1e-8,
            max_iters: 200_000,
            step_init: 1.0,
            step_grow: 1.5,
            step_shrink: 0.5,
        }
    }
}

impl OracleConfig {
    pub fn with_n(n: usize) -> Self {
        Self { n, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 200 || self.n % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "oracle grid must be even and >= 200, got {}",
                self.n
            )));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidParameter("grad_tol must be positive".into()));
        }
        Ok(())
    }
}

/// How the minimization stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOutcome {
    /// Gradient infinity-norm reached `grad_tol`.
    GradTol,
    /// No accepted decrease possible at the smallest step: floating-point
    /// floor of the functional reached. The iterate is the numerical minimum.
    Stagnated,
    /// Iteration budget exhausted while still progressing.
    MaxIters,
}

/// Minimization result: the law, its discrete cost split, and diagnostics.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub law: TimeLaw,
    pub cost: CostBreakdown,
    pub iterations: usize,
    pub grad_inf: f64,
    pub outcome: OracleOutcome,
}

impl OracleSolution {
    pub fn converged(&self) -> bool {
        self.outcome != OracleOutcome::MaxIters
    }
}

/// Discrete cost of a nodal law plus the analytic gradient with respect to
/// the free interior nodes p_2..p_{n-2} (length n-3, other nodes fixed).
pub fn discretize_cost(
    curve: &dyn Curve,
    p_values: &[f64],
    alpha: f64,
    mass: f64,
) -> Result<(f64, Vec<f64>)> {
    let n = p_values.len().saturating_sub(1);
    if n < 4 {
        return Err(Error::GridTooShort { n, min: 4 });
    }
    let a = discrete::assemble(curve, p_values, alpha, mass)?;
    Ok((a.j, a.node_gradient[2..n - 1].to_vec()))
}

/// Gradient descent on the discretized functional, preconditioned by the
/// constant straight-line metric, with monotone step acceptance: accept on
/// decrease (grow the step), shrink on increase.
pub fn oracle_minimize(
    curve: &dyn Curve,
    p0: f64,
    p1: f64,
    alpha: f64,
    mass: f64,
    config: &OracleConfig,
) -> Result<OracleSolution> {
    config.validate()?;
    if !(alpha > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidParameter("alpha and mass must be positive".into()));
    }
    let n = config.n;
    let start = TimeLaw::smoothstep(p0, p1, n)?;
    minimize_from(curve, start, alpha, mass, config)
}

/// Same as [`oracle_minimize`] but starting from a given law (endpoints are
/// pinned to the law's own endpoints). Used for grid-cascade warm starts.
///
/// Internally the iteration runs on the mass-normalized functional J/m (same
/// minimizer), so configurations with equal alpha*mass products follow
/// bit-identical descent paths; `grad_inf` refers to that normalization.
pub fn minimize_from(
    curve: &dyn Curve,
    start: TimeLaw,
    alpha: f64,
    mass: f64,
    config: &OracleConfig,
) -> Result<OracleSolution> {
    let n = start.n();
    let mut p = start.values().to_vec();
    let am = alpha * mass;
    let metric = discrete::line_metric(n, am, 1.0).cholesky()?;
    let mut a = discrete::assemble(curve, &p, am, 1.0)?;
    let grad_inf =
        |g: &[f64]| g[1..n].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut step = config.step_init;
    let mut iterations = 0usize;
    let outcome = loop {
        let gi = grad_inf(&a.node_gradient);
        if gi <= config.grad_tol {
            break OracleOutcome::GradTol;
        }
        if iterations >= config.max_iters {
            break OracleOutcome::MaxIters;
        }
        let dir = metric.solve(&a.node_gradient[1..n]);
        let mut cand = p.clone();
        for (k, d) in dir.iter().enumerate() {
            cand[k + 1] -= step * d;
        }
        iterations += 1;
        match discrete::assemble(curve, &cand, am, 1.0) {
            Ok(ca) if ca.j < a.j => {
                debug_assert!(ca.j <= a.j);
                p = cand;
                a = ca;
                step = (step * config.step_grow).min(4.0);
            }
            _ => {
                step *= config.step_shrink;
                if step < 1e-16 {
                    break OracleOutcome::Stagnated;
                }
            }
        }
    };
    let grad_final = grad_inf(&a.node_gradient);
    let fin = discrete::assemble(curve, &p, alpha, mass)?;
    let law = TimeLaw::new(p)?;
    let cost = CostBreakdown::from_parts(fin.kinetic, fin.inertia_measure, alpha, mass);
    Ok(OracleSolution { law, cost, iterations, grad_inf: grad_final, outcome })
}
