//! Optimal rest-to-rest time laws along planar parametric paths.
//!
//! Given a planar curve (x(p), y(p)) and boundary parameter values, the crate
//! computes the law p(t) on normalized time \[0,1\] that minimizes the weighted
//! sum of kinetic energy and squared inertia force,
//!
//! ```text
//! J = m/2 * int (xdot^2 + ydot^2) dt + alpha m^2 / 2 * int (xddot^2 + yddot^2) dt,
//! ```
//!
//! with rest-to-rest boundary conditions p(0) = p0, p(1) = p1, pdot(0) =
//! pdot(1) = 0. Two independent routes are provided and cross-checked:
//!
//! * [`shoot::solve`] reduces the stationarity condition to a fourth-order
//!   quasilinear system and solves the boundary value problem by single
//!   shooting (Newton on the unknown initial accelerations), falling back to
//!   oracle-seeded shooting when the smoothstep seed cannot be integrated;
//! * [`oracle::oracle_minimize`] minimizes the discretized functional
//!   directly over nodal values of the law.
//!
//! Larger `alpha` buys smoother motion: kinetic energy rises, the inertia
//! measure falls.

pub mod cost;
pub mod curve;
mod discrete;
pub mod error;
pub mod ode;
pub mod oracle;
pub mod shoot;

pub use cost::{
    chain_kinematics, discrete_gradient, el_residual, evaluate_cost, f_terms, rms,
    states_from_law, CostBreakdown, FTerms, Kinematics, StateVector, TimeLaw,
};
pub use curve::{
    eval_derivatives, geometric_coefficients, make_curve, validate_derivatives, Curve, CurveModel,
    CurveSpec, DerivativeTable, GeometricCoefficients, ValidationReport,
};
pub use error::{Error, Result};
pub use ode::{line_analytic, printed_special_rhs, rhs, LineLaw, RhsVariant, SpecialKind};
pub use oracle::{discretize_cost, oracle_minimize, OracleConfig, OracleOutcome, OracleSolution};
pub use shoot::{
    initial_guess, integrate_ivp, seeds_from_law, shoot, solve, solve_oracle_only, SolutionReport,
    SolvePath, SolverConfig, Trajectory,
};
