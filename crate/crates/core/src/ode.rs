//! The reduced first-order quasilinear system for the stationary time law,
//! printed special-case forms used as cross-checks, and the closed-form
//! straight-line law.

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, REGULARITY_THRESHOLD};
use crate::cost::StateVector;
use crate::error::{Error, Result};

/// Selects the quartic-rate coefficient W of the reduced equation.
///
/// `PaperPrinted` uses W = V + 4U as published; `ExpandedFromFTerms` uses
/// W = V, the coefficient a direct expansion of the stationarity equation
/// from the f-terms produces. The two coincide whenever U = 0 (line, circle,
/// parabola); they differ on the ellipse, where the expanded form is the one
/// consistent with the variational derivation and the transcription oracle.
/// The shipped default is `ExpandedFromFTerms`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsVariant {
    PaperPrinted,
    #[default]
    ExpandedFromFTerms,
}

impl RhsVariant {
    pub fn label(&self) -> &'static str {
        match self {
            RhsVariant::PaperPrinted => "paper",
            RhsVariant::ExpandedFromFTerms => "expanded",
        }
    }
}

/// Right-hand side of the reduced system:
/// zdot = (z1, z2, z3, z3dot) with
/// z3dot = z2/(am) + S z1^2/(am G) - (S/G)(4 z1 z3 + 3 z2^2)
///         - (6T/G) z1^2 z2 - (W/G) z1^4.
pub fn rhs(
    curve: &dyn Curve,
    z: &StateVector,
    alpha: f64,
    mass: f64,
    variant: RhsVariant,
) -> Result<[f64; 4]> {
    if !(alpha > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha and mass must be positive, got alpha = {alpha}, mass = {mass}"
        )));
    }
    let gc = curve.derivatives(z.z0).geometric_coefficients();
    if gc.g < REGULARITY_THRESHOLD {
        return Err(Error::SingularParameterization { p: z.z0, g: gc.g });
    }
    let am = alpha * mass;
    let w = match variant {
        RhsVariant::PaperPrinted => gc.v + 4.0 * gc.u,
        RhsVariant::ExpandedFromFTerms => gc.v,
    };
    let z1sq = z.z1 * z.z1;
    let z3dot = z.z2 / am + gc.s * z1sq / (am * gc.g)
        - (gc.s / gc.g) * (4.0 * z.z1 * z.z3 + 3.0 * z.z2 * z.z2)
        - (6.0 * gc.t / gc.g) * z1sq * z.z2
        - (w / gc.g) * z1sq * z1sq;
    Ok([z.z1, z.z2, z.z3, z3dot])
}

/// Curve kinds with a literally printed special-case reduced equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialKind {
    Line,
    Circle,
}

/// The printed special cases, used only to cross-check [`rhs`]:
/// line: z3dot = z2/(am); circle: z3dot = z2/(am) + 6 z1^2 z2.
pub fn printed_special_rhs(kind: SpecialKind, z: &StateVector, alpha: f64, mass: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidParameter("alpha and mass must be positive".into()));
    }
    let am = alpha * mass;
    Ok(match kind {
        SpecialKind::Line => z.z2 / am,
        SpecialKind::Circle => z.z2 / am + 6.0 * z.z1 * z.z1 * z.z2,
    })
}

/// Closed-form rest-to-rest law on a straight path:
/// p(t) = A sinh(gamma t) + B cosh(gamma t) + C t + D.
#[derive(Debug, Clone)]
pub struct LineLaw {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub delta: f64,
    /// A + B and B - A, kept separately for cancellation-free evaluation of
    /// the hyperbolic part as (P e^{gt} + M e^{-gt})/2.
    plus: f64,
    minus: f64,
}

/// cosh(g) - 1 without cancellation for small g.
fn coshm1(g: f64) -> f64 {
    let s = (0.5 * g).sinh();
    2.0 * s * s
}

/// Build the closed-form line law for boundary values p0, p1.
pub fn line_analytic(p0: f64, p1: f64, alpha: f64, mass: f64) -> Result<LineLaw> {
    if !(alpha > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha and mass must be positive, got alpha = {alpha}, mass = {mass}"
        )));
    }
    let gamma = 1.0 / (alpha * mass).sqrt();
    let sinh = gamma.sinh();
    let delta = 2.0 * coshm1(gamma) - gamma * sinh;
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "degenerate line-law denominator: delta = {delta} at gamma = {gamma}"
        )));
    }
    let dp = p1 - p0;
    let a = dp * sinh / delta;
    let b = dp * (1.0 - gamma.cosh()) / delta;
    let c = -a * gamma;
    let d = p0 - b;
    // A+B = dp (1 - e^{-gamma})/delta, B-A = -dp expm1(gamma)/delta
    let plus = dp * (-(-gamma).exp_m1()) / delta;
    let minus = -dp * gamma.exp_m1() / delta;
    Ok(LineLaw { gamma, a, b, c, d, delta, plus, minus })
}

impl LineLaw {
    /// p(t)
    pub fn p(&self, t: f64) -> f64 {
        let (ep, em) = ((self.gamma * t).exp(), (-self.gamma * t).exp());
        0.5 * (self.plus * ep + self.minus * em) + self.c * t + self.d
    }

    /// dp/dt
    pub fn dp(&self, t: f64) -> f64 {
        let (ep, em) = ((self.gamma * t).exp(), (-self.gamma * t).exp());
        0.5 * self.gamma * (self.plus * ep - self.minus * em) + self.c
    }

    /// d2p/dt2
    pub fn ddp(&self, t: f64) -> f64 {
        let (ep, em) = ((self.gamma * t).exp(), (-self.gamma * t).exp());
        0.5 * self.gamma * self.gamma * (self.plus * ep + self.minus * em)
    }

    /// d3p/dt3
    pub fn dddp(&self, t: f64) -> f64 {
        let (ep, em) = ((self.gamma * t).exp(), (-self.gamma * t).exp());
        0.5 * self.gamma.powi(3) * (self.plus * ep - self.minus * em)
    }

    /// d4p/dt4 (equals gamma^2 * ddp)
    pub fn fourth_at(&self, t: f64) -> f64 {
        self.gamma * self.gamma * self.ddp(t)
    }

    /// Full state at t.
    pub fn state_at(&self, t: f64) -> StateVector {
        StateVector::new(self.p(t), self.dp(t), self.ddp(t), self.dddp(t))
    }

    /// Worst boundary-condition violation of the closed form.
    pub fn boundary_residual(&self, p0: f64, p1: f64) -> f64 {
        (self.p(0.0) - p0)
            .abs()
            .max((self.p(1.0) - p1).abs())
            .max(self.dp(0.0).abs())
            .max(self.dp(1.0).abs())
    }
}
