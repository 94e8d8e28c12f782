//! Planar parametric curves and their parameter derivatives to 4th order.
//!
//! The solvers only ever see a curve through [`Curve::derivatives`]: the five
//! derivatives of each coordinate at a parameter value. Built-in families are
//! hard-coded analytic formulas; arbitrary paths enter through the polynomial
//! family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of x'^2 + y'^2 the parameterization counts as singular.
pub const REGULARITY_THRESHOLD: f64 = 1e-12;

/// Serializable description of a curve, as accepted by configs.
///
/// Polynomial coefficients are listed lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CurveSpec {
    /// x = p, y = k p + b
    Line { k: f64, b: f64 },
    /// x = R cos p, y = R sin p
    Circle { #[serde(rename = "R")] r: f64 },
    /// x = p, y = k p^2 + b
    Parabola { k: f64, b: f64 },
    /// x = a cos p, y = b sin p
    Ellipse { a: f64, b: f64 },
    /// x(p), y(p) as polynomials in p
    Polynomial { x: Vec<f64>, y: Vec<f64> },
}

/// Coordinate values and parameter derivatives to order 4 at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeTable {
    /// x, x', x'', x''', x''''
    pub x: [f64; 5],
    /// y, y', y'', y''', y''''
    pub y: [f64; 5],
}

/// The six curve functionals the reduced equation is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricCoefficients {
    /// x'^2 + y'^2
    pub g: f64,
    /// x'x'' + y'y''
    pub s: f64,
    /// x''^2 + y''^2
    pub q: f64,
    /// x'x''' + y'y'''
    pub t: f64,
    /// x''x''' + y''y'''
    pub u: f64,
    /// x'x'''' + y'y''''
    pub v: f64,
}

/// Anything that can evaluate coordinate derivatives at a parameter value.
///
/// Implementations must be pure: the solvers evaluate from multiple contexts
/// and assume identical answers for identical arguments.
pub trait Curve: Sync {
    fn derivatives(&self, p: f64) -> DerivativeTable;
}

/// A validated, immutable curve. Evaluation domain is all of R; angles are not
/// normalized, so p1 = p0 + 2*pi traverses a full revolution.
#[derive(Debug, Clone)]
pub enum CurveModel {
    Line { k: f64, b: f64 },
    Circle { r: f64 },
    Parabola { k: f64, b: f64 },
    Ellipse { a: f64, b: f64 },
    Polynomial(PolynomialCurve),
}

/// Polynomial coordinates with precomputed derivative coefficient tables.
#[derive(Debug, Clone)]
pub struct PolynomialCurve {
    x: [Vec<f64>; 5],
    y: [Vec<f64>; 5],
}

impl PolynomialCurve {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x: derivative_tables(x), y: derivative_tables(y) }
    }
}

/// coeffs, then the coefficient vectors of the first four derivatives.
fn derivative_tables(coeffs: Vec<f64>) -> [Vec<f64>; 5] {
    let mut out: [Vec<f64>; 5] = [coeffs, vec![], vec![], vec![], vec![]];
    for k in 1..5 {
        let prev = &out[k - 1];
        let mut d = Vec::with_capacity(prev.len().saturating_sub(1));
        for (i, c) in prev.iter().enumerate().skip(1) {
            d.push(c * i as f64);
        }
        out[k] = d;
    }
    out
}

fn horner(coeffs: &[f64], p: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

/// Build a curve from its spec, rejecting degenerate parameters.
pub fn make_curve(spec: &CurveSpec) -> Result<CurveModel> {
    match spec {
        CurveSpec::Line { k, b } => {
            require_finite(&[*k, *b])?;
            Ok(CurveModel::Line { k: *k, b: *b })
        }
        CurveSpec::Circle { r } => {
            require_finite(&[*r])?;
            if *r <= 0.0 {
                return Err(Error::DegenerateCurve(format!("circle radius must be positive, got {r}")));
            }
            Ok(CurveModel::Circle { r: *r })
        }
        CurveSpec::Parabola { k, b } => {
            require_finite(&[*k, *b])?;
            Ok(CurveModel::Parabola { k: *k, b: *b })
        }
        CurveSpec::Ellipse { a, b } => {
            require_finite(&[*a, *b])?;
            if *a <= 0.0 || *b <= 0.0 {
                return Err(Error::DegenerateCurve(format!(
                    "ellipse semi-axes must be positive, got a = {a}, b = {b}"
                )));
            }
            Ok(CurveModel::Ellipse { a: *a, b: *b })
        }
        CurveSpec::Polynomial { x, y } => {
            if x.is_empty() || y.is_empty() {
                return Err(Error::DegenerateCurve("polynomial coefficients must be non-empty".into()));
            }
            require_finite(x)?;
            require_finite(y)?;
            Ok(CurveModel::Polynomial(PolynomialCurve::new(x.clone(), y.clone())))
        }
    }
}

fn require_finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::DegenerateCurve("non-finite curve parameter".into()))
    }
}

impl Curve for CurveModel {
    fn derivatives(&self, p: f64) -> DerivativeTable {
        match self {
            CurveModel::Line { k, b } => DerivativeTable {
                x: [p, 1.0, 0.0, 0.0, 0.0],
                y: [k * p + b, *k, 0.0, 0.0, 0.0],
            },
            CurveModel::Circle { r } => {
                let (sin, cos) = p.sin_cos();
                DerivativeTable {
                    x: [r * cos, -r * sin, -r * cos, r * sin, r * cos],
                    y: [r * sin, r * cos, -r * sin, -r * cos, r * sin],
                }
            }
            CurveModel::Parabola { k, b } => DerivativeTable {
                x: [p, 1.0, 0.0, 0.0, 0.0],
                y: [k * p * p + b, 2.0 * k * p, 2.0 * k, 0.0, 0.0],
            },
            CurveModel::Ellipse { a, b } => {
                let (sin, cos) = p.sin_cos();
                DerivativeTable {
                    x: [a * cos, -a * sin, -a * cos, a * sin, a * cos],
                    y: [b * sin, b * cos, -b * sin, -b * cos, b * sin],
                }
            }
            CurveModel::Polynomial(poly) => DerivativeTable {
                x: std::array::from_fn(|k| horner(&poly.x[k], p)),
                y: std::array::from_fn(|k| horner(&poly.y[k], p)),
            },
        }
    }
}

/// Evaluate coordinates and derivatives at p.
pub fn eval_derivatives(curve: &dyn Curve, p: f64) -> Result<DerivativeTable> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite parameter p = {p}")));
    }
    Ok(curve.derivatives(p))
}

impl DerivativeTable {
    /// The six products G, S, Q, T, U, V.
    pub fn geometric_coefficients(&self) -> GeometricCoefficients {
        let x = &self.x;
        let y = &self.y;
        GeometricCoefficients {
            g: x[1] * x[1] + y[1] * y[1],
            s: x[1] * x[2] + y[1] * y[2],
            q: x[2] * x[2] + y[2] * y[2],
            t: x[1] * x[3] + y[1] * y[3],
            u: x[2] * x[3] + y[2] * y[3],
            v: x[1] * x[4] + y[1] * y[4],
        }
    }
}

/// Geometric coefficients of `curve` at parameter p.
pub fn geometric_coefficients(curve: &dyn Curve, p: f64) -> GeometricCoefficients {
    curve.derivatives(p).geometric_coefficients()
}

/// One derivative order's consistency result in a [`ValidationReport`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OrderCheck {
    pub order: usize,
    /// max over the grid of |analytic - central difference| / max(1, |analytic|)
    pub max_deviation: f64,
    pub pass: bool,
}

/// Finite-difference consistency report for a curve's derivative tables.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub orders: [OrderCheck; 4],
    pub tolerance: f64,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.orders.iter().all(|o| o.pass)
    }
}

/// Check each analytic derivative of order 1..4 against the central difference
/// of the next lower order over `p_grid`. Report-only; nothing is rejected.
pub fn validate_derivatives(
    curve: &dyn Curve,
    p_grid: &[f64],
    h: f64,
    tolerance: f64,
) -> Result<ValidationReport> {
    if p_grid.is_empty() {
        return Err(Error::InvalidParameter("empty validation grid".into()));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let mut max_dev = [0.0f64; 4];
    for &p in p_grid {
        let at = curve.derivatives(p);
        let plus = curve.derivatives(p + h);
        let minus = curve.derivatives(p - h);
        for order in 1..5 {
            for (center, lo, hi) in [
                (at.x[order], minus.x[order - 1], plus.x[order - 1]),
                (at.y[order], minus.y[order - 1], plus.y[order - 1]),
            ] {
                let fd = (hi - lo) / (2.0 * h);
                let dev = (center - fd).abs() / center.abs().max(1.0);
                if dev > max_dev[order - 1] {
                    max_dev[order - 1] = dev;
                }
            }
        }
    }
    let orders = std::array::from_fn(|i| OrderCheck {
        order: i + 1,
        max_deviation: max_dev[i],
        pass: max_dev[i] <= tolerance,
    });
    Ok(ValidationReport { orders, tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_table(tab: &DerivativeTable, x: [f64; 5], y: [f64; 5]) {
        for k in 0..5 {
            assert!((tab.x[k] - x[k]).abs() < 1e-14, "x[{k}]: {} vs {}", tab.x[k], x[k]);
            assert!((tab.y[k] - y[k]).abs() < 1e-14, "y[{k}]: {} vs {}", tab.y[k], y[k]);
        }
    }

    #[test]
    fn circle_unit_radius_table_at_zero() {
        let c = make_curve(&CurveSpec::Circle { r: 1.0 }).unwrap();
        let tab = eval_derivatives(&c, 0.0).unwrap();
        assert_table(&tab, [1.0, 0.0, -1.0, 0.0, 1.0], [0.0, 1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn line_table() {
        let c = make_curve(&CurveSpec::Line { k: -2.0, b: 1.0 }).unwrap();
        let tab = eval_derivatives(&c, 0.3).unwrap();
        assert_table(&tab, [0.3, 1.0, 0.0, 0.0, 0.0], [0.4, -2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn ellipse_table_at_half_pi() {
        let c = make_curve(&CurveSpec::Ellipse { a: 1.0, b: 2.0 }).unwrap();
        let tab = eval_derivatives(&c, std::f64::consts::FRAC_PI_2).unwrap();
        assert_table(&tab, [0.0, -1.0, 0.0, 1.0, 0.0], [2.0, 0.0, -2.0, 0.0, 2.0]);
    }

    #[test]
    fn zero_radius_rejected() {
        assert!(matches!(
            make_curve(&CurveSpec::Circle { r: 0.0 }),
            Err(Error::DegenerateCurve(_))
        ));
    }

    #[test]
    fn empty_polynomial_rejected() {
        assert!(make_curve(&CurveSpec::Polynomial { x: vec![], y: vec![1.0] }).is_err());
    }

    #[test]
    fn non_finite_p_rejected() {
        let c = make_curve(&CurveSpec::Circle { r: 1.0 }).unwrap();
        assert!(eval_derivatives(&c, f64::NAN).is_err());
    }

    #[test]
    fn polynomial_matches_line() {
        let poly = make_curve(&CurveSpec::Polynomial { x: vec![0.0, 1.0], y: vec![1.0, -2.0] }).unwrap();
        let line = make_curve(&CurveSpec::Line { k: -2.0, b: 1.0 }).unwrap();
        for i in 0..=50 {
            let p = -1.0 + 0.08 * i as f64;
            let a = poly.derivatives(p);
            let b = line.derivatives(p);
            for k in 0..5 {
                assert!((a.x[k] - b.x[k]).abs() < 1e-13);
                assert!((a.y[k] - b.y[k]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn circle_coefficients_p_independent() {
        let c = make_curve(&CurveSpec::Circle { r: 2.0 }).unwrap();
        for i in 0..20 {
            let p = -3.0 + 0.37 * i as f64;
            let gc = geometric_coefficients(&c, p);
            assert!((gc.g - 4.0).abs() < 1e-12);
            assert!(gc.s.abs() < 1e-12);
            assert!((gc.q - 4.0).abs() < 1e-12);
            assert!((gc.t + 4.0).abs() < 1e-12);
            assert!(gc.u.abs() < 1e-12);
            assert!(gc.v.abs() < 1e-12);
        }
    }

    #[test]
    fn line_coefficients() {
        let c = make_curve(&CurveSpec::Line { k: 3.5, b: -1.0 }).unwrap();
        let gc = geometric_coefficients(&c, 0.7);
        assert!((gc.g - (1.0 + 3.5 * 3.5)).abs() < 1e-14);
        for v in [gc.s, gc.q, gc.t, gc.u, gc.v] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn ellipse_coefficients_at_quarter_pi() {
        let c = make_curve(&CurveSpec::Ellipse { a: 1.0, b: 2.0 }).unwrap();
        let gc = geometric_coefficients(&c, std::f64::consts::FRAC_PI_4);
        assert!((gc.g - 2.5).abs() < 1e-12);
        assert!((gc.s + 1.5).abs() < 1e-12);
        assert!((gc.q - 2.5).abs() < 1e-12);
        assert!((gc.t + 2.5).abs() < 1e-12);
        assert!((gc.u - 1.5).abs() < 1e-12);
        assert!((gc.v - 1.5).abs() < 1e-12);
    }

    #[test]
    fn derivative_validation_passes_builtin() {
        let grid: Vec<f64> = (0..100).map(|i| -2.0 + 0.05 * i as f64).collect();
        for spec in [
            CurveSpec::Circle { r: 1.0 },
            CurveSpec::Ellipse { a: 1.0, b: 2.0 },
            CurveSpec::Parabola { k: 1.0, b: 0.0 },
            CurveSpec::Line { k: -2.0, b: 1.0 },
        ] {
            let c = make_curve(&spec).unwrap();
            let report = validate_derivatives(&c, &grid, 1e-4, 1e-5).unwrap();
            assert!(report.all_pass(), "{spec:?}: {report:?}");
        }
    }

    #[test]
    fn derivative_validation_flags_corrupted_third_order() {
        struct Corrupted(CurveModel);
        impl Curve for Corrupted {
            fn derivatives(&self, p: f64) -> DerivativeTable {
                let mut tab = self.0.derivatives(p);
                tab.x[3] *= 2.0;
                tab
            }
        }
        let c = Corrupted(make_curve(&CurveSpec::Circle { r: 1.0 }).unwrap());
        let grid: Vec<f64> = (0..50).map(|i| 0.1 * i as f64).collect();
        let report = validate_derivatives(&c, &grid, 1e-4, 1e-5).unwrap();
        assert!(!report.orders[2].pass, "order 3 must be flagged: {report:?}");
        assert!(report.orders[0].pass && report.orders[1].pass);
    }

    #[test]
    fn constant_polynomial_deviations_zero() {
        let c = make_curve(&CurveSpec::Polynomial { x: vec![2.0], y: vec![-1.0] }).unwrap();
        let grid = [0.0, 0.5, 1.0];
        let report = validate_derivatives(&c, &grid, 1e-4, 1e-5).unwrap();
        for o in report.orders {
            assert_eq!(o.max_deviation, 0.0);
        }
    }

    #[test]
    fn coefficient_identities_by_finite_differences() {
        // dG/dp = 2S and dS/dp = Q + T
        let h = 1e-5;
        for spec in [
            CurveSpec::Circle { r: 1.3 },
            CurveSpec::Ellipse { a: 1.0, b: 2.0 },
            CurveSpec::Parabola { k: 0.7, b: 0.2 },
            CurveSpec::Polynomial { x: vec![0.0, 1.0, 0.3], y: vec![0.1, -0.4, 0.0, 0.2] },
        ] {
            let c = make_curve(&spec).unwrap();
            for i in 0..100 {
                let p = -1.0 + 0.02 * i as f64;
                let gc = geometric_coefficients(&c, p);
                let hi = geometric_coefficients(&c, p + h);
                let lo = geometric_coefficients(&c, p - h);
                let dg = (hi.g - lo.g) / (2.0 * h);
                let ds = (hi.s - lo.s) / (2.0 * h);
                let scale_g = dg.abs().max(1.0);
                let scale_s = ds.abs().max(1.0);
                assert!((dg - 2.0 * gc.s).abs() / scale_g < 1e-6, "{spec:?} at {p}");
                assert!((ds - (gc.q + gc.t)).abs() / scale_s < 1e-6, "{spec:?} at {p}");
            }
        }
    }

    #[test]
    fn curve_spec_json_round_trip() {
        let spec = CurveSpec::Polynomial { x: vec![0.0, 1.0], y: vec![1.0, -2.0] };
        let json = serde_json::to_string(&spec).unwrap();
        let back: CurveSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
        // external shape: {"kind": ..., "params": ...}
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["kind"], "polynomial");
        assert!(v["params"]["x"].is_array());

        let circle: CurveSpec = serde_json::from_str(r#"{"kind":"circle","params":{"R":1.0}}"#).unwrap();
        assert_eq!(circle, CurveSpec::Circle { r: 1.0 });
    }
}
