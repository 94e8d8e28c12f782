//! The cost functional, chain-rule kinematics, the stationarity residual, and
//! the exact gradient of the discretized functional.
//!
//! Everything here is a pure function of immutable inputs. Time is normalized
//! to \[0,1\]; all quantities are dimensionless.

use crate::curve::{Curve, DerivativeTable, REGULARITY_THRESHOLD};
use crate::discrete;
use crate::error::{Error, Result};

/// A sampled time law p(t) on the uniform grid t_i = i/n.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeLaw {
    n: usize,
    values: Vec<f64>,
}

impl TimeLaw {
    /// n must be even and at least 4; `values` holds the n+1 nodal samples.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 5 {
            return Err(Error::GridTooShort { n: values.len().saturating_sub(1), min: 4 });
        }
        let n = values.len() - 1;
        if n % 2 != 0 {
            return Err(Error::InvalidParameter(format!("grid cells must be even, got n = {n}")));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite law value".into()));
        }
        Ok(Self { n, values })
    }

    /// Sample a closed-form law at n+1 uniform nodes.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=n).map(|i| f(i as f64 / n as f64)).collect();
        Self::new(values)
    }

    /// Cubic rest-to-rest law p0 + (p1-p0)(3t^2 - 2t^3), endpoints pinned.
    pub fn smoothstep(p0: f64, p1: f64, n: usize) -> Result<Self> {
        let mut law = Self::from_fn(n, |t| p0 + (p1 - p0) * (3.0 * t * t - 2.0 * t * t * t))?;
        law.values[0] = p0;
        law.values[n] = p1;
        Ok(law)
    }

    /// Quintic rest-to-rest law p0 + (p1-p0)(10t^3 - 15t^4 + 6t^5), endpoints pinned.
    pub fn quintic(p0: f64, p1: f64, n: usize) -> Result<Self> {
        let mut law = Self::from_fn(n, |t| {
            let t3 = t * t * t;
            p0 + (p1 - p0) * (10.0 * t3 - 15.0 * t3 * t + 6.0 * t3 * t * t)
        })?;
        law.values[0] = p0;
        law.values[n] = p1;
        Ok(law)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    /// Serialize as CSV with header `t,p`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,p\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{:.16e},{:.16e}\n", self.t(i), v));
        }
        out
    }

    /// Parse the `t,p` CSV form; the t column must be the increasing uniform
    /// grid on \[0, 1\].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "t,p" => {}
            other => {
                return Err(Error::InvalidParameter(format!(
                    "expected header 't,p', got {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (ln, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("bad CSV row {}", ln + 2)))
            };
            times.push(parse(it.next())?);
            values.push(parse(it.next())?);
        }
        let law = Self::new(values)?;
        for (i, t) in times.iter().enumerate() {
            if (t - law.t(i)).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "time column is not the uniform grid at row {}: {t}",
                    i + 2
                )));
            }
        }
        Ok(law)
    }
}

/// (p, p', p'', p''') with respect to normalized time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub z0: f64,
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
}

impl StateVector {
    pub fn new(z0: f64, z1: f64, z2: f64, z3: f64) -> Self {
        Self { z0, z1, z2, z3 }
    }

    pub fn is_finite(&self) -> bool {
        self.z0.is_finite() && self.z1.is_finite() && self.z2.is_finite() && self.z3.is_finite()
    }
}

/// Time derivatives of the coordinates along the law, to third order.
///
/// The fourth time derivative needs dz3/dt as an extra input and is exposed as
/// [`Kinematics::fourth_derivative`].
#[derive(Debug, Clone, Copy)]
pub struct Kinematics {
    pub vx: f64,
    pub vy: f64,
    pub ax: f64,
    pub ay: f64,
    pub jx: f64,
    pub jy: f64,
}

/// Chain rule through x(p(t)), y(p(t)):
/// v = x'z1, a = x''z1^2 + x'z2, j = x'''z1^3 + 3x''z1z2 + x'z3.
pub fn chain_kinematics(table: &DerivativeTable, z: &StateVector) -> Kinematics {
    let (x, y) = (&table.x, &table.y);
    let z1sq = z.z1 * z.z1;
    Kinematics {
        vx: x[1] * z.z1,
        vy: y[1] * z.z1,
        ax: x[2] * z1sq + x[1] * z.z2,
        ay: y[2] * z1sq + y[1] * z.z2,
        jx: x[3] * z1sq * z.z1 + 3.0 * x[2] * z.z1 * z.z2 + x[1] * z.z3,
        jy: y[3] * z1sq * z.z1 + 3.0 * y[2] * z.z1 * z.z2 + y[1] * z.z3,
    }
}

impl Kinematics {
    /// d^4x/dt^4 and d^4y/dt^4 given the table, state, and dz3/dt.
    pub fn fourth_derivative(table: &DerivativeTable, z: &StateVector, z3_dot: f64) -> (f64, f64) {
        let (x, y) = (&table.x, &table.y);
        let z1sq = z.z1 * z.z1;
        let sx = x[4] * z1sq * z1sq
            + 6.0 * x[3] * z1sq * z.z2
            + 4.0 * x[2] * z.z1 * z.z3
            + 3.0 * x[2] * z.z2 * z.z2
            + x[1] * z3_dot;
        let sy = y[4] * z1sq * z1sq
            + 6.0 * y[3] * z1sq * z.z2
            + 4.0 * y[2] * z.z1 * z.z3
            + 3.0 * y[2] * z.z2 * z.z2
            + y[1] * z3_dot;
        (sx, sy)
    }
}

/// The three coefficient functions of the first variation.
#[derive(Debug, Clone, Copy)]
pub struct FTerms {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

/// f1 = m(vx x'' + vy y'')z1 + a m^2 (ax x''' + ay y''')z1^2 + a m^2 (ax x'' + ay y'')z2,
/// f2 = m(vx x' + vy y') + 2 a m^2 (ax x'' + ay y'')z1,
/// f3 = a m^2 (ax x' + ay y').
pub fn f_terms(curve: &dyn Curve, z: &StateVector, alpha: f64, mass: f64) -> FTerms {
    let table = curve.derivatives(z.z0);
    f_terms_from_table(&table, z, alpha, mass)
}

pub(crate) fn f_terms_from_table(table: &DerivativeTable, z: &StateVector, alpha: f64, mass: f64) -> FTerms {
    let k = chain_kinematics(table, z);
    let (x, y) = (&table.x, &table.y);
    let am2 = alpha * mass * mass;
    let f1 = mass * (k.vx * x[2] + k.vy * y[2]) * z.z1
        + am2 * (k.ax * x[3] + k.ay * y[3]) * z.z1 * z.z1
        + am2 * (k.ax * x[2] + k.ay * y[2]) * z.z2;
    let f2 = mass * (k.vx * x[1] + k.vy * y[1]) + 2.0 * am2 * (k.ax * x[2] + k.ay * y[2]) * z.z1;
    let f3 = am2 * (k.ax * x[1] + k.ay * y[1]);
    FTerms { f1, f2, f3 }
}

/// Cost split: kinetic = (m/2) integral of (vx^2+vy^2), inertia_measure =
/// integral of (ax^2+ay^2), total = kinetic + (alpha m^2 / 2) inertia_measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub kinetic: f64,
    pub inertia_measure: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn from_parts(kinetic: f64, inertia_measure: f64, alpha: f64, mass: f64) -> Self {
        Self { kinetic, inertia_measure, total: kinetic + 0.5 * alpha * mass * mass * inertia_measure }
    }
}

/// Composite Simpson weights on the uniform grid (n even).
pub(crate) fn simpson_weights(n: usize) -> Vec<f64> {
    debug_assert!(n % 2 == 0);
    let h = 1.0 / n as f64;
    (0..=n)
        .map(|i| {
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Nodal first and second time derivatives of a sampled series:
/// 2nd-order central in the interior, 2nd-order one-sided at the endpoints.
/// Stencils are grouped as differences so constant series map to exact zeros.
pub(crate) fn difference_series(values: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let v = values;
    let n = v.len() - 1;
    let mut d1 = vec![0.0; n + 1];
    let mut d2 = vec![0.0; n + 1];
    for i in 1..n {
        d1[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        d2[i] = ((v[i + 1] - v[i]) - (v[i] - v[i - 1])) / (h * h);
    }
    // -3 v0 + 4 v1 - v2 and its mirror
    d1[0] = (3.0 * (v[1] - v[0]) + (v[1] - v[2])) / (2.0 * h);
    d1[n] = (3.0 * (v[n] - v[n - 1]) - (v[n - 1] - v[n - 2])) / (2.0 * h);
    // 2 v0 - 5 v1 + 4 v2 - v3 and its mirror
    d2[0] = (2.0 * (v[0] - v[1]) - 3.0 * (v[1] - v[2]) + (v[2] - v[3])) / (h * h);
    d2[n] = (2.0 * (v[n] - v[n - 1]) - 3.0 * (v[n - 1] - v[n - 2]) + (v[n - 2] - v[n - 3])) / (h * h);
    (d1, d2)
}

/// Evaluate the cost of a sampled law: difference p to get the state, chain
/// through the curve, integrate with composite Simpson.
pub fn evaluate_cost(curve: &dyn Curve, law: &TimeLaw, alpha: f64, mass: f64) -> Result<CostBreakdown> {
    let n = law.n();
    let h = law.h();
    let (d1, d2) = difference_series(law.values(), h);
    let w = simpson_weights(n);
    let mut kin = 0.0;
    let mut inm = 0.0;
    for i in 0..=n {
        let p = law.values()[i];
        let table = curve.derivatives(p);
        let gc = table.geometric_coefficients();
        if gc.g < REGULARITY_THRESHOLD {
            return Err(Error::SingularParameterization { p, g: gc.g });
        }
        let z = StateVector::new(p, d1[i], d2[i], 0.0);
        let k = chain_kinematics(&table, &z);
        kin += w[i] * (k.vx * k.vx + k.vy * k.vy);
        inm += w[i] * (k.ax * k.ax + k.ay * k.ay);
    }
    Ok(CostBreakdown::from_parts(0.5 * mass * kin, inm, alpha, mass))
}

/// Reconstruct nodal states from a sampled law by differencing (third
/// derivative by 2nd-order stencils as well). Used for reporting laws that do
/// not come from an integrator.
pub fn states_from_law(law: &TimeLaw) -> Vec<StateVector> {
    let n = law.n();
    let h = law.h();
    let p = law.values();
    let (d1, d2) = difference_series(p, h);
    // 2nd-order five-point stencils anchored at the grid end, by node offset
    let h3 = h * h * h;
    let d3 = |i: usize| -> f64 {
        if i >= 2 && i + 2 <= n {
            // central -1 2 0 -2 1
            ((p[i - 1] - p[i - 2]) + (p[i - 1] - p[i + 1]) + (p[i + 2] - p[i + 1])) / (2.0 * h3)
        } else if i == 0 {
            // -5 18 -24 14 -3
            (5.0 * (p[1] - p[0]) - 13.0 * (p[2] - p[1]) + 11.0 * (p[3] - p[2])
                - 3.0 * (p[4] - p[3]))
                / (2.0 * h3)
        } else if i == 1 {
            // -3 10 -12 6 -1
            (3.0 * (p[1] - p[0]) - 7.0 * (p[2] - p[1]) + 5.0 * (p[3] - p[2]) - (p[4] - p[3]))
                / (2.0 * h3)
        } else if i == n - 1 {
            // 1 -6 12 -10 3
            (-(p[n - 3] - p[n - 4]) + 5.0 * (p[n - 2] - p[n - 3]) - 7.0 * (p[n - 1] - p[n - 2])
                + 3.0 * (p[n] - p[n - 1]))
                / (2.0 * h3)
        } else {
            // 3 -14 24 -18 5 (mirror of the forward stencil)
            (5.0 * (p[n] - p[n - 1]) - 13.0 * (p[n - 1] - p[n - 2])
                + 11.0 * (p[n - 2] - p[n - 3])
                - 3.0 * (p[n - 3] - p[n - 4]))
                / (2.0 * h3)
        }
    };
    (0..=n)
        .map(|i| StateVector::new(p[i], d1[i], d2[i], d3(i)))
        .collect()
}

/// Stationarity residual r = f1 - d(f2)/dt + d^2(f3)/dt^2 at the interior
/// nodes 2..n-2, with the f2/f3 derivatives taken by 2nd-order central
/// differences of the sampled series.
pub fn el_residual(
    curve: &dyn Curve,
    states: &[StateVector],
    alpha: f64,
    mass: f64,
) -> Result<Vec<f64>> {
    let n = states.len().saturating_sub(1);
    if n < 8 {
        return Err(Error::GridTooShort { n, min: 8 });
    }
    let h = 1.0 / n as f64;
    let mut f1 = vec![0.0; n + 1];
    let mut f2 = vec![0.0; n + 1];
    let mut f3 = vec![0.0; n + 1];
    for (i, z) in states.iter().enumerate() {
        let table = curve.derivatives(z.z0);
        let f = f_terms_from_table(&table, z, alpha, mass);
        f1[i] = f.f1;
        f2[i] = f.f2;
        f3[i] = f.f3;
    }
    let mut r = Vec::with_capacity(n - 3);
    for i in 2..=n - 2 {
        let df2 = (f2[i + 1] - f2[i - 1]) / (2.0 * h);
        let ddf3 = (f3[i + 1] - 2.0 * f3[i] + f3[i - 1]) / (h * h);
        r.push(f1[i] - df2 + ddf3);
    }
    Ok(r)
}

/// Root-mean-square of a residual sequence.
pub fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

/// Analytic gradient of the discretized functional with respect to the free
/// interior nodes p_2..p_{n-2} (all other nodes held fixed), length n-3.
///
/// This is the same functional [`crate::oracle::discretize_cost`] evaluates;
/// the chain rule runs through the finite-difference stencils.
pub fn discrete_gradient(
    curve: &dyn Curve,
    law: &TimeLaw,
    alpha: f64,
    mass: f64,
) -> Result<Vec<f64>> {
    let a = discrete::assemble(curve, law.values(), alpha, mass)?;
    Ok(a.node_gradient[2..law.n() - 1].to_vec())
}
