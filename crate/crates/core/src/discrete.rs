//! Discretization of the cost functional on the uniform grid, shared by the
//! gradient surface in [`crate::cost`] and the transcription oracle.
//!
//! The law's endpoints are pinned; zero endpoint velocity is encoded by even
//! ghost reflection of the coordinate signals (X_{-1} = X_1, X_{n+1} =
//! X_{n-1}), which makes the central velocity at the ends vanish identically
//! while leaving endpoint curvature free. Quadrature is trapezoidal: uniform
//! interior weights keep the discrete Euler-Lagrange rows consistent, whereas
//! alternating Simpson weights leave an O(1) bias in the minimizer.

use crate::curve::{Curve, REGULARITY_THRESHOLD};
use crate::error::{Error, Result};

pub(crate) struct Assembled {
    pub j: f64,
    pub kinetic: f64,
    pub inertia_measure: f64,
    /// dJ/dp_k for every node k = 0..n (endpoint entries included for
    /// completeness even though the endpoints are never free).
    pub node_gradient: Vec<f64>,
}

fn trapezoid_weights(n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    (0..=n).map(|i| if i == 0 || i == n { 0.5 * h } else { h }).collect()
}

/// Evaluate J and its full nodal gradient for the ghost-reflection scheme.
pub(crate) fn assemble(curve: &dyn Curve, p: &[f64], alpha: f64, mass: f64) -> Result<Assembled> {
    let n = p.len() - 1;
    if n < 4 {
        return Err(Error::GridTooShort { n, min: 4 });
    }
    let h = 1.0 / n as f64;
    let am2 = alpha * mass * mass;
    let w = trapezoid_weights(n);

    let mut xs = vec![0.0; n + 1];
    let mut ys = vec![0.0; n + 1];
    let mut dx = vec![0.0; n + 1];
    let mut dy = vec![0.0; n + 1];
    for i in 0..=n {
        let table = curve.derivatives(p[i]);
        let g = table.x[1] * table.x[1] + table.y[1] * table.y[1];
        if g < REGULARITY_THRESHOLD {
            return Err(Error::SingularParameterization { p: p[i], g });
        }
        xs[i] = table.x[0];
        ys[i] = table.y[0];
        dx[i] = table.x[1];
        dy[i] = table.y[1];
    }

    // extended signals with even ghosts
    let ext = |s: &[f64], i: isize| -> f64 {
        if i < 0 {
            s[(-i) as usize]
        } else if i as usize > n {
            s[2 * n - i as usize]
        } else {
            s[i as usize]
        }
    };

    let mut kin = 0.0;
    let mut inm = 0.0;
    // adjoint accumulators on node coordinates (ghosts folded on the fly)
    let mut adj_x = vec![0.0; n + 1];
    let mut adj_y = vec![0.0; n + 1];
    let fold = |adj: &mut [f64], i: isize, v: f64| {
        let k = if i < 0 {
            (-i) as usize
        } else if i as usize > n {
            2 * n - i as usize
        } else {
            i as usize
        };
        adj[k] += v;
    };

    let h2 = h * h;
    for i in 0..=n as isize {
        let vx = (ext(&xs, i + 1) - ext(&xs, i - 1)) / (2.0 * h);
        let vy = (ext(&ys, i + 1) - ext(&ys, i - 1)) / (2.0 * h);
        let ax = ((ext(&xs, i + 1) - ext(&xs, i)) - (ext(&xs, i) - ext(&xs, i - 1))) / h2;
        let ay = ((ext(&ys, i + 1) - ext(&ys, i)) - (ext(&ys, i) - ext(&ys, i - 1))) / h2;
        let wi = w[i as usize];
        kin += wi * (vx * vx + vy * vy);
        inm += wi * (ax * ax + ay * ay);

        let cv = wi * mass * vx;
        let ca = wi * am2 * ax;
        fold(&mut adj_x, i + 1, cv / (2.0 * h) + ca / h2);
        fold(&mut adj_x, i - 1, -cv / (2.0 * h) + ca / h2);
        fold(&mut adj_x, i, -2.0 * ca / h2);
        let cvy = wi * mass * vy;
        let cay = wi * am2 * ay;
        fold(&mut adj_y, i + 1, cvy / (2.0 * h) + cay / h2);
        fold(&mut adj_y, i - 1, -cvy / (2.0 * h) + cay / h2);
        fold(&mut adj_y, i, -2.0 * cay / h2);
    }

    let node_gradient: Vec<f64> = (0..=n).map(|k| adj_x[k] * dx[k] + adj_y[k] * dy[k]).collect();
    let kinetic = 0.5 * mass * kin;
    Ok(Assembled { j: kinetic + 0.5 * am2 * inm, kinetic, inertia_measure: inm, node_gradient })
}

/// Symmetric positive-definite band matrix in lower band storage:
/// `bands[d][j] = M[j+d][j]`, d = 0..=bw.
pub(crate) struct BandMatrix {
    pub dim: usize,
    pub bw: usize,
    pub bands: Vec<Vec<f64>>,
}

impl BandMatrix {
    fn zeros(dim: usize, bw: usize) -> Self {
        Self { dim, bw, bands: (0..=bw).map(|_| vec![0.0; dim]).collect() }
    }

    fn add(&mut self, a: usize, b: usize, v: f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.bands[hi - lo][lo] += v;
    }

    /// In-place Cholesky factorization (M = L L^T in the same band layout).
    pub(crate) fn cholesky(mut self) -> Result<BandCholesky> {
        let (n, bw) = (self.dim, self.bw);
        for j in 0..n {
            let start = j.saturating_sub(bw);
            let mut d = self.bands[0][j];
            for k in start..j {
                let l = self.bands[j - k][k];
                d -= l * l;
            }
            if d <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "metric not positive definite at column {j}"
                )));
            }
            let dsqrt = d.sqrt();
            self.bands[0][j] = dsqrt;
            let top = (j + bw).min(n - 1);
            for i in j + 1..=top {
                let mut v = self.bands[i - j][j];
                let kstart = i.saturating_sub(bw).max(start);
                for k in kstart..j {
                    v -= self.bands[i - k][k] * self.bands[j - k][k];
                }
                self.bands[i - j][j] = v / dsqrt;
            }
        }
        Ok(BandCholesky { m: self })
    }
}

pub(crate) struct BandCholesky {
    m: BandMatrix,
}

impl BandCholesky {
    /// Solve M x = rhs.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.m.dim, self.m.bw);
        let b = &self.m.bands;
        let mut x = rhs.to_vec();
        for i in 0..n {
            let start = i.saturating_sub(bw);
            let mut v = x[i];
            for k in start..i {
                v -= b[i - k][k] * x[k];
            }
            x[i] = v / b[0][i];
        }
        for i in (0..n).rev() {
            let top = (i + bw).min(n - 1);
            let mut v = x[i];
            for k in i + 1..=top {
                v -= b[k - i][i] * x[k];
            }
            x[i] = v / b[0][i];
        }
        x
    }
}

/// The discrete Hessian of the straight-line (G = 1) functional at the same
/// (n, alpha, mass), on the free nodes 1..n-1. Constant and curve-independent;
/// used as the descent metric by the oracle.
pub(crate) fn line_metric(n: usize, alpha: f64, mass: f64) -> BandMatrix {
    let h = 1.0 / n as f64;
    let h2 = h * h;
    let am2 = alpha * mass * mass;
    let w = trapezoid_weights(n);
    let nf = n - 1; // free nodes 1..n-1, free index = node - 1
    let mut m = BandMatrix::zeros(nf, 2);
    // fold a stencil entry at node k onto the free index, honoring ghosts
    let to_free = |k: isize| -> Option<usize> {
        let k = if k < 0 {
            (-k) as usize
        } else if k as usize > n {
            2 * n - k as usize
        } else {
            k as usize
        };
        if (1..n).contains(&k) {
            Some(k - 1)
        } else {
            None
        }
    };
    for i in 0..=n as isize {
        let wi = w[i as usize];
        // velocity row: (e_{i+1} - e_{i-1}) / 2h, weight w_i * mass
        let mut v_entries: Vec<(usize, f64)> = Vec::with_capacity(2);
        for (node, c) in [(i + 1, 1.0 / (2.0 * h)), (i - 1, -1.0 / (2.0 * h))] {
            if let Some(f) = to_free(node) {
                v_entries.push((f, c));
            }
        }
        // acceleration row: (e_{i+1} - 2 e_i + e_{i-1}) / h^2, weight w_i * alpha m^2
        let mut a_entries: Vec<(usize, f64)> = Vec::with_capacity(3);
        for (node, c) in [(i + 1, 1.0 / h2), (i, -2.0 / h2), (i - 1, 1.0 / h2)] {
            if let Some(f) = to_free(node) {
                a_entries.push((f, c));
            }
        }
        for (entries, wt) in [(&v_entries, wi * mass), (&a_entries, wi * am2)] {
            for &(fa, ca) in entries.iter() {
                for &(fb, cb) in entries.iter() {
                    if fa <= fb {
                        m.add(fa, fb, wt * ca * cb);
                    }
                }
            }
        }
    }
    m
}
