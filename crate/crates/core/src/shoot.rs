//! Two-point boundary value solver: single shooting with damped Newton on the
//! unknown initial accelerations, plus the oracle-seeded fallback path.

use crate::cost::{
    el_residual, evaluate_cost, rms, CostBreakdown, StateVector, TimeLaw,
};
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::ode::{rhs, RhsVariant};
use crate::oracle::{minimize_from, OracleConfig, OracleSolution};

/// State-norm guard: integration aborts once any component passes this.
const BLOWUP_GUARD: f64 = 1e100;

/// Shooting problem description.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub alpha: f64,
    pub mass: f64,
    pub p0: f64,
    pub p1: f64,
    /// Grid cells for integration and reporting (even, >= 100).
    pub n: usize,
    /// Convergence: bc_residual <= newton_tol * max(1, |p1 - p0|).
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub variant: RhsVariant,
}

impl SolverConfig {
    pub fn new(alpha: f64, mass: f64, p0: f64, p1: f64, n: usize) -> Self {
        Self {
            alpha,
            mass,
            p0,
            p1,
            n,
            newton_tol: 1e-10,
            max_newton_iters: 50,
            variant: RhsVariant::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {}", self.mass)));
        }
        if !self.p0.is_finite() || !self.p1.is_finite() {
            return Err(Error::InvalidParameter("boundary values must be finite".into()));
        }
        if self.n < 100 || self.n % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "grid cells must be even and >= 100, got {}",
                self.n
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidParameter("newton_tol must be positive".into()));
        }
        Ok(())
    }

    fn bc_scale(&self) -> f64 {
        (self.p1 - self.p0).abs().max(1.0)
    }
}

/// States on the uniform grid t_i = i/n.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<StateVector>,
}

impl Trajectory {
    pub fn new(states: Vec<StateVector>) -> Self {
        Self { states }
    }

    pub fn n(&self) -> usize {
        self.states.len() - 1
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn law(&self) -> TimeLaw {
        TimeLaw::new(self.states.iter().map(|z| z.z0).collect())
            .expect("trajectory grid is a valid law grid")
    }
}

/// Which route produced the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    /// Plain shot from the smoothstep seed.
    Direct,
    /// Oracle-seeded shot (possibly with horizon continuation).
    OracleSeeded,
    /// Direct transcription only (no shooting involved).
    OracleOnly,
}

/// Solved law plus diagnostics.
#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub trajectory: Trajectory,
    pub cost: CostBreakdown,
    /// max(|z0(1) - p1|, |z1(1)|)
    pub bc_residual: f64,
    pub el_residual_rms: f64,
    pub iterations: usize,
    pub converged: bool,
    pub path: SolvePath,
    pub variant: RhsVariant,
}

/// Smoothstep initial guess; satisfies all four boundary conditions exactly.
pub fn initial_guess(config: &SolverConfig) -> Result<TimeLaw> {
    config.validate()?;
    TimeLaw::smoothstep(config.p0, config.p1, config.n)
}

/// Initial accelerations of the smoothstep: (6 dp, -12 dp).
pub fn smoothstep_seed(config: &SolverConfig) -> (f64, f64) {
    let dp = config.p1 - config.p0;
    (6.0 * dp, -12.0 * dp)
}

/// Classical fixed-step RK4 for the reduced system from t = 0 to t = 1.
pub fn integrate_ivp(
    curve: &dyn Curve,
    z_init: StateVector,
    config: &SolverConfig,
) -> Result<Trajectory> {
    integrate_partial(curve, z_init, config, config.n)
}

/// RK4 over the first `steps` cells of the grid (step h = 1/n).
fn integrate_partial(
    curve: &dyn Curve,
    z_init: StateVector,
    config: &SolverConfig,
    steps: usize,
) -> Result<Trajectory> {
    if !z_init.is_finite() {
        return Err(Error::InvalidParameter("non-finite initial state".into()));
    }
    let n = config.n;
    let h = 1.0 / n as f64;
    let (alpha, mass, variant) = (config.alpha, config.mass, config.variant);
    let mut z = [z_init.z0, z_init.z1, z_init.z2, z_init.z3];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(z_init);
    let eval = |z: &[f64; 4]| -> Result<[f64; 4]> {
        rhs(
            curve,
            &StateVector::new(z[0], z[1], z[2], z[3]),
            alpha,
            mass,
            variant,
        )
    };
    let axpy = |z: &[f64; 4], s: f64, k: &[f64; 4]| -> [f64; 4] {
        [z[0] + s * k[0], z[1] + s * k[1], z[2] + s * k[2], z[3] + s * k[3]]
    };
    for step in 0..steps {
        let k1 = eval(&z)?;
        let k2 = eval(&axpy(&z, 0.5 * h, &k1))?;
        let k3 = eval(&axpy(&z, 0.5 * h, &k2))?;
        let k4 = eval(&axpy(&z, h, &k3))?;
        for i in 0..4 {
            z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let finite = z.iter().all(|v| v.is_finite() && v.abs() <= BLOWUP_GUARD);
        if !finite {
            return Err(Error::Blowup { step: step + 1, steps, t: (step + 1) as f64 * h });
        }
        out.push(StateVector::new(z[0], z[1], z[2], z[3]));
    }
    Ok(Trajectory::new(out))
}

struct NewtonOutcome {
    seeds: (f64, f64),
    trajectory: Trajectory,
    bc_residual: f64,
    iterations: usize,
    converged: bool,
}

/// Damped Newton on the 2-d shooting map over the first `steps` cells,
/// targeting (z0, z1) = `target` at the end of the sub-horizon.
///
/// The forward-difference Jacobian starts at the standard step
/// 1e-6 * max(1, |s|); when damping finds no decrease the step is refined and
/// the Jacobian rebuilt, down to 1e-12 * max(1, |s|).
fn newton_shoot(
    curve: &dyn Curve,
    config: &SolverConfig,
    mut seeds: (f64, f64),
    steps: usize,
    target: (f64, f64),
    tol: f64,
) -> Result<NewtonOutcome> {
    let eval = |s: (f64, f64)| -> Result<(Trajectory, [f64; 2])> {
        let z0 = StateVector::new(config.p0, 0.0, s.0, s.1);
        let traj = integrate_partial(curve, z0, config, steps)?;
        let last = traj.states()[steps];
        Ok((traj, [last.z0 - target.0, last.z1 - target.1]))
    };
    let norm = |r: &[f64; 2]| r[0].abs().max(r[1].abs());
    let scale = config.bc_scale();

    let (mut traj, mut res) = eval(seeds)?;
    let mut fd_scale = 1e-6;
    let mut iterations = 0usize;
    while iterations < config.max_newton_iters {
        let r0 = norm(&res);
        if r0 <= tol * scale {
            return Ok(NewtonOutcome { seeds, trajectory: traj, bc_residual: r0, iterations, converged: true });
        }
        iterations += 1;
        // forward-difference Jacobian
        let mut jac = [[0.0f64; 2]; 2];
        let mut jac_ok = true;
        for col in 0..2 {
            let d = fd_scale * seeds_component(seeds, col).abs().max(1.0);
            let mut sp = seeds;
            if col == 0 {
                sp.0 += d;
            } else {
                sp.1 += d;
            }
            match eval(sp) {
                Ok((_, rp)) => {
                    jac[0][col] = (rp[0] - res[0]) / d;
                    jac[1][col] = (rp[1] - res[1]) / d;
                }
                Err(_) => {
                    jac_ok = false;
                    break;
                }
            }
        }
        let step = jac_ok.then(|| solve2(&jac, &[-res[0], -res[1]])).flatten();
        let step = match step {
            Some(s) => s,
            None => {
                return Ok(NewtonOutcome {
                    seeds,
                    trajectory: traj,
                    bc_residual: r0,
                    iterations,
                    converged: false,
                })
            }
        };
        // damping: halve until the residual norm decreases
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand = (seeds.0 + lambda * step[0], seeds.1 + lambda * step[1]);
            if let Ok((tr, rc)) = eval(cand) {
                if norm(&rc) < r0 {
                    seeds = cand;
                    traj = tr;
                    res = rc;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            if fd_scale > 1e-12 {
                // the secant step was too coarse for the residual scale;
                // refine the Jacobian step and try again
                fd_scale /= 32.0;
                continue;
            }
            return Ok(NewtonOutcome {
                seeds,
                trajectory: traj,
                bc_residual: r0,
                iterations,
                converged: false,
            });
        }
    }
    Ok(NewtonOutcome {
        seeds,
        trajectory: traj,
        bc_residual: norm(&res),
        iterations,
        converged: false,
    })
}

fn seeds_component(s: (f64, f64), i: usize) -> f64 {
    if i == 0 {
        s.0
    } else {
        s.1
    }
}

fn solve2(a: &[[f64; 2]; 2], b: &[f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let x = [
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ];
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn build_report(
    curve: &dyn Curve,
    config: &SolverConfig,
    outcome: NewtonOutcome,
    path: SolvePath,
) -> Result<SolutionReport> {
    let law = outcome.trajectory.law();
    let cost = evaluate_cost(curve, &law, config.alpha, config.mass)?;
    let r = el_residual(curve, outcome.trajectory.states(), config.alpha, config.mass)?;
    Ok(SolutionReport {
        trajectory: outcome.trajectory,
        cost,
        bc_residual: outcome.bc_residual,
        el_residual_rms: rms(&r),
        iterations: outcome.iterations,
        converged: outcome.converged,
        path,
        variant: config.variant,
    })
}

/// Single shooting from the smoothstep seed.
pub fn shoot(curve: &dyn Curve, config: &SolverConfig) -> Result<SolutionReport> {
    config.validate()?;
    let outcome = newton_shoot(
        curve,
        config,
        smoothstep_seed(config),
        config.n,
        (config.p1, 0.0),
        config.newton_tol,
    )?;
    build_report(curve, config, outcome, SolvePath::Direct)
}

/// Extract (z2(0), z3(0)) from a sampled law by fitting a quintic through the
/// first six nodes. One-sided difference stencils through node 1 amplify the
/// law's boundary-layer structure by 1/h^3 and are useless here.
pub fn seeds_from_law(law: &TimeLaw) -> (f64, f64) {
    let h = law.h();
    let p = law.values();
    // Vandermonde fit in the scaled variable tau = t/h at nodes 0..5
    let m = 6usize;
    let mut a = vec![vec![0.0f64; m + 1]; m];
    for (row, item) in a.iter_mut().enumerate() {
        let tau = row as f64;
        let mut pw = 1.0;
        for cell in item.iter_mut().take(m) {
            *cell = pw;
            pw *= tau;
        }
        item[m] = p[row];
    }
    // Gaussian elimination with partial pivoting on the 6x6 system
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..=m {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut coef = vec![0.0f64; m];
    for row in (0..m).rev() {
        let mut v = a[row][m];
        for k in row + 1..m {
            v -= a[row][k] * coef[k];
        }
        coef[row] = v / a[row][row];
    }
    (2.0 * coef[2] / (h * h), 6.0 * coef[3] / (h * h * h))
}

/// Horizon fractions for the continuation fallback.
const MARCH_STAGES: [f64; 5] = [0.4, 0.55, 0.7, 0.85, 1.0];

/// Oracle-seeded shot, escalating to horizon continuation when the full-range
/// shot from the oracle seeds blows up or stalls: shoot on growing
/// sub-horizons [0, T], inner stages targeting the oracle law's (p, pdot)(T),
/// final stage targeting the true boundary data.
fn oracle_seeded_shoot(
    curve: &dyn Curve,
    config: &SolverConfig,
    oracle: &OracleSolution,
) -> Result<SolutionReport> {
    let seeds = seeds_from_law(&oracle.law);
    let direct =
        match newton_shoot(curve, config, seeds, config.n, (config.p1, 0.0), config.newton_tol) {
            Ok(outcome) if outcome.converged => {
                return build_report(curve, config, outcome, SolvePath::OracleSeeded)
            }
            other => other,
        };
    let marched = march(curve, config, oracle, seeds);
    match (direct, marched) {
        (Ok(a), Ok(b)) => {
            let pick = match (a.converged, b.converged) {
                (true, false) => a,
                (false, true) => b,
                _ => {
                    if a.bc_residual <= b.bc_residual {
                        a
                    } else {
                        b
                    }
                }
            };
            build_report(curve, config, pick, SolvePath::OracleSeeded)
        }
        (Ok(a), Err(_)) => build_report(curve, config, a, SolvePath::OracleSeeded),
        (Err(_), Ok(b)) => build_report(curve, config, b, SolvePath::OracleSeeded),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Horizon continuation: refine the seeds by solving on growing sub-horizons.
fn march(
    curve: &dyn Curve,
    config: &SolverConfig,
    oracle: &OracleSolution,
    mut seeds: (f64, f64),
) -> Result<NewtonOutcome> {
    let law = &oracle.law;
    let n_or = law.n();
    let h_or = law.h();
    let mut last: Option<NewtonOutcome> = None;
    for frac in MARCH_STAGES {
        let steps = ((frac * config.n as f64).round() as usize).clamp(8, config.n);
        let t_end = steps as f64 / config.n as f64;
        let (target, tol) = if steps == config.n {
            ((config.p1, 0.0), config.newton_tol)
        } else {
            let k = ((t_end * n_or as f64).round() as usize).clamp(1, n_or - 1);
            let pk = law.values()[k];
            let dpk = (law.values()[k + 1] - law.values()[k - 1]) / (2.0 * h_or);
            ((pk, dpk), 1e-9)
        };
        let outcome = newton_shoot(curve, config, seeds, steps, target, tol)?;
        seeds = outcome.seeds;
        if steps == config.n {
            last = Some(outcome);
        }
    }
    Ok(last.expect("final march stage covers the full horizon"))
}

/// Grid levels for the oracle cascade used by the fallback path.
fn oracle_cascade(
    curve: &dyn Curve,
    config: &SolverConfig,
    n_target: usize,
) -> Result<OracleSolution> {
    let mut n = 250usize;
    let mut law = TimeLaw::smoothstep(config.p0, config.p1, n)?;
    loop {
        let cfg = OracleConfig { n, max_iters: 4000, ..OracleConfig::default() };
        let sol = minimize_from(curve, law, config.alpha, config.mass, &cfg)?;
        if n >= n_target {
            return Ok(sol);
        }
        n = (2 * n).min(n_target);
        law = refine_law(&sol.law, n)?;
    }
}

/// Resample a law onto a finer grid with cubic interpolation, endpoints pinned.
fn refine_law(law: &TimeLaw, n_new: usize) -> Result<TimeLaw> {
    let n = law.n();
    let p = law.values();
    let mut values: Vec<f64> = (0..=n_new)
        .map(|i| {
            let t = i as f64 / n_new as f64;
            let x = t * n as f64;
            let k = (x.floor() as usize).min(n - 1);
            let s = x - k as f64;
            if s == 0.0 {
                return p[k];
            }
            // 4-point cubic (clamped at the ends)
            let k0 = k.saturating_sub(1);
            let (a, b, c, d) = if k == 0 {
                (p[0], p[0], p[1], p[2])
            } else if k + 2 > n {
                (p[k0], p[k], p[n], p[n])
            } else {
                (p[k - 1], p[k], p[k + 1], p[k + 2])
            };
            let s2 = s * s;
            0.5 * ((2.0 * b)
                + (c - a) * s
                + (2.0 * a - 5.0 * b + 4.0 * c - d) * s2
                + (3.0 * (b - c) + d - a) * s2 * s)
        })
        .collect();
    values[0] = p[0];
    values[n_new] = p[n];
    TimeLaw::new(values)
}

/// Full solve: direct shot first; on failure, oracle fallback with re-seeded
/// shooting. Errors only when no path yields a finite trajectory.
pub fn solve(curve: &dyn Curve, config: &SolverConfig) -> Result<SolutionReport> {
    config.validate()?;
    let direct_err;
    match shoot(curve, config) {
        Ok(report) if report.converged => return Ok(report),
        Ok(report) => {
            // stalled but finite: keep it unless the fallback does better
            return Ok(match fallback(curve, config) {
                Ok(fb) if fb.converged || fb.bc_residual <= report.bc_residual => fb,
                _ => report,
            });
        }
        Err(e) => direct_err = e.to_string(),
    }
    match fallback(curve, config) {
        Ok(report) => Ok(report),
        Err(fb_err) => Err(Error::NoTrajectory { direct: direct_err, fallback: fb_err.to_string() }),
    }
}

fn fallback(curve: &dyn Curve, config: &SolverConfig) -> Result<SolutionReport> {
    let n_oracle = config.n.max(2000);
    let oracle = oracle_cascade(curve, config, n_oracle)?;
    oracle_seeded_shoot(curve, config, &oracle)
}

/// Solve by direct transcription only, reporting in the same shape as the
/// shooting paths. The law's states are reconstructed by differencing.
pub fn solve_oracle_only(
    curve: &dyn Curve,
    config: &SolverConfig,
    oracle_config: &OracleConfig,
) -> Result<SolutionReport> {
    config.validate()?;
    let sol = crate::oracle::oracle_minimize(
        curve,
        config.p0,
        config.p1,
        config.alpha,
        config.mass,
        oracle_config,
    )?;
    let states = crate::cost::states_from_law(&sol.law);
    let r = el_residual(curve, &states, config.alpha, config.mass)?;
    let cost = evaluate_cost(curve, &sol.law, config.alpha, config.mass)?;
    let bc = (sol.law.values()[sol.law.n()] - config.p1)
        .abs()
        .max((sol.law.values()[0] - config.p0).abs());
    Ok(SolutionReport {
        trajectory: Trajectory::new(states),
        cost,
        bc_residual: bc,
        el_residual_rms: rms(&r),
        iterations: sol.iterations,
        converged: sol.converged(),
        path: SolvePath::OracleOnly,
        variant: config.variant,
    })
}
