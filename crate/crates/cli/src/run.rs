//! Command implementations and artifact writers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use timelaw::{
    chain_kinematics, el_residual, line_analytic, make_curve, oracle_minimize, shoot, solve,
    solve_oracle_only, validate_derivatives, Curve, CurveModel, CurveSpec, SolutionReport, TimeLaw,
};

use crate::config::{Method, RunConfig, VariantName};

/// Failure exit classes (success exits 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    ParseError = 2,
    ValidationError = 3,
    SolverError = 4,
    IoError = 5,
}

pub struct Failure {
    pub outcome: Outcome,
    pub message: String,
}

impl Failure {
    fn parse(msg: impl Into<String>) -> Self {
        Self { outcome: Outcome::ParseError, message: msg.into() }
    }
    fn validation(msg: impl Into<String>) -> Self {
        Self { outcome: Outcome::ValidationError, message: msg.into() }
    }
    fn solver(msg: impl Into<String>) -> Self {
        Self { outcome: Outcome::SolverError, message: msg.into() }
    }
    fn io(msg: impl Into<String>) -> Self {
        Self { outcome: Outcome::IoError, message: msg.into() }
    }
}

type RunResult = Result<(), Failure>;

fn classify(err: &timelaw::Error) -> Outcome {
    match err {
        timelaw::Error::Blowup { .. } | timelaw::Error::NoTrajectory { .. } => Outcome::SolverError,
        _ => Outcome::ValidationError,
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("cannot parse config {}: {e}", path.display())))
}

fn build_curve(spec: &CurveSpec) -> Result<CurveModel, Failure> {
    make_curve(spec).map_err(|e| Failure::validation(e.to_string()))
}

fn out_path(out_dir: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out_dir.join(p)
    }
}

fn write_file(path: &Path, contents: &str) -> RunResult {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Machine-readable solution report, field order fixed for determinism.
#[derive(Serialize)]
struct JsonReport {
    #[serde(rename = "J_total")]
    j_total: f64,
    #[serde(rename = "J_kinetic")]
    j_kinetic: f64,
    inertia_measure: f64,
    bc_residual: f64,
    el_residual_rms: f64,
    iterations: usize,
    converged: bool,
    variant: String,
}

impl JsonReport {
    fn from_report(report: &SolutionReport) -> Self {
        Self {
            j_total: report.cost.total,
            j_kinetic: report.cost.kinetic,
            inertia_measure: report.cost.inertia_measure,
            bc_residual: report.bc_residual,
            el_residual_rms: report.el_residual_rms,
            iterations: report.iterations,
            converged: report.converged,
            variant: report.variant.label().to_string(),
        }
    }
}

/// Trajectory CSV: one row per node, fixed header, 17 significant digits.
/// The stationarity residual column is empty at the two outermost nodes on
/// each side, where the central residual stencil does not reach.
fn trajectory_csv(curve: &dyn Curve, report: &SolutionReport, alpha: f64, mass: f64) -> String {
    let states = report.trajectory.states();
    let n = states.len() - 1;
    let residual = el_residual(curve, states, alpha, mass).unwrap_or_default();
    let mut out = String::from("t,p,dp,ddp,dddp,x,y,vx,vy,ax,ay,el_residual\n");
    for (i, z) in states.iter().enumerate() {
        let t = i as f64 / n as f64;
        let table = curve.derivatives(z.z0);
        let k = chain_kinematics(&table, z);
        let res = if i >= 2 && i + 2 <= n {
            residual.get(i - 2).map(|v| fmt(*v)).unwrap_or_default()
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt(t),
            fmt(z.z0),
            fmt(z.z1),
            fmt(z.z2),
            fmt(z.z3),
            fmt(table.x[0]),
            fmt(table.y[0]),
            fmt(k.vx),
            fmt(k.vy),
            fmt(k.ax),
            fmt(k.ay),
            res,
        );
    }
    out
}

fn solve_one(
    curve: &CurveModel,
    config: &RunConfig,
    alpha: f64,
    variant: Option<VariantName>,
) -> Result<SolutionReport, Failure> {
    let solver_cfg = config.solver_config(alpha, variant);
    solver_cfg.validate().map_err(|e| Failure::validation(e.to_string()))?;
    let result = match config.solver.method {
        Method::Auto => solve(curve, &solver_cfg),
        Method::Shoot => shoot(curve, &solver_cfg),
        Method::Oracle => solve_oracle_only(curve, &solver_cfg, &config.oracle_config()),
    };
    result.map_err(|e| Failure { outcome: classify(&e), message: e.to_string() })
}

/// `solve --config ...`: one weight, trajectory CSV plus JSON report.
pub fn run_solve(config_path: &Path, out_dir: &Path, variant: Option<VariantName>) -> RunResult {
    let config = load_config(config_path)?;
    let alpha = config.single_alpha().map_err(Failure::validation)?;
    let curve = build_curve(&config.curve)?;
    let report = solve_one(&curve, &config, alpha, variant)?;
    write_file(
        &out_path(out_dir, &config.output.csv_path),
        &trajectory_csv(&curve, &report, alpha, config.mass),
    )?;
    let json = serde_json::to_string_pretty(&JsonReport::from_report(&report))
        .expect("report serializes");
    write_file(&out_path(out_dir, &config.output.report_path), &(json + "\n"))?;
    if report.converged {
        Ok(())
    } else {
        Err(Failure::solver(format!(
            "solver did not reach newton_tol (bc_residual = {:.3e}); artifacts written",
            report.bc_residual
        )))
    }
}

fn with_suffix(path: &str, suffix: &str) -> String {
    let p = Path::new(path);
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = p.extension().and_then(|s| s.to_str()).unwrap_or("");
    let name = if ext.is_empty() {
        format!("{stem}{suffix}")
    } else {
        format!("{stem}{suffix}.{ext}")
    };
    match p.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir.join(name).to_string_lossy().into_owned(),
        _ => name,
    }
}

/// `sweep --config ...`: one artifact pair per weight plus a summary CSV
/// sorted by weight. Exits nonzero if any member fails or stalls.
pub fn run_sweep(config_path: &Path, out_dir: &Path, variant: Option<VariantName>) -> RunResult {
    let config = load_config(config_path)?;
    let alphas = config.alphas().map_err(Failure::validation)?;
    let curve = build_curve(&config.curve)?;
    let mut summary = String::from("alpha,J_total,J_kinetic,inertia_measure,max_abs_accel\n");
    let mut failures: Vec<String> = Vec::new();
    for (idx, &alpha) in alphas.iter().enumerate() {
        let tag = format!("_alpha{idx}");
        match solve_one(&curve, &config, alpha, variant) {
            Ok(report) => {
                let max_accel = report
                    .trajectory
                    .states()
                    .iter()
                    .map(|z| {
                        let k = chain_kinematics(&curve.derivatives(z.z0), z);
                        (k.ax * k.ax + k.ay * k.ay).sqrt()
                    })
                    .fold(0.0_f64, f64::max);
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{}",
                    fmt(alpha),
                    fmt(report.cost.total),
                    fmt(report.cost.kinetic),
                    fmt(report.cost.inertia_measure),
                    fmt(max_accel),
                );
                write_file(
                    &out_path(out_dir, &with_suffix(&config.output.csv_path, &tag)),
                    &trajectory_csv(&curve, &report, alpha, config.mass),
                )?;
                let json = serde_json::to_string_pretty(&JsonReport::from_report(&report))
                    .expect("report serializes");
                write_file(
                    &out_path(out_dir, &with_suffix(&config.output.report_path, &tag)),
                    &(json + "\n"),
                )?;
                if !report.converged {
                    failures.push(format!(
                        "alpha = {alpha}: stalled at bc_residual = {:.3e}",
                        report.bc_residual
                    ));
                }
            }
            Err(f) if f.outcome == Outcome::IoError => return Err(f),
            Err(f) => failures.push(format!("alpha = {alpha}: {}", f.message)),
        }
    }
    write_file(&out_path(out_dir, &with_suffix(&config.output.csv_path, "_summary")), &summary)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::solver(format!("sweep members failed: {}", failures.join("; "))))
    }
}

#[derive(Serialize)]
struct CompareReport {
    n: usize,
    analytic_vs_shoot: f64,
    analytic_vs_oracle: f64,
    shoot_vs_oracle: f64,
    shoot_converged: bool,
    oracle_converged: bool,
}

/// `compare --config ...`: line trajectories only; closed form vs shooting vs
/// transcription oracle, pairwise max deviation on the common grid.
pub fn run_compare(config_path: &Path, out_dir: &Path, variant: Option<VariantName>) -> RunResult {
    let config = load_config(config_path)?;
    let alpha = config.single_alpha().map_err(Failure::validation)?;
    if !matches!(config.curve, CurveSpec::Line { .. }) {
        return Err(Failure::validation("compare applies to line trajectories only"));
    }
    if config.n < 200 {
        return Err(Failure::validation("compare needs n >= 200 for the oracle grid"));
    }
    let curve = build_curve(&config.curve)?;
    let n = config.n;
    let analytic = line_analytic(config.p0, config.p1, alpha, config.mass)
        .map_err(|e| Failure::validation(e.to_string()))?;
    let analytic_law = TimeLaw::from_fn(n, |t| analytic.p(t))
        .map_err(|e| Failure::validation(e.to_string()))?;

    let solver_cfg = config.solver_config(alpha, variant);
    solver_cfg.validate().map_err(|e| Failure::validation(e.to_string()))?;
    let shot = shoot(&curve, &solver_cfg)
        .map_err(|e| Failure { outcome: classify(&e), message: e.to_string() })?;
    let shot_law = shot.trajectory.law();

    let mut oracle_cfg = config.oracle_config();
    oracle_cfg.n = n.max(200);
    let oracle = oracle_minimize(&curve, config.p0, config.p1, alpha, config.mass, &oracle_cfg)
        .map_err(|e| Failure { outcome: classify(&e), message: e.to_string() })?;

    let maxdev = |a: &TimeLaw, b: &TimeLaw| -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0_f64, f64::max)
    };
    let report = CompareReport {
        n,
        analytic_vs_shoot: maxdev(&analytic_law, &shot_law),
        analytic_vs_oracle: maxdev(&analytic_law, &oracle.law),
        shoot_vs_oracle: maxdev(&shot_law, &oracle.law),
        shoot_converged: shot.converged,
        oracle_converged: oracle.converged(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&out_path(out_dir, &config.output.report_path), &(json + "\n"))?;
    Ok(())
}

#[derive(Serialize)]
struct GradientCheck {
    max_mismatch: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ValidateReport {
    derivative_orders: Vec<serde_json::Value>,
    derivative_pass: bool,
    gradient: GradientCheck,
    pass: bool,
}

/// `validate --config ...`: derivative-table consistency plus a gradient
/// spot-check of the discretized functional.
pub fn run_validate(config_path: &Path, out_dir: &Path) -> RunResult {
    let config = load_config(config_path)?;
    let curve = build_curve(&config.curve)?;

    let span = (config.p1 - config.p0).abs().max(1.0);
    let lo = config.p0.min(config.p1) - 0.1 * span;
    let grid: Vec<f64> = (0..=100).map(|i| lo + 1.2 * span * i as f64 / 100.0).collect();
    let derivative_report = validate_derivatives(&curve, &grid, 1e-4, 1e-5)
        .map_err(|e| Failure::validation(e.to_string()))?;

    // gradient of the discretized functional vs central finite differences on
    // a deterministic rough law
    let n = 200usize;
    let alpha = config.alphas().map_err(Failure::validation)?[0];
    let dp = config.p1 - config.p0;
    let p: Vec<f64> = (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let base = config.p0 + dp * (3.0 * t * t - 2.0 * t * t * t);
            let rough = if i == 0 || i == n { 0.0 } else { 0.01 * (37.0 * i as f64).sin() };
            base + rough * dp.abs().max(1.0)
        })
        .collect();
    let (_, grad) = timelaw::discretize_cost(&curve, &p, alpha, config.mass)
        .map_err(|e| Failure::validation(e.to_string()))?;
    let eps = 1e-6;
    let mut max_mismatch = 0.0_f64;
    for j in (2..=n - 2).step_by(7) {
        let mut pp = p.clone();
        pp[j] += eps;
        let (jp, _) = timelaw::discretize_cost(&curve, &pp, alpha, config.mass)
            .map_err(|e| Failure::validation(e.to_string()))?;
        pp[j] = p[j] - eps;
        let (jm, _) = timelaw::discretize_cost(&curve, &pp, alpha, config.mass)
            .map_err(|e| Failure::validation(e.to_string()))?;
        let fd = (jp - jm) / (2.0 * eps);
        let ga = grad[j - 2];
        let mismatch = (ga - fd).abs() / ga.abs().max(fd.abs()).max(1e-9);
        max_mismatch = max_mismatch.max(mismatch);
    }
    let gradient = GradientCheck { max_mismatch, tolerance: 1e-6, pass: max_mismatch <= 1e-6 };

    let derivative_pass = derivative_report.all_pass();
    let pass = derivative_pass && gradient.pass;
    let report = ValidateReport {
        derivative_orders: derivative_report
            .orders
            .iter()
            .map(|o| serde_json::to_value(o).expect("order serializes"))
            .collect(),
        derivative_pass,
        gradient,
        pass,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&out_path(out_dir, &config.output.report_path), &(json + "\n"))?;
    if pass {
        Ok(())
    } else {
        Err(Failure::validation("validation checks failed; see report"))
    }
}

