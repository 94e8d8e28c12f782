//! Acceptance suite: one test per shipped requirement, each printing a
//! pass/fail line with the measured values (run with `--nocapture` to see the
//! lines for passing criteria).
//!
//! Three checks are known to sit beyond what f64 single shooting and the
//! pinned 2nd-order residual stencils can deliver and fail honestly with
//! their measured floors; see the project README for the analysis summary:
//! criterion 1's alpha = 1e-3 leg, parts of criterion 3, and the stationarity
//! sub-test of criterion 4.

mod common;

use std::time::Instant;

use timelaw::{
    evaluate_cost, line_analytic, make_curve, oracle_minimize, shoot, solve,
    solve_oracle_only, CurveModel, CurveSpec, OracleConfig, RhsVariant, SolverConfig, TimeLaw,
};

const PI: f64 = std::f64::consts::PI;

fn report(criterion: &str, failures: &[String], detail: String) {
    if failures.is_empty() {
        println!("{criterion}: PASS — {detail}");
    } else {
        println!("{criterion}: FAIL — {} [measured: {detail}]", failures.join("; "));
        panic!("{criterion}: FAIL — {} [measured: {detail}]", failures.join("; "));
    }
}

fn curve(spec: CurveSpec) -> CurveModel {
    make_curve(&spec).expect("valid curve")
}

/// Criterion 1 — line analytic agreement: y = -2x + 1, p0 = 0, p1 = 1, m = 1,
/// alpha in {1e-3, 1e-2, 0.25}: shooting vs closed form within 1e-6 at
/// n = 1000, under 1 s per case.
#[test]
fn criterion_1_line_analytic_agreement() {
    let c = curve(CurveSpec::Line { k: -2.0, b: 1.0 });
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for alpha in [1e-3, 1e-2, 0.25] {
        let cfg = SolverConfig::new(alpha, 1.0, 0.0, 1.0, 1000);
        let t0 = Instant::now();
        let result = shoot(&c, &cfg);
        let elapsed = t0.elapsed().as_secs_f64();
        match result {
            Ok(rep) => {
                let analytic = line_analytic(0.0, 1.0, alpha, 1.0).unwrap();
                let maxdev = rep
                    .trajectory
                    .states()
                    .iter()
                    .enumerate()
                    .map(|(i, z)| (z.z0 - analytic.p(i as f64 / 1000.0)).abs())
                    .fold(0.0_f64, f64::max);
                details.push(format!("alpha={alpha}: maxdev={maxdev:.2e} ({elapsed:.2}s)"));
                if maxdev > 1e-6 {
                    failures.push(format!("alpha={alpha}: max|p - p_analytic| = {maxdev:.3e} > 1e-6"));
                }
                if elapsed >= 1.0 {
                    failures.push(format!("alpha={alpha}: runtime {elapsed:.2}s >= 1s"));
                }
            }
            Err(e) => failures.push(format!("alpha={alpha}: shoot failed: {e}")),
        }
    }
    report("criterion 1 (line analytic agreement)", &failures, details.join(", "));
}

/// Criterion 2 — both printed forms of the line-law denominator agree to
/// 1e-12 relative for gamma in {0.1, 1, 2, 10, 20} (exact rational
/// evaluation), and the production value matches them to 1e-12.
#[test]
fn criterion_2_delta_identity() {
    let mut failures = Vec::new();
    let mut worst_forms = 0.0_f64;
    let mut worst_prod = 0.0_f64;
    for gamma in [0.1, 1.0, 2.0, 10.0, 20.0] {
        let (form1, form2) = common::delta_forms_exact(gamma);
        let gap = common::relative_gap(&form1, &form2);
        worst_forms = worst_forms.max(gap);
        if gap > 1e-12 {
            failures.push(format!("gamma={gamma}: printed forms differ by {gap:.3e} relative"));
        }
        let alpha = 1.0 / (gamma * gamma);
        let law = line_analytic(0.0, 1.0, alpha, 1.0).unwrap();
        let reference = common::to_f64(&form2);
        let rel = (law.delta - reference).abs() / reference.abs();
        worst_prod = worst_prod.max(rel);
        if rel > 1e-12 {
            failures.push(format!("gamma={gamma}: production delta off by {rel:.3e} relative"));
        }
    }
    report(
        "criterion 2 (delta identity)",
        &failures,
        format!("forms gap <= {worst_forms:.1e}, production error <= {worst_prod:.1e}"),
    );
}

/// Criterion 3 — circle semicircle, R = 1, p0 = 0, p1 = pi, m = 1, alpha in
/// {1e-3, 1e-2, 1e-1}: converged, bc <= 1e-8, reflection symmetry <= 1e-6,
/// stationarity residual RMS <= 1e-4 at n = 2000, oracle J within 0.1%,
/// under 10 s per case.
#[test]
fn criterion_3_circle_semicircle() {
    let c = curve(CurveSpec::Circle { r: 1.0 });
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for alpha in [1e-3, 1e-2, 1e-1] {
        let mut cfg = SolverConfig::new(alpha, 1.0, 0.0, PI, 2000);
        cfg.newton_tol = 1e-9;
        let t0 = Instant::now();
        let solved = solve(&c, &cfg);
        let elapsed = t0.elapsed().as_secs_f64();
        let rep = match solved {
            Ok(rep) => rep,
            Err(e) => {
                failures.push(format!("alpha={alpha}: solve failed: {e} ({elapsed:.1}s)"));
                continue;
            }
        };
        if !rep.converged {
            failures.push(format!("alpha={alpha}: not converged (bc={:.2e})", rep.bc_residual));
        }
        if rep.bc_residual > 1e-8 {
            failures.push(format!("alpha={alpha}: bc_residual {:.3e} > 1e-8", rep.bc_residual));
        }
        let s = rep.trajectory.states();
        let n = s.len() - 1;
        let sym = (0..=n).map(|i| (s[i].z0 + s[n - i].z0 - PI).abs()).fold(0.0_f64, f64::max);
        if sym > 1e-6 {
            failures.push(format!("alpha={alpha}: reflection symmetry {sym:.3e} > 1e-6"));
        }
        if rep.el_residual_rms > 1e-4 {
            failures.push(format!(
                "alpha={alpha}: el residual rms {:.3e} > 1e-4",
                rep.el_residual_rms
            ));
        }
        let oracle = oracle_minimize(&c, 0.0, PI, alpha, 1.0, &OracleConfig::with_n(2000)).unwrap();
        let rel_j = (oracle.cost.total - rep.cost.total).abs() / rep.cost.total;
        if rel_j > 1e-3 {
            failures.push(format!("alpha={alpha}: oracle J gap {rel_j:.3e} > 1e-3"));
        }
        let total = t0.elapsed().as_secs_f64();
        if total >= 10.0 {
            failures.push(format!("alpha={alpha}: runtime {total:.1}s >= 10s"));
        }
        details.push(format!(
            "alpha={alpha}: bc={:.1e} sym={sym:.1e} el={:.1e} relJ={rel_j:.1e} ({total:.1}s)",
            rep.bc_residual, rep.el_residual_rms
        ));
    }
    report("criterion 3 (circle semicircle)", &failures, details.join(", "));
}

/// Criterion 4 — variant adjudication on the ellipse a = 1, b = 2, p0 = 0,
/// p1 = 2 pi, alpha = 1e-2, m = 1: exactly one right-hand-side variant passes
/// both the residual test (RMS <= 1e-4) and the 0.1% oracle-J agreement; that
/// variant is the shipped default.
#[test]
fn criterion_4_variant_adjudication() {
    let c = curve(CurveSpec::Ellipse { a: 1.0, b: 2.0 });
    let (alpha, p1) = (1e-2, 2.0 * PI);
    let oracle = oracle_minimize(&c, 0.0, p1, alpha, 1.0, &OracleConfig::with_n(2000)).unwrap();
    let mut passes = Vec::new();
    let mut details = Vec::new();
    for variant in [RhsVariant::ExpandedFromFTerms, RhsVariant::PaperPrinted] {
        let mut cfg = SolverConfig::new(alpha, 1.0, 0.0, p1, 2000);
        cfg.variant = variant;
        match solve(&c, &cfg) {
            Ok(rep) => {
                let rel_j = (oracle.cost.total - rep.cost.total).abs() / rep.cost.total;
                let el_ok = rep.el_residual_rms <= 1e-4;
                let j_ok = rel_j <= 1e-3;
                passes.push((variant, el_ok && j_ok));
                details.push(format!(
                    "{}: el={:.2e} ({}), relJ={rel_j:.2e} ({})",
                    variant.label(),
                    rep.el_residual_rms,
                    if el_ok { "ok" } else { "fail" },
                    if j_ok { "ok" } else { "fail" },
                ));
            }
            Err(e) => {
                passes.push((variant, false));
                details.push(format!("{}: no trajectory ({e})", variant.label()));
            }
        }
    }
    let both: Vec<&str> =
        passes.iter().filter(|(_, p)| *p).map(|(v, _)| v.label()).collect();
    let mut failures = Vec::new();
    if both.len() != 1 {
        failures.push(format!(
            "expected exactly one variant to pass both tests, got {} [{}] — {}",
            both.len(),
            both.join(","),
            details.join("; ")
        ));
    } else if both[0] != RhsVariant::default().label() {
        failures.push(format!("passing variant {} is not the shipped default", both[0]));
    }
    report("criterion 4 (variant adjudication)", &failures, details.join("; "));
}

/// Criterion 5 — regularization path: for line, circle and ellipse, over
/// alpha in {1e-3, 1e-2, 1e-1, 1}, the minimizer's inertia measure is
/// non-increasing and its kinetic energy non-decreasing (slack 1e-9).
#[test]
fn criterion_5_regularization_path() {
    let cases: [(&str, CurveModel, f64); 3] = [
        ("line", curve(CurveSpec::Line { k: -2.0, b: 1.0 }), 1.0),
        ("circle", curve(CurveSpec::Circle { r: 1.0 }), PI),
        ("ellipse", curve(CurveSpec::Ellipse { a: 1.0, b: 2.0 }), 2.0 * PI),
    ];
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for (name, c, p1) in &cases {
        let mut kin_prev = f64::NEG_INFINITY;
        let mut inm_prev = f64::INFINITY;
        let mut kins = Vec::new();
        for alpha in [1e-3, 1e-2, 1e-1, 1.0] {
            let sol =
                oracle_minimize(c, 0.0, *p1, alpha, 1.0, &OracleConfig::with_n(2000)).unwrap();
            let cost = evaluate_cost(c, &sol.law, alpha, 1.0).unwrap();
            if cost.kinetic < kin_prev - 1e-9 {
                failures.push(format!(
                    "{name}: kinetic decreased at alpha={alpha} ({} -> {})",
                    kin_prev, cost.kinetic
                ));
            }
            if cost.inertia_measure > inm_prev + 1e-9 {
                failures.push(format!(
                    "{name}: inertia increased at alpha={alpha} ({} -> {})",
                    inm_prev, cost.inertia_measure
                ));
            }
            kin_prev = cost.kinetic;
            inm_prev = cost.inertia_measure;
            kins.push(format!("{:.4}", cost.kinetic));
        }
        details.push(format!("{name}: kinetic [{}]", kins.join(" -> ")));
    }
    report("criterion 5 (regularization path)", &failures, details.join("; "));
}

/// Criterion 6 — optimality against candidates: every test configuration's
/// solution costs no more than the cubic and quintic rest-to-rest laws.
#[test]
fn criterion_6_optimality_vs_candidates() {
    let cases: [(&str, CurveModel, f64); 4] = [
        ("line", curve(CurveSpec::Line { k: -2.0, b: 1.0 }), 1.0),
        ("circle", curve(CurveSpec::Circle { r: 1.0 }), PI),
        ("parabola", curve(CurveSpec::Parabola { k: 1.0, b: 0.0 }), 1.0),
        ("ellipse", curve(CurveSpec::Ellipse { a: 1.0, b: 2.0 }), 2.0 * PI),
    ];
    let mut failures = Vec::new();
    let mut count = 0;
    for (name, c, p1) in &cases {
        for alpha in [1e-3, 1e-2, 1e-1, 1.0] {
            let sol =
                oracle_minimize(c, 0.0, *p1, alpha, 1.0, &OracleConfig::with_n(2000)).unwrap();
            let j = evaluate_cost(c, &sol.law, alpha, 1.0).unwrap().total;
            let cubic = TimeLaw::smoothstep(0.0, *p1, 2000).unwrap();
            let quintic = TimeLaw::quintic(0.0, *p1, 2000).unwrap();
            let j_cubic = evaluate_cost(c, &cubic, alpha, 1.0).unwrap().total;
            let j_quintic = evaluate_cost(c, &quintic, alpha, 1.0).unwrap().total;
            if j > j_cubic {
                failures.push(format!("{name} alpha={alpha}: J={j:.6} > cubic {j_cubic:.6}"));
            }
            if j > j_quintic {
                failures.push(format!("{name} alpha={alpha}: J={j:.6} > quintic {j_quintic:.6}"));
            }
            count += 1;
        }
    }
    report(
        "criterion 6 (optimality vs candidates)",
        &failures,
        format!("{count} configurations dominated both candidate laws"),
    );
}

/// Criterion 7 — the analytic gradient of the discretized cost matches
/// central finite differences (step 1e-6) within 1e-6 relative, on every
/// component of 10 random laws per curve family.
#[test]
fn criterion_7_gradient_correctness() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20260811);
    let cases: [(&str, CurveModel, f64); 4] = [
        ("line", curve(CurveSpec::Line { k: -2.0, b: 1.0 }), 1.0),
        ("circle", curve(CurveSpec::Circle { r: 1.0 }), PI),
        ("parabola", curve(CurveSpec::Parabola { k: 1.0, b: 0.0 }), 1.0),
        ("ellipse", curve(CurveSpec::Ellipse { a: 1.0, b: 2.0 }), 2.0 * PI),
    ];
    let n = 200;
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for (name, c, p1) in &cases {
        for law_idx in 0..10 {
            let mut p: Vec<f64> = (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    let rough: f64 = rng.gen_range(-0.025..0.025);
                    p1 * (3.0 * t * t - 2.0 * t * t * t) + rough * p1.abs().max(1.0)
                })
                .collect();
            p[0] = 0.0;
            p[n] = *p1;
            let (_, grad) = timelaw::discretize_cost(c, &p, 0.01, 1.0).unwrap();
            let eps = 1e-6;
            for j in 2..=n - 2 {
                let mut pp = p.clone();
                pp[j] += eps;
                let (jp, _) = timelaw::discretize_cost(c, &pp, 0.01, 1.0).unwrap();
                pp[j] = p[j] - eps;
                let (jm, _) = timelaw::discretize_cost(c, &pp, 0.01, 1.0).unwrap();
                let fd = (jp - jm) / (2.0 * eps);
                let ga = grad[j - 2];
                let rel = (ga - fd).abs() / ga.abs().max(fd.abs()).max(1e-300);
                // the finite-difference probe itself carries rounding noise of
                // order eps_machine * J / step; differences below that level
                // carry no information about the gradient
                let fd_noise = 3e-9;
                if (ga - fd).abs() > fd_noise {
                    worst = worst.max(rel);
                }
                if rel > 1e-6 && (ga - fd).abs() > fd_noise {
                    failures.push(format!(
                        "{name} law {law_idx} node {j}: mismatch {rel:.3e} ({ga:.6e} vs {fd:.6e})"
                    ));
                }
            }
        }
    }
    failures.truncate(5);
    report(
        "criterion 7 (gradient correctness)",
        &failures,
        format!("worst componentwise mismatch {worst:.2e}"),
    );
}

/// Criterion 8 — solutions depend on alpha and mass only through their
/// product: solve(alpha, m) equals solve(alpha m, 1) within 1e-10.
#[test]
fn criterion_8_alpha_mass_invariance() {
    let mut failures = Vec::new();
    let mut details = Vec::new();

    let line = curve(CurveSpec::Line { k: -2.0, b: 1.0 });
    let mut cfg_a = SolverConfig::new(0.01, 2.0, 0.0, 1.0, 1000);
    let mut cfg_b = SolverConfig::new(0.02, 1.0, 0.0, 1.0, 1000);
    let ra = shoot(&line, &cfg_a).unwrap();
    let rb = shoot(&line, &cfg_b).unwrap();
    let dev_line = ra
        .trajectory
        .states()
        .iter()
        .zip(rb.trajectory.states())
        .map(|(x, y)| (x.z0 - y.z0).abs())
        .fold(0.0_f64, f64::max);
    details.push(format!("line maxdev {dev_line:.2e}"));
    if dev_line > 1e-10 {
        failures.push(format!("line: |solve(0.01,2) - solve(0.02,1)| = {dev_line:.3e} > 1e-10"));
    }

    let circle = curve(CurveSpec::Circle { r: 1.0 });
    cfg_a = SolverConfig::new(0.01, 2.0, 0.0, PI, 1000);
    cfg_b = SolverConfig::new(0.02, 1.0, 0.0, PI, 1000);
    cfg_a.newton_tol = 1e-9;
    cfg_b.newton_tol = 1e-9;
    let ra = solve(&circle, &cfg_a).unwrap();
    let rb = solve(&circle, &cfg_b).unwrap();
    let dev_circle = ra
        .trajectory
        .states()
        .iter()
        .zip(rb.trajectory.states())
        .map(|(x, y)| (x.z0 - y.z0).abs())
        .fold(0.0_f64, f64::max);
    details.push(format!("circle maxdev {dev_circle:.2e}"));
    if dev_circle > 1e-10 {
        failures.push(format!("circle: |solve(0.01,2) - solve(0.02,1)| = {dev_circle:.3e} > 1e-10"));
    }
    report("criterion 8 (alpha-mass invariance)", &failures, details.join(", "));
}

/// Criterion 9 — vanishing-stiffness limit: line with alpha m = 1e6 deviates
/// from the cubic smoothstep by at most 1e-5.
#[test]
fn criterion_9_smoothstep_limit() {
    let c = curve(CurveSpec::Line { k: -2.0, b: 1.0 });
    let cfg = SolverConfig::new(1e6, 1.0, 0.0, 1.0, 1000);
    let rep = solve(&c, &cfg).unwrap();
    let smooth = TimeLaw::smoothstep(0.0, 1.0, 1000).unwrap();
    let dev = rep
        .trajectory
        .states()
        .iter()
        .zip(smooth.values())
        .map(|(z, s)| (z.z0 - s).abs())
        .fold(0.0_f64, f64::max);
    let failures = if dev <= 1e-5 {
        vec![]
    } else {
        vec![format!("max deviation from smoothstep {dev:.3e} > 1e-5")]
    };
    report("criterion 9 (smoothstep limit)", &failures, format!("max deviation {dev:.2e}"));
}

/// Criterion 10 — integrator order: doubling the grid shrinks the line
/// endpoint error by a factor between 12 and 20.
#[test]
fn criterion_10_rk4_order() {
    let c = curve(CurveSpec::Line { k: -2.0, b: 1.0 });
    let analytic = line_analytic(0.0, 1.0, 0.25, 1.0).unwrap();
    let z0 = analytic.state_at(0.0);
    let endpoint_error = |n: usize| {
        let cfg = SolverConfig::new(0.25, 1.0, 0.0, 1.0, n);
        let traj = timelaw::integrate_ivp(&c, z0, &cfg).unwrap();
        (traj.states()[n].z0 - analytic.p(1.0)).abs()
    };
    let (e1, e2) = (endpoint_error(100), endpoint_error(200));
    let ratio = e1 / e2;
    let failures = if (12.0..=20.0).contains(&ratio) {
        vec![]
    } else {
        vec![format!("error ratio {ratio:.2} outside [12, 20] ({e1:.3e} -> {e2:.3e})")]
    };
    report("criterion 10 (rk4 order)", &failures, format!("ratio {ratio:.2}"));
}

/// The oracle-only path must serve the configurations single shooting cannot
/// reach, and agree with shooting where both work.
#[test]
fn oracle_only_path_consistency() {
    let c = curve(CurveSpec::Circle { r: 1.0 });
    let cfg = SolverConfig::new(1e-3, 1.0, 0.0, PI, 2000);
    let rep = solve_oracle_only(&c, &cfg, &OracleConfig::with_n(2000)).unwrap();
    assert!(rep.converged);
    assert_eq!(rep.bc_residual, 0.0);
    assert!(rep.cost.total > 0.0);
    let mut cfg2 = SolverConfig::new(1e-2, 1.0, 0.0, PI, 2000);
    cfg2.newton_tol = 1e-9;
    let shot = solve(&c, &cfg2).unwrap();
    let or2 = solve_oracle_only(&c, &cfg2, &OracleConfig::with_n(2000)).unwrap();
    let rel = (shot.cost.total - or2.cost.total).abs() / shot.cost.total;
    assert!(rel <= 1e-3, "oracle-only vs shooting J gap {rel:.3e}");
}
