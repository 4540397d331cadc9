//! Acceptance criteria, one pass/fail line each.
//!
//! Runs without the libtest harness so the report is printed even when every
//! criterion passes. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use lsl_core::experiment::{run_experiment, ExperimentConfig, ExperimentOutput, Preset};
use lsl_core::imaging::{assemble_system, ExactField};
use lsl_core::rom::DEFAULT_TRUNCATION;
use lsl_core::*;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Criterion = fn() -> Result<Outcome>;

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("1 forward solver vs analytic background", forward_oracle),
        ("2 Loewner pencil equals Gram oracle", loewner_gram),
        ("3 Galerkin interpolation at samples", galerkin_interpolation),
        ("4 Lanczos contract", lanczos_contract),
        ("5 zero contrast", zero_contrast),
        ("6 imaging with exact internal fields", exact_imaging),
        ("7 LSL internal field near truth", internal_field),
        ("8 Gaussian ordering", gaussian_ordering),
        ("9 step ordering and Gibbs localization", step_ordering),
        ("10 full pipeline runtime", pipeline_runtime),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed().as_secs_f64();
        match result {
            Ok(o) => {
                println!("[{}] {name} ({elapsed:.2}s): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
                if !o.pass {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("[FAIL] {name} ({elapsed:.2}s): error: {e}");
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn forward_oracle() -> Result<Outcome> {
    let start = Instant::now();
    let plan = weyl_sample(5, 4, 1.0)?;
    let exact: Vec<f64> = plan
        .lambdas
        .iter()
        .map(|&l| analytic_background_transfer(l, 1.0))
        .collect::<Result<_>>()?;
    let max_err = |n: usize| -> Result<f64> {
        let grid = Grid::new(1.0, n)?;
        let data = generate_dataset(&Potential::Zero, &plan.lambdas, &grid)?;
        Ok(data
            .values()
            .iter()
            .zip(&exact)
            .map(|(f, f0)| ((f - f0) / f0).abs())
            .fold(0.0, f64::max))
    };
    let at_default = max_err(2001)?;
    let elapsed = start.elapsed();

    let errors: Vec<f64> = [251, 501, 1001, 2001].iter().map(|&n| max_err(n)).collect::<Result<_>>()?;
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let orders_ok = orders.iter().all(|o| (1.8..=2.2).contains(o));
    Ok(outcome(
        plan.lambdas.len() == 20 && at_default < 1e-4 && orders_ok && elapsed < Duration::from_secs(1),
        format!(
            "{} points, max rel err {at_default:.2e} at n=2001 in {:.3}s, orders {:.3?}",
            plan.lambdas.len(),
            elapsed.as_secs_f64(),
            orders
        ),
    ))
}

fn max_rel_entry(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| ((x - y) / y).abs())
        .fold(0.0, f64::max)
}

fn loewner_gram() -> Result<Outcome> {
    let grid = Grid::new(1.0, 2001)?;
    let plan = weyl_sample(10, 3, 1.0)?;
    let potentials = [
        ("zero", Potential::Zero),
        ("constant", Potential::Constant { value: 2.0 }),
        ("gaussian", Potential::gaussian_preset(1.0)),
        ("step", Potential::step_preset(1.0)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, p) in potentials {
        let data = generate_dataset(&p, &plan.lambdas, &grid)?;
        let pencil = build_loewner(&data)?;
        let snapshots = SnapshotMatrix::compute(&p, &plan.lambdas, &grid)?;
        let oracle = gram_oracle(&snapshots, &p)?;
        let es = max_rel_entry(&pencil.stiffness, &oracle.stiffness);
        let em = max_rel_entry(&pencil.mass, &oracle.mass);
        let eb = max_rel_entry(
            &DMatrix::from_column_slice(pencil.source.len(), 1, pencil.source.as_slice()),
            &DMatrix::from_column_slice(oracle.source.len(), 1, oracle.source.as_slice()),
        );
        let worst = es.max(em).max(eb);
        pass &= worst < 1e-5;
        parts.push(format!("{name} S {es:.1e} M {em:.1e} b {eb:.1e}"));
    }
    Ok(outcome(pass, parts.join(", ")))
}

fn galerkin_interpolation() -> Result<Outcome> {
    let grid = Grid::new(1.0, 2001)?;
    let plan = weyl_sample(10, 3, 1.0)?;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, p) in [("gaussian", Potential::gaussian_preset(1.0)), ("step", Potential::step_preset(1.0))] {
        let data = generate_dataset(&p, &plan.lambdas, &grid)?;
        let factors = lanczos(&build_loewner(&data)?, DEFAULT_TRUNCATION)?;
        let snapshots = SnapshotMatrix::compute(&p, &plan.lambdas, &grid)?;
        let mut local: f64 = 0.0;
        for (j, &l) in plan.lambdas.iter().enumerate() {
            let rom = galerkin_internal(&snapshots, &factors, l)?;
            let truth = snapshots.snapshot(j);
            let diff: Vec<f64> = rom.values.iter().zip(&truth.values).map(|(a, b)| a - b).collect();
            local = local.max(grid.norm(&diff) / grid.norm(&truth.values));
        }
        worst = worst.max(local);
        parts.push(format!("{name} max rel err {local:.2e} (k={})", factors.rank()));
    }
    Ok(outcome(worst < 1e-5, parts.join(", ")))
}

/// Generalized eigenvalues of `(S, M)` for SPD `M`, ascending.
fn generalized_eigenvalues(s: &DMatrix<f64>, m: &DMatrix<f64>) -> Vec<f64> {
    let chol = m.clone().cholesky().expect("mass must be positive definite");
    let l = chol.l();
    let linv = l.clone().try_inverse().unwrap();
    let c = &linv * s * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    sorted(SymmetricEigen::new(c).eigenvalues.iter().copied().collect())
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn check_contract(pencil: &LoewnerPencil) -> Result<(f64, f64, f64, usize, bool)> {
    let f = lanczos(pencil, DEFAULT_TRUNCATION)?;
    let again = lanczos(pencil, DEFAULT_TRUNCATION)?;
    let identical = f == again;
    let orth = f.orthonormality_defect(&pencil.mass);
    let proj = f.projection_defect(&pencil.stiffness);
    let ev_t = sorted(SymmetricEigen::new(f.tridiagonal.to_dense()).eigenvalues.iter().copied().collect());
    let ev = generalized_eigenvalues(&pencil.stiffness, &pencil.mass);
    let scale = ev.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let eig_err = if ev_t.len() == ev.len() {
        ev_t.iter().zip(&ev).map(|(a, b)| (a - b).abs() / scale).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok((orth, proj, eig_err, f.rank(), identical))
}

fn lanczos_contract() -> Result<Outcome> {
    // full-rank pencils: a synthetic one and data-driven ones small enough
    // that M is numerically nonsingular
    let m = 6;
    let b = DMatrix::from_fn(m, m, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 1.0 } else { 0.0 });
    let mass = &b * b.transpose() + DMatrix::identity(m, m);
    let stiffness = DMatrix::from_fn(m, m, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { i as f64 } else { 0.0 });
    let synthetic = LoewnerPencil {
        stiffness,
        mass,
        source: DVector::from_fn(m, |i, _| 1.0 + i as f64),
        lambdas: (0..m).map(|i| -(i as f64) - 1.0).collect(),
    };
    let grid = Grid::new(1.0, 2001)?;
    let mut pencils = vec![("synthetic m=6".to_string(), synthetic)];
    for (n_int, f) in [(1, 2), (2, 2), (1, 3)] {
        let plan = weyl_sample(n_int, f, 1.0)?;
        let data = generate_dataset(&Potential::gaussian_preset(1.0), &plan.lambdas, &grid)?;
        pencils.push((format!("gaussian N={n_int} f={f}"), build_loewner(&data)?));
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, pencil) in &pencils {
        let (orth, proj, eig, k, identical) = check_contract(pencil)?;
        let full = k == pencil.dim();
        pass &= full && orth < 1e-10 && proj < 1e-10 && eig < 1e-8 && identical;
        parts.push(format!(
            "{name} k={k}/{} QMQ {orth:.1e} QSQ {proj:.1e} eig {eig:.1e}{}",
            pencil.dim(),
            if identical { "" } else { " NOT REPRODUCIBLE" }
        ));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn zero_contrast() -> Result<Outcome> {
    let plan = weyl_sample(10, 3, 1.0)?;
    let grid = Grid::new(1.0, 2001)?;
    let data = generate_dataset(&Potential::Zero, &plan.lambdas, &grid)?;
    let data0 = generate_dataset(&Potential::Zero, &plan.lambdas, &grid)?;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for method in [Method::Born, Method::Lsl] {
        let r = reconstruct(&data, &data0, method, &ReconstructionConfig::default())?;
        let sup = r.estimate.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        worst = worst.max(sup);
        parts.push(format!("{method} sup {sup:.1e}"));
    }
    Ok(outcome(worst < 1e-6, parts.join(", ")))
}

fn exact_imaging() -> Result<Outcome> {
    let plan = weyl_sample(10, 4, 1.0)?;
    let grid = Grid::new(1.0, 2001)?;
    let p = Potential::gaussian_preset(1.0);
    let data = generate_dataset(&p, &plan.lambdas, &grid)?;
    let data0 = generate_dataset(&Potential::Zero, &plan.lambdas, &grid)?;
    let snapshots = SnapshotMatrix::compute(&p, &plan.lambdas, &grid)?;
    let system = assemble_system(&data, &data0, &ExactField { snapshots: &snapshots }, &grid)?;
    let r = solve_regularized(&system, imaging::DEFAULT_THRESHOLD)?;
    let err = relative_l2_error(&r.estimate, &p.evaluate(&grid)?, &grid)?;
    Ok(outcome(err < 1e-2, format!("rel L2 err {err:.2e}, rank {}", r.rank)))
}

fn preset(p: Preset, f: usize) -> Result<ExperimentOutput> {
    run_experiment(&ExperimentConfig::preset(p, f)).map_err(|e| e.source)
}

fn internal_field() -> Result<Outcome> {
    let out = preset(Preset::Gaussian, 4)?;
    let (lsl, background) = out.internal_errors();
    Ok(outcome(
        lsl < 0.2 * background,
        format!(
            "lambda {:.3}: err(LSL) {lsl:.2e}, err(background) {background:.2e}, ratio {:.3}",
            out.internal.lambda,
            lsl / background
        ),
    ))
}

fn errors(out: &ExperimentOutput) -> (f64, f64) {
    (
        out.error(Method::Lsl).unwrap_or(f64::INFINITY),
        out.error(Method::Born).unwrap_or(f64::INFINITY),
    )
}

fn gaussian_ordering() -> Result<Outcome> {
    let mut pass = true;
    let mut lsl_by_f = Vec::new();
    let mut parts = Vec::new();
    for f in [3, 4, 5] {
        let (lsl, born) = errors(&preset(Preset::Gaussian, f)?);
        pass &= lsl < born;
        lsl_by_f.push(lsl);
        parts.push(format!("f={f} LSL {lsl:.4e} Born {born:.3e}"));
    }
    pass &= lsl_by_f[2] <= lsl_by_f[0];
    Ok(outcome(pass, parts.join(", ")))
}

/// Distance in nodes from each jump of `p_true` to the largest overshoot of
/// `p_est` outside the range of `p_true` within the neighbouring plateaus.
fn overshoot_distances(p_est: &[f64], p_true: &[f64]) -> Vec<(usize, usize, f64)> {
    let lo = p_true.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = p_true.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let jumps: Vec<usize> = (1..p_true.len()).filter(|&i| p_true[i] != p_true[i - 1]).collect();
    let mut out = Vec::new();
    for (j, &jump) in jumps.iter().enumerate() {
        let left = if j == 0 { 0 } else { (jumps[j - 1] + jump) / 2 };
        let right = jumps.get(j + 1).map_or(p_true.len(), |&next| (jump + next) / 2);
        let (node, size) = (left..right)
            .map(|i| (i, (p_est[i] - hi).max(lo - p_est[i]).max(0.0)))
            .fold((jump, 0.0), |best, c| if c.1 > best.1 { c } else { best });
        out.push((jump, node.abs_diff(jump), size));
    }
    out
}

fn step_ordering() -> Result<Outcome> {
    let mut ordering = true;
    let mut localized = true;
    let mut parts = Vec::new();
    for f in [3, 4, 5] {
        let out = preset(Preset::Step, f)?;
        let (lsl, born) = errors(&out);
        ordering &= lsl < born;
        let est = &out.reconstruction(Method::Lsl).expect("lsl was run").estimate;
        let d = overshoot_distances(est, &out.p_true);
        localized &= !d.is_empty() && d.iter().all(|&(_, dist, _)| dist <= 10);
        let ds: Vec<String> = d.iter().map(|(_, dist, size)| format!("{size:.2}@{dist}")).collect();
        parts.push(format!("f={f} LSL {lsl:.3} Born {born:.3} overshoot {}", ds.join("/")));
    }
    Ok(outcome(
        ordering && localized,
        format!(
            "ordering {}, localization {}: {}",
            if ordering { "ok" } else { "violated" },
            if localized { "ok" } else { "violated (overshoot size@nodes from jump)" },
            parts.join(", ")
        ),
    ))
}

fn pipeline_runtime() -> Result<Outcome> {
    let mut slowest = 0.0_f64;
    let mut m_max = 0;
    for p in [Preset::Gaussian, Preset::Step, Preset::Zero] {
        for f in [3, 4, 5] {
            let start = Instant::now();
            let out = preset(p, f)?;
            slowest = slowest.max(start.elapsed().as_secs_f64());
            m_max = m_max.max(out.data.len());
        }
    }
    Ok(outcome(
        slowest < 60.0 && m_max <= 50,
        format!("9 presets, slowest {slowest:.2}s, max m {m_max}"),
    ))
}
