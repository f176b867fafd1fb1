//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::Command;
use std::time::{Duration, Instant};

use pmstat::convergence::{ai_stat_conv_detect, Setting};
use pmstat::distfn::{levy_distance, StepDistFn};
use pmstat::harness::{density_property_checks, generate_suite, oracle_dl, random_levy_input, run_suite, RecipeKind, SuiteConfig};
use pmstat::summability::{ai_density, check_regularity, Ideal, IndexSet, SummMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(f: impl FnOnce() -> pmstat::Result<Outcome>) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = f().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
    (out, start.elapsed())
}

fn levy_against_oracle() -> pmstat::Result<Outcome> {
    const GRID: f64 = 1e-3;
    const DL_TOL: f64 = 1e-7;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e5);
    let fs: Vec<StepDistFn> = (0..1001).map(|_| random_levy_input(&mut rng)).collect();
    let (mut worst_oracle, mut worst_sym, mut worst_tri) = (0.0_f64, 0.0_f64, f64::NEG_INFINITY);
    let mut bad = 0;
    for i in 0..1000 {
        let (f, g, h) = (&fs[i], &fs[i + 1], &fs[(i * 7 + 3) % fs.len()]);
        let fg = levy_distance(f, g, DL_TOL)?;
        let gf = levy_distance(g, f, DL_TOL)?;
        let reference = oracle_dl(f, g, GRID)?;
        // The oracle returns the first feasible grid point, so it sits in
        // [d, d + GRID].
        let miss = if reference + 1e-6 < fg { fg - reference } else { (reference - fg - GRID).max(0.0) };
        worst_oracle = worst_oracle.max(miss);
        worst_sym = worst_sym.max((fg - gf).abs());
        let excess = fg - levy_distance(f, h, DL_TOL)? - levy_distance(h, g, DL_TOL)?;
        worst_tri = worst_tri.max(excess);
        if miss > 1e-6 || fg != gf || excess > 3e-6 {
            bad += 1;
        }
    }
    Ok(outcome(
        bad == 0,
        format!("1000 pairs, {bad} bad; oracle miss {worst_oracle:.1e}, asymmetry {worst_sym:.1e}, triangle excess {worst_tri:.1e}"),
    ))
}

fn neighbourhood_equivalence() -> pmstat::Result<Outcome> {
    const BAND: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(0x21);
    let e0 = StepDistFn::eps0();
    let (mut violations, mut banded) = (0, 0);
    for _ in 0..1000 {
        let f = random_levy_input(&mut rng);
        let t = rng.gen_range(0.01..1.2);
        let d = levy_distance(&f, &e0, 1e-9)?;
        if (d - t).abs() <= BAND {
            banded += 1;
            continue;
        }
        let in_neighbourhood = f.evaluate(t) > 1.0 - t;
        if in_neighbourhood != (d < t) {
            violations += 1;
        }
    }
    Ok(outcome(violations == 0, format!("1000 draws, {violations} violations, {banded} inside the tolerance band")))
}

fn regularity() -> pmstat::Result<Outcome> {
    let mut notes = Vec::new();
    let mut passed = true;
    for m in [SummMatrix::Cesaro, SummMatrix::Identity] {
        let r = check_regularity(&m, 10_000, 2e-3)?;
        let worst = r.conditions.iter().map(|c| c.residual).fold(0.0, f64::max);
        let ok = r.all_passed() && r.conditions.iter().all(|c| c.residual < 2e-3);
        passed &= ok;
        notes.push(format!("{} worst residual {worst:.1e}", m.name()));
    }
    let r = check_regularity(&SummMatrix::FirstColumn, 10_000, 2e-3)?;
    let caught = !r.get("vanishing-columns").expect("condition present").passed;
    passed &= caught;
    notes.push(format!("constant column rejected: {caught}"));
    Ok(outcome(passed, notes.join("; ")))
}

fn densities() -> pmstat::Result<Outcome> {
    let n = 10_000;
    let d = |s: &str| -> pmstat::Result<f64> {
        let set: IndexSet = s.parse()?;
        Ok(ai_density(&SummMatrix::Cesaro, &Ideal::Fin, &set, n, 0.01)?.value)
    };
    let evens = d("evens")?;
    let squares = d("squares")?;
    let finite = d("finite:1,2,3,5,8,13,21,34,55,89")?;
    let mut passed = (evens - 0.5).abs() <= 0.01 && squares.abs() <= 0.01 && finite.abs() <= 0.001;

    let mut rng = ChaCha8Rng::seed_from_u64(0xde);
    let mut evaluated = Vec::new();
    while evaluated.len() < 50 {
        let batch = density_property_checks(&mut rng, 10, n, 0.02);
        evaluated.extend(batch.into_iter().filter(|c| !c.detail.starts_with("skipped")));
    }
    evaluated.truncate(50);
    let failed = evaluated.iter().filter(|c| !c.passed).count();
    passed &= failed == 0;
    Ok(outcome(
        passed,
        format!("evens {evens:.4}, squares {squares:.4}, finite {finite:.5}; set pairs {failed}/50 failing"),
    ))
}

fn limit_recovery() -> pmstat::Result<Outcome> {
    let instances = generate_suite(1, 100);
    let (mut agree, mut alternators) = (0, 0);
    let mut disagreements = Vec::new();
    for inst in &instances {
        let s = Setting::new(&inst.space, &inst.matrix, &inst.ideal, 10_000, 0.02)?;
        let xs = s.terms(&inst.sequence);
        let mut accepted = Vec::new();
        for p in inst.space.points() {
            if ai_stat_conv_detect(&s, &xs, p)?.converged() {
                accepted.push(p);
            }
        }
        let expected: Vec<_> = inst.expected().limit.into_iter().collect();
        if inst.kind == RecipeKind::Alternator {
            alternators += 1;
        }
        if accepted == expected {
            agree += 1;
        } else {
            disagreements.push(inst.id);
        }
    }
    Ok(outcome(
        agree == instances.len(),
        format!("{agree}/{} instances agree ({alternators} alternators); disagreeing: {disagreements:?}", instances.len()),
    ))
}

fn theorem_suite() -> pmstat::Result<Outcome> {
    let report = run_suite(&SuiteConfig::default())?;
    let failures: Vec<String> = report.failures().map(|c| format!("{}@{:?}", c.check, c.instance)).collect();
    let controls = report.summary.iter().filter(|s| s.negative_control).count();
    Ok(outcome(
        report.ok(),
        format!(
            "{} checks over {} instances, {controls} negative controls; unexpected: {failures:?}",
            report.checks.len(),
            report.instances.len()
        ),
    ))
}

fn determinism() -> pmstat::Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("report{run}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_pmstat"))
            .args(["suite", "--seed", "1", "--out"])
            .arg(&path)
            .output()?
            .status;
        if !status.success() {
            return Ok(outcome(false, format!("suite run {run} exited with {status}")));
        }
        outputs.push(std::fs::read(&path)?);
    }
    Ok(outcome(outputs[0] == outputs[1], format!("two reports of {} bytes", outputs[0].len())))
}

fn main() {
    let criteria: [(&str, fn() -> pmstat::Result<Outcome>, Duration); 7] = [
        ("levy metric against oracle", levy_against_oracle, Duration::from_secs(30)),
        ("neighbourhood / levy equivalence", neighbourhood_equivalence, Duration::MAX),
        ("summability regularity", regularity, Duration::from_secs(5)),
        ("density calculus", densities, Duration::MAX),
        ("limit recovery and uniqueness", limit_recovery, Duration::MAX),
        ("theorem suite", theorem_suite, Duration::from_secs(300)),
        ("determinism", determinism, Duration::MAX),
    ];
    let mut all = true;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let (out, took) = timed(run);
        let in_time = took <= budget;
        let passed = out.passed && in_time;
        all &= passed;
        println!(
            "criterion {} {:<34} {}  ({:.2}s) {}{}",
            i + 1,
            name,
            if passed { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail,
            if in_time { "" } else { " [over time budget]" }
        );
    }
    if !all {
        std::process::exit(1);
    }
}
