//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line
//! with its measured value, pinned tolerance and runtime budget; the process
//! exits non-zero if any criterion fails. Runs without the libtest harness so
//! the lines are always shown.

use std::f64::consts::{E, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use gthresh::report::Report;
use gthresh_core::bath::{CorrelationFunction, Kernel, SpatialStructure, SpectralDensity};
use gthresh_core::geometry::Schedule;
use gthresh_core::oracle::suite;
use gthresh_core::strength::{gaussian_e, gaussian_epsilon};
use gthresh_core::threshold::{
    diagram_bound, level_reduce, malignant_threshold, postselect_threshold, single_location_bound,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn criterion(id: u32, title: &'static str, budget_secs: f64, check: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = check();
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
        budget: Duration::from_secs_f64(budget_secs),
    }
}

fn cnot_bound() -> (bool, String) {
    let dir = tempfile::TempDir::new().unwrap();
    let cfg = dir.path().join("cnot.json");
    std::fs::write(
        &cfg,
        r#"{"spectrum":{"kind":"ohmic","A":1e-3,"tau_c":1},"dephasing":{"n":9,"t0_over_tauc":1e3}}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gthresh"))
        .args(["dephasing", "--format", "json", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    if !out.status.success() {
        return (false, String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    let eps = report.table("dephasing").unwrap().column("eps_cnot").unwrap()[0]
        .as_f64()
        .unwrap();
    (
        (1.80e-6..=1.85e-6).contains(&eps),
        format!("eps_cnot = {eps:.6e}, window [1.80e-6, 1.85e-6]"),
    )
}

fn ohmic_strength() -> (bool, String) {
    let (amplitude, t0) = (1e-3, 1.0);
    let tau = 1e-2 * t0;
    let run = || -> gthresh_core::Result<f64> {
        let spec = SpectralDensity::ohmic(amplitude, tau)?;
        let corr = CorrelationFunction::uniform(Kernel::from_spectrum(&spec), 1, SpatialStructure::Uncorrelated)?;
        let schedule = Schedule::uniform(1, 100, t0, 1)?.with_total_duration(100.0 * t0)?;
        let integrated = gaussian_e(&schedule, &corr)?.value;
        Ok(gaussian_epsilon(integrated)?.epsilon)
    };
    match run() {
        Ok(eps) => {
            let closed = (PI * 2.0 * E * amplitude).sqrt() * (t0 / tau).sqrt();
            let rel = (eps - closed).abs() / closed;
            (
                rel <= 0.02,
                format!("eps = {eps:.6e}, closed form {closed:.6e}, rel {rel:.2e} (tol 2e-2)"),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn suite_check(run: fn() -> gthresh_core::Result<(usize, f64)>, tol: f64) -> (bool, String) {
    match run() {
        Ok((cases, dev)) => (
            dev <= tol,
            format!("{cases} cases, max deviation {dev:.3e} (tol {tol:.0e})"),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn moments() -> (bool, String) {
    let (even_ok, even) = suite_check(suite::wick_fock_deviation, 1e-8);
    let (odd_ok, odd) = suite_check(suite::odd_moment_magnitude, 1e-10);
    (even_ok && odd_ok, format!("even: {even}; odd: {odd}"))
}

fn inclusion_exclusion() -> (bool, String) {
    match suite::inclusion_exclusion_mismatches() {
        Ok((cases, bad)) => (bad == 0, format!("{cases} (f, s) pairs, {bad} mismatches")),
        Err(e) => (false, e.to_string()),
    }
}

fn diagrams() -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for i in 1..=50 {
        let integrated = 0.01 * f64::from(i);
        for r in 1..=10 {
            let b = diagram_bound(integrated, r).unwrap();
            worst = worst.max(b.partial_sum / b.closed_bound);
            cases += 1;
        }
        let (refined, coarse) = single_location_bound(integrated).unwrap();
        if refined > coarse {
            return (false, format!("E + 4E^2 > 3E at E = {integrated}"));
        }
    }
    (
        worst <= 1.0,
        format!("{cases} (E, r) cases, max partial/closed {worst:.4}"),
    )
}

fn threshold_algebra() -> (bool, String) {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let triples = (1u64..1_000_000, 0u64..1_000_000, 0u64..100_000_000);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (b, c, d) = triples.new_tree(&mut runner).unwrap().current();
        let (bf, cf, df) = (b as f64, c as f64, d as f64);
        let (m, p) = match (malignant_threshold(b, d), postselect_threshold(b, c, d)) {
            (Ok(m), Ok(p)) => (m, p.closed_form),
            (Err(e), _) | (_, Err(e)) => return (false, format!("B={b} C={c} D={d}: {e}")),
        };
        let lhs = bf * m * m + df * m.powi(3);
        worst = worst.max((lhs - m).abs() / m);
        let lhs = (bf * p * p + df * p.powi(3)) / (1.0 - cf * p);
        worst = worst.max((lhs - p).abs() / p);
    }
    let mut exact = true;
    for b in [1u64, 3, 7, 100, 12_345, 999_999] {
        let one_over_b = 1.0 / b as f64;
        exact &= malignant_threshold(b, 0).unwrap() == one_over_b;
        exact &= postselect_threshold(b, 0, 0).unwrap().closed_form == one_over_b;
    }
    (
        worst <= 1e-12 && exact,
        format!("1000 triples, max relative residual {worst:.2e} (tol 1e-12); D=C=0 gives 1/B exactly: {exact}"),
    )
}

fn levels() -> (bool, String) {
    let threshold = 3.7e-4;
    let fixed = level_reduce(threshold, threshold, 3, 8).unwrap();
    let fixed_ok = fixed.per_level.iter().all(|&e| e == threshold);
    let halved = level_reduce(threshold / 2.0, threshold, 2, 3).unwrap();
    let got = halved.per_level[3];
    let exact = got == threshold / 256.0;
    (
        fixed_ok && exact,
        format!(
            "fixed point held: {fixed_ok}; level 3 of eps0/2 = {got:e}, eps0/256 = {:e}",
            threshold / 256.0
        ),
    )
}

fn verify_command() -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gthresh"))
        .args(["verify", "--format", "json"])
        .output()
        .unwrap();
    (
        out.status.code() == Some(0),
        format!("exit code {:?}", out.status.code()),
    )
}

fn main() {
    let outcomes = [
        criterion(1, "CNOT gadget bound", 1.0, cnot_bound),
        criterion(2, "Ohmic strength vs closed form", 30.0, ohmic_strength),
        criterion(3, "Ohmic Fourier transform", 5.0, || {
            suite_check(suite::ohmic_transform_deviation, 1e-6)
        }),
        criterion(4, "Wick sum vs Fock moments", 60.0, moments),
        criterion(5, "dephasing simulation", 120.0, || {
            suite_check(suite::dephasing_deviation, 1e-6)
        }),
        criterion(6, "inclusion-exclusion identity", 5.0, inclusion_exclusion),
        criterion(7, "diagram bounds", 1.0, diagrams),
        criterion(8, "threshold algebra", 5.0, threshold_algebra),
        criterion(9, "level recursion", 1.0, levels),
        criterion(10, "verify command exits 0", 300.0, verify_command),
    ];
    let mut failed = 0;
    for o in &outcomes {
        let in_time = o.elapsed <= o.budget;
        let ok = o.passed && in_time;
        failed += usize::from(!ok);
        println!(
            "{} criterion {:>2} {}: {} [{:.3} s, budget {:.0} s{}]",
            if ok { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs_f64(),
            if in_time { "" } else { ", over budget" },
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
