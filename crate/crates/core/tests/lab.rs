use std::path::Path;
use std::process::Command;

use nhs_core::lab::{
    emit_report, generate_functions, generate_space, grid_points, power_weight, project_mean_zero, random_field,
    render_csv, render_json, run_experiments, ExperimentConfig, ExperimentReport, FunctionFamily, ReportFormat,
    SpaceSpec, Status, WeightSpec, ALL_CHECKS, CSV_HEADER, DEFAULT_MAX_POINTS,
};
use nhs_core::NhsError;
use proptest::prelude::*;
use serde_json::json;

fn config(checks: &[&str]) -> ExperimentConfig {
    ExperimentConfig {
        generator: SpaceSpec::grid(1, 16),
        checks: checks.iter().map(|c| c.to_string()).collect(),
        function_count: 5,
        ..ExperimentConfig::default()
    }
}

#[test]
fn grid_of_two_points() {
    let s = generate_space(&SpaceSpec::grid(1, 2), DEFAULT_MAX_POINTS).unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!(s.dist(0, 1), 1.0);
    assert_eq!(s.weights(), &[0.5, 0.5]);
    assert_eq!(s.coords().unwrap(), &[vec![0.0], vec![1.0]]);
}

#[test]
fn two_point_fixture() {
    let s = generate_space(&SpaceSpec::TwoPoint, DEFAULT_MAX_POINTS).unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!(s.dist(0, 1), 1.0);
    assert_eq!(s.weights(), &[1.0, 1.0]);
}

#[test]
fn lattice_layout() {
    let pts = grid_points(2, 3);
    assert_eq!(pts.len(), 9);
    assert_eq!(pts[0], vec![0.0, 0.0]);
    assert_eq!(pts[1], vec![0.0, 0.5]);
    assert_eq!(pts[3], vec![0.5, 0.0]);
    assert_eq!(pts[8], vec![1.0, 1.0]);
    let s = generate_space(&SpaceSpec::grid(2, 3), DEFAULT_MAX_POINTS).unwrap();
    assert!(s.weights().iter().all(|&w| (w - 1.0 / 9.0).abs() <= 1e-16));
}

#[test]
fn power_weights_follow_the_formula() {
    let spec = SpaceSpec::Grid { d: 1, n: 64, weights: WeightSpec::Power { a: 2.0 } };
    let s = generate_space(&spec, DEFAULT_MAX_POINTS).unwrap();
    for (i, &w) in s.weights().iter().enumerate() {
        let x = i as f64 / 63.0;
        let expected = (x + 1.0 / 64.0).powi(2) / 64.0;
        assert!((w - expected).abs() <= 1e-15 * expected, "atom {i}: {w} vs {expected}");
        assert_eq!(w, power_weight(&s.coords().unwrap()[i], 64, 1, 2.0));
    }
}

#[test]
fn random_weights_are_seeded_and_in_range() {
    let spec = SpaceSpec::Grid { d: 1, n: 50, weights: WeightSpec::Random { seed: 3 } };
    let a = generate_space(&spec, DEFAULT_MAX_POINTS).unwrap();
    let b = generate_space(&spec, DEFAULT_MAX_POINTS).unwrap();
    assert_eq!(a.weights(), b.weights());
    assert!(a.weights().iter().all(|&w| (1e-3..=1.0).contains(&w)));
    let other = SpaceSpec::Grid { d: 1, n: 50, weights: WeightSpec::Random { seed: 4 } };
    assert_ne!(generate_space(&other, DEFAULT_MAX_POINTS).unwrap().weights(), a.weights());
}

#[test]
fn generator_limits() {
    assert!(matches!(generate_space(&SpaceSpec::grid(2, 30), DEFAULT_MAX_POINTS), Err(NhsError::Spec(_))));
    assert!(generate_space(&SpaceSpec::grid(2, 30), 900).is_ok());
    assert!(matches!(generate_space(&SpaceSpec::grid(1, 0), DEFAULT_MAX_POINTS), Err(NhsError::Spec(_))));
    assert!(generate_space(&SpaceSpec::Atoms { atoms: vec![] }, DEFAULT_MAX_POINTS).is_err());
}

#[test]
fn indicator_family() {
    let s = generate_space(&SpaceSpec::grid(1, 11), DEFAULT_MAX_POINTS).unwrap();
    let fs = generate_functions(&s, &FunctionFamily::Indicator { center: 5, radius: 0.2 }, 2, None).unwrap();
    assert_eq!(fs.len(), 2);
    for f in fs {
        for (i, &v) in f.values.iter().enumerate() {
            let inside = s.dist(5, i) <= 0.2;
            assert_eq!(v, if inside { 1.0 } else { 0.0 }, "point {i}");
        }
    }
}

#[test]
fn function_families_are_deterministic() {
    let s = generate_space(&SpaceSpec::grid(2, 8), DEFAULT_MAX_POINTS).unwrap();
    for family in [FunctionFamily::RandomBounded { seed: 11 }, FunctionFamily::MeanZeroRandom { seed: 11 }] {
        let a = generate_functions(&s, &family, 6, None).unwrap();
        let b = generate_functions(&s, &family, 6, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
    }
    let a = generate_functions(&s, &FunctionFamily::RandomBounded { seed: 11 }, 3, None).unwrap();
    let c = generate_functions(&s, &FunctionFamily::RandomBounded { seed: 12 }, 3, None).unwrap();
    assert_ne!(a, c);
    assert!(a.iter().all(|f| f.values.iter().all(|v| v.abs() <= 1.0)));
}

#[test]
fn psi_adapted_needs_a_context() {
    let s = generate_space(&SpaceSpec::grid(1, 8), DEFAULT_MAX_POINTS).unwrap();
    assert!(generate_functions(&s, &FunctionFamily::PsiAdapted { seed: 1 }, 3, None).is_err());
}

#[test]
fn fields_sample_one_function_across_resolutions() {
    let coarse = generate_space(&SpaceSpec::grid(1, 5), DEFAULT_MAX_POINTS).unwrap();
    let fine = generate_space(&SpaceSpec::grid(1, 9), DEFAULT_MAX_POINTS).unwrap();
    let a = random_field(&coarse, 5, 2);
    let b = random_field(&fine, 5, 2);
    for i in 0..5 {
        assert!((a[i] - b[2 * i]).abs() <= 1e-12);
    }
}

proptest! {
    #[test]
    fn mean_zero_projection(seed in any::<u64>(), n in 2usize..40, a in -2.0f64..2.0) {
        let spec = SpaceSpec::Grid { d: 1, n, weights: WeightSpec::Power { a } };
        let s = generate_space(&spec, DEFAULT_MAX_POINTS).unwrap();
        let fs = generate_functions(&s, &FunctionFamily::MeanZeroRandom { seed }, 4, None).unwrap();
        // measured against Σ|f|w, which is at most 1 on unit-mass grids
        let check = |v: &[f64]| {
            let total: f64 = v.iter().zip(s.weights()).map(|(v, w)| v * w).sum();
            let scale: f64 = v.iter().zip(s.weights()).map(|(v, w)| (v * w).abs()).sum();
            (total.abs(), scale.max(1.0))
        };
        for f in fs {
            let (total, scale) = check(&f.values);
            prop_assert!(total <= 1e-14 * scale, "Σ f w = {total}, scale {scale}");
        }
        let mut v = random_field(&s, seed, 0);
        project_mean_zero(&s, &mut v);
        let (total, scale) = check(&v);
        prop_assert!(total <= 1e-14 * scale);
    }

    #[test]
    fn mean_zero_on_lebesgue_grids(seed in any::<u64>(), d in 1usize..=2, n in 2usize..20) {
        let s = generate_space(&SpaceSpec::grid(d, n), DEFAULT_MAX_POINTS).unwrap();
        for f in generate_functions(&s, &FunctionFamily::MeanZeroRandom { seed }, 4, None).unwrap() {
            let total: f64 = f.values.iter().zip(s.weights()).map(|(v, w)| v * w).sum();
            prop_assert!(total.abs() <= 1e-14, "Σ f w = {total}");
        }
    }
}

#[test]
fn empty_check_list() {
    let report = run_experiments(&config(&[])).unwrap();
    assert!(report.rows.is_empty());
    assert_eq!(report.exit_code(), 0);
    let csv = render_csv(&report).unwrap();
    assert_eq!(csv, format!("{}\n", CSV_HEADER.join(",")));
}

#[test]
fn constant_function_suite_passes() {
    let report = run_experiments(&config(&["constant_function"])).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].status, Status::Pass);
    assert!(report.rows[0].exact);
    assert_eq!(report.exit_code(), 0);
}

#[test]
fn one_row_csv() {
    let report = run_experiments(&config(&["metric"])).unwrap();
    let csv = render_csv(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "check,n,generator,value,lower,upper,witness,pass");
    assert!(lines[1].starts_with("metric,16,"), "{}", lines[1]);
    assert!(lines[1].ends_with(",pass"));
    assert!(csv.ends_with('\n') && !csv.ends_with("\n\n"));
}

#[test]
fn rows_follow_the_configured_order() {
    let checks = ["dini", "metric", "constant_function", "phi_gdec"];
    let report = run_experiments(&config(&checks)).unwrap();
    let names: Vec<&str> = report.rows.iter().map(|r| r.check.as_str()).collect();
    assert_eq!(names, checks);
}

#[test]
fn config_errors() {
    let unknown = ExperimentConfig::from_json(r#"{ "checks": ["no_such_check"] }"#);
    assert!(matches!(unknown, Err(NhsError::Spec(_))));
    let twice = ExperimentConfig::from_json(r#"{ "checks": ["metric", "metric"] }"#);
    assert!(matches!(twice, Err(NhsError::Spec(_))));
    let big = ExperimentConfig::from_json(r#"{ "generator": { "kind": "grid", "d": 1, "n": 600 } }"#);
    assert!(matches!(big, Err(NhsError::Spec(_))));
    let bad_q = ExperimentConfig::from_json(r#"{ "pointwise_q": 1.0 }"#);
    assert!(matches!(bad_q, Err(NhsError::Spec(_))));
    let defaults = ExperimentConfig::from_json("{}").unwrap();
    assert_eq!(defaults, ExperimentConfig::default());
    assert_eq!(defaults.checks.len(), ALL_CHECKS.len());
}

#[test]
fn json_round_trip_is_bit_exact() {
    let report = run_experiments(&config(&["metric", "k_properties", "phi_gdec", "dini", "maximal_lp"])).unwrap();
    let text = render_json(&report).unwrap();
    assert!(text.ends_with('\n') && !text.ends_with("\n\n"));
    let back = ExperimentReport::from_json(&text).unwrap();
    assert_eq!(back.rows.len(), report.rows.len());
    for (a, b) in report.rows.iter().zip(&back.rows) {
        assert_eq!(a.value.to_bits(), b.value.to_bits(), "{}", a.check);
        assert_eq!(a.lower.map(f64::to_bits), b.lower.map(f64::to_bits));
        assert_eq!(a.upper.map(f64::to_bits), b.upper.map(f64::to_bits));
    }
    assert_eq!(back.runtime_seconds.to_bits(), report.runtime_seconds.to_bits());
    assert_eq!(back.config, report.config);
}

#[test]
fn non_finite_values_survive_json() {
    let mut report = run_experiments(&config(&["metric"])).unwrap();
    report.rows[0].value = f64::INFINITY;
    report.rows[0].lower = Some(f64::NAN);
    let back = ExperimentReport::from_json(&render_json(&report).unwrap()).unwrap();
    assert_eq!(back.rows[0].value, f64::INFINITY);
    assert!(back.rows[0].lower.unwrap().is_nan());
}

#[test]
fn emitted_files_end_with_one_newline() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiments(&config(&["metric", "dini"])).unwrap();
    for name in ["r.json", "r.csv"] {
        let path = dir.path().join(name);
        emit_report(&report, ReportFormat::from_path(&path), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n') && !text.ends_with("\n\n"), "{name}");
    }
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(ReportFormat::from_path(Path::new("x.CSV")), ReportFormat::Csv);
    assert_eq!(ReportFormat::from_path(Path::new("x")), ReportFormat::Json);
}

#[test]
fn same_seed_same_report() {
    let cfg = config(&["campanato_norms", "maximal_lp", "sharp_lp", "john_nirenberg"]);
    let a = run_experiments(&cfg).unwrap();
    let b = run_experiments(&cfg).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.value.to_bits(), y.value.to_bits(), "{}", x.check);
        assert_eq!(x.witness, y.witness);
    }
}

fn nhs_lab(args: &[&str], seed: Option<&str>) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nhs-lab"));
    cmd.args(args).env_remove("NHS_LAB_SEED");
    if let Some(s) = seed {
        cmd.env("NHS_LAB_SEED", s);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, value: serde_json::Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let space = write(d, "space.json", json!({ "points": [[0.0], [1.0], [2.5], [3.0]], "weights": [1.0, 0.5, 2.0, 1.0] }));
    let f = write(d, "f.json", json!({ "values": [1.0, -1.0, 0.5, 0.0] }));
    let b = write(d, "b.json", json!({ "values": [0.0, 1.0, 2.0, 3.0] }));

    for args in [
        vec!["validate", space.as_str()],
        vec!["coeff", space.as_str(), "--tau", "3"],
        vec!["norms", space.as_str(), f.as_str()],
        vec!["operators", space.as_str(), f.as_str(), "--b", b.as_str()],
    ] {
        let out = nhs_lab(&args, None);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let report = ExperimentReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
        assert!(!report.rows.is_empty());
    }

    let bad = write(d, "bad.json", json!({ "distances": [[0.0, 1.0], [2.0, 0.0]], "weights": [1.0, 1.0] }));
    assert_eq!(nhs_lab(&["validate", &bad], None).status.code(), Some(2));
    assert_eq!(nhs_lab(&["validate", &d.join("missing.json").to_string_lossy()], None).status.code(), Some(2));
    assert_eq!(nhs_lab(&["coeff", &space, "--tau", "1"], None).status.code(), Some(2));
    let short = write(d, "short.json", json!({ "values": [1.0] }));
    assert_eq!(nhs_lab(&["norms", &space, &short], None).status.code(), Some(2));

    let unknown = write(d, "unknown.json", json!({ "checks": ["nope"] }));
    assert_eq!(nhs_lab(&["experiment", &unknown], None).status.code(), Some(2));
    let small = write(d, "small.json", json!({
        "generator": { "kind": "grid", "d": 1, "n": 8 },
        "checks": ["metric", "upper_doubling"],
        "function_count": 2
    }));
    assert_eq!(nhs_lab(&["experiment", &small], Some("nine")).status.code(), Some(2));
    assert_eq!(nhs_lab(&["experiment", &small], Some("9")).status.code(), Some(0));

    // λ far below μ fails the exact domination check
    let failing = write(d, "failing.json", json!({
        "generator": { "kind": "grid", "d": 1, "n": 8 },
        "lambda": { "explicit": { "coefficient": 1e-6, "exponent": 1.0 } },
        "checks": ["upper_doubling"],
        "function_count": 1
    }));
    let out = nhs_lab(&["experiment", &failing], None);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn cli_output_files_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = write(d, "cfg.json", json!({
        "generator": { "kind": "grid", "d": 1, "n": 12 },
        "checks": ["metric", "maximal_lp"],
        "function_count": 3,
        "seed": 1
    }));
    let csv_path = d.join("out.csv");
    let out = nhs_lab(&["experiment", &cfg, "-o", csv_path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().next(), Some("check,n,generator,value,lower,upper,witness,pass"));
    assert_eq!(csv.lines().count(), 3);

    let run = |seed: Option<&str>| {
        let out = nhs_lab(&["experiment", &cfg], seed);
        ExperimentReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap()
    };
    let base = run(None);
    assert_eq!(base.config.seed, 1);
    let overridden = run(Some("2"));
    assert_eq!(overridden.config.seed, 2);
    let flagged = {
        let out = nhs_lab(&["experiment", &cfg, "--seed", "5"], Some("2"));
        ExperimentReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap()
    };
    assert_eq!(flagged.config.seed, 2);
    assert_ne!(base.row("maximal_lp").unwrap().value, overridden.row("maximal_lp").unwrap().value);
}
