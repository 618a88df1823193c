mod common;

use common::*;
use nhs_core::error::MetricAxiom;
use nhs_core::mmspace::{
    build_space, estimate_geometric_doubling, fit_power_lambda, validate_lambda_comparability,
    validate_upper_doubling, validate_weak_reverse_doubling, DominatingFunction, GeometryProfile, PowerExponent,
    SpaceData, SpaceFile, DEFAULT_SLACK,
};
use nhs_core::NhsError;
use proptest::prelude::*;

fn dist_space(rows: Vec<Vec<f64>>) -> Result<nhs_core::PointCloudSpace, NhsError> {
    let n = rows.len();
    build_space(SpaceData::Distances(rows), vec![1.0; n])
}

#[test]
fn singleton_has_unit_mass_and_zero_diameter() {
    let s = build_space(SpaceData::Distances(vec![vec![0.0]]), vec![1.0]).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s.total_measure(), 1.0);
    assert_eq!(s.diameter(), 0.0);
    assert_eq!(s.candidate_radii(0), &[1.0]);
}

#[test]
fn two_points_from_coordinates() {
    let s = two_point([1.0, 1.0]);
    assert_eq!(s.dist(0, 1), 1.0);
    assert_eq!(s.total_measure(), 2.0);
    assert_eq!(s.candidate_radii(0), &[0.5, 1.0]);
}

#[test]
fn triangle_violation_names_the_triple() {
    let err = dist_space(vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]).unwrap_err();
    match err {
        NhsError::MetricViolation { axiom, mut points } => {
            assert_eq!(axiom, MetricAxiom::Triangle);
            points.sort();
            assert_eq!(points, vec![0, 1, 2]);
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn construction_rejects_bad_input() {
    assert!(matches!(
        build_space(SpaceData::Points(vec![]), vec![]),
        Err(NhsError::EmptySpace)
    ));
    assert!(matches!(
        build_space(SpaceData::Points(vec![vec![0.0], vec![1.0]]), vec![1.0, 0.0]),
        Err(NhsError::NonPositiveWeight { index: 1, .. })
    ));
    assert!(matches!(
        build_space(SpaceData::Points(vec![vec![0.0], vec![1.0]]), vec![1.0]),
        Err(NhsError::DimensionMismatch { .. })
    ));
    assert!(matches!(
        build_space(SpaceData::Distances(vec![vec![0.0, 1.0], vec![1.0]]), vec![1.0, 1.0]),
        Err(NhsError::DimensionMismatch { .. })
    ));
    let asym = dist_space(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
    assert!(matches!(asym, NhsError::MetricViolation { axiom: MetricAxiom::Symmetry, .. }));
    let merged = dist_space(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap_err();
    assert!(matches!(merged, NhsError::MetricViolation { axiom: MetricAxiom::Separation, .. }));
    let diag = dist_space(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap_err();
    assert!(matches!(diag, NhsError::MetricViolation { axiom: MetricAxiom::Diagonal, .. }));
}

#[test]
fn space_file_round_trip() {
    let s = line(&[0.0, 1.0, 3.0], &[1.0, 2.0, 3.0]);
    let text = serde_json::to_string(&s.to_file()).unwrap();
    let back = SpaceFile::from_json(&text).unwrap().into_space().unwrap();
    assert_eq!(back.len(), 3);
    assert_eq!(back.weights(), s.weights());
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(back.dist(i, j), s.dist(i, j));
        }
    }
}

#[test]
fn doubling_count_fixtures() {
    let single = line(&[0.0], &[1.0]);
    assert_eq!(estimate_geometric_doubling(&single), 1);
    assert_eq!(estimate_geometric_doubling(&two_point([1.0, 1.0])), 2);
    let grid = line(&[0.0, 1.0, 2.0, 3.0], &[1.0; 4]);
    let exact = candidate_balls(&grid)
        .into_iter()
        .map(|b| min_cover(&grid, &members(&grid, b.center, b.radius), b.radius / 2.0))
        .max()
        .unwrap();
    assert_eq!(estimate_geometric_doubling(&grid), exact);
}

#[test]
fn doubling_count_grows_under_grid_refinement() {
    for d in 1..=2usize {
        let mut previous = 0;
        for side in [2usize, 3, 5, 9] {
            let pts: Vec<Vec<f64>> = if d == 1 {
                (0..side).map(|i| vec![i as f64 / (side - 1) as f64]).collect()
            } else {
                (0..side * side)
                    .map(|k| vec![(k % side) as f64 / (side - 1) as f64, (k / side) as f64 / (side - 1) as f64])
                    .collect()
            };
            let n = pts.len();
            let s = build_space(SpaceData::Points(pts), vec![1.0; n]).unwrap();
            let n0 = estimate_geometric_doubling(&s);
            assert!(n0 >= previous, "d={d} side={side}: {n0} < {previous}");
            previous = n0;
        }
    }
}

#[test]
fn fitted_lambda_examples() {
    let single = line(&[0.0], &[1.0]);
    let lam = fit_power_lambda(&single, PowerExponent::Fixed(1.0)).unwrap();
    // C₀ = μ/r₀ with r₀ = 1
    assert_eq!(lam.eval(0, 1.0), 1.0);
    let s = two_point([1.0, 1.0]);
    let mut lam = fit_power_lambda(&s, PowerExponent::Fixed(1.0)).unwrap();
    assert_eq!(lam.eval(0, 1.0), 2.0);
    assert_eq!(lam.eval(0, 0.5), 1.0);
    assert_eq!(lam.c_lambda(), 2.0);
    let report = validate_upper_doubling(&s, &mut lam, DEFAULT_SLACK);
    assert!(report.pass);
    assert_eq!(report.details["max_measure_over_lambda"].as_f64(), Some(1.0));
    assert!(matches!(
        fit_power_lambda(&single, PowerExponent::Auto),
        Err(NhsError::DegenerateRadii)
    ));
    assert!(matches!(
        fit_power_lambda(&s, PowerExponent::Fixed(-1.0)),
        Err(NhsError::InvalidExponent(_))
    ));
}

#[test]
fn measure_as_lambda_breaks_half_radius_bound() {
    let s = two_point([1.0, 1000.0]);
    let probe = two_point([1.0, 1000.0]);
    let mut lam = DominatingFunction::custom(2.0, move |x, r| measure(&probe, x, r));
    let report = validate_upper_doubling(&s, &mut lam, DEFAULT_SLACK);
    assert!(!report.pass);
    assert_eq!(report.value, 1001.0);
    assert_eq!(report.worst_witness["failure"], "half_radius");
}

#[test]
fn constant_lambda_requires_unit_constant() {
    let s = line(&[0.0, 1.0, 2.5], &[1.0, 2.0, 0.5]);
    let mut lam = DominatingFunction::constant(s.total_measure());
    let report = validate_upper_doubling(&s, &mut lam, DEFAULT_SLACK);
    assert!(report.pass);
    assert_eq!(report.value, 1.0);
    assert_eq!(report.details["monotone"], true);
}

#[test]
fn comparability_examples() {
    let s = two_point([1.0, 1.0]);
    let lam = DominatingFunction::power(2.0, 1.0);
    let r = validate_lambda_comparability(&s, &lam, DEFAULT_SLACK);
    assert!(r.pass);
    assert_eq!(r.value, 1.0);

    let w = [1.0, 10.0];
    let lam = DominatingFunction::custom(2.0, move |x, r| w[x] * r);
    let r = validate_lambda_comparability(&s, &lam, DEFAULT_SLACK);
    assert!(!r.pass);
    assert_eq!(r.value, 10.0);

    let single = line(&[0.0], &[1.0]);
    let r = validate_lambda_comparability(&single, &lam, DEFAULT_SLACK);
    assert!(r.pass);
    assert_eq!(r.details["pairs"], 0);
}

#[test]
fn weak_reverse_doubling_series() {
    let s = line(&(0..16).map(|i| i as f64).collect::<Vec<_>>(), &[1.0; 16]);
    let linear = DominatingFunction::power(3.0, 1.0);
    let r = validate_weak_reverse_doubling(&linear, &s, 1.0, &[2.0]);
    assert!(r.pass);
    assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);

    let quadratic = DominatingFunction::power(3.0, 2.0);
    let r = validate_weak_reverse_doubling(&quadratic, &s, 0.25, &[2.0]);
    let expected = 1.0 / (4f64.powf(0.25) - 1.0);
    assert!(r.pass);
    assert!((r.value - expected).abs() < 1e-5, "{} vs {expected}", r.value);
    assert!((expected - 2.4142).abs() < 1e-4);

    let flat = DominatingFunction::constant(16.0);
    let r = validate_weak_reverse_doubling(&flat, &s, 1.0, &[2.0]);
    assert!(!r.pass);
    assert_eq!(r.worst_witness["failure"], "divergent");
}

#[test]
fn beta_is_monotone_in_alpha() {
    for (count, nu) in [(1usize, 0.0), (2, 0.5), (3, 1.0), (8, 2.5)] {
        let p = GeometryProfile::new(count, nu);
        let betas: Vec<f64> = [2.0, 5.0, 6.0, 30.0].iter().map(|&a| p.beta(a)).collect();
        assert!(betas.windows(2).all(|w| w[0] <= w[1]), "{betas:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn accepted_spaces_satisfy_the_axioms(seed in any::<u64>(), n in 1usize..24, dim in 1usize..4) {
        let s = random_space(&mut rng(seed), n, dim);
        for i in 0..n {
            prop_assert_eq!(s.dist(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(s.dist(i, j), s.dist(j, i));
                if i != j {
                    prop_assert!(s.dist(i, j) > 0.0);
                }
                for k in 0..n {
                    prop_assert!(s.dist(i, k) <= (s.dist(i, j) + s.dist(j, k)) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn fitted_lambda_dominates_every_candidate_ball(seed in any::<u64>(), n in 2usize..24, kappa in 0.2f64..3.0) {
        let s = random_space(&mut rng(seed), n, 2);
        let lam = fit_power_lambda(&s, PowerExponent::Fixed(kappa)).unwrap();
        let mut tight = false;
        for b in candidate_balls(&s) {
            let m = measure(&s, b.center, b.radius);
            let l = lam.eval(b.center, b.radius);
            prop_assert!(m <= l * (1.0 + 1e-12), "{m} > {l}");
            tight |= rel_err(m, l) <= 1e-12;
        }
        prop_assert!(tight);
        let mut lam = lam;
        prop_assert!(validate_upper_doubling(&s, &mut lam, DEFAULT_SLACK).pass);
    }

    #[test]
    fn greedy_count_bounds_the_minimum_cover(seed in any::<u64>(), n in 1usize..9) {
        let s = random_space(&mut rng(seed), n, 2);
        let exact = candidate_balls(&s)
            .into_iter()
            .map(|b| min_cover(&s, &members(&s, b.center, b.radius), b.radius / 2.0))
            .max()
            .unwrap();
        prop_assert!(estimate_geometric_doubling(&s) >= exact);
    }

    #[test]
    fn candidate_radii_match_the_distance_scan(seed in any::<u64>(), n in 1usize..20) {
        let s = random_space(&mut rng(seed), n, 3);
        let oracle = candidate_balls(&s);
        let mut k = 0;
        for c in 0..n {
            for &r in s.candidate_radii(c) {
                prop_assert_eq!(oracle[k].center, c);
                prop_assert_eq!(oracle[k].radius, r);
                prop_assert!(rel_err(s.measure_of(c, r), measure(&s, c, r)) <= 1e-12);
                prop_assert_eq!(s.member_count(c, r), members(&s, c, r).len());
                k += 1;
            }
        }
        prop_assert_eq!(k, oracle.len());
    }
}
