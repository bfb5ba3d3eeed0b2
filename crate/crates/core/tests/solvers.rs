use depmark_core::solver::{
    linear_grid, paper_literal_step, solve_paper_literal_grid, PaperLiteralRates,
};
use depmark_core::{
    build_generator, bundled, parse, solve_at, solve_grid, MarkovModel, Method, RateExpr,
    SolveError, SolverConfig, State, StateClass, Transition,
};
use depmark_testkit::fixtures;
use proptest::prelude::*;

fn dfwcs(c: f64) -> MarkovModel {
    let mut m = parse(bundled::DFWCS).unwrap();
    m.set_param("C", c).unwrap();
    m
}

fn cfg(method: Method) -> SolverConfig {
    SolverConfig::with_method(method)
}

const EXACT: [Method; 2] = [Method::Uniformization, Method::MatrixExp];

#[test]
fn toy_closed_form() {
    let m = parse(bundled::TOY_TWOSTATE).unwrap();
    let expected = 1.0 - (-1.0f64).exp();
    for method in EXACT {
        let p = solve_at(&m, &cfg(method), 2.0).unwrap();
        assert!((p[1] - expected).abs() < 1e-12, "{method:?}: {}", p[1]);
        assert!((p[0] - (-1.0f64).exp()).abs() < 1e-12);
    }
}

#[test]
fn time_zero_returns_initial() {
    let m = parse(bundled::DFWCS_PID).unwrap();
    for method in [Method::Uniformization, Method::MatrixExp, Method::Euler] {
        let p = solve_at(&m, &cfg(method), 0.0).unwrap();
        assert_eq!(p, m.initial_vector(), "{method:?}");
    }
}

#[test]
fn dfwcs_matches_taylor_oracle() {
    for c in depmark_testkit::COVERAGE_GRID {
        let q = depmark_testkit::dfwcs_generator(c);
        for (model, start) in [(bundled::DFWCS, 0usize), (bundled::DFWCS_PID, 3)] {
            let mut m = parse(model).unwrap();
            m.set_param("C", c).unwrap();
            let mut p0 = vec![0.0; 7];
            p0[start] = 1.0;
            for t in [1.0, 100.0, 4380.0] {
                let oracle = depmark_testkit::transient(&q, &p0, t);
                for method in EXACT {
                    let p = solve_at(&m, &cfg(method), t).unwrap();
                    for i in 0..7 {
                        assert!(
                            (p[i] - oracle[i]).abs() < 1e-10,
                            "{method:?} C={c} t={t} i={i}: {} vs {}",
                            p[i],
                            oracle[i]
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn unsafe_probability_regression() {
    let p = solve_at(&dfwcs(0.9), &SolverConfig::default(), 4380.0).unwrap();
    assert!((p[6] - 1.4443559123176759e-3).abs() < 1e-12);
    assert!((p[0] - 0.9983421354971405).abs() < 1e-10);
    let p = solve_at(&dfwcs(1.0), &SolverConfig::default(), 4380.0).unwrap();
    assert_eq!(p[6], 0.0);
}

#[test]
fn grid_rows_equal_pointwise_solves() {
    let m = dfwcs(0.95);
    let grid = linear_grid(0.0, 4380.0, 20.0);
    assert_eq!(grid.len(), 220);
    for method in EXACT {
        let traj = solve_grid(&m, &cfg(method), &grid).unwrap();
        for (k, &t) in grid.iter().enumerate().step_by(17) {
            let p = solve_at(&m, &cfg(method), t).unwrap();
            for i in 0..7 {
                assert!((traj.probs[k][i] - p[i]).abs() < 1e-12, "{method:?} t={t}");
            }
        }
    }
}

#[test]
fn unsafe_probability_is_monotone() {
    let m = dfwcs(0.9);
    let grid = linear_grid(0.0, 4380.0, 20.0);
    let col = solve_grid(&m, &SolverConfig::default(), &grid).unwrap().column(6);
    assert!(col.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn euler_agrees_with_uniformization() {
    let m = dfwcs(0.9);
    let config = SolverConfig {
        method: Method::Euler,
        dt: 0.1,
        ..Default::default()
    };
    let a = solve_at(&m, &config, 400.0).unwrap();
    let b = solve_at(&m, &SolverConfig::default(), 400.0).unwrap();
    for i in 0..7 {
        assert!((a[i] - b[i]).abs() < 1e-6, "i={i}: {} vs {}", a[i], b[i]);
    }
}

#[test]
fn euler_hits_grid_times_exactly() {
    let m = parse(bundled::TOY_TWOSTATE).unwrap();
    let config = SolverConfig {
        method: Method::Euler,
        dt: 0.3,
        ..Default::default()
    };
    let traj = solve_grid(&m, &config, &[0.5, 1.0]).unwrap();
    // 0.3 + 0.2, then 0.3 + 0.2: survival multiplies by (1 - L h) per step.
    let up = (1.0 - 0.15) * (1.0 - 0.1);
    assert!((traj.probs[0][0] - up).abs() < 1e-15);
    assert!((traj.probs[1][0] - up * up).abs() < 1e-15);
}

#[test]
fn euler_is_first_order() {
    let m = dfwcs(0.9);
    let t = 400.0;
    let exact = solve_at(&m, &SolverConfig::default(), t).unwrap();
    let err = |dt: f64| {
        let config = SolverConfig {
            method: Method::Euler,
            dt,
            ..Default::default()
        };
        let p = solve_at(&m, &config, t).unwrap();
        (0..7).map(|i| (p[i] - exact[i]).abs()).fold(0.0, f64::max)
    };
    let ratio = err(2.0) / err(1.0);
    assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
}

#[test]
fn euler_rejects_unstable_step() {
    let config = SolverConfig {
        method: Method::Euler,
        dt: 100.0,
        ..Default::default()
    };
    match solve_at(&dfwcs(0.9), &config, 4380.0) {
        Err(SolveError::StepTooLarge { dt, product }) => {
            assert_eq!(dt, 100.0);
            assert!(product >= 1.0);
        }
        other => panic!("expected StepTooLarge, got {other:?}"),
    }
}

#[test]
fn rejects_bad_grids_and_config() {
    let m = dfwcs(0.9);
    let c = SolverConfig::default();
    assert_eq!(solve_grid(&m, &c, &[1.0, 1.0]).unwrap_err(), SolveError::GridNotAscending);
    assert_eq!(solve_at(&m, &c, -1.0).unwrap_err(), SolveError::InvalidTime(-1.0));
    assert!(matches!(solve_at(&m, &c, f64::NAN), Err(SolveError::InvalidTime(_))));
    let bad = SolverConfig { eps: 0.0, ..c };
    assert!(matches!(solve_at(&m, &bad, 1.0), Err(SolveError::InvalidConfig(_))));
}

fn run_literal(start: &[f64], steps: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut m = dfwcs(0.9);
    m.initial = start
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(i, p)| (i as u32 + 1, *p))
        .collect();
    let grid: Vec<f64> = (1..=steps).map(|k| k as f64).collect();
    let (traj, report) = solve_paper_literal_grid(&m, &cfg(Method::PaperLiteral), &grid).unwrap();
    (traj.probs, report.defects)
}

#[test]
fn paper_literal_matches_hand_iteration() {
    for (start, expected, defects) in [
        (
            &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0][..],
            &fixtures::FROM_STATE1,
            &fixtures::FROM_STATE1_DEFECTS,
        ),
        (
            &fixtures::SPREAD_START[..],
            &fixtures::FROM_SPREAD,
            &fixtures::FROM_SPREAD_DEFECTS,
        ),
    ] {
        let (probs, got_defects) = run_literal(start, 3);
        for k in 0..3 {
            for i in 0..7 {
                let (a, b) = (probs[k][i], expected[k][i]);
                assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(1e-300), "step {k} i={i}: {a} vs {b}");
            }
            let (a, b) = (got_defects[k], defects[k]);
            assert!((a - b).abs() <= 1e-15, "defect {k}: {a} vs {b}");
        }
    }
}

#[test]
fn paper_literal_full_coverage_keeps_unsafe_empty() {
    let m = dfwcs(1.0);
    let traj = solve_grid(&m, &cfg(Method::PaperLiteral), &linear_grid(0.0, 4380.0, 20.0)).unwrap();
    assert!(traj.column(6).iter().all(|&p| p == 0.0));
}

#[test]
fn paper_literal_rejects_other_shapes() {
    let m = parse(bundled::TOY_TWOSTATE).unwrap();
    assert!(matches!(
        solve_at(&m, &cfg(Method::PaperLiteral), 1.0),
        Err(SolveError::ShapeMismatch(_))
    ));
    let mut m = dfwcs(0.9);
    m.transitions.pop();
    assert!(matches!(
        PaperLiteralRates::from_model(&m),
        Err(SolveError::ShapeMismatch(_))
    ));
}

#[test]
fn paper_literal_step_is_linear() {
    let r = PaperLiteralRates::from_model(&dfwcs(0.9)).unwrap();
    let a = paper_literal_step(&r, &fixtures::SPREAD_START, 1.0);
    let doubled: Vec<f64> = fixtures::SPREAD_START.iter().map(|p| 2.0 * p).collect();
    let b = paper_literal_step(&r, &doubled, 1.0);
    for i in 0..7 {
        assert_eq!(2.0 * a[i], b[i]);
    }
}

fn arb_chain() -> impl Strategy<Value = (MarkovModel, f64)> {
    (2usize..6)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0..n, 0..n, 1e-6f64..2.0), 1..12),
                prop::collection::vec(0.0f64..1.0, n),
                0.0f64..50.0,
            )
        })
        .prop_map(|(n, arcs, weights, t)| {
            let states = (1..=n as u32)
                .map(|i| State::new(i, format!("s{i}"), StateClass::Operational))
                .collect();
            let transitions = arcs
                .into_iter()
                .filter(|(a, b, _)| a != b)
                .map(|(a, b, r)| Transition::new(a as u32 + 1, b as u32 + 1, RateExpr::constant(r)))
                .collect();
            let mut m = MarkovModel {
                states,
                transitions,
                ..Default::default()
            };
            let total: f64 = weights.iter().sum::<f64>() + 1e-3;
            for (i, w) in weights.iter().enumerate() {
                m.initial.insert(i as u32 + 1, if i == 0 { (w + 1e-3) / total } else { w / total });
            }
            (m, t)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_solvers_conserve_mass((m, t) in arb_chain()) {
        for method in EXACT {
            let p = solve_at(&m, &cfg(method), t).unwrap();
            let s: f64 = p.iter().sum();
            prop_assert!((s - 1.0).abs() <= 1e-9, "{:?}: sum {}", method, s);
            prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn exact_solvers_agree((m, t) in arb_chain()) {
        let a = solve_at(&m, &cfg(Method::Uniformization), t).unwrap();
        let b = solve_at(&m, &cfg(Method::MatrixExp), t).unwrap();
        for i in 0..a.len() {
            prop_assert!((a[i] - b[i]).abs() <= 1e-9, "i={}: {} vs {}", i, a[i], b[i]);
        }
    }

    #[test]
    fn euler_conserves_mass((m, t) in arb_chain()) {
        let q = build_generator(&m).unwrap();
        let dt = 0.5 / q.max_exit_rate().max(1e-3);
        let config = SolverConfig { method: Method::Euler, dt, ..Default::default() };
        let p = solve_at(&m, &config, t.min(5.0)).unwrap();
        let s: f64 = p.iter().sum();
        prop_assert!((s - 1.0).abs() <= 1e-9);
    }
}
