use std::collections::BTreeMap;

use ogan_core::signal::{normalize, InputChannel, InputSpec, TestInput};
use ogan_core::stl::{eval_boolean, eval_robustness, SignalRange};
use ogan_core::sut::{
    basin_falsifying_fraction, sut_deceptive_ridge_with, sut_first_order_speed, sut_quadratic_basin,
    RidgeParameters, SutError, SutSpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn throttle(values: &[f64]) -> TestInput {
    let r = SignalRange::new(0.0, 100.0).unwrap();
    TestInput::new(values.iter().map(|&v| normalize(v, r)).collect())
}

#[test]
fn basin_monte_carlo_measure_matches_closed_form() {
    let radius = 0.15;
    let sut = sut_quadratic_basin([0.0; 3], radius).unwrap();
    let req = sut.default_requirement().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 1_000_000;
    let mut hits = 0usize;
    for _ in 0..n {
        let u: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let trace = sut.execute(&TestInput::new(u)).unwrap().trace;
        if !eval_boolean(&req, &trace, 0).unwrap() {
            hits += 1;
        }
    }
    let p = basin_falsifying_fraction(radius);
    assert!((p - 1.767e-3).abs() < 1e-6);
    let estimate = hits as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((estimate - p).abs() < 3.0 * se, "estimate {estimate}, closed form {p}, se {se}");
}

/// Analytic speed for constant throttle `u`: `5u (1 - e^{-0.01 t})`.
fn constant_speed(u: f64, t: f64) -> f64 {
    5.0 * u * (1.0 - (-0.01 * t).exp())
}

#[test]
fn ridge_verdicts_on_constant_inputs_match_analytic_oracle() {
    let p = RidgeParameters::default();
    let sut = sut_deceptive_ridge_with(p).unwrap();
    let req = sut.default_requirement().unwrap();
    let mut disagreements = Vec::new();
    let mut falsifying = 0;
    for k in 0..=1000 {
        let u = k as f64 * 0.1;
        let trace = sut.execute(&throttle(&[u; 6])).unwrap().trace;
        let monitor_falsified = !eval_boolean(&req, &trace, 0).unwrap();
        // v is increasing, so the band holds on [a, 30] iff v(a) >= lo and v(30) <= hi.
        let lo_margin = constant_speed(u, p.window_start) - p.band_lo;
        let hi_margin = p.band_hi - constant_speed(u, 30.0);
        if lo_margin.abs() < 1e-6 || hi_margin.abs() < 1e-6 {
            continue;
        }
        let oracle = lo_margin > 0.0 && hi_margin > 0.0;
        falsifying += oracle as usize;
        if oracle != monitor_falsified {
            disagreements.push(u);
        }
    }
    assert!(disagreements.is_empty(), "monitor disagrees with oracle at {disagreements:?}");
    // Sustained constant throttle cannot hold the band: v(a) is too small.
    assert_eq!(falsifying, 0);
}

#[test]
fn ridge_is_falsifiable_by_coordinated_segments() {
    // Accelerate hard, then hold near the band: the falsifying set is not empty.
    let p = RidgeParameters::default();
    let sut = sut_deceptive_ridge_with(p).unwrap();
    let req = sut.default_requirement().unwrap();
    let mut found = false;
    'search: for a in (0..=20).map(|k| k as f64 * 5.0) {
        for b in (0..=20).map(|k| k as f64 * 5.0) {
            for c in (0..=40).map(|k| k as f64 * 0.5) {
                let trace = sut.execute(&throttle(&[a, b, c, c, c, c])).unwrap().trace;
                if !eval_boolean(&req, &trace, 0).unwrap() {
                    found = true;
                    break 'search;
                }
            }
        }
    }
    assert!(found);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Pointwise-larger throttle gives pointwise-larger speed and no larger
    /// robustness of `always (v < 120)`.
    #[test]
    fn speed_is_monotone_in_throttle(
        base in proptest::collection::vec(0.0f64..100.0, 6),
        extra in proptest::collection::vec(0.0f64..30.0, 6),
    ) {
        let sut = sut_first_order_speed();
        let req = sut.default_requirement().unwrap();
        let ranges = sut.ranges();
        let bigger: Vec<f64> = base.iter().zip(&extra).map(|(b, e)| (b + e).min(100.0)).collect();
        let lo = sut.execute(&throttle(&base)).unwrap().trace;
        let hi = sut.execute(&throttle(&bigger)).unwrap().trace;
        for (a, b) in lo.get("v").unwrap().iter().zip(hi.get("v").unwrap()) {
            prop_assert!(a <= b);
        }
        let r_lo = eval_robustness(&req, &lo, &ranges, 0).unwrap().value;
        let r_hi = eval_robustness(&req, &hi, &ranges, 0).unwrap().value;
        prop_assert!(r_hi <= r_lo);
    }

    #[test]
    fn execution_is_bitwise_repeatable(values in proptest::collection::vec(-1.0f64..=1.0, 6)) {
        let sut = sut_first_order_speed();
        let test = TestInput::new(values);
        prop_assert_eq!(sut.execute(&test).unwrap().trace, sut.execute(&test).unwrap().trace);
    }
}

fn external(script: &str) -> SutSpec {
    let mut outputs = BTreeMap::new();
    outputs.insert("y".to_string(), SignalRange::new(0.0, 200.0).unwrap());
    SutSpec::External {
        command: "sh".into(),
        args: vec!["-c".into(), script.into()],
        input: InputSpec::new(vec![InputChannel::signal("u", SignalRange::new(0.0, 100.0).unwrap(), 2)], 1.0, 0.25)
            .unwrap(),
        outputs,
        requirement: "always[0,1] (y < 150)".into(),
    }
}

#[test]
fn external_process_round_trip() {
    let sut = external(r#"awk -F, 'NR==1 {print "time,y"; next} {print $1 "," 2*$2}'"#)
        .build()
        .unwrap();
    let trace = sut.execute(&throttle(&[20.0, 90.0])).unwrap().trace;
    assert_eq!(trace.len(), 5);
    let y = trace.get("y").unwrap();
    let u = trace.get("u").unwrap();
    for (a, b) in u.iter().zip(y) {
        assert!((2.0 * a - b).abs() < 1e-9);
    }
    let req = sut.default_requirement().unwrap();
    assert!(!eval_boolean(&req, &trace, 0).unwrap());
}

#[test]
fn external_process_failure_is_reported() {
    let sut = external("cat > /dev/null; echo boom >&2; exit 3").build().unwrap();
    match sut.execute(&throttle(&[20.0, 90.0])) {
        Err(SutError::External(msg)) => assert!(msg.contains("boom"), "{msg}"),
        other => panic!("expected external failure, got {other:?}"),
    }
    let short = external(r#"cat > /dev/null; printf 'time,y\n0,1\n'"#).build().unwrap();
    assert!(matches!(short.execute(&throttle(&[20.0, 90.0])), Err(SutError::External(_))));
}

#[test]
fn ridge_with_band_from_ten_is_unfalsifiable() {
    // v(10) <= 500 (1 - e^{-0.1}) < 50 for every throttle in [0, 100], since
    // the system is monotone and u = 100 is the largest input.
    let p = RidgeParameters {
        window_start: 10.0,
        band_lo: 50.0,
        band_hi: 60.0,
    };
    assert!(constant_speed(100.0, 10.0) < 50.0);
    let sut = sut_deceptive_ridge_with(p).unwrap();
    let req = sut.default_requirement().unwrap();
    let top = sut.execute(&throttle(&[100.0; 6])).unwrap().trace;
    assert!(top.get("v").unwrap()[1000] < 50.0);
    assert!(eval_boolean(&req, &top, 0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let u: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..=100.0)).collect();
        let trace = sut.execute(&throttle(&u)).unwrap().trace;
        assert!(eval_boolean(&req, &trace, 0).unwrap());
    }
}
