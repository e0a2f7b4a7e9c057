mod support;

use hazbench::dsl::parse_feeder;
use hazbench::gridsim::{
    detect_oscillation, max_step_change, run, DelayMode, DroopCurve, FeederModel, LoadStep,
    OscillationThresholds, SimConfig, SimulationTrace, Window, DEFAULT_BREAKPOINTS,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;

const STEEP: [f64; 4] = [1.0, 1.01, 1.045, 1.05];

fn two_bus_bems() -> FeederModel {
    let text = "slack B0 230 V\nbus B1 load 1000 W 200 var\nline B0 B1 r 0.31 x 0.2\nbems B1 qmax 3000 pv 10866.45\n";
    parse_feeder(text, "inline.net").unwrap()
}

fn config(feeder: &FeederModel, bp: [f64; 4], delay: f64, step: f64) -> SimConfig {
    let mut c = SimConfig::new(feeder.clone(), 0.1, 30.0);
    c.curves = feeder.bems().iter().map(|b| DroopCurve::new("c", bp, b.q_max).unwrap()).collect();
    c.delays = vec![delay; feeder.bems().len()];
    c.nominal_voltage = 230.0;
    c.load_steps = vec![LoadStep { bus: "B1".into(), time: 7.5, dp: step, dq: 0.0 }];
    c
}

fn b1(trace: &SimulationTrace) -> Vec<f64> {
    trace.series(trace.bus_index("B1").unwrap())
}

#[test]
fn two_bus_trajectory_follows_delayed_map() {
    let feeder = two_bus_bems();
    let red = Reduction::of(&feeder, "B1");
    for (bp, m) in [(STEEP, 10), (STEEP, 0), (STEEP, 3), (DEFAULT_BREAKPOINTS, 10)] {
        let trace = run(config(&feeder, bp, m as f64 * 0.1, 943.2)).unwrap();
        let expected = delayed_map(&red, bp, 3000.0, 230.0, m, 300, 75, 943.2);
        let got = b1(&trace);
        assert_eq!(got.len(), expected.len());
        for (k, (g, e)) in got.iter().zip(&expected).enumerate() {
            assert!((g - e).abs() < 1e-6, "bp {bp:?} m {m} step {k}: {g} vs {e}");
        }
    }
}

#[test]
fn steep_curve_oscillates_at_every_delay() {
    let feeder = two_bus_bems();
    let red = Reduction::of(&feeder, "B1");
    for m in [0, 1, 5, 10] {
        let map = delayed_map(&red, STEEP, 3000.0, 230.0, m, 500, 75, 943.2);
        assert!(oscillates(&map, 230.0), "oracle m={m}");
        let trace = run(config(&feeder, STEEP, m as f64 * 0.1, 943.2)).unwrap();
        let osc = detect_oscillation(
            &trace,
            1,
            Window::post_transient(&trace),
            OscillationThresholds::for_nominal(230.0),
        )
        .unwrap();
        assert!(osc.oscillating, "m={m}: {osc:?}");
    }
}

#[test]
fn default_curve_settles_on_the_fixed_point() {
    let feeder = two_bus_bems();
    let red = Reduction::of(&feeder, "B1");
    let fixed = droop_fixed_point(&red, DEFAULT_BREAKPOINTS, 3000.0, 230.0, 943.2);
    for m in [0, 10] {
        let map = delayed_map(&red, DEFAULT_BREAKPOINTS, 3000.0, 230.0, m, 500, 75, 943.2);
        assert!(!oscillates(&map, 230.0));
        let trace = run(config(&feeder, DEFAULT_BREAKPOINTS, m as f64 * 0.1, 943.2)).unwrap();
        let last = *b1(&trace).last().unwrap();
        assert!((last - fixed).abs() < 1e-6, "m={m}: {last} vs {fixed}");
        let settle = max_step_change(&trace, Window::post_transient(&trace)).unwrap();
        // With m = 10 the contraction is spread over 11 interleaved copies,
        // so the window still holds a decaying tail.
        let bound = if m == 0 { 1e-6 } else { 1e-2 };
        assert!(settle < bound, "m={m}: {settle}");
    }
}

#[test]
fn delay_quantization_rounds() {
    let feeder = two_bus_bems();
    let c = config(&feeder, STEEP, 0.0, 0.0);
    assert_eq!(c.quantize(1.0), 10);
    assert_eq!(c.quantize(0.14), 1);
    assert_eq!(c.quantize(0.16), 2);
    assert_eq!(c.step_count(), 300);
}

#[test]
fn zero_delay_matches_bypass_bit_for_bit() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut compared = 0;
    while compared < 10 {
        let buffered = random_sim_config(&mut rng);
        if buffered.feeder.bems().is_empty() {
            continue;
        }
        let mut bypass = buffered.clone();
        bypass.delay_mode = DelayMode::Bypass;
        match (run(buffered), run(bypass)) {
            (Ok(a), Ok(b)) => {
                assert_eq!(trace_bits(&a), trace_bits(&b));
                assert_eq!(a.times, b.times);
            }
            (Err(a), Err(b)) => assert_eq!(a, b),
            (a, b) => panic!("modes disagree: {a:?} vs {b:?}"),
        }
        compared += 1;
    }
}
