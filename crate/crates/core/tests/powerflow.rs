mod support;

use hazbench::dsl::parse_feeder;
use hazbench::gridsim::{solve_power_flow, PowerFlowOptions};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;

// Closed-form high root of the two-bus quadratic for 230 V, Z = 0.5 + j0.5,
// S = 2000 W, computed offline.
const TWO_BUS_V1: f64 = 225.52311830462742;

#[test]
fn two_bus_oracle_matches_closed_form() {
    let v = two_bus_voltage(230.0, Complex64::new(0.5, 0.5), Complex64::new(2000.0, 0.0)).unwrap();
    assert!((v - TWO_BUS_V1).abs() < 1e-9, "{v}");
}

#[test]
fn two_bus_fixture_matches_oracle() {
    let feeder = parse_feeder(&read_corpus("two_bus.net"), "two_bus.net").unwrap();
    let sol = solve_power_flow(&feeder, &feeder.base_net_load(), &PowerFlowOptions::default()).unwrap();
    assert!(sol.converged);
    assert_eq!(sol.voltages[0].norm(), 230.0);
    assert!((sol.voltages[1].norm() - TWO_BUS_V1).abs() < 1e-6);
    let oracle = zbus_power_flow(&feeder, &net_loads(&feeder)).unwrap();
    assert!((oracle[1] - TWO_BUS_V1).abs() < 1e-9);
}

#[test]
fn random_trees_match_zbus_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..50 {
        let (feeder, expected) = random_feasible_tree(&mut rng);
        let sol = solve_power_flow(&feeder, &feeder.base_net_load(), &PowerFlowOptions::default())
            .unwrap_or_else(|e| panic!("case {case}: {e}"));
        for (bus, (got, want)) in sol.magnitudes().iter().zip(&expected).enumerate() {
            assert!((got - want).abs() < 1e-6, "case {case} bus {bus}: {got} vs {want}");
        }
    }
}

#[test]
fn reference_feeder_matches_oracle() {
    let feeder = parse_feeder(&read_corpus("reference.net"), corpus_path("reference.net")).unwrap();
    let sol = solve_power_flow(&feeder, &feeder.base_net_load(), &PowerFlowOptions::default()).unwrap();
    let oracle = zbus_power_flow(&feeder, &net_loads(&feeder)).unwrap();
    for (got, want) in sol.magnitudes().iter().zip(&oracle) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
    // B4 sits at the far end of the longest branch with 6 kW of PV.
    let b4 = feeder.bus_index("B4").unwrap();
    assert!((oracle[b4] - 242.304).abs() < 5e-3, "{}", oracle[b4]);
}

#[test]
fn path_impedance_agrees_with_rebuilt_tree() {
    let feeder = parse_feeder(&read_corpus("reference.net"), "reference.net").unwrap();
    let tree = Tree::from_feeder(&feeder);
    for (i, id) in tree.ids.iter().enumerate() {
        let lib = feeder.path_impedance(feeder.bus_index(id).unwrap());
        assert!((lib - tree.path_impedance(i)).norm() < 1e-12, "{id}");
    }
}
