mod common;

use proptest::prelude::*;

use empathica::scenario::{
    builtin, generate_random_scenario, parse_scenario, serialize_scenario, spec_digest,
    GeneratorParams,
};
use empathica::{Aggregation, Scenario};

#[test]
fn thousand_generated_scenarios_validate() {
    for seed in 0..1000u64 {
        let params = GeneratorParams {
            seed,
            agent_count: 1 + (seed % 3) as usize,
            actions_per_agent: 1 + (seed % 4) as usize,
            unacceptable_fraction: (seed % 10) as f64 / 10.0,
            null_fraction: (seed % 7) as f64 / 7.0,
            multi_action_tuples: seed % 5 == 0,
            aggregation: if seed % 2 == 0 {
                Aggregation::Product
            } else {
                Aggregation::Sum
            },
            ..GeneratorParams::default()
        };
        let s = generate_random_scenario(&params).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(s.first_acceptable_feasible().is_some());
        // validation is re-run when the canonical text is loaded back
        parse_scenario(&serialize_scenario(&s)).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
}

#[test]
fn builtins_round_trip() {
    for name in ["vehicles", "concert"] {
        let s = builtin(name).unwrap();
        let text = serialize_scenario(&s);
        let back = parse_scenario(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(serialize_scenario(&back), text);
    }
}

#[test]
fn equal_scenarios_serialize_identically() {
    // same content as the canonical text, keys and rows shuffled
    let a = r#"{
      "version": 1, "name": "pair", "aggregation": "sum",
      "agents": [{"actions": ["y_A", "x_A"], "id": "A"}, {"id": "B", "actions": ["x_B"]}],
      "utilities": {
        "B": {"table": [{"value": 2, "profile": ["y_A", "x_B"]}, {"profile": ["x_A", "x_B"], "value": 1.0}], "mode": "direct"},
        "A": {"mode": "direct", "table": [{"profile": ["x_A", "x_B"], "value": "+inf"}, {"profile": ["y_A", "x_B"], "value": 0.1}]}
      },
      "acceptability": {"A": [{"value": false, "equals": ["y_A", "x_B"]}]}
    }"#;
    let b = r#"{
      "acceptability": {"A": [{"equals": ["y_A", "x_B"], "value": false}], "B": []},
      "agents": [{"id": "A", "actions": ["x_A", "y_A"]}, {"actions": ["x_B"], "id": "B"}],
      "aggregation": "sum",
      "name": "pair",
      "utilities": {
        "A": {"mode": "direct", "table": [{"profile": ["y_A", "x_B"], "value": 0.10}, {"profile": ["x_A", "x_B"], "value": "+inf"}]},
        "B": {"mode": "direct", "table": [{"profile": ["x_A", "x_B"], "value": 1}, {"profile": ["y_A", "x_B"], "value": 2e0}]}
      },
      "version": 1
    }"#;
    let (sa, sb) = (parse_scenario(a).unwrap(), parse_scenario(b).unwrap());
    assert_eq!(sa, sb);
    assert_eq!(serialize_scenario(&sa), serialize_scenario(&sb));
    assert_eq!(spec_digest(&sa), spec_digest(&sb));
}

#[test]
fn digest_is_lowercase_sha256_of_canonical_text() {
    let s = builtin("concert").unwrap();
    let d = spec_digest(&s);
    assert_eq!(d.len(), 64);
    assert!(d
        .chars()
        .all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase()));
    assert_ne!(d, spec_digest(&builtin("vehicles").unwrap()));
}

fn arb_scenario() -> impl Strategy<Value = Scenario> {
    (
        any::<u64>(),
        1usize..4,
        1usize..4,
        any::<bool>(),
        -20i32..20,
        0i32..40,
        any::<bool>(),
    )
        .prop_map(|(seed, agents, actions, multi, lo, width, sum)| {
            let params = GeneratorParams {
                seed,
                agent_count: agents,
                actions_per_agent: actions,
                multi_action_tuples: multi,
                value_range: (f64::from(lo) / 3.0, f64::from(lo + width) / 3.0),
                aggregation: if sum {
                    Aggregation::Sum
                } else {
                    Aggregation::Product
                },
                ..GeneratorParams::default()
            };
            generate_random_scenario(&params).unwrap()
        })
}

proptest! {
    #[test]
    fn parse_inverts_serialize(s in arb_scenario()) {
        let text = serialize_scenario(&s);
        let back = parse_scenario(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(serialize_scenario(&back), text);
    }
}
