mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use empathica::engine::{enumerate_equilibria, oracle_equilibria, StrategicGame};
use empathica::scenario::{
    generate_random_scenario, parse_scenario, serialize_scenario, GeneratorParams,
};
use empathica::{
    argmax_set, first, prime_utility, solve_scenario, Acceptability, Aggregation, Algorithm,
    Assignment, Engine, Evaluate, JointProfile, Scenario, UtilityValue,
};

use common::{plant_common_optimum, scaled, small_params};

fn scenario(seed: u64) -> Scenario {
    generate_random_scenario(&small_params(seed)).unwrap()
}

fn mixed_assignment(s: &Scenario, picks: &[u8]) -> Assignment {
    s.agent_ids()
        .iter()
        .zip(picks.iter().cycle())
        .fold(Assignment::uniform(Algorithm::Naive), |a, (id, k)| {
            a.with(id.clone(), Algorithm::ALL[*k as usize % 3])
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solving_is_deterministic(seed in any::<u64>(), picks in prop::collection::vec(0u8..3, 1..4)) {
        let s = scenario(seed);
        let assignment = mixed_assignment(&s, &picks);
        let first_run = solve_scenario(&s, &assignment).unwrap();
        prop_assert_eq!(&first_run, &solve_scenario(&s, &assignment).unwrap());
        // an independently loaded copy of the same spec agrees
        let copy = parse_scenario(&serialize_scenario(&s)).unwrap();
        prop_assert_eq!(&first_run, &solve_scenario(&copy, &assignment).unwrap());
    }

    #[test]
    fn lazy_and_full_outcomes_are_acceptable(seed in any::<u64>()) {
        let s = scenario(seed);
        for alg in [Algorithm::Lazy, Algorithm::Full] {
            let r = solve_scenario(&s, &Assignment::uniform(alg)).unwrap();
            for acc in s.acceptability() {
                prop_assert_eq!(acc.evaluate(&r.joint), Acceptability::True, "{} {}", alg, r.joint);
            }
        }
    }

    #[test]
    fn homogeneous_agents_project_one_profile(seed in any::<u64>()) {
        let s = scenario(seed);
        let engine = Engine::new(&s);
        let lazy = solve_scenario(&s, &Assignment::uniform(Algorithm::Lazy)).unwrap();
        prop_assert_eq!(lazy.joint, engine.lazy_selection().unwrap());
        let full = solve_scenario(&s, &Assignment::uniform(Algorithm::Full)).unwrap();
        prop_assert_eq!(full.joint, engine.full_selection().unwrap());
    }

    #[test]
    fn choices_survive_per_agent_scaling(
        seed in any::<u64>(),
        exponents in prop::collection::vec(-6i32..7, 3),
        signed in any::<bool>(),
    ) {
        // powers of two keep every product exact
        let params = GeneratorParams {
            value_range: if signed { (-5.0, 5.0) } else { (0.0, 10.0) },
            aggregation: Aggregation::Product,
            ..small_params(seed)
        };
        let s = generate_random_scenario(&params).unwrap();
        let factors: Vec<f64> = exponents.iter().map(|e| 2f64.powi(*e)).collect();
        let t = scaled(&s, &factors[..s.agent_count()]);
        for alg in Algorithm::ALL {
            let a = solve_scenario(&s, &Assignment::uniform(alg)).unwrap();
            let b = solve_scenario(&t, &Assignment::uniform(alg)).unwrap();
            prop_assert_eq!(a.choices(), b.choices(), "{}", alg);
        }
        for (u, v) in s.utilities().iter().zip(t.utilities()) {
            prop_assert_eq!(argmax_set(u, s.space()).unwrap(), argmax_set(v, t.space()).unwrap());
        }
    }

    #[test]
    fn common_optimum_collapses_all_algorithms(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let s = scenario(seed);
        let idx = pick.index(s.space().len());
        let t = plant_common_optimum(&s, idx, 11.0);
        let target = t.space().profile(idx);
        for alg in Algorithm::ALL {
            let r = solve_scenario(&t, &Assignment::uniform(alg)).unwrap();
            prop_assert_eq!(&r.joint, &target, "{}", alg);
            prop_assert!(!r.conflict);
        }
    }

    #[test]
    fn equilibria_match_deviation_oracle(seed in any::<u64>(), primed in any::<bool>()) {
        let s = scenario(seed);
        let game = if primed {
            StrategicGame::primed(s.space(), s.utilities(), s.acceptability())
        } else {
            StrategicGame::new(s.space().clone(), s.utilities().to_vec())
        };
        let found = enumerate_equilibria(&game);
        prop_assert_eq!(&found, &oracle_equilibria(&game).unwrap());
        for p in s.space().profiles() {
            prop_assert_eq!(found.contains(&p), game.is_equilibrium(&p));
        }
    }

    #[test]
    fn argmax_matches_a_scan(seed in any::<u64>()) {
        let s = scenario(seed);
        for u in s.utilities() {
            let values: Vec<(JointProfile, UtilityValue)> =
                s.space().profiles().map(|p| { let v = u.evaluate(&p); (p, v) }).collect();
            let expected: BTreeSet<JointProfile> = values
                .iter()
                .filter(|(_, v)| !v.is_null())
                .filter(|(_, v)| values.iter().all(|(_, w)| w.is_null() || v >= w))
                .map(|(p, _)| p.clone())
                .collect();
            prop_assert_eq!(argmax_set(u, s.space()).unwrap(), expected);
        }
    }

    #[test]
    fn priming_is_pointwise(seed in any::<u64>()) {
        let s = scenario(seed);
        for u in s.utilities() {
            let primed = prime_utility(u, s.acceptability(), s.space());
            for p in s.space().profiles() {
                let all_true = s.acceptability().iter().all(|a| a.evaluate(&p) == Acceptability::True);
                let expected = if all_true { u.evaluate(&p) } else { UtilityValue::Null };
                prop_assert_eq!(primed.evaluate(&p), expected);
            }
        }
    }

    #[test]
    fn first_ignores_order(seed in any::<u64>(), order in Just(()).prop_perturb(|_, mut rng| rng.next_u64())) {
        let s = scenario(seed);
        let mut profiles: Vec<JointProfile> = s.space().profiles().collect();
        let expected = first(&profiles).unwrap().clone();
        // rotate and reverse by a seed-dependent amount
        let k = (order as usize) % profiles.len();
        profiles.rotate_left(k);
        if order % 2 == 1 {
            profiles.reverse();
        }
        prop_assert_eq!(first(&profiles).unwrap(), &expected);
        let max_key = s.space().profiles().map(|p| p.sort_key().iter().map(|x| x.to_string()).collect::<Vec<_>>()).max().unwrap();
        prop_assert_eq!(expected.sort_key(), max_key);
    }
}
