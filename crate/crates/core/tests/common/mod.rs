//! Scenario transforms shared by the property and acceptance suites.

#![allow(dead_code)]

use empathica::scenario::GeneratorParams;
use empathica::{
    AcceptabilityFunction, Matcher, Scenario, ScenarioParts, UtilityFunction, UtilityTable,
    UtilityValue,
};

/// Small varied shapes: 2-3 agents with 2-4 tuples each.
pub fn small_params(seed: u64) -> GeneratorParams {
    let agent_count = 2 + (seed % 2) as usize;
    let multi = (seed / 6).is_multiple_of(3);
    let actions_per_agent = if multi {
        2 + ((seed / 2) % 2) as usize
    } else {
        2 + ((seed / 2) % 3) as usize
    };
    GeneratorParams {
        seed,
        agent_count,
        actions_per_agent,
        multi_action_tuples: multi,
        ..GeneratorParams::default()
    }
}

/// Multiplies every finite value of agent `i` by `factors[i]`.
pub fn scaled(s: &Scenario, factors: &[f64]) -> Scenario {
    let mut parts = s.clone().into_parts();
    parts.utilities = parts
        .utilities
        .iter()
        .zip(factors)
        .map(|(u, c)| u.map_values(|v| v.scale(*c)))
        .collect();
    Scenario::new(parts).expect("scaling keeps a scenario valid")
}

/// Gives every agent the value `top` at profile index `idx` and drops the
/// exact-profile bans on it. With all other values below `top`, that
/// profile becomes the unique, acceptable common optimum.
pub fn plant_common_optimum(s: &Scenario, idx: usize, top: f64) -> Scenario {
    let target = s.space().profile(idx);
    let ScenarioParts {
        name,
        agents,
        utilities,
        acceptability,
        aggregation,
    } = s.clone().into_parts();
    let utilities = utilities
        .iter()
        .map(|u| {
            let table = UtilityTable::materialize(s.space(), |p| {
                if *p == target {
                    UtilityValue::Finite(top)
                } else {
                    empathica::Evaluate::evaluate(u, p)
                }
            });
            UtilityFunction::direct(u.agent().clone(), table)
        })
        .collect();
    let acceptability = acceptability
        .iter()
        .map(|acc| {
            let rules = acc
                .rules()
                .iter()
                .filter(|r| r.matcher != Matcher::Equals(target.clone()))
                .cloned()
                .collect();
            AcceptabilityFunction::new(acc.agent().clone(), rules)
        })
        .collect();
    Scenario::new(ScenarioParts {
        name,
        agents,
        utilities,
        acceptability,
        aggregation,
    })
    .expect("planting keeps a scenario valid")
}
