//! Seeded random scenarios for property and oracle tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::acceptability::{Acceptability, AcceptabilityFunction, AcceptabilityRule, Matcher};
use crate::model::{AgentSpec, Aggregation, Scenario, ScenarioParts};
use crate::profile::{ActionTuple, AgentId, StrategySpace};
use crate::utility::{UtilityFunction, UtilityTable};
use crate::value::UtilityValue;

/// Values are drawn from this many evenly spaced levels across the range,
/// so ties are common.
const VALUE_LEVELS: u32 = 9;
const MAX_PROFILES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub seed: u64,
    pub agent_count: usize,
    pub actions_per_agent: usize,
    pub value_range: (f64, f64),
    pub unacceptable_fraction: f64,
    pub null_fraction: f64,
    /// Adds one two-action tuple per agent besides the singletons.
    pub multi_action_tuples: bool,
    pub aggregation: Aggregation,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            seed: 0,
            agent_count: 2,
            actions_per_agent: 3,
            value_range: (0.0, 10.0),
            unacceptable_fraction: 0.2,
            null_fraction: 0.1,
            multi_action_tuples: false,
            aggregation: Aggregation::Product,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid generator parameters: {0}")]
pub struct GeneratorError(String);

fn agent_name(i: usize, n: usize) -> String {
    if n <= 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("A{i}")
    }
}

fn check(p: &GeneratorParams) -> Result<(), GeneratorError> {
    let fail = |m: &str| Err(GeneratorError(m.to_string()));
    let (lo, hi) = p.value_range;
    if p.agent_count == 0 {
        return fail("agent_count must be at least 1");
    }
    if p.actions_per_agent == 0 {
        return fail("actions_per_agent must be at least 1");
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return fail("value_range must be finite with lo <= hi");
    }
    for (name, f) in [
        ("unacceptable_fraction", p.unacceptable_fraction),
        ("null_fraction", p.null_fraction),
    ] {
        if !(0.0..1.0).contains(&f) {
            return Err(GeneratorError(format!("{name} must lie in [0, 1)")));
        }
    }
    let tuples =
        p.actions_per_agent + usize::from(p.multi_action_tuples && p.actions_per_agent > 1);
    let size = (0..p.agent_count).try_fold(1usize, |acc, _| acc.checked_mul(tuples));
    match size {
        Some(s) if s <= MAX_PROFILES => Ok(()),
        _ => fail("profile space exceeds 10^6 profiles"),
    }
}

/// Deterministic in `params`; the result always passes scenario validation.
pub fn generate_random_scenario(params: &GeneratorParams) -> Result<Scenario, GeneratorError> {
    check(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.agent_count;
    let (lo, hi) = params.value_range;

    let agents: Vec<AgentSpec> = (0..n)
        .map(|i| {
            let id = agent_name(i, n);
            let names: Vec<String> = (0..params.actions_per_agent)
                .map(|j| format!("a{j}_{id}"))
                .collect();
            let mut spec = AgentSpec::new(id.clone(), names.clone());
            if params.multi_action_tuples && names.len() > 1 {
                let owner = AgentId::new(id);
                let mut tuples: Vec<ActionTuple> = names
                    .iter()
                    .map(|a| ActionTuple::single(owner.clone(), a.clone()))
                    .collect();
                tuples.push(ActionTuple::new(
                    owner,
                    [names[0].clone(), names[1].clone()],
                ));
                spec = spec.with_tuples(tuples);
            }
            spec
        })
        .collect();
    let space = StrategySpace::new(
        agents.iter().map(|a| a.id.clone()).collect(),
        agents.iter().map(AgentSpec::strategies).collect(),
    );
    let size = space.len();

    let level = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(0..VALUE_LEVELS);
        UtilityValue::Finite(lo + (hi - lo) * f64::from(k) / f64::from(VALUE_LEVELS - 1))
    };

    let mut values: Vec<Vec<UtilityValue>> = vec![Vec::with_capacity(size); n];
    for row in values.iter_mut() {
        for _ in 0..size {
            let v = if rng.gen::<f64>() < params.null_fraction {
                UtilityValue::Null
            } else {
                level(&mut rng)
            };
            row.push(v);
        }
    }

    // (profile index, owning agent, verdict)
    let mut bans: Vec<(usize, usize, Acceptability)> = Vec::new();
    for idx in 0..size {
        if rng.gen::<f64>() < params.unacceptable_fraction {
            let owner = rng.gen_range(0..n);
            let verdict = if rng.gen_bool(0.25) {
                Acceptability::Null
            } else {
                Acceptability::False
            };
            bans.push((idx, owner, verdict));
        }
    }

    let feasible = (0..size).any(|idx| {
        values.iter().all(|row| !row[idx].is_null()) && !bans.iter().any(|(b, _, _)| *b == idx)
    });
    if !feasible {
        let idx = rng.gen_range(0..size);
        for row in values.iter_mut() {
            if row[idx].is_null() {
                row[idx] = level(&mut rng);
            }
        }
        bans.retain(|(b, _, _)| *b != idx);
    }

    let utilities = agents
        .iter()
        .zip(&values)
        .map(|(a, row)| {
            let table: UtilityTable = row
                .iter()
                .enumerate()
                .map(|(idx, v)| (space.profile(idx), *v))
                .collect();
            UtilityFunction::direct(a.id.clone(), table)
        })
        .collect();
    let acceptability = agents
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let rules = bans
                .iter()
                .filter(|(_, owner, _)| *owner == k)
                .map(|(idx, _, verdict)| {
                    AcceptabilityRule::new(Matcher::Equals(space.profile(*idx)), *verdict)
                })
                .collect();
            AcceptabilityFunction::new(a.id.clone(), rules)
        })
        .collect();

    Scenario::new(ScenarioParts {
        name: format!("random-{}", params.seed),
        agents,
        utilities,
        acceptability,
        aggregation: params.aggregation,
    })
    .map_err(|e| GeneratorError(format!("generated scenario failed validation: {e}")))
}
