//! The two reference scenarios: a bottleneck that two vehicles approach
//! from opposite sides, and a two-person concert choice.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::acceptability::{Acceptability, AcceptabilityFunction, AcceptabilityRule, Matcher};
use crate::model::{AgentSpec, Aggregation, Scenario, ScenarioParts};
use crate::profile::{ActionTuple, AgentId, ConsequenceSet, JointProfile};
use crate::utility::{UtilityFunction, UtilityTable};
use crate::value::UtilityValue;

pub const BUILTIN_NAMES: [&str; 2] = ["vehicles", "concert"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown built-in scenario {0:?} (available: vehicles, concert)")]
pub struct UnknownBuiltin(pub String);

pub fn builtin(name: &str) -> Result<Scenario, UnknownBuiltin> {
    match name {
        "vehicles" => Ok(vehicles()),
        "concert" => Ok(concert()),
        other => Err(UnknownBuiltin(other.to_string())),
    }
}

fn pair(a: &str, b: &str) -> JointProfile {
    JointProfile::new(vec![
        ActionTuple::single(AgentId::from("A"), a),
        ActionTuple::single(AgentId::from("B"), b),
    ])
}

fn consequences(atom: &str) -> ConsequenceSet {
    BTreeSet::from([atom.to_string()])
}

fn actions(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// A is twice as slow as B; both driving crashes, both waiting blocks.
fn vehicles() -> Scenario {
    let a2c_a = BTreeMap::from([
        (pair("drive_A", "drive_B"), consequences("crash")),
        (pair("drive_A", "wait_B"), consequences("wait 0")),
        (pair("wait_A", "wait_B"), consequences("wait ∞")),
        (pair("wait_A", "drive_B"), consequences("wait 10")),
    ]);
    let a2c_b = BTreeMap::from([
        (pair("drive_A", "drive_B"), consequences("crash")),
        (pair("drive_A", "wait_B"), consequences("wait 20")),
        (pair("wait_A", "wait_B"), consequences("wait ∞")),
        (pair("wait_A", "drive_B"), consequences("wait 0")),
    ]);
    // shared quantification: 1 minus a penalty proportional to waiting time
    let uq = BTreeMap::from([
        (consequences("crash"), UtilityValue::NegInf),
        (consequences("wait 0"), UtilityValue::Finite(1.0)),
        (consequences("wait 10"), UtilityValue::Finite(0.9)),
        (consequences("wait 20"), UtilityValue::Finite(0.8)),
        (consequences("wait ∞"), UtilityValue::Finite(0.0)),
    ]);
    let rules = || {
        vec![
            AcceptabilityRule::new(
                Matcher::Equals(pair("drive_A", "drive_B")),
                Acceptability::False,
            ),
            AcceptabilityRule::new(
                Matcher::Contains(actions(&["wait_A", "wait_B"])),
                Acceptability::False,
            ),
            AcceptabilityRule::new(
                Matcher::Contains(actions(&["drive_A", "wait_A"])),
                Acceptability::Null,
            ),
            AcceptabilityRule::new(
                Matcher::Contains(actions(&["drive_B", "wait_B"])),
                Acceptability::Null,
            ),
        ]
    };
    Scenario::new(ScenarioParts {
        name: "vehicles".into(),
        agents: vec![
            AgentSpec::new("A", ["drive_A", "wait_A"]),
            AgentSpec::new("B", ["drive_B", "wait_B"]),
        ],
        utilities: vec![
            UtilityFunction::composed(AgentId::from("A"), a2c_a, uq.clone()),
            UtilityFunction::composed(AgentId::from("B"), a2c_b, uq),
        ],
        acceptability: vec![
            AcceptabilityFunction::new(AgentId::from("A"), rules()),
            AcceptabilityFunction::new(AgentId::from("B"), rules()),
        ],
        aggregation: Aggregation::Product,
    })
    .expect("vehicles scenario is valid")
}

/// Bach, Stravinsky or Mozart; A is banned from the Stravinsky venue.
fn concert() -> Scenario {
    const A: [&str; 3] = ["Bach_A", "Stravinsky_A", "Mozart_A"];
    const B: [&str; 3] = ["Bach_B", "Stravinsky_B", "Mozart_B"];
    let u_a = |a: &str, b: &str| match (a, b) {
        ("Bach_A", "Bach_B") => 6.0,
        ("Stravinsky_A", "Stravinsky_B") => 5.0,
        ("Stravinsky_A", _) => 4.0,
        ("Mozart_A", "Mozart_B") => 3.0,
        _ => 1.0,
    };
    let u_b = |a: &str, b: &str| match (a, b) {
        ("Bach_A", "Bach_B") => 1.1,
        ("Stravinsky_A", "Stravinsky_B") => 2.0,
        ("Mozart_A", "Mozart_B") => 4.0,
        _ => 1.0,
    };
    let table = |f: &dyn Fn(&str, &str) -> f64| -> UtilityTable {
        A.iter()
            .flat_map(|a| B.iter().map(move |b| (*a, *b)))
            .map(|(a, b)| (pair(a, b), UtilityValue::Finite(f(a, b))))
            .collect()
    };
    let rules = || {
        vec![AcceptabilityRule::new(
            Matcher::Contains(actions(&["Stravinsky_A"])),
            Acceptability::False,
        )]
    };
    Scenario::new(ScenarioParts {
        name: "concert".into(),
        agents: vec![AgentSpec::new("A", A), AgentSpec::new("B", B)],
        utilities: vec![
            UtilityFunction::direct(AgentId::from("A"), table(&u_a)),
            UtilityFunction::direct(AgentId::from("B"), table(&u_b)),
        ],
        acceptability: vec![
            AcceptabilityFunction::new(AgentId::from("A"), rules()),
            AcceptabilityFunction::new(AgentId::from("B"), rules()),
        ],
        aggregation: Aggregation::Product,
    })
    .expect("concert scenario is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::Evaluate;
    use crate::value::UtilityValue::*;

    #[test]
    fn vehicles_tables() {
        let s = builtin("vehicles").unwrap();
        let (ua, ub) = (&s.utilities()[0], &s.utilities()[1]);
        assert_eq!(ua.evaluate(&pair("drive_A", "wait_B")), Finite(1.0));
        assert_eq!(ua.evaluate(&pair("wait_A", "drive_B")), Finite(0.9));
        assert_eq!(ua.evaluate(&pair("wait_A", "wait_B")), Finite(0.0));
        assert_eq!(ua.evaluate(&pair("drive_A", "drive_B")), NegInf);
        assert_eq!(ub.evaluate(&pair("drive_A", "wait_B")), Finite(0.8));
        assert_eq!(ub.evaluate(&pair("wait_A", "drive_B")), Finite(1.0));
        assert_eq!(ub.evaluate(&pair("wait_A", "wait_B")), Finite(0.0));
        assert_eq!(ub.evaluate(&pair("drive_A", "drive_B")), NegInf);
        assert_eq!(
            ua.consequences(&pair("wait_A", "drive_B")),
            Some(&consequences("wait 10"))
        );
        assert_eq!(
            ua.consequences(&pair("drive_A", "drive_B")),
            Some(&consequences("crash"))
        );
    }

    #[test]
    fn vehicles_acceptability() {
        let s = builtin("vehicles").unwrap();
        for acc in s.acceptability() {
            assert_eq!(
                acc.evaluate(&pair("drive_A", "drive_B")),
                Acceptability::False
            );
            assert_eq!(
                acc.evaluate(&pair("wait_A", "wait_B")),
                Acceptability::False
            );
            assert_eq!(
                acc.evaluate(&pair("drive_A", "wait_B")),
                Acceptability::True
            );
            assert_eq!(
                acc.evaluate(&pair("wait_A", "drive_B")),
                Acceptability::True
            );
        }
    }

    #[test]
    fn concert_tables() {
        let s = builtin("concert").unwrap();
        let (ua, ub) = (&s.utilities()[0], &s.utilities()[1]);
        assert_eq!(ua.evaluate(&pair("Bach_A", "Bach_B")), Finite(6.0));
        assert_eq!(
            ua.evaluate(&pair("Stravinsky_A", "Stravinsky_B")),
            Finite(5.0)
        );
        assert_eq!(ua.evaluate(&pair("Stravinsky_A", "Mozart_B")), Finite(4.0));
        assert_eq!(ua.evaluate(&pair("Stravinsky_A", "Bach_B")), Finite(4.0));
        assert_eq!(ua.evaluate(&pair("Mozart_A", "Mozart_B")), Finite(3.0));
        assert_eq!(ua.evaluate(&pair("Bach_A", "Mozart_B")), Finite(1.0));
        assert_eq!(ub.evaluate(&pair("Bach_A", "Bach_B")), Finite(1.1));
        assert_eq!(
            ub.evaluate(&pair("Stravinsky_A", "Stravinsky_B")),
            Finite(2.0)
        );
        assert_eq!(ub.evaluate(&pair("Mozart_A", "Mozart_B")), Finite(4.0));
        assert_eq!(ub.evaluate(&pair("Mozart_A", "Bach_B")), Finite(1.0));
        for acc in s.acceptability() {
            for b in ["Bach_B", "Stravinsky_B", "Mozart_B"] {
                assert_eq!(acc.evaluate(&pair("Stravinsky_A", b)), Acceptability::False);
                assert_eq!(acc.evaluate(&pair("Bach_A", b)), Acceptability::True);
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert_eq!(builtin("chicken"), Err(UnknownBuiltin("chicken".into())));
    }
}
