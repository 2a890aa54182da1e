//! The naive, lazy and full empathic decision procedures.
//!
//! All three fall back to the first maximizer of the aggregated *primed*
//! utilities, so a fallback can never land on an unacceptable profile.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::engine::conflict::{aggregate, combine, determine_act_max};
use crate::engine::equilibria::{enumerate_equilibria, StrategicGame};
use crate::error::EngineError;
use crate::model::{Aggregation, Scenario};
use crate::profile::{first, ActionTuple, JointProfile};
use crate::utility::{argmax_set, prime_utility, Evaluate, UtilityFunction, UtilityTable};
use crate::value::UtilityValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    Lazy,
    Full,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Naive, Algorithm::Lazy, Algorithm::Full];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Naive => "naive",
            Algorithm::Lazy => "lazy",
            Algorithm::Full => "full",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(Algorithm::Naive),
            "lazy" => Ok(Algorithm::Lazy),
            "full" => Ok(Algorithm::Full),
            other => Err(format!(
                "unknown algorithm {other:?} (expected naive, lazy or full)"
            )),
        }
    }
}

/// Decision procedures over one scenario. Primed utilities and the shared
/// (aggregated) utility are computed once; the naive joint outcome and the
/// equilibrium set on first use.
pub struct Engine<'s> {
    scenario: &'s Scenario,
    primed: Vec<UtilityFunction>,
    shared: UtilityTable,
    naive_joint: OnceLock<Result<JointProfile, EngineError>>,
    equilibria: OnceLock<BTreeSet<JointProfile>>,
}

impl<'s> Engine<'s> {
    pub fn new(scenario: &'s Scenario) -> Self {
        let primed: Vec<UtilityFunction> = scenario
            .utilities()
            .iter()
            .map(|u| prime_utility(u, scenario.acceptability(), scenario.space()))
            .collect();
        let shared = aggregate(&primed, scenario.aggregation(), scenario.space());
        Engine {
            scenario,
            primed,
            shared,
            naive_joint: OnceLock::new(),
            equilibria: OnceLock::new(),
        }
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    pub fn primed(&self) -> &[UtilityFunction] {
        &self.primed
    }

    pub fn shared_utility(&self) -> &UtilityTable {
        &self.shared
    }

    /// `first(argmax(aggregate(u'_0, ..., u'_n)))`.
    pub fn shared_choice(&self) -> Result<JointProfile, EngineError> {
        let best = argmax_set(&self.shared, self.scenario.space())?;
        Ok(first(&best)?.clone())
    }

    /// Acceptable maximizers of agent `agent`'s own (raw) utility.
    pub fn acts_max(&self, agent: usize) -> Result<BTreeSet<JointProfile>, EngineError> {
        Ok(determine_act_max(
            &self.scenario.utilities()[agent],
            self.scenario.acceptability(),
            self.scenario.space(),
        )?)
    }

    /// The profile the naive procedure of `agent` settles on before
    /// projecting onto its own component.
    pub fn naive_selection(&self, agent: usize) -> Result<JointProfile, EngineError> {
        let acts = self.acts_max(agent)?;
        if acts.is_empty() {
            self.shared_choice()
        } else {
            Ok(first(&acts)?.clone())
        }
    }

    pub fn decide_naive(&self, agent: usize) -> Result<ActionTuple, EngineError> {
        Ok(self.naive_selection(agent)?.component(agent).clone())
    }

    /// The profile that results when every agent decides naively.
    pub fn naive_joint(&self) -> Result<JointProfile, EngineError> {
        self.naive_joint
            .get_or_init(|| {
                let components = (0..self.scenario.agent_count())
                    .map(|k| self.decide_naive(k))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(JointProfile::new(components))
            })
            .clone()
    }

    /// Keeps `acts_max` only if the naive joint outcome still gives `agent`
    /// at least the utility those maximizers promise; otherwise empty.
    pub fn good_acts_max(
        &self,
        agent: usize,
        acts_max: &BTreeSet<JointProfile>,
    ) -> Result<BTreeSet<JointProfile>, EngineError> {
        let u = &self.scenario.utilities()[agent];
        let Some(promised) = acts_max
            .iter()
            .map(|p| u.evaluate(p))
            .max_by(|a, b| a.cmp_null_lowest(b))
        else {
            return Ok(BTreeSet::new());
        };
        let realized = u.evaluate(&self.naive_joint()?);
        let holds = matches!(
            realized.compare(&promised),
            Some(Ordering::Greater | Ordering::Equal)
        );
        Ok(if holds {
            acts_max.clone()
        } else {
            BTreeSet::new()
        })
    }

    /// The single profile every lazy agent projects from.
    pub fn lazy_selection(&self) -> Result<JointProfile, EngineError> {
        let mut common: Option<BTreeSet<JointProfile>> = None;
        for k in 0..self.scenario.agent_count() {
            let good = self.good_acts_max(k, &self.acts_max(k)?)?;
            common = Some(match common {
                None => good,
                Some(c) => c.intersection(&good).cloned().collect(),
            });
        }
        match common {
            Some(c) if !c.is_empty() => Ok(first(&c)?.clone()),
            _ => self.shared_choice(),
        }
    }

    pub fn decide_lazy(&self, agent: usize) -> Result<ActionTuple, EngineError> {
        Ok(self.lazy_selection()?.component(agent).clone())
    }

    /// Pure-strategy equilibria of the primed game.
    pub fn equilibria(&self) -> &BTreeSet<JointProfile> {
        self.equilibria.get_or_init(|| {
            let game = StrategicGame::new(self.scenario.space().clone(), self.primed.clone());
            enumerate_equilibria(&game)
        })
    }

    /// Equilibria with the greatest product of primed utilities.
    pub fn shared_max_equilibria(&self) -> BTreeSet<JointProfile> {
        let scored: Vec<(&JointProfile, UtilityValue)> = self
            .equilibria()
            .iter()
            .map(|p| {
                let product = combine(
                    self.primed.iter().map(|u| u.evaluate(p)),
                    Aggregation::Product,
                );
                (p, product)
            })
            .collect();
        let Some(best) = scored
            .iter()
            .map(|(_, v)| *v)
            .max_by(|a, b| a.cmp_null_lowest(b))
        else {
            return BTreeSet::new();
        };
        scored
            .into_iter()
            .filter(|(_, v)| v.cmp_null_lowest(&best) == Ordering::Equal)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// The single profile every full agent projects from.
    pub fn full_selection(&self) -> Result<JointProfile, EngineError> {
        let best = self.shared_max_equilibria();
        if best.is_empty() {
            self.shared_choice()
        } else {
            Ok(first(&best)?.clone())
        }
    }

    pub fn decide_full(&self, agent: usize) -> Result<ActionTuple, EngineError> {
        Ok(self.full_selection()?.component(agent).clone())
    }

    /// The profile `agent` selects under `algorithm`, before projection.
    pub fn selection(
        &self,
        agent: usize,
        algorithm: Algorithm,
    ) -> Result<JointProfile, EngineError> {
        match algorithm {
            Algorithm::Naive => self.naive_selection(agent),
            Algorithm::Lazy => self.lazy_selection(),
            Algorithm::Full => self.full_selection(),
        }
    }

    pub fn decide(&self, agent: usize, algorithm: Algorithm) -> Result<ActionTuple, EngineError> {
        Ok(self.selection(agent, algorithm)?.component(agent).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::builtin;

    fn decisions(name: &str, alg: Algorithm) -> Vec<String> {
        let s = builtin(name).unwrap();
        let engine = Engine::new(&s);
        (0..s.agent_count())
            .map(|i| engine.decide(i, alg).unwrap().to_string())
            .collect()
    }

    #[test]
    fn vehicles_decisions() {
        assert_eq!(
            decisions("vehicles", Algorithm::Naive),
            ["drive_A", "drive_B"]
        );
        assert_eq!(
            decisions("vehicles", Algorithm::Lazy),
            ["wait_A", "drive_B"]
        );
        assert_eq!(
            decisions("vehicles", Algorithm::Full),
            ["wait_A", "drive_B"]
        );
    }

    #[test]
    fn concert_decisions() {
        assert_eq!(
            decisions("concert", Algorithm::Naive),
            ["Bach_A", "Mozart_B"]
        );
        assert_eq!(
            decisions("concert", Algorithm::Lazy),
            ["Mozart_A", "Mozart_B"]
        );
        // the product-maximal equilibrium is Mozart/Mozart (12 > 6.6)
        assert_eq!(
            decisions("concert", Algorithm::Full),
            ["Mozart_A", "Mozart_B"]
        );
    }

    #[test]
    fn full_without_equilibria_falls_back_to_shared_maximum() {
        // A wants to match, B to mismatch: no pure equilibrium, and the
        // product ties at (heads, heads) and (tails, tails)
        let s = crate::scenario::parse_scenario(
            r#"{"version": 1, "name": "pennies",
                "agents": [{"id": "A", "actions": ["heads_A", "tails_A"]},
                           {"id": "B", "actions": ["heads_B", "tails_B"]}],
                "utilities": {
                  "A": {"mode": "direct", "table": [
                    {"profile": ["heads_A", "heads_B"], "value": 2}, {"profile": ["heads_A", "tails_B"], "value": 0},
                    {"profile": ["tails_A", "heads_B"], "value": 0}, {"profile": ["tails_A", "tails_B"], "value": 2}]},
                  "B": {"mode": "direct", "table": [
                    {"profile": ["heads_A", "heads_B"], "value": 1}, {"profile": ["heads_A", "tails_B"], "value": 2},
                    {"profile": ["tails_A", "heads_B"], "value": 2}, {"profile": ["tails_A", "tails_B"], "value": 1}]}}}"#,
        )
        .unwrap();
        let engine = Engine::new(&s);
        assert!(engine.equilibria().is_empty());
        let tied = argmax_set(engine.shared_utility(), s.space()).unwrap();
        assert_eq!(tied.len(), 2);
        let choices: Vec<String> = (0..2)
            .map(|i| engine.decide_full(i).unwrap().to_string())
            .collect();
        assert_eq!(choices, ["tails_A", "tails_B"]);
    }

    #[test]
    fn good_acts_are_empty_when_naive_play_falls_short() {
        let s = builtin("vehicles").unwrap();
        let engine = Engine::new(&s);
        assert_eq!(
            engine.naive_joint().unwrap().sort_key(),
            ["drive_A", "drive_B"]
        );
        let acts = engine.acts_max(0).unwrap();
        assert_eq!(acts.len(), 1);
        assert!(engine.good_acts_max(0, &acts).unwrap().is_empty());

        let s = builtin("concert").unwrap();
        let engine = Engine::new(&s);
        assert_eq!(
            engine.naive_joint().unwrap().sort_key(),
            ["Bach_A", "Mozart_B"]
        );
        let acts = engine.acts_max(1).unwrap();
        assert!(engine.good_acts_max(1, &acts).unwrap().is_empty());
        assert!(engine
            .good_acts_max(1, &BTreeSet::new())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.to_string().parse::<Algorithm>().unwrap(), alg);
        }
        assert!("greedy".parse::<Algorithm>().is_err());
    }
}
