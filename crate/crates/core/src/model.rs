//! The validated scenario: agents, strategy spaces, utilities and the shared
//! acceptability rules.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::acceptability::{Acceptability, AcceptabilityFunction, Matcher};
use crate::error::ModelError;
use crate::profile::{ActionTuple, AgentId, JointProfile, StrategySpace};
use crate::utility::{accepted_by_all, Evaluate, UtilityFunction, UtilityMode};
use crate::value::UtilityValue;

/// How individual utilities combine into shared utility.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Product,
    Sum,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Product => "product",
            Aggregation::Sum => "sum",
        })
    }
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" => Ok(Aggregation::Product),
            "sum" => Ok(Aggregation::Sum),
            other => Err(format!("unknown aggregation {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentSpec {
    pub id: AgentId,
    pub actions: BTreeSet<String>,
    /// Explicitly declared tuples; `None` means all singletons.
    pub tuples: Option<Vec<ActionTuple>>,
}

impl AgentSpec {
    pub fn new<I, S>(id: impl Into<AgentId>, actions: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        AgentSpec {
            id: id.into(),
            actions: actions.into_iter().map(Into::into).collect(),
            tuples: None,
        }
    }

    pub fn with_tuples(mut self, tuples: Vec<ActionTuple>) -> Self {
        self.tuples = Some(tuples);
        self
    }

    /// Admissible tuples, sorted.
    pub fn strategies(&self) -> Vec<ActionTuple> {
        let mut s = match &self.tuples {
            Some(t) => t.clone(),
            None => self
                .actions
                .iter()
                .map(|a| ActionTuple::single(self.id.clone(), a.clone()))
                .collect(),
        };
        s.sort();
        s.dedup();
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    name: String,
    agents: Vec<AgentSpec>,
    space: StrategySpace,
    utilities: Vec<UtilityFunction>,
    acceptability: Vec<AcceptabilityFunction>,
    aggregation: Aggregation,
}

/// Owned constituents of a [`Scenario`], for building modified copies.
#[derive(Debug, Clone)]
pub struct ScenarioParts {
    pub name: String,
    pub agents: Vec<AgentSpec>,
    pub utilities: Vec<UtilityFunction>,
    pub acceptability: Vec<AcceptabilityFunction>,
    pub aggregation: Aggregation,
}

impl Scenario {
    /// Validates and assembles a scenario. `utilities` and `acceptability`
    /// hold one function per agent, in agent order.
    pub fn new(parts: ScenarioParts) -> Result<Scenario, ModelError> {
        let ScenarioParts {
            name,
            mut agents,
            utilities,
            acceptability,
            aggregation,
        } = parts;
        if agents.is_empty() {
            return Err(ModelError::NoAgents);
        }
        // tuple lists are kept in canonical order
        for t in agents.iter_mut().filter_map(|a| a.tuples.as_mut()) {
            t.sort();
            t.dedup();
        }
        let mut seen = HashSet::new();
        for (i, agent) in agents.iter().enumerate() {
            let location = format!("agents[{i}]");
            if agent.id.as_str().is_empty() {
                return Err(ModelError::EmptyAgentId { location });
            }
            if !seen.insert(agent.id.clone()) {
                return Err(ModelError::DuplicateAgent {
                    location,
                    id: agent.id.clone(),
                });
            }
            if agent.actions.is_empty() {
                return Err(ModelError::NoActions {
                    location,
                    agent: agent.id.clone(),
                });
            }
            if let Some(tuples) = &agent.tuples {
                if tuples.is_empty() {
                    return Err(ModelError::Invalid {
                        location: format!("{location}.tuples"),
                        message: "explicit tuple list must be non-empty".into(),
                    });
                }
                for (j, t) in tuples.iter().enumerate() {
                    let location = format!("{location}.tuples[{j}]");
                    if t.actions().is_empty() {
                        return Err(ModelError::EmptyTuple { location });
                    }
                    if t.owner() != &agent.id {
                        return Err(ModelError::Invalid {
                            location,
                            message: format!("tuple owned by {}, expected {}", t.owner(), agent.id),
                        });
                    }
                    if let Some(a) = t.actions().iter().find(|a| !agent.actions.contains(*a)) {
                        return Err(ModelError::UnknownAction {
                            location,
                            action: a.clone(),
                        });
                    }
                }
            }
        }

        let space = StrategySpace::new(
            agents.iter().map(|a| a.id.clone()).collect(),
            agents.iter().map(AgentSpec::strategies).collect(),
        );

        check_owners(
            "utilities",
            &space,
            utilities.iter().map(UtilityFunction::agent),
        )?;
        check_owners(
            "acceptability",
            &space,
            acceptability.iter().map(AcceptabilityFunction::agent),
        )?;

        for u in &utilities {
            let location = format!("utilities.{}", u.agent());
            match u.mode() {
                UtilityMode::Direct(table) => {
                    for (p, _) in table.iter() {
                        space.check(p).map_err(|e| ModelError::Invalid {
                            location: format!("{location}.table"),
                            message: e.to_string(),
                        })?;
                    }
                }
                UtilityMode::Composed { a2c, .. } => {
                    for p in a2c.keys() {
                        space.check(p).map_err(|e| ModelError::Invalid {
                            location: format!("{location}.a2c"),
                            message: e.to_string(),
                        })?;
                    }
                }
            }
        }

        let all_actions: BTreeSet<&String> = agents.iter().flat_map(|a| a.actions.iter()).collect();
        for acc in &acceptability {
            for (k, rule) in acc.rules().iter().enumerate() {
                let location = format!("acceptability.{}[{k}]", acc.agent());
                match &rule.matcher {
                    Matcher::Equals(p) => space.check(p).map_err(|e| ModelError::Invalid {
                        location,
                        message: e.to_string(),
                    })?,
                    Matcher::Contains(actions) => {
                        if actions.is_empty() {
                            return Err(ModelError::Invalid {
                                location,
                                message: "contains-rule needs at least one action".into(),
                            });
                        }
                        if let Some(a) = actions.iter().find(|a| !all_actions.contains(a)) {
                            return Err(ModelError::UnknownAction {
                                location,
                                action: a.clone(),
                            });
                        }
                    }
                }
            }
        }

        let scenario = Scenario {
            name,
            agents,
            space,
            utilities,
            acceptability,
            aggregation,
        };
        if scenario.first_acceptable_feasible().is_none() {
            return Err(ModelError::NoAcceptableProfile);
        }
        if scenario.aggregation == Aggregation::Product && scenario.has_negative_values() {
            log::warn!(
                "scenario {:?} mixes negative utilities with product aggregation; \
                 product ordering is not monotone for negative values",
                scenario.name
            );
        }
        Ok(scenario)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn agents(&self) -> &[AgentSpec] {
        &self.agents
    }

    pub fn agent_ids(&self) -> &[AgentId] {
        self.space.agents()
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_index(&self, id: &AgentId) -> Option<usize> {
        self.space.agent_index(id)
    }

    pub fn space(&self) -> &StrategySpace {
        &self.space
    }

    pub fn utilities(&self) -> &[UtilityFunction] {
        &self.utilities
    }

    pub fn acceptability(&self) -> &[AcceptabilityFunction] {
        &self.acceptability
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }

    pub fn into_parts(self) -> ScenarioParts {
        ScenarioParts {
            name: self.name,
            agents: self.agents,
            utilities: self.utilities,
            acceptability: self.acceptability,
            aggregation: self.aggregation,
        }
    }

    /// Checked utility evaluation of agent `agent` on `profile`.
    pub fn evaluate_utility(
        &self,
        agent: usize,
        profile: &JointProfile,
    ) -> Result<UtilityValue, ModelError> {
        self.space.check(profile)?;
        Ok(self.utilities[agent].evaluate(profile))
    }

    /// Checked acceptability evaluation of agent `agent` on `profile`.
    pub fn evaluate_acceptability(
        &self,
        agent: usize,
        profile: &JointProfile,
    ) -> Result<Acceptability, ModelError> {
        self.space.check(profile)?;
        Ok(self.acceptability[agent].evaluate(profile))
    }

    /// True if every acceptability function returns `true` on `profile`.
    pub fn is_acceptable(&self, profile: &JointProfile) -> bool {
        accepted_by_all(&self.acceptability, profile)
    }

    /// The first profile (in index order) that every agent can evaluate and
    /// every acceptability function accepts.
    pub fn first_acceptable_feasible(&self) -> Option<JointProfile> {
        self.space.profiles().find(|p| {
            self.utilities.iter().all(|u| !u.evaluate(p).is_null()) && self.is_acceptable(p)
        })
    }

    pub fn has_negative_values(&self) -> bool {
        self.utilities.iter().any(|u| {
            u.stored_values()
                .any(|v| matches!(v, UtilityValue::Finite(x) if x < 0.0))
        })
    }
}

fn check_owners<'a>(
    section: &str,
    space: &StrategySpace,
    owners: impl ExactSizeIterator<Item = &'a AgentId>,
) -> Result<(), ModelError> {
    if owners.len() != space.agent_count() {
        return Err(ModelError::Invalid {
            location: section.to_string(),
            message: format!(
                "expected one function per agent ({}), found {}",
                space.agent_count(),
                owners.len()
            ),
        });
    }
    for (i, owner) in owners.enumerate() {
        if owner != &space.agents()[i] {
            return Err(ModelError::Invalid {
                location: format!("{section}[{i}]"),
                message: format!(
                    "function belongs to {owner}, expected {}",
                    space.agents()[i]
                ),
            });
        }
    }
    Ok(())
}
