//! Agents, action tuples, joint profiles and the strategy-profile space.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(id: impl Into<String>) -> Self {
        AgentId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<String> for AgentId {
    fn from(s: String) -> Self {
        AgentId(s)
    }
}

impl From<&str> for AgentId {
    fn from(s: &str) -> Self {
        AgentId(s.to_string())
    }
}

/// The actions a single agent executes at the decision instant. Names are
/// kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionTuple {
    owner: AgentId,
    actions: Vec<String>,
}

impl ActionTuple {
    pub fn new<I, S>(owner: AgentId, actions: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = actions.into_iter().map(Into::into).collect();
        ActionTuple {
            owner,
            actions: set.into_iter().collect(),
        }
    }

    pub fn single(owner: AgentId, action: impl Into<String>) -> Self {
        ActionTuple {
            owner,
            actions: vec![action.into()],
        }
    }

    pub fn owner(&self) -> &AgentId {
        &self.owner
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn contains(&self, action: &str) -> bool {
        self.actions
            .binary_search_by(|a| a.as_str().cmp(action))
            .is_ok()
    }
}

/// Renders `drive_A`, or `a+b` for multi-action tuples.
impl fmt::Display for ActionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.actions.join("+"))
    }
}

/// One action tuple per agent, in canonical agent order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JointProfile {
    components: Vec<ActionTuple>,
}

impl JointProfile {
    pub fn new(components: Vec<ActionTuple>) -> Self {
        JointProfile { components }
    }

    pub fn components(&self) -> &[ActionTuple] {
        &self.components
    }

    pub fn component(&self, agent: usize) -> &ActionTuple {
        &self.components[agent]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// True if the union of all component actions contains `action`.
    pub fn mentions(&self, action: &str) -> bool {
        self.components.iter().any(|c| c.contains(action))
    }

    /// Replaces one agent's component.
    pub fn with_component(&self, agent: usize, tuple: ActionTuple) -> JointProfile {
        let mut components = self.components.clone();
        components[agent] = tuple;
        JointProfile { components }
    }

    /// Flattened action names in canonical agent order, the key used by
    /// [`first`].
    pub fn sort_key(&self) -> Vec<&str> {
        self.components
            .iter()
            .flat_map(|c| c.actions.iter().map(String::as_str))
            .collect()
    }
}

impl fmt::Display for JointProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

pub type ConsequenceSet = BTreeSet<String>;

/// Deterministic tie-breaker: sorts the profiles by their flattened action
/// names in decreasing code-point order and returns the head.
pub fn first<'a, I>(profiles: I) -> Result<&'a JointProfile, ModelError>
where
    I: IntoIterator<Item = &'a JointProfile>,
{
    profiles
        .into_iter()
        .max_by(|a, b| a.sort_key().cmp(&b.sort_key()))
        .ok_or(ModelError::EmptySelection)
}

/// The cartesian product of every agent's admissible action tuples.
/// Profiles are indexed in mixed radix with agent 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySpace {
    agents: Vec<AgentId>,
    strategies: Vec<Vec<ActionTuple>>,
}

impl StrategySpace {
    /// `strategies[i]` must be non-empty and owned by `agents[i]`.
    pub fn new(agents: Vec<AgentId>, mut strategies: Vec<Vec<ActionTuple>>) -> Self {
        assert_eq!(agents.len(), strategies.len());
        for s in &mut strategies {
            s.sort();
            s.dedup();
        }
        StrategySpace { agents, strategies }
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_index(&self, id: &AgentId) -> Option<usize> {
        self.agents.iter().position(|a| a == id)
    }

    pub fn strategies(&self, agent: usize) -> &[ActionTuple] {
        &self.strategies[agent]
    }

    /// Number of joint profiles; saturates instead of overflowing.
    pub fn len(&self) -> usize {
        self.strategies
            .iter()
            .fold(1usize, |acc, s| acc.saturating_mul(s.len()))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn profile(&self, mut index: usize) -> JointProfile {
        let mut components = vec![None; self.strategies.len()];
        for (i, s) in self.strategies.iter().enumerate().rev() {
            components[i] = Some(s[index % s.len()].clone());
            index /= s.len();
        }
        JointProfile::new(components.into_iter().map(Option::unwrap).collect())
    }

    pub fn profiles(&self) -> impl Iterator<Item = JointProfile> + '_ {
        (0..self.len()).map(move |i| self.profile(i))
    }

    /// Checks arity, ownership and membership of every component.
    pub fn check(&self, profile: &JointProfile) -> Result<(), ModelError> {
        if profile.len() != self.agents.len() {
            return Err(ModelError::ProfileArity {
                expected: self.agents.len(),
                found: profile.len(),
            });
        }
        for (i, c) in profile.components().iter().enumerate() {
            if c.owner() != &self.agents[i] {
                return Err(ModelError::ComponentOwner {
                    position: i,
                    expected: self.agents[i].clone(),
                    found: c.owner().clone(),
                });
            }
            if self.strategies[i].binary_search(c).is_err() {
                return Err(ModelError::UnknownTuple {
                    agent: self.agents[i].clone(),
                    tuple: c.to_string(),
                });
            }
        }
        Ok(())
    }
}
