//! Whole-scenario solving: runs each agent's assigned procedure and
//! collects the outcome.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::engine::conflict::{has_common_optimum, pragmatic_conflict};
use crate::engine::decide::{Algorithm, Engine};
use crate::error::EngineError;
use crate::model::Scenario;
use crate::profile::{ActionTuple, AgentId, JointProfile};
use crate::utility::Evaluate;
use crate::value::UtilityValue;

/// Which procedure each agent runs. Agents without an override use the
/// default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    default: Algorithm,
    overrides: BTreeMap<AgentId, Algorithm>,
}

impl Assignment {
    pub fn uniform(algorithm: Algorithm) -> Self {
        Assignment {
            default: algorithm,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with(mut self, agent: impl Into<AgentId>, algorithm: Algorithm) -> Self {
        self.overrides.insert(agent.into(), algorithm);
        self
    }

    /// Per-agent algorithms in canonical agent order.
    pub fn resolve(&self, scenario: &Scenario) -> Result<Vec<Algorithm>, EngineError> {
        if let Some(unknown) = self
            .overrides
            .keys()
            .find(|id| scenario.agent_index(id).is_none())
        {
            return Err(EngineError::UnknownAgent(unknown.clone()));
        }
        Ok(scenario
            .agent_ids()
            .iter()
            .map(|id| self.overrides.get(id).copied().unwrap_or(self.default))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentDecision {
    pub agent: AgentId,
    pub algorithm: Algorithm,
    pub choice: ActionTuple,
    /// Raw utility of the assembled joint profile.
    pub utility: UtilityValue,
    pub pragmatic_conflict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionReport {
    pub scenario: String,
    pub agents: Vec<AgentDecision>,
    pub joint: JointProfile,
    /// No profile maximizes every agent's utility.
    pub conflict: bool,
    /// Equilibria of the primed game; present when any agent runs `Full`.
    pub equilibria: Option<BTreeSet<JointProfile>>,
}

impl DecisionReport {
    pub fn utilities(&self) -> Vec<UtilityValue> {
        self.agents.iter().map(|a| a.utility).collect()
    }

    pub fn choices(&self) -> Vec<&ActionTuple> {
        self.agents.iter().map(|a| &a.choice).collect()
    }

    /// Line-oriented `key value...` rendering, one fact per line.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}", self.scenario);
        for a in &self.agents {
            let _ = writeln!(out, "algorithm {} {}", a.agent, a.algorithm);
        }
        for a in &self.agents {
            let _ = writeln!(out, "choice {} {}", a.agent, a.choice);
        }
        let _ = writeln!(out, "joint {}", profile_token(&self.joint));
        for a in &self.agents {
            let _ = writeln!(out, "utility {} {}", a.agent, a.utility);
        }
        let _ = writeln!(out, "conflict {}", self.conflict);
        for a in &self.agents {
            let _ = writeln!(
                out,
                "pragmatic_conflict {} {}",
                a.agent, a.pragmatic_conflict
            );
        }
        if let Some(eq) = &self.equilibria {
            let _ = writeln!(out, "equilibria {}", eq.len());
            for p in eq {
                let _ = writeln!(out, "equilibrium {}", profile_token(p));
            }
        }
        out
    }
}

/// `drive_A,wait_B`; multi-action components are joined with `+`.
pub fn profile_token(profile: &JointProfile) -> String {
    profile
        .components()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Runs every agent's assigned procedure independently and assembles the
/// resulting joint profile.
pub fn solve_scenario(
    scenario: &Scenario,
    assignment: &Assignment,
) -> Result<DecisionReport, EngineError> {
    let algorithms = assignment.resolve(scenario)?;
    let engine = Engine::new(scenario);
    let choices = algorithms
        .iter()
        .enumerate()
        .map(|(i, alg)| engine.decide(i, *alg))
        .collect::<Result<Vec<_>, _>>()?;
    let joint = JointProfile::new(choices.clone());
    let conflict = !has_common_optimum(scenario.utilities(), scenario.space())?;
    let agents = scenario
        .agent_ids()
        .iter()
        .zip(algorithms.iter())
        .zip(choices)
        .enumerate()
        .map(|(i, ((id, alg), choice))| {
            let u = &scenario.utilities()[i];
            Ok(AgentDecision {
                agent: id.clone(),
                algorithm: *alg,
                choice,
                utility: u.evaluate(&joint),
                pragmatic_conflict: pragmatic_conflict(
                    u,
                    scenario.acceptability(),
                    scenario.space(),
                )?,
            })
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    let equilibria = algorithms
        .contains(&Algorithm::Full)
        .then(|| engine.equilibria().clone());
    Ok(DecisionReport {
        scenario: scenario.name().to_string(),
        agents,
        joint,
        conflict,
        equilibria,
    })
}
