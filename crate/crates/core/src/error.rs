use thiserror::Error;

use crate::profile::AgentId;

/// Errors raised by the domain model: malformed profiles, invalid scenarios
/// and empty candidate sets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("cannot select from an empty set of profiles")]
    EmptySelection,
    #[error("no feasible profile: every profile evaluates to null")]
    NoFeasibleProfile,
    #[error("profile has {found} components, expected {expected}")]
    ProfileArity { expected: usize, found: usize },
    #[error("profile component {position} belongs to {found}, expected {expected}")]
    ComponentOwner {
        position: usize,
        expected: AgentId,
        found: AgentId,
    },
    #[error("{tuple:?} is not an admissible action tuple of agent {agent}")]
    UnknownTuple { agent: AgentId, tuple: String },
    #[error("scenario declares no agents")]
    NoAgents,
    #[error("{location}: unknown agent {id}")]
    UnknownAgent { location: String, id: String },
    #[error("{location}: agent id must be non-empty")]
    EmptyAgentId { location: String },
    #[error("{location}: duplicate agent id {id}")]
    DuplicateAgent { location: String, id: AgentId },
    #[error("{location}: agent {agent} declares no actions")]
    NoActions { location: String, agent: AgentId },
    #[error("{location}: action tuple must contain at least one action")]
    EmptyTuple { location: String },
    #[error("{location}: unknown action {action:?}")]
    UnknownAction { location: String, action: String },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error(
        "no profile is feasible for every agent and acceptable under every acceptability function"
    )]
    NoAcceptableProfile,
}

/// Errors raised by the decision algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("at least one utility function is required")]
    NoUtilities,
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("profile space has {size} profiles, above the oracle bound of {bound}")]
    OracleBound { size: usize, bound: usize },
}
