//! Empathic agents for one-shot multi-agent decisions.
//!
//! Each agent maximizes its own utility only when the resulting joint
//! profile is acceptable to every agent under a shared set of rules, and
//! otherwise maximizes the aggregated (by default: multiplied) utility of
//! all agents. Three procedures are provided: naive, lazy and full, the
//! last of which chooses among pure-strategy Nash equilibria.
//!
//! The crate is organized bottom-up:
//!
//! * [`value`], [`profile`], [`utility`], [`acceptability`], [`model`]:
//!   the domain model and its evaluation semantics.
//! * [`engine`]: conflict checks, the decision procedures and a
//!   brute-force oracle.
//! * [`scenario`]: the JSON scenario format, the built-in scenarios and a
//!   seeded generator.
//! * [`runtime`]: a TCP environment server and agent client.

pub mod acceptability;
pub mod engine;
mod error;
pub mod model;
pub mod profile;
pub mod runtime;
pub mod scenario;
pub mod utility;
pub mod value;

pub use acceptability::{Acceptability, AcceptabilityFunction, AcceptabilityRule, Matcher};
pub use engine::{solve_scenario, Algorithm, Assignment, DecisionReport, Engine};
pub use error::{EngineError, ModelError};
pub use model::{AgentSpec, Aggregation, Scenario, ScenarioParts};
pub use profile::{first, ActionTuple, AgentId, ConsequenceSet, JointProfile, StrategySpace};
pub use utility::{
    argmax_set, prime_utility, Evaluate, UtilityFunction, UtilityMode, UtilityTable,
};
pub use value::UtilityValue;
