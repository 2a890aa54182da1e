//! Conflict detection and the empathic decision procedures.

mod conflict;
mod decide;
mod equilibria;
pub mod oracle;
mod report;

pub use conflict::{aggregate, determine_act_max, has_common_optimum, pragmatic_conflict};
pub use decide::{Algorithm, Engine};
pub use equilibria::{enumerate_equilibria, StrategicGame};
pub use oracle::{brute_force_oracle, brute_force_oracle_bounded, oracle_equilibria};
pub use report::{profile_token, solve_scenario, AgentDecision, Assignment, DecisionReport};
