//! Networked sessions: an environment server that relays messages between
//! agents and computes rewards, and the agent client.
//!
//! The transport is TCP carrying one JSON object per line.

mod client;
pub mod message;
mod server;
mod session;

pub use client::{run_agent_client, ClientConfig, ClientError, ClientOutcome};
pub use message::{Body, ErrorCode, Message};
pub use server::{serve_environment, Server, ServerConfig, ServerError};
pub use session::{
    compute_rewards, ConnectionId, Delivery, Phase, SessionOutcome, SessionState, Timeouts,
};

pub const DEFAULT_PORT: u16 = 4780;
pub const PORT_ENV: &str = "EMPATHICA_PORT";

/// The port from `EMPATHICA_PORT`, or [`DEFAULT_PORT`] when unset or
/// unparsable.
pub fn default_port() -> u16 {
    std::env::var(PORT_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_PORT)
}
