//! Empathic agent client: register, exchange announces, decide, commit,
//! collect the reward.

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use thiserror::Error;

use crate::engine::{Algorithm, Engine};
use crate::error::{EngineError, ModelError};
use crate::model::Scenario;
use crate::profile::{ActionTuple, AgentId, JointProfile};
use crate::runtime::message::{Body, ErrorCode, Message};
use crate::scenario::{
    acceptability_document, functions_from_documents, profile_from_doc, spec_digest,
    utility_document, ComponentDoc, ScenarioError,
};
use crate::value::UtilityValue;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientConfig {
    /// Session to join; the scenario name when unset.
    pub session: Option<String>,
    /// Longest wait for any single server message.
    pub read_timeout: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            session: None,
            read_timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("cannot connect to {endpoint}: {source}")]
    Connect { endpoint: String, source: io::Error },
    #[error("network error: {0}")]
    Io(#[from] io::Error),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("server error {code}: {message}")]
    Server { code: ErrorCode, message: String },
    #[error("announced functions are invalid: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("decision failed: {0}")]
    Engine(#[from] EngineError),
}

impl From<ModelError> for ClientError {
    fn from(e: ModelError) -> Self {
        ClientError::Scenario(e.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientOutcome {
    pub agent: AgentId,
    pub choice: ActionTuple,
    pub joint: JointProfile,
    pub utilities: BTreeMap<AgentId, UtilityValue>,
    /// This agent's realized utility.
    pub utility: UtilityValue,
}

struct Connection {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    session: String,
    agent: String,
}

impl Connection {
    fn send(&mut self, body: Body) -> Result<(), ClientError> {
        let msg = Message::new(self.session.clone(), self.agent.clone(), body);
        self.writer.write_all(msg.encode().as_bytes())?;
        Ok(())
    }

    /// Next message from the server; `error` messages become
    /// [`ClientError::Server`].
    fn recv(&mut self, expecting: &str) -> Result<Message, ClientError> {
        let mut line = String::new();
        let n = self
            .reader
            .read_line(&mut line)
            .map_err(|e| match e.kind() {
                io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => {
                    ClientError::Protocol(format!("timed out waiting for {expecting}"))
                }
                _ => ClientError::Io(e),
            })?;
        if n == 0 {
            return Err(ClientError::Protocol(format!(
                "connection closed while waiting for {expecting}"
            )));
        }
        let msg = Message::decode(&line)
            .map_err(|e| ClientError::Protocol(format!("undecodable server message: {e}")))?;
        match msg.body {
            Body::Error { code, message } => Err(ClientError::Server { code, message }),
            _ => Ok(msg),
        }
    }
}

fn unexpected(got: &Message, expecting: &str) -> ClientError {
    ClientError::Protocol(format!("expected {expecting}, got {}", got.body.kind()))
}

/// Replaces agent `j`'s functions in `scenario` with announced ones.
fn substitute(
    scenario: Scenario,
    j: usize,
    utility: &crate::scenario::UtilityDoc,
    rules: &[crate::scenario::RuleDoc],
) -> Result<Scenario, ClientError> {
    let (u, acc) = functions_from_documents(&scenario, j, utility, rules)?;
    let mut parts = scenario.into_parts();
    parts.utilities[j] = u;
    parts.acceptability[j] = acc;
    Ok(Scenario::new(parts)?)
}

/// Plays one session as `agent` running `algorithm`. The client starts
/// from its own copy of the scenario and adopts the functions its peers
/// announce.
pub fn run_agent_client(
    endpoint: impl ToSocketAddrs + std::fmt::Debug,
    agent: &AgentId,
    algorithm: Algorithm,
    scenario: &Scenario,
    config: &ClientConfig,
) -> Result<ClientOutcome, ClientError> {
    let stream = TcpStream::connect(&endpoint).map_err(|source| ClientError::Connect {
        endpoint: format!("{endpoint:?}"),
        source,
    })?;
    stream.set_read_timeout(Some(config.read_timeout))?;
    let _ = stream.set_nodelay(true);
    let mut conn = Connection {
        reader: BufReader::new(stream.try_clone()?),
        writer: stream,
        session: config
            .session
            .clone()
            .unwrap_or_else(|| scenario.name().to_string()),
        agent: agent.to_string(),
    };

    conn.send(Body::Register {
        agent_id: agent.clone(),
        algorithm,
        spec_digest: spec_digest(scenario),
    })?;
    let ack = conn.recv("register_ack")?;
    if !matches!(ack.body, Body::RegisterAck { .. }) {
        return Err(unexpected(&ack, "register_ack"));
    }
    let me = scenario
        .agent_index(agent)
        .ok_or_else(|| ClientError::Protocol(format!("server accepted unknown agent {agent}")))?;

    conn.send(Body::Announce {
        agent_id: agent.clone(),
        utility: utility_document(&scenario.utilities()[me]),
        acceptability: acceptability_document(&scenario.acceptability()[me]),
    })?;

    let mut working = scenario.clone();
    loop {
        let msg = conn.recv("start")?;
        match msg.body {
            Body::Announce {
                agent_id,
                utility,
                acceptability,
            } => {
                let j = working
                    .agent_index(&agent_id)
                    .filter(|j| *j != me)
                    .ok_or_else(|| {
                        ClientError::Protocol(format!("announce for unexpected agent {agent_id}"))
                    })?;
                working = substitute(working, j, &utility, &acceptability)?;
            }
            Body::Start => break,
            _ => return Err(unexpected(&msg, "announce or start")),
        }
    }

    let choice = Engine::new(&working).decide(me, algorithm)?;
    log::info!("agent {agent} ({algorithm}) commits {choice}");
    conn.send(Body::Commit {
        tuple: ComponentDoc::from_tuple(&choice),
    })?;

    let msg = conn.recv("outcome")?;
    let Body::Outcome { profile, utilities } = msg.body else {
        return Err(unexpected(&msg, "outcome"));
    };
    let joint = profile_from_doc(scenario, &profile, "payload.profile")
        .map_err(|e| ClientError::Protocol(format!("bad outcome profile: {e}")))?;
    let utility = *utilities
        .get(agent)
        .ok_or_else(|| ClientError::Protocol(format!("outcome lacks a utility for {agent}")))?;
    // bye is a courtesy; a closed connection here is not an error
    if let Ok(m) = conn.recv("bye") {
        if !matches!(m.body, Body::Bye) {
            log::debug!("ignoring {} after outcome", m.body.kind());
        }
    }
    Ok(ClientOutcome {
        agent: agent.clone(),
        choice,
        joint,
        utilities,
        utility,
    })
}
