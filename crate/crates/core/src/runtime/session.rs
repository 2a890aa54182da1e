//! Server-side session state machine. Pure: it consumes decoded lines and
//! clock ticks and returns the messages to deliver; the server does the I/O.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use crate::error::ModelError;
use crate::model::Scenario;
use crate::profile::{ActionTuple, AgentId, JointProfile};
use crate::runtime::message::{Body, ErrorCode, Message, SERVER_SENDER};
use crate::scenario::{
    profile_doc, spec_digest, tuple_from_doc, ComponentDoc, RuleDoc, UtilityDoc,
};
use crate::value::UtilityValue;

pub type ConnectionId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    AwaitingRegistration,
    Announcing,
    AwaitingCommits,
    Completed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Delivery {
    Send(ConnectionId, Message),
    Close(ConnectionId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionOutcome {
    pub session: String,
    pub joint: JointProfile,
    pub utilities: BTreeMap<AgentId, UtilityValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timeouts {
    /// `None` waits for registrations indefinitely.
    pub registration: Option<Duration>,
    pub announce: Duration,
    pub commit: Duration,
}

impl Default for Timeouts {
    fn default() -> Self {
        Timeouts {
            registration: None,
            announce: Duration::from_secs(10),
            commit: Duration::from_secs(10),
        }
    }
}

/// Raw utility of every agent at `joint`, keyed by agent id.
pub fn compute_rewards(
    scenario: &Scenario,
    joint: &JointProfile,
) -> Result<BTreeMap<AgentId, UtilityValue>, ModelError> {
    scenario
        .agent_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| Ok((id.clone(), scenario.evaluate_utility(i, joint)?)))
        .collect()
}

#[derive(Debug, Clone)]
struct Announcement {
    utility: UtilityDoc,
    acceptability: Vec<RuleDoc>,
}

#[derive(Debug)]
pub struct SessionState {
    scenario: Scenario,
    digest: String,
    session: String,
    timeouts: Timeouts,
    phase: Phase,
    phase_since: Instant,
    aborted: Option<(ErrorCode, String)>,
    connections: BTreeMap<ConnectionId, AgentId>,
    announced: BTreeMap<AgentId, Announcement>,
    received_commits: BTreeMap<AgentId, ActionTuple>,
    outcome: Option<SessionOutcome>,
}

impl SessionState {
    pub fn new(
        scenario: Scenario,
        session: impl Into<String>,
        timeouts: Timeouts,
        now: Instant,
    ) -> Self {
        SessionState {
            digest: spec_digest(&scenario),
            scenario,
            session: session.into(),
            timeouts,
            phase: Phase::AwaitingRegistration,
            phase_since: now,
            aborted: None,
            connections: BTreeMap::new(),
            announced: BTreeMap::new(),
            received_commits: BTreeMap::new(),
            outcome: None,
        }
    }

    pub fn session(&self) -> &str {
        &self.session
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn expected_agents(&self) -> &[AgentId] {
        self.scenario.agent_ids()
    }

    pub fn received_commits(&self) -> &BTreeMap<AgentId, ActionTuple> {
        &self.received_commits
    }

    pub fn aborted(&self) -> Option<(ErrorCode, &str)> {
        self.aborted.as_ref().map(|(c, m)| (*c, m.as_str()))
    }

    pub fn outcome(&self) -> Option<&SessionOutcome> {
        self.outcome.as_ref()
    }

    pub fn is_finished(&self) -> bool {
        self.phase == Phase::Completed || self.aborted.is_some()
    }

    fn registered(&self) -> BTreeSet<&AgentId> {
        self.connections.values().collect()
    }

    fn msg(&self, body: Body) -> Message {
        Message::new(self.session.clone(), SERVER_SENDER, body)
    }

    fn error(&self, conn: ConnectionId, code: ErrorCode, message: impl Into<String>) -> Delivery {
        Delivery::Send(conn, Message::error(&self.session, code, message))
    }

    fn enter(&mut self, phase: Phase, now: Instant) {
        debug_assert!(phase > self.phase);
        log::debug!("session {}: {:?} -> {:?}", self.session, self.phase, phase);
        self.phase = phase;
        self.phase_since = now;
    }

    /// Aborts the session: every registered connection gets the error, then
    /// bye, then is closed.
    fn abort(&mut self, code: ErrorCode, message: String) -> Vec<Delivery> {
        log::warn!("session {} aborted: {code}: {message}", self.session);
        let mut out = Vec::new();
        for conn in self.connections.keys() {
            out.push(self.error(*conn, code, message.clone()));
            out.push(Delivery::Send(*conn, self.msg(Body::Bye)));
            out.push(Delivery::Close(*conn));
        }
        self.aborted = Some((code, message));
        out
    }

    /// Handles one line received on `conn`.
    pub fn on_line(&mut self, conn: ConnectionId, line: &str, now: Instant) -> Vec<Delivery> {
        if self.is_finished() {
            return Vec::new();
        }
        let msg = match Message::decode(line) {
            Ok(m) => m,
            Err(e) => return vec![self.error(conn, ErrorCode::MalformedMessage, e.to_string())],
        };
        let registering = matches!(msg.body, Body::Register { .. });
        if msg.session != self.session && !(registering && msg.session.is_empty()) {
            let text = format!("no session named {:?}", msg.session);
            let mut out = vec![self.error(conn, ErrorCode::UnknownSession, text)];
            if !self.connections.contains_key(&conn) {
                out.push(Delivery::Close(conn));
            }
            return out;
        }
        match msg.body {
            Body::Register {
                agent_id,
                spec_digest,
                algorithm,
            } => self.register(conn, agent_id, &spec_digest, algorithm, now),
            Body::Announce {
                agent_id,
                utility,
                acceptability,
            } => self.announce(conn, agent_id, utility, acceptability, now),
            Body::Commit { tuple } => self.commit(conn, &tuple, now),
            other => vec![self.error(
                conn,
                ErrorCode::UnexpectedMessage,
                format!("clients may not send {}", other.kind()),
            )],
        }
    }

    fn register(
        &mut self,
        conn: ConnectionId,
        agent: AgentId,
        digest: &str,
        algorithm: crate::engine::Algorithm,
        now: Instant,
    ) -> Vec<Delivery> {
        if let Some(existing) = self.connections.get(&conn) {
            let text = format!("connection already registered as {existing}");
            return vec![self.error(conn, ErrorCode::DuplicateRegistration, text)];
        }
        let reject =
            |s: &Self, code, text: String| vec![s.error(conn, code, text), Delivery::Close(conn)];
        if self.scenario.agent_index(&agent).is_none() {
            return reject(
                self,
                ErrorCode::UnknownAgent,
                format!("agent {agent} is not part of this scenario"),
            );
        }
        if self.registered().contains(&agent) {
            return reject(
                self,
                ErrorCode::DuplicateRegistration,
                format!("agent {agent} is already registered"),
            );
        }
        if self.phase != Phase::AwaitingRegistration {
            return reject(
                self,
                ErrorCode::UnexpectedMessage,
                "registration is closed".into(),
            );
        }
        if digest != self.digest {
            let text = format!(
                "agent {agent} holds scenario digest {digest}, server holds {}",
                self.digest
            );
            let mut out = vec![
                self.error(conn, ErrorCode::SpecMismatch, text.clone()),
                Delivery::Close(conn),
            ];
            out.extend(self.abort(ErrorCode::SpecMismatch, text));
            return out;
        }
        log::info!("session {}: {agent} registered ({algorithm})", self.session);
        self.connections.insert(conn, agent);
        let ack = self.msg(Body::RegisterAck {
            agents: self.scenario.agent_ids().to_vec(),
        });
        let mut out = vec![Delivery::Send(conn, ack)];
        if self.connections.len() == self.scenario.agent_count() {
            self.enter(Phase::Announcing, now);
            out.extend(self.maybe_start(now));
        }
        out
    }

    fn announce(
        &mut self,
        conn: ConnectionId,
        agent: AgentId,
        utility: UtilityDoc,
        acceptability: Vec<RuleDoc>,
        now: Instant,
    ) -> Vec<Delivery> {
        let Some(owner) = self.connections.get(&conn).cloned() else {
            return vec![self.error(
                conn,
                ErrorCode::UnexpectedMessage,
                "announce before register",
            )];
        };
        if owner != agent {
            let text = format!("connection of {owner} cannot announce for {agent}");
            return vec![self.error(conn, ErrorCode::MalformedMessage, text)];
        }
        if self.phase > Phase::Announcing || self.announced.contains_key(&agent) {
            return vec![self.error(
                conn,
                ErrorCode::UnexpectedMessage,
                format!("{agent} already announced"),
            )];
        }
        self.announced.insert(
            agent,
            Announcement {
                utility,
                acceptability,
            },
        );
        self.maybe_start(now)
    }

    /// Once everyone is registered and has announced: relay every announce
    /// to every peer, then broadcast start.
    fn maybe_start(&mut self, now: Instant) -> Vec<Delivery> {
        if self.phase != Phase::Announcing || self.announced.len() < self.scenario.agent_count() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (&conn, receiver) in &self.connections {
            for (agent, a) in &self.announced {
                if agent == receiver {
                    continue;
                }
                let relay = Message::new(
                    self.session.clone(),
                    agent.to_string(),
                    Body::Announce {
                        agent_id: agent.clone(),
                        utility: a.utility.clone(),
                        acceptability: a.acceptability.clone(),
                    },
                );
                out.push(Delivery::Send(conn, relay));
            }
        }
        for &conn in self.connections.keys() {
            out.push(Delivery::Send(conn, self.msg(Body::Start)));
        }
        self.enter(Phase::AwaitingCommits, now);
        out
    }

    fn commit(&mut self, conn: ConnectionId, tuple: &ComponentDoc, now: Instant) -> Vec<Delivery> {
        let Some(agent) = self.connections.get(&conn).cloned() else {
            return vec![self.error(conn, ErrorCode::UnexpectedMessage, "commit before register")];
        };
        if self.phase != Phase::AwaitingCommits {
            return vec![self.error(conn, ErrorCode::UnexpectedMessage, "commit before start")];
        }
        if self.received_commits.contains_key(&agent) {
            return vec![self.error(
                conn,
                ErrorCode::DuplicateCommit,
                format!("{agent} already committed"),
            )];
        }
        let idx = self
            .scenario
            .agent_index(&agent)
            .expect("registered agents are known");
        let parsed = match tuple_from_doc(&self.scenario, idx, tuple, "payload.tuple") {
            Ok(t) => t,
            Err(e) => return vec![self.error(conn, ErrorCode::InvalidCommit, e.to_string())],
        };
        log::info!("session {}: {agent} committed {parsed}", self.session);
        self.received_commits.insert(agent, parsed);
        if self.received_commits.len() < self.scenario.agent_count() {
            return Vec::new();
        }
        self.finish(now)
    }

    fn finish(&mut self, now: Instant) -> Vec<Delivery> {
        let joint = JointProfile::new(
            self.scenario
                .agent_ids()
                .iter()
                .map(|id| self.received_commits[id].clone())
                .collect(),
        );
        let utilities =
            compute_rewards(&self.scenario, &joint).expect("commits form a valid profile");
        let outcome = self.msg(Body::Outcome {
            profile: profile_doc(&joint),
            utilities: utilities.clone(),
        });
        let mut out = Vec::new();
        for &conn in self.connections.keys() {
            out.push(Delivery::Send(conn, outcome.clone()));
            out.push(Delivery::Send(conn, self.msg(Body::Bye)));
            out.push(Delivery::Close(conn));
        }
        self.outcome = Some(SessionOutcome {
            session: self.session.clone(),
            joint,
            utilities,
        });
        self.enter(Phase::Completed, now);
        out
    }

    /// A connection went away. Losing a registered agent aborts the session.
    pub fn on_disconnect(&mut self, conn: ConnectionId) -> Vec<Delivery> {
        if self.is_finished() {
            return Vec::new();
        }
        match self.connections.remove(&conn) {
            Some(agent) => self.abort(ErrorCode::Aborted, format!("agent {agent} disconnected")),
            None => Vec::new(),
        }
    }

    /// Enforces the phase deadlines.
    pub fn on_tick(&mut self, now: Instant) -> Vec<Delivery> {
        if self.is_finished() {
            return Vec::new();
        }
        let elapsed = now.saturating_duration_since(self.phase_since);
        let missing = |done: &dyn Fn(&AgentId) -> bool| -> String {
            self.scenario
                .agent_ids()
                .iter()
                .filter(|a| !done(a))
                .map(AgentId::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        let registered = self.registered();
        let (code, waiting) = match self.phase {
            Phase::AwaitingRegistration => match self.timeouts.registration {
                Some(limit) if elapsed >= limit => (
                    ErrorCode::RegistrationTimeout,
                    missing(&|a| registered.contains(a)),
                ),
                _ => return Vec::new(),
            },
            Phase::Announcing if elapsed >= self.timeouts.announce => (
                ErrorCode::AnnounceTimeout,
                missing(&|a| self.announced.contains_key(a)),
            ),
            Phase::AwaitingCommits if elapsed >= self.timeouts.commit => (
                ErrorCode::CommitTimeout,
                missing(&|a| self.received_commits.contains_key(a)),
            ),
            _ => return Vec::new(),
        };
        self.abort(code, format!("timed out waiting for {waiting}"))
    }
}
