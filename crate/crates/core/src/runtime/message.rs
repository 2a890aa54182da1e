//! Wire messages: one JSON object per line.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::Algorithm;
use crate::profile::AgentId;
use crate::scenario::{ComponentDoc, ProfileDoc, RuleDoc, UtilityDoc};
use crate::value::UtilityValue;

/// Sender name used by the environment server.
pub const SERVER_SENDER: &str = "server";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    SpecMismatch,
    UnknownAgent,
    UnknownSession,
    DuplicateRegistration,
    MalformedMessage,
    UnexpectedMessage,
    InvalidCommit,
    DuplicateCommit,
    RegistrationTimeout,
    AnnounceTimeout,
    CommitTimeout,
    Aborted,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::SpecMismatch => "spec_mismatch",
            ErrorCode::UnknownAgent => "unknown_agent",
            ErrorCode::UnknownSession => "unknown_session",
            ErrorCode::DuplicateRegistration => "duplicate_registration",
            ErrorCode::MalformedMessage => "malformed_message",
            ErrorCode::UnexpectedMessage => "unexpected_message",
            ErrorCode::InvalidCommit => "invalid_commit",
            ErrorCode::DuplicateCommit => "duplicate_commit",
            ErrorCode::RegistrationTimeout => "registration_timeout",
            ErrorCode::AnnounceTimeout => "announce_timeout",
            ErrorCode::CommitTimeout => "commit_timeout",
            ErrorCode::Aborted => "aborted",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Kind-specific message bodies. The `kind` tag and `payload` body sit
/// next to `session` and `sender` in the encoded object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Body {
    Register {
        agent_id: AgentId,
        algorithm: Algorithm,
        spec_digest: String,
    },
    RegisterAck {
        agents: Vec<AgentId>,
    },
    Announce {
        agent_id: AgentId,
        utility: UtilityDoc,
        acceptability: Vec<RuleDoc>,
    },
    Start,
    Commit {
        tuple: ComponentDoc,
    },
    Outcome {
        profile: ProfileDoc,
        utilities: BTreeMap<AgentId, UtilityValue>,
    },
    Error {
        code: ErrorCode,
        message: String,
    },
    Bye,
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::Register { .. } => "register",
            Body::RegisterAck { .. } => "register_ack",
            Body::Announce { .. } => "announce",
            Body::Start => "start",
            Body::Commit { .. } => "commit",
            Body::Outcome { .. } => "outcome",
            Body::Error { .. } => "error",
            Body::Bye => "bye",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub session: String,
    pub sender: String,
    #[serde(flatten)]
    pub body: Body,
}

impl Message {
    pub fn new(session: impl Into<String>, sender: impl Into<String>, body: Body) -> Self {
        Message {
            session: session.into(),
            sender: sender.into(),
            body,
        }
    }

    pub fn error(session: &str, code: ErrorCode, message: impl Into<String>) -> Self {
        Message::new(
            session,
            SERVER_SENDER,
            Body::Error {
                code,
                message: message.into(),
            },
        )
    }

    /// Single-line JSON encoding, newline-terminated.
    pub fn encode(&self) -> String {
        // serde_json escapes control characters inside strings, so compact
        // output never contains a raw newline
        let mut line = serde_json::to_string(self).expect("message is serializable");
        line.push('\n');
        line
    }

    pub fn decode(line: &str) -> Result<Message, serde_json::Error> {
        serde_json::from_str(line.trim_end_matches(['\r', '\n']))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_is_one_line_with_kind() {
        let m = Message::new(
            "s",
            "A",
            Body::Register {
                agent_id: AgentId::from("A\nB"),
                algorithm: Algorithm::Lazy,
                spec_digest: "00ff".into(),
            },
        );
        let line = m.encode();
        assert_eq!(line.matches('\n').count(), 1);
        assert!(line.ends_with('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["kind"], "register");
        assert_eq!(v["session"], "s");
        assert_eq!(v["sender"], "A");
        assert_eq!(v["payload"]["algorithm"], "lazy");
        assert_eq!(Message::decode(&line).unwrap(), m);
    }

    #[test]
    fn unit_kinds_round_trip() {
        for body in [Body::Start, Body::Bye] {
            let m = Message::new("s", SERVER_SENDER, body);
            assert_eq!(Message::decode(&m.encode()).unwrap(), m);
        }
        let m = Message::decode(r#"{"kind":"start","session":"s","sender":"server"}"#).unwrap();
        assert_eq!(m.body, Body::Start);
    }

    #[test]
    fn outcome_carries_extended_reals() {
        let m = Message::new(
            "s",
            SERVER_SENDER,
            Body::Outcome {
                profile: vec![
                    ComponentDoc::One("drive_A".into()),
                    ComponentDoc::One("drive_B".into()),
                ],
                utilities: BTreeMap::from([
                    (AgentId::from("A"), UtilityValue::NegInf),
                    (AgentId::from("B"), UtilityValue::Null),
                ]),
            },
        );
        let line = m.encode();
        assert!(line.contains(r#""A":"-inf""#), "{line}");
        assert!(line.contains(r#""B":null"#), "{line}");
        assert_eq!(Message::decode(&line).unwrap(), m);
    }

    #[test]
    fn missing_envelope_fields_are_rejected() {
        assert!(Message::decode(r#"{"kind":"start","session":"s"}"#).is_err());
        assert!(Message::decode(r#"{"session":"s","sender":"A"}"#).is_err());
        assert!(Message::decode(r#"{"kind":"dance","session":"s","sender":"A"}"#).is_err());
        assert!(Message::decode("not json").is_err());
    }

    #[test]
    fn error_codes_render_snake_case() {
        let m = Message::error("s", ErrorCode::SpecMismatch, "digest differs");
        let v: serde_json::Value = serde_json::from_str(&m.encode()).unwrap();
        assert_eq!(v["payload"]["code"], "spec_mismatch");
        assert_eq!(ErrorCode::SpecMismatch.to_string(), "spec_mismatch");
    }
}
