//! Per-agent acceptability functions built from ordered, first-match rules.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::profile::{AgentId, JointProfile};

/// Three-valued acceptability verdict. `Null` marks impossible profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Acceptability {
    True,
    False,
    Null,
}

impl fmt::Display for Acceptability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Acceptability::True => "true",
            Acceptability::False => "false",
            Acceptability::Null => "null",
        })
    }
}

impl Serialize for Acceptability {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Acceptability::True => s.serialize_bool(true),
            Acceptability::False => s.serialize_bool(false),
            Acceptability::Null => s.serialize_unit(),
        }
    }
}

struct AcceptabilityVisitor;

impl<'de> Visitor<'de> for AcceptabilityVisitor {
    type Value = Acceptability;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("true, false or null")
    }

    fn visit_bool<E: de::Error>(self, v: bool) -> Result<Acceptability, E> {
        Ok(if v {
            Acceptability::True
        } else {
            Acceptability::False
        })
    }

    fn visit_unit<E: de::Error>(self) -> Result<Acceptability, E> {
        Ok(Acceptability::Null)
    }

    fn visit_none<E: de::Error>(self) -> Result<Acceptability, E> {
        Ok(Acceptability::Null)
    }
}

// deserialize_any so that a missing field is an error rather than null
impl<'de> Deserialize<'de> for Acceptability {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(AcceptabilityVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matcher {
    /// Matches exactly one profile.
    Equals(JointProfile),
    /// Matches any profile whose combined actions include all of these.
    Contains(BTreeSet<String>),
}

impl Matcher {
    pub fn matches(&self, profile: &JointProfile) -> bool {
        match self {
            Matcher::Equals(p) => p == profile,
            Matcher::Contains(actions) => actions.iter().all(|a| profile.mentions(a)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptabilityRule {
    pub matcher: Matcher,
    pub value: Acceptability,
}

impl AcceptabilityRule {
    pub fn new(matcher: Matcher, value: Acceptability) -> Self {
        AcceptabilityRule { matcher, value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptabilityFunction {
    agent: AgentId,
    rules: Vec<AcceptabilityRule>,
}

impl AcceptabilityFunction {
    pub fn new(agent: AgentId, rules: Vec<AcceptabilityRule>) -> Self {
        AcceptabilityFunction { agent, rules }
    }

    pub fn agent(&self) -> &AgentId {
        &self.agent
    }

    pub fn rules(&self) -> &[AcceptabilityRule] {
        &self.rules
    }

    /// Value of the first matching rule, `True` when none matches.
    pub fn evaluate(&self, profile: &JointProfile) -> Acceptability {
        self.rules
            .iter()
            .find(|r| r.matcher.matches(profile))
            .map_or(Acceptability::True, |r| r.value)
    }
}
