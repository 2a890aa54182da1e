//! The `.scenario.json` format.
//!
//! Parsing is strict (unknown keys are rejected) and every semantic error
//! carries a JSON-path style location. Serialization is canonical: keys
//! sorted, reals in shortest round-trip form, table rows in profile order.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::acceptability::{Acceptability, AcceptabilityFunction, AcceptabilityRule, Matcher};
use crate::error::ModelError;
use crate::model::{AgentSpec, Aggregation, Scenario, ScenarioParts};
use crate::profile::{ActionTuple, AgentId, ConsequenceSet, JointProfile, StrategySpace};
use crate::utility::{UtilityFunction, UtilityMode, UtilityTable};
use crate::value::UtilityValue;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}, column {column}: malformed JSON: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: schema violation: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("version: unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

impl From<serde_json::Error> for ScenarioError {
    fn from(e: serde_json::Error) -> Self {
        let (line, column) = (e.line(), e.column());
        let message = e.to_string();
        // strip serde_json's own " at line X column Y" suffix
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        match e.classify() {
            serde_json::error::Category::Data => ScenarioError::Schema {
                line,
                column,
                message,
            },
            _ => ScenarioError::Syntax {
                line,
                column,
                message,
            },
        }
    }
}

/// One agent's component of a profile: a bare name for single-action
/// tuples, a list otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentDoc {
    One(String),
    Many(Vec<String>),
}

impl ComponentDoc {
    pub fn names(&self) -> Vec<&str> {
        match self {
            ComponentDoc::One(s) => vec![s.as_str()],
            ComponentDoc::Many(v) => v.iter().map(String::as_str).collect(),
        }
    }

    pub fn from_tuple(t: &ActionTuple) -> Self {
        match t.actions() {
            [one] => ComponentDoc::One(one.clone()),
            many => ComponentDoc::Many(many.to_vec()),
        }
    }
}

pub type ProfileDoc = Vec<ComponentDoc>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDoc {
    pub id: String,
    pub actions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuples: Option<Vec<ComponentDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub profile: ProfileDoc,
    pub value: UtilityValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct A2cEntry {
    pub profile: ProfileDoc,
    pub consequences: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UqEntry {
    pub consequences: Vec<String>,
    pub value: UtilityValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum UtilityDoc {
    Direct {
        table: Vec<TableEntry>,
    },
    Composed {
        a2c: Vec<A2cEntry>,
        uq: Vec<UqEntry>,
    },
}

/// Exactly one of `equals` / `contains` must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equals: Option<ProfileDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contains: Option<Vec<String>>,
    pub value: Acceptability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub version: u32,
    pub name: String,
    pub agents: Vec<AgentDoc>,
    pub utilities: BTreeMap<String, UtilityDoc>,
    #[serde(default)]
    pub acceptability: BTreeMap<String, Vec<RuleDoc>>,
    #[serde(default)]
    pub aggregation: Aggregation,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDocument = serde_json::from_str(text)?;
    from_document(&doc)
}

/// Canonical text of `scenario`, newline-terminated.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    let value = serde_json::to_value(to_document(scenario)).expect("document is serializable");
    let mut text = serde_json::to_string_pretty(&value).expect("value is serializable");
    text.push('\n');
    text
}

/// Lowercase hex SHA-256 of the canonical serialization.
pub fn spec_digest(scenario: &Scenario) -> String {
    let hash = Sha256::digest(serialize_scenario(scenario).as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses one agent's component of a profile against its declared
/// actions; the resulting tuple must be admissible.
fn parse_component(
    doc: &ComponentDoc,
    agent: &AgentSpec,
    strategies: &[ActionTuple],
    location: &str,
) -> Result<ActionTuple, ModelError> {
    let names = doc.names();
    if names.is_empty() {
        return Err(ModelError::EmptyTuple {
            location: location.to_string(),
        });
    }
    if let Some(unknown) = names.iter().find(|n| !agent.actions.contains(**n)) {
        return Err(ModelError::UnknownAction {
            location: location.to_string(),
            action: unknown.to_string(),
        });
    }
    let tuple = ActionTuple::new(agent.id.clone(), names);
    if strategies.binary_search(&tuple).is_err() {
        return Err(ModelError::Invalid {
            location: location.to_string(),
            message: format!("{tuple} is not an admissible tuple of agent {}", agent.id),
        });
    }
    Ok(tuple)
}

struct Context<'a> {
    agents: &'a [AgentSpec],
    space: StrategySpace,
}

impl Context<'_> {
    fn profile(&self, doc: &ProfileDoc, location: &str) -> Result<JointProfile, ModelError> {
        if doc.len() != self.agents.len() {
            return Err(ModelError::Invalid {
                location: location.to_string(),
                message: format!(
                    "profile has {} components, expected {}",
                    doc.len(),
                    self.agents.len()
                ),
            });
        }
        let components = doc
            .iter()
            .enumerate()
            .map(|(i, c)| {
                parse_component(
                    c,
                    &self.agents[i],
                    self.space.strategies(i),
                    &format!("{location}[{i}]"),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(JointProfile::new(components))
    }

    fn agent_index(&self, id: &str, location: &str) -> Result<usize, ModelError> {
        self.agents
            .iter()
            .position(|a| a.id.as_str() == id)
            .ok_or_else(|| ModelError::UnknownAgent {
                location: location.to_string(),
                id: id.to_string(),
            })
    }
}

/// Interprets a serialized profile against `scenario`'s agents.
pub fn profile_from_doc(
    scenario: &Scenario,
    doc: &ProfileDoc,
    location: &str,
) -> Result<JointProfile, ModelError> {
    let cx = Context {
        agents: scenario.agents(),
        space: scenario.space().clone(),
    };
    cx.profile(doc, location)
}

/// Interprets one serialized action tuple of agent `agent`.
pub fn tuple_from_doc(
    scenario: &Scenario,
    agent: usize,
    doc: &ComponentDoc,
    location: &str,
) -> Result<ActionTuple, ModelError> {
    parse_component(
        doc,
        &scenario.agents()[agent],
        scenario.space().strategies(agent),
        location,
    )
}

fn consequence_set(names: &[String], location: &str) -> Result<ConsequenceSet, ModelError> {
    let set: ConsequenceSet = names.iter().cloned().collect();
    if set.len() != names.len() {
        return Err(ModelError::Invalid {
            location: location.to_string(),
            message: "consequence atoms must be unique".into(),
        });
    }
    Ok(set)
}

/// Validates a parsed document and builds the scenario.
pub fn from_document(doc: &ScenarioDocument) -> Result<Scenario, ScenarioError> {
    if doc.version != FORMAT_VERSION {
        return Err(ScenarioError::Version(doc.version));
    }

    let mut seen = HashSet::new();
    let mut agents = Vec::with_capacity(doc.agents.len());
    for (i, a) in doc.agents.iter().enumerate() {
        let location = format!("agents[{i}]");
        if a.id.is_empty() {
            return Err(ModelError::EmptyAgentId {
                location: format!("{location}.id"),
            }
            .into());
        }
        if !seen.insert(a.id.as_str()) {
            return Err(ModelError::DuplicateAgent {
                location: format!("{location}.id"),
                id: AgentId::new(a.id.clone()),
            }
            .into());
        }
        let mut spec = AgentSpec::new(a.id.clone(), a.actions.iter().cloned());
        if spec.actions.len() != a.actions.len() {
            return Err(ModelError::Invalid {
                location: format!("{location}.actions"),
                message: "action names must be unique".into(),
            }
            .into());
        }
        if spec.actions.is_empty() {
            return Err(ModelError::NoActions {
                location: format!("{location}.actions"),
                agent: spec.id.clone(),
            }
            .into());
        }
        if let Some(tuples) = &a.tuples {
            let mut parsed = Vec::with_capacity(tuples.len());
            for (j, t) in tuples.iter().enumerate() {
                let location = format!("{location}.tuples[{j}]");
                let names = t.names();
                if names.is_empty() {
                    return Err(ModelError::EmptyTuple { location }.into());
                }
                if let Some(unknown) = names.iter().find(|n| !spec.actions.contains(**n)) {
                    return Err(ModelError::UnknownAction {
                        location,
                        action: unknown.to_string(),
                    }
                    .into());
                }
                parsed.push(ActionTuple::new(spec.id.clone(), names));
            }
            spec = spec.with_tuples(parsed);
        }
        agents.push(spec);
    }
    if agents.is_empty() {
        return Err(ModelError::NoAgents.into());
    }

    let ctx = Context {
        space: StrategySpace::new(
            agents.iter().map(|a| a.id.clone()).collect(),
            agents.iter().map(AgentSpec::strategies).collect(),
        ),
        agents: &agents,
    };

    let mut utilities: Vec<Option<UtilityFunction>> = vec![None; agents.len()];
    for (id, u) in &doc.utilities {
        let location = format!("utilities.{id}");
        let k = ctx.agent_index(id, &location)?;
        let owner = agents[k].id.clone();
        let function = match u {
            UtilityDoc::Direct { table } => {
                let mut out = UtilityTable::new();
                let mut rows = HashSet::new();
                for (r, entry) in table.iter().enumerate() {
                    let location = format!("{location}.table[{r}].profile");
                    let p = ctx.profile(&entry.profile, &location)?;
                    if !rows.insert(p.clone()) {
                        return Err(duplicate(&location, "profile").into());
                    }
                    out.insert(p, entry.value);
                }
                UtilityFunction::direct(owner, out)
            }
            UtilityDoc::Composed { a2c, uq } => {
                let mut map = BTreeMap::new();
                for (r, entry) in a2c.iter().enumerate() {
                    let location = format!("{location}.a2c[{r}]");
                    let p = ctx.profile(&entry.profile, &format!("{location}.profile"))?;
                    let c =
                        consequence_set(&entry.consequences, &format!("{location}.consequences"))?;
                    if map.insert(p, c).is_some() {
                        return Err(duplicate(&format!("{location}.profile"), "profile").into());
                    }
                }
                let mut quant = BTreeMap::new();
                for (r, entry) in uq.iter().enumerate() {
                    let location = format!("{location}.uq[{r}].consequences");
                    let c = consequence_set(&entry.consequences, &location)?;
                    if quant.insert(c, entry.value).is_some() {
                        return Err(duplicate(&location, "consequence set").into());
                    }
                }
                UtilityFunction::composed(owner, map, quant)
            }
        };
        utilities[k] = Some(function);
    }
    let utilities = utilities
        .into_iter()
        .enumerate()
        .map(|(k, u)| {
            u.ok_or_else(|| ModelError::Invalid {
                location: "utilities".into(),
                message: format!("missing utility function for agent {}", agents[k].id),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut acceptability: Vec<AcceptabilityFunction> = agents
        .iter()
        .map(|a| AcceptabilityFunction::new(a.id.clone(), Vec::new()))
        .collect();
    for (id, rules) in &doc.acceptability {
        let location = format!("acceptability.{id}");
        let k = ctx.agent_index(id, &location)?;
        let mut parsed = Vec::with_capacity(rules.len());
        for (r, rule) in rules.iter().enumerate() {
            let location = format!("{location}[{r}]");
            let matcher = match (&rule.equals, &rule.contains) {
                (Some(p), None) => Matcher::Equals(ctx.profile(p, &format!("{location}.equals"))?),
                (None, Some(actions)) => {
                    let location = format!("{location}.contains");
                    if actions.is_empty() {
                        return Err(ModelError::Invalid {
                            location,
                            message: "contains-rule needs at least one action".into(),
                        }
                        .into());
                    }
                    if let Some(unknown) = actions
                        .iter()
                        .find(|a| !agents.iter().any(|ag| ag.actions.contains(*a)))
                    {
                        return Err(ModelError::UnknownAction {
                            location,
                            action: unknown.clone(),
                        }
                        .into());
                    }
                    Matcher::Contains(actions.iter().cloned().collect())
                }
                _ => {
                    return Err(ModelError::Invalid {
                        location,
                        message: "rule needs exactly one of \"equals\" or \"contains\"".into(),
                    }
                    .into())
                }
            };
            parsed.push(AcceptabilityRule::new(matcher, rule.value));
        }
        acceptability[k] = AcceptabilityFunction::new(agents[k].id.clone(), parsed);
    }

    Ok(Scenario::new(ScenarioParts {
        name: doc.name.clone(),
        agents: agents.clone(),
        utilities,
        acceptability,
        aggregation: doc.aggregation,
    })?)
}

fn duplicate(location: &str, what: &str) -> ModelError {
    ModelError::Invalid {
        location: location.to_string(),
        message: format!("duplicate {what}"),
    }
}

pub fn profile_doc(p: &JointProfile) -> ProfileDoc {
    p.components()
        .iter()
        .map(ComponentDoc::from_tuple)
        .collect()
}

/// Serialized form of one agent's utility function.
pub fn utility_document(u: &UtilityFunction) -> UtilityDoc {
    match u.mode() {
        UtilityMode::Direct(table) => UtilityDoc::Direct {
            table: table
                .iter()
                .map(|(p, v)| TableEntry {
                    profile: profile_doc(p),
                    value: *v,
                })
                .collect(),
        },
        UtilityMode::Composed { a2c, uq } => UtilityDoc::Composed {
            a2c: a2c
                .iter()
                .map(|(p, c)| A2cEntry {
                    profile: profile_doc(p),
                    consequences: c.iter().cloned().collect(),
                })
                .collect(),
            uq: uq
                .iter()
                .map(|(c, v)| UqEntry {
                    consequences: c.iter().cloned().collect(),
                    value: *v,
                })
                .collect(),
        },
    }
}

/// Serialized form of one agent's acceptability rules.
pub fn acceptability_document(acc: &AcceptabilityFunction) -> Vec<RuleDoc> {
    acc.rules()
        .iter()
        .map(|r| match &r.matcher {
            Matcher::Equals(p) => RuleDoc {
                equals: Some(profile_doc(p)),
                contains: None,
                value: r.value,
            },
            Matcher::Contains(actions) => RuleDoc {
                equals: None,
                contains: Some(actions.iter().cloned().collect()),
                value: r.value,
            },
        })
        .collect()
}

pub fn to_document(scenario: &Scenario) -> ScenarioDocument {
    ScenarioDocument {
        version: FORMAT_VERSION,
        name: scenario.name().to_string(),
        agents: scenario
            .agents()
            .iter()
            .map(|a| AgentDoc {
                id: a.id.to_string(),
                actions: a.actions.iter().cloned().collect(),
                tuples: a.tuples.as_ref().map(|_| {
                    a.strategies()
                        .iter()
                        .map(ComponentDoc::from_tuple)
                        .collect()
                }),
            })
            .collect(),
        utilities: scenario
            .utilities()
            .iter()
            .map(|u| (u.agent().to_string(), utility_document(u)))
            .collect(),
        acceptability: scenario
            .acceptability()
            .iter()
            .map(|acc| (acc.agent().to_string(), acceptability_document(acc)))
            .collect(),
        aggregation: scenario.aggregation(),
    }
}

/// Rebuilds one agent's utility and acceptability functions from their
/// serialized form, interpreted against `scenario`'s agents and actions.
pub fn functions_from_documents(
    scenario: &Scenario,
    agent: usize,
    utility: &UtilityDoc,
    rules: &[RuleDoc],
) -> Result<(UtilityFunction, AcceptabilityFunction), ScenarioError> {
    let mut doc = to_document(scenario);
    let id = scenario.agent_ids()[agent].to_string();
    doc.utilities.insert(id.clone(), utility.clone());
    doc.acceptability.insert(id, rules.to_vec());
    let rebuilt = from_document(&doc)?;
    Ok((
        rebuilt.utilities()[agent].clone(),
        rebuilt.acceptability()[agent].clone(),
    ))
}
