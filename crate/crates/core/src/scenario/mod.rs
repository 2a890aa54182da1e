//! Scenario files, built-in scenarios and the random generator.

mod builtin;
mod document;
mod generator;

pub use builtin::{builtin, UnknownBuiltin, BUILTIN_NAMES};
pub use document::{
    acceptability_document, from_document, functions_from_documents, parse_scenario, profile_doc,
    profile_from_doc, serialize_scenario, spec_digest, to_document, tuple_from_doc,
    utility_document, A2cEntry, AgentDoc, ComponentDoc, ProfileDoc, RuleDoc, ScenarioDocument,
    ScenarioError, TableEntry, UqEntry, UtilityDoc, FORMAT_VERSION,
};
pub use generator::{generate_random_scenario, GeneratorError, GeneratorParams};
