//! Utility functions, the primed (acceptability-filtered) construction and
//! the argmax operator.

use std::collections::{BTreeMap, BTreeSet};

use crate::acceptability::{Acceptability, AcceptabilityFunction};
use crate::error::ModelError;
use crate::profile::{AgentId, ConsequenceSet, JointProfile, StrategySpace};
use crate::value::UtilityValue;

/// Anything that assigns a utility value to a joint profile.
pub trait Evaluate {
    fn evaluate(&self, profile: &JointProfile) -> UtilityValue;
}

/// A profile-keyed table. Absent entries read as `Null`, so `Null` entries
/// are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UtilityTable {
    entries: BTreeMap<JointProfile, UtilityValue>,
}

impl UtilityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, profile: JointProfile, value: UtilityValue) {
        if value.is_null() {
            self.entries.remove(&profile);
        } else {
            self.entries.insert(profile, value);
        }
    }

    pub fn get(&self, profile: &JointProfile) -> UtilityValue {
        self.entries
            .get(profile)
            .copied()
            .unwrap_or(UtilityValue::Null)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&JointProfile, &UtilityValue)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Evaluates `f` on every profile of `space`.
    pub fn materialize(space: &StrategySpace, f: impl Fn(&JointProfile) -> UtilityValue) -> Self {
        let mut table = UtilityTable::new();
        for p in space.profiles() {
            let v = f(&p);
            table.insert(p, v);
        }
        table
    }
}

impl FromIterator<(JointProfile, UtilityValue)> for UtilityTable {
    fn from_iter<I: IntoIterator<Item = (JointProfile, UtilityValue)>>(iter: I) -> Self {
        let mut table = UtilityTable::new();
        for (p, v) in iter {
            table.insert(p, v);
        }
        table
    }
}

impl Evaluate for UtilityTable {
    fn evaluate(&self, profile: &JointProfile) -> UtilityValue {
        self.get(profile)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UtilityMode {
    /// Profile → value lookup.
    Direct(UtilityTable),
    /// Profile → consequences → value. Empty consequence sets and `Null`
    /// quantifications are dropped at construction.
    Composed {
        a2c: BTreeMap<JointProfile, ConsequenceSet>,
        uq: BTreeMap<ConsequenceSet, UtilityValue>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityFunction {
    agent: AgentId,
    mode: UtilityMode,
}

impl UtilityFunction {
    pub fn direct(agent: AgentId, table: UtilityTable) -> Self {
        UtilityFunction {
            agent,
            mode: UtilityMode::Direct(table),
        }
    }

    pub fn composed(
        agent: AgentId,
        a2c: BTreeMap<JointProfile, ConsequenceSet>,
        mut uq: BTreeMap<ConsequenceSet, UtilityValue>,
    ) -> Self {
        uq.retain(|_, v| !v.is_null());
        UtilityFunction {
            agent,
            mode: UtilityMode::Composed { a2c, uq },
        }
    }

    pub fn agent(&self) -> &AgentId {
        &self.agent
    }

    pub fn mode(&self) -> &UtilityMode {
        &self.mode
    }

    /// Consequences of `profile` in composed mode; `None` for direct mode
    /// or an unmapped profile.
    pub fn consequences(&self, profile: &JointProfile) -> Option<&ConsequenceSet> {
        match &self.mode {
            UtilityMode::Composed { a2c, .. } => a2c.get(profile),
            UtilityMode::Direct(_) => None,
        }
    }

    /// Applies `f` to every stored value (table entries or quantifications).
    pub fn map_values(&self, f: impl Fn(UtilityValue) -> UtilityValue) -> Self {
        let mode = match &self.mode {
            UtilityMode::Direct(table) => {
                UtilityMode::Direct(table.iter().map(|(p, v)| (p.clone(), f(*v))).collect())
            }
            UtilityMode::Composed { a2c, uq } => UtilityMode::Composed {
                a2c: a2c.clone(),
                uq: uq
                    .iter()
                    .map(|(c, v)| (c.clone(), f(*v)))
                    .filter(|(_, v)| !v.is_null())
                    .collect(),
            },
        };
        UtilityFunction {
            agent: self.agent.clone(),
            mode,
        }
    }

    /// Iterates over every non-`Null` value the function can produce.
    pub fn stored_values(&self) -> Box<dyn Iterator<Item = UtilityValue> + '_> {
        match &self.mode {
            UtilityMode::Direct(table) => Box::new(table.iter().map(|(_, v)| *v)),
            UtilityMode::Composed { uq, .. } => Box::new(uq.values().copied()),
        }
    }
}

impl Evaluate for UtilityFunction {
    /// Pure lookup; profiles outside the tables evaluate to `Null`.
    fn evaluate(&self, profile: &JointProfile) -> UtilityValue {
        match &self.mode {
            UtilityMode::Direct(table) => table.get(profile),
            UtilityMode::Composed { a2c, uq } => a2c
                .get(profile)
                .and_then(|c| uq.get(c))
                .copied()
                .unwrap_or(UtilityValue::Null),
        }
    }
}

/// True iff every function in `accs` returns `true` on `profile`. An empty
/// set accepts everything.
pub fn accepted_by_all(accs: &[AcceptabilityFunction], profile: &JointProfile) -> bool {
    accs.iter()
        .all(|acc| acc.evaluate(profile) == Acceptability::True)
}

/// The primed function: `u(p)` where every acceptability function accepts
/// `p`, `Null` elsewhere, materialized over `space`.
pub fn prime_utility(
    u: &UtilityFunction,
    accs: &[AcceptabilityFunction],
    space: &StrategySpace,
) -> UtilityFunction {
    let table = UtilityTable::materialize(space, |p| {
        if accepted_by_all(accs, p) {
            u.evaluate(p)
        } else {
            UtilityValue::Null
        }
    });
    UtilityFunction::direct(u.agent().clone(), table)
}

/// Every profile attaining the maximal non-`Null` value.
pub fn argmax_set<E: Evaluate + ?Sized>(
    u: &E,
    space: &StrategySpace,
) -> Result<BTreeSet<JointProfile>, ModelError> {
    let mut best: Option<UtilityValue> = None;
    let mut set = BTreeSet::new();
    for p in space.profiles() {
        let v = u.evaluate(&p);
        if v.is_null() {
            continue;
        }
        match best.and_then(|b| v.compare(&b)) {
            None | Some(std::cmp::Ordering::Greater) => {
                best = Some(v);
                set.clear();
                set.insert(p);
            }
            Some(std::cmp::Ordering::Equal) => {
                set.insert(p);
            }
            Some(std::cmp::Ordering::Less) => {}
        }
    }
    if set.is_empty() {
        Err(ModelError::NoFeasibleProfile)
    } else {
        Ok(set)
    }
}
