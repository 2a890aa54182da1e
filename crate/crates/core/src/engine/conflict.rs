//! Conflict detection, acceptable maximizers and utility aggregation.

use std::collections::BTreeSet;

use crate::acceptability::AcceptabilityFunction;
use crate::error::{EngineError, ModelError};
use crate::model::Aggregation;
use crate::profile::{JointProfile, StrategySpace};
use crate::utility::{accepted_by_all, argmax_set, Evaluate, UtilityTable};
use crate::value::UtilityValue;

/// True iff some profile maximizes every function at once. A conflict of
/// interests is the negation.
pub fn has_common_optimum<E: Evaluate>(
    us: &[E],
    space: &StrategySpace,
) -> Result<bool, EngineError> {
    let (head, rest) = us.split_first().ok_or(EngineError::NoUtilities)?;
    let mut common = argmax_set(head, space)?;
    for u in rest {
        let next = argmax_set(u, space)?;
        common.retain(|p| next.contains(p));
        if common.is_empty() {
            return Ok(false);
        }
    }
    Ok(!common.is_empty())
}

/// Maximizers of `u` that every acceptability function accepts.
pub fn determine_act_max<E: Evaluate + ?Sized>(
    u: &E,
    accs: &[AcceptabilityFunction],
    space: &StrategySpace,
) -> Result<BTreeSet<JointProfile>, ModelError> {
    let mut set = argmax_set(u, space)?;
    set.retain(|p| accepted_by_all(accs, p));
    Ok(set)
}

/// Pragmatic conflict for one agent: none of its maximizers is acceptable
/// to everybody.
pub fn pragmatic_conflict<E: Evaluate + ?Sized>(
    u: &E,
    accs: &[AcceptabilityFunction],
    space: &StrategySpace,
) -> Result<bool, ModelError> {
    Ok(determine_act_max(u, accs, space)?.is_empty())
}

/// Pointwise combination of `us` over `space`. Any `Null` factor yields
/// `Null`. A single function aggregates to itself.
pub fn aggregate<E: Evaluate>(us: &[E], mode: Aggregation, space: &StrategySpace) -> UtilityTable {
    UtilityTable::materialize(space, |p| combine(us.iter().map(|u| u.evaluate(p)), mode))
}

pub(crate) fn combine(
    values: impl Iterator<Item = UtilityValue>,
    mode: Aggregation,
) -> UtilityValue {
    let mut acc: Option<UtilityValue> = None;
    for v in values {
        acc = Some(match acc {
            None => v,
            Some(a) => match mode {
                Aggregation::Product => a.product(v),
                Aggregation::Sum => a.sum(v),
            },
        });
    }
    acc.unwrap_or(UtilityValue::Null)
}
