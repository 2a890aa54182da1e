//! Pure-strategy Nash equilibria of finite strategic games.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::acceptability::AcceptabilityFunction;
use crate::profile::{JointProfile, StrategySpace};
use crate::utility::{prime_utility, Evaluate, UtilityFunction};

/// Agents, their strategy spaces, and one payoff function per agent.
#[derive(Debug, Clone)]
pub struct StrategicGame {
    space: StrategySpace,
    payoffs: Vec<UtilityFunction>,
}

impl StrategicGame {
    /// `payoffs[i]` is agent `i`'s payoff function over `space`.
    pub fn new(space: StrategySpace, payoffs: Vec<UtilityFunction>) -> Self {
        assert_eq!(space.agent_count(), payoffs.len());
        StrategicGame { space, payoffs }
    }

    /// The game over acceptability-filtered ("primed") utilities.
    pub fn primed(
        space: &StrategySpace,
        utilities: &[UtilityFunction],
        accs: &[AcceptabilityFunction],
    ) -> Self {
        let payoffs = utilities
            .iter()
            .map(|u| prime_utility(u, accs, space))
            .collect();
        StrategicGame::new(space.clone(), payoffs)
    }

    pub fn space(&self) -> &StrategySpace {
        &self.space
    }

    pub fn payoffs(&self) -> &[UtilityFunction] {
        &self.payoffs
    }

    /// No agent has a strictly profitable unilateral deviation from
    /// `profile`, and every payoff at `profile` is defined. Deviations to
    /// `Null` payoffs are never profitable.
    pub fn is_equilibrium(&self, profile: &JointProfile) -> bool {
        let here: Vec<_> = self.payoffs.iter().map(|u| u.evaluate(profile)).collect();
        if here.iter().any(|v| v.is_null()) {
            return false;
        }
        self.payoffs.iter().enumerate().all(|(i, u)| {
            self.space.strategies(i).iter().all(|alt| {
                if alt == profile.component(i) {
                    return true;
                }
                let there = u.evaluate(&profile.with_component(i, alt.clone()));
                there.cmp_null_lowest(&here[i]) != Ordering::Greater
            })
        })
    }
}

/// Exhaustive enumeration of pure-strategy equilibria.
pub fn enumerate_equilibria(game: &StrategicGame) -> BTreeSet<JointProfile> {
    game.space
        .profiles()
        .filter(|p| game.is_equilibrium(p))
        .collect()
}
