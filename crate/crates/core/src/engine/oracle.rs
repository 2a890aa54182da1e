//! Brute-force reference implementation of the decision procedures.
//!
//! Works on dense per-profile vectors of plain `Option<f64>` (None = null)
//! and index arithmetic, sharing nothing with the engine beyond scenario
//! lookups. Used by tests and the `verify` command to cross-check
//! [`solve_scenario`](crate::engine::solve_scenario).

use std::collections::BTreeSet;

use crate::engine::decide::Algorithm;
use crate::engine::equilibria::StrategicGame;
use crate::engine::report::{AgentDecision, Assignment, DecisionReport};
use crate::error::EngineError;
use crate::model::{Aggregation, Scenario};
use crate::profile::{ActionTuple, JointProfile};
use crate::utility::Evaluate;
use crate::value::UtilityValue;

pub const DEFAULT_ORACLE_BOUND: usize = 1_000_000;

struct Grid {
    strategies: Vec<Vec<ActionTuple>>,
    strides: Vec<usize>,
    size: usize,
}

impl Grid {
    fn new(strategies: Vec<Vec<ActionTuple>>, bound: usize) -> Result<Grid, EngineError> {
        let mut size: usize = 1;
        for s in &strategies {
            size = size.saturating_mul(s.len());
        }
        if size > bound {
            return Err(EngineError::OracleBound { size, bound });
        }
        let mut strides = vec![1; strategies.len()];
        for i in (0..strategies.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * strategies[i + 1].len();
        }
        Ok(Grid {
            strategies,
            strides,
            size,
        })
    }

    fn digit(&self, index: usize, agent: usize) -> usize {
        (index / self.strides[agent]) % self.strategies[agent].len()
    }

    fn replace(&self, index: usize, agent: usize, digit: usize) -> usize {
        index - self.digit(index, agent) * self.strides[agent] + digit * self.strides[agent]
    }

    fn profile(&self, index: usize) -> JointProfile {
        JointProfile::new(
            (0..self.strategies.len())
                .map(|i| self.strategies[i][self.digit(index, i)].clone())
                .collect(),
        )
    }

    fn key(&self, index: usize) -> Vec<String> {
        (0..self.strategies.len())
            .flat_map(|i| self.strategies[i][self.digit(index, i)].actions().to_vec())
            .collect()
    }

    /// Sorts candidates by decreasing key and returns the head.
    fn first(&self, candidates: &[usize]) -> Option<usize> {
        let mut keyed: Vec<(Vec<String>, usize)> =
            candidates.iter().map(|&c| (self.key(c), c)).collect();
        keyed.sort_by(|a, b| b.0.cmp(&a.0));
        keyed.first().map(|(_, c)| *c)
    }
}

fn to_opt(v: UtilityValue) -> Option<f64> {
    match v {
        UtilityValue::Null => None,
        UtilityValue::NegInf => Some(f64::NEG_INFINITY),
        UtilityValue::PosInf => Some(f64::INFINITY),
        UtilityValue::Finite(x) => Some(x),
    }
}

fn from_opt(v: Option<f64>) -> UtilityValue {
    match v {
        None => UtilityValue::Null,
        Some(x) if x == f64::INFINITY => UtilityValue::PosInf,
        Some(x) if x == f64::NEG_INFINITY => UtilityValue::NegInf,
        Some(x) => UtilityValue::Finite(x),
    }
}

fn mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

fn add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        a + b
    }
}

/// All indices attaining the maximal non-null value.
fn argmax(values: &[Option<f64>]) -> Vec<usize> {
    let best = values
        .iter()
        .flatten()
        .copied()
        .fold(None, |acc: Option<f64>, v| {
            Some(match acc {
                Some(a) if a >= v => a,
                _ => v,
            })
        });
    match best {
        None => Vec::new(),
        Some(b) => (0..values.len())
            .filter(|&i| values[i] == Some(b))
            .collect(),
    }
}

struct Tables {
    grid: Grid,
    raw: Vec<Vec<Option<f64>>>,
    acceptable: Vec<bool>,
    primed: Vec<Vec<Option<f64>>>,
    shared: Vec<Option<f64>>,
}

impl Tables {
    fn build(scenario: &Scenario, bound: usize) -> Result<Tables, EngineError> {
        let grid = Grid::new(
            scenario.agents().iter().map(|a| a.strategies()).collect(),
            bound,
        )?;
        let n = scenario.agent_count();
        let mut raw = vec![vec![None; grid.size]; n];
        let mut acceptable = vec![false; grid.size];
        for idx in 0..grid.size {
            let p = grid.profile(idx);
            for (k, u) in scenario.utilities().iter().enumerate() {
                raw[k][idx] = to_opt(u.evaluate(&p));
            }
            acceptable[idx] = scenario
                .acceptability()
                .iter()
                .all(|acc| acc.evaluate(&p) == crate::acceptability::Acceptability::True);
        }
        let primed: Vec<Vec<Option<f64>>> = raw
            .iter()
            .map(|r| {
                (0..grid.size)
                    .map(|i| if acceptable[i] { r[i] } else { None })
                    .collect()
            })
            .collect();
        let shared = (0..grid.size)
            .map(|i| {
                let mut acc: Option<f64> = None;
                for row in &primed {
                    let v = row[i]?;
                    acc = Some(match (acc, scenario.aggregation()) {
                        (None, _) => v,
                        (Some(a), Aggregation::Product) => mul(a, v),
                        (Some(a), Aggregation::Sum) => add(a, v),
                    });
                }
                acc
            })
            .collect();
        Ok(Tables {
            grid,
            raw,
            acceptable,
            primed,
            shared,
        })
    }

    fn shared_choice(&self) -> Result<usize, EngineError> {
        let best = argmax(&self.shared);
        self.grid.first(&best).ok_or(EngineError::Model(
            crate::error::ModelError::NoFeasibleProfile,
        ))
    }

    fn best_acceptable(&self, agent: usize) -> Vec<usize> {
        argmax(&self.raw[agent])
            .into_iter()
            .filter(|&i| self.acceptable[i])
            .collect()
    }

    fn naive(&self, agent: usize) -> Result<usize, EngineError> {
        let best = self.best_acceptable(agent);
        if best.is_empty() {
            self.shared_choice()
        } else {
            Ok(self.grid.first(&best).expect("non-empty"))
        }
    }

    fn naive_joint(&self) -> Result<usize, EngineError> {
        let mut joint = 0;
        for k in 0..self.raw.len() {
            let sel = self.naive(k)?;
            joint += self.grid.digit(sel, k) * self.grid.strides[k];
        }
        Ok(joint)
    }

    fn lazy(&self) -> Result<usize, EngineError> {
        let naive = self.naive_joint()?;
        let mut common: Option<Vec<usize>> = None;
        for k in 0..self.raw.len() {
            let acts_max = self.best_acceptable(k);
            let good = match (acts_max.first(), self.raw[k][naive]) {
                (Some(&m), Some(realized)) if realized >= self.raw[k][m].expect("maximizer") => {
                    acts_max
                }
                _ => Vec::new(),
            };
            common = Some(match common {
                None => good,
                Some(c) => c.into_iter().filter(|i| good.contains(i)).collect(),
            });
        }
        match common {
            Some(c) if !c.is_empty() => Ok(self.grid.first(&c).expect("non-empty")),
            _ => self.shared_choice(),
        }
    }

    fn equilibria(&self) -> Vec<usize> {
        equilibria_dense(&self.grid, &self.primed)
    }

    fn full(&self) -> Result<usize, EngineError> {
        let eq = self.equilibria();
        if eq.is_empty() {
            return self.shared_choice();
        }
        let products: Vec<Option<f64>> = (0..self.grid.size)
            .map(|i| {
                if !eq.contains(&i) {
                    return None;
                }
                let mut acc: Option<f64> = None;
                for k in 0..self.primed.len() {
                    let v = self.primed[k][i].expect("equilibrium payoffs are defined");
                    acc = Some(acc.map_or(v, |a| mul(a, v)));
                }
                acc
            })
            .collect();
        Ok(self.grid.first(&argmax(&products)).expect("non-empty"))
    }
}

fn equilibria_dense(grid: &Grid, payoffs: &[Vec<Option<f64>>]) -> Vec<usize> {
    let mut out = Vec::new();
    'profiles: for idx in 0..grid.size {
        for pay in payoffs {
            if pay[idx].is_none() {
                continue 'profiles;
            }
        }
        for (k, pay) in payoffs.iter().enumerate() {
            let here = pay[idx].expect("checked above");
            for d in 0..grid.strategies[k].len() {
                let other = grid.replace(idx, k, d);
                if let Some(there) = pay[other] {
                    if there > here {
                        continue 'profiles;
                    }
                }
            }
        }
        out.push(idx);
    }
    out
}

/// Exhaustive deviation check over a dense copy of the game's payoffs.
pub fn oracle_equilibria(game: &StrategicGame) -> Result<BTreeSet<JointProfile>, EngineError> {
    let space = game.space();
    let grid = Grid::new(
        (0..space.agent_count())
            .map(|i| space.strategies(i).to_vec())
            .collect(),
        DEFAULT_ORACLE_BOUND,
    )?;
    let payoffs: Vec<Vec<Option<f64>>> = game
        .payoffs()
        .iter()
        .map(|u| {
            (0..grid.size)
                .map(|i| to_opt(u.evaluate(&grid.profile(i))))
                .collect()
        })
        .collect();
    Ok(equilibria_dense(&grid, &payoffs)
        .into_iter()
        .map(|i| grid.profile(i))
        .collect())
}

pub fn brute_force_oracle(
    scenario: &Scenario,
    assignment: &Assignment,
) -> Result<DecisionReport, EngineError> {
    brute_force_oracle_bounded(scenario, assignment, DEFAULT_ORACLE_BOUND)
}

/// Recomputes a [`DecisionReport`] by direct enumeration. Refuses spaces
/// with more than `bound` profiles.
pub fn brute_force_oracle_bounded(
    scenario: &Scenario,
    assignment: &Assignment,
    bound: usize,
) -> Result<DecisionReport, EngineError> {
    let algorithms = assignment.resolve(scenario)?;
    let t = Tables::build(scenario, bound)?;
    let n = scenario.agent_count();

    let mut joint_index = 0;
    for (k, alg) in algorithms.iter().enumerate() {
        let sel = match alg {
            Algorithm::Naive => t.naive(k)?,
            Algorithm::Lazy => t.lazy()?,
            Algorithm::Full => t.full()?,
        };
        joint_index += t.grid.digit(sel, k) * t.grid.strides[k];
    }
    let joint = t.grid.profile(joint_index);

    let mut common: Vec<usize> = (0..t.grid.size).collect();
    for k in 0..n {
        let am = argmax(&t.raw[k]);
        if am.is_empty() {
            return Err(EngineError::Model(
                crate::error::ModelError::NoFeasibleProfile,
            ));
        }
        common.retain(|i| am.contains(i));
    }

    let agents = (0..n)
        .map(|k| AgentDecision {
            agent: scenario.agent_ids()[k].clone(),
            algorithm: algorithms[k],
            choice: joint.component(k).clone(),
            utility: from_opt(t.raw[k][joint_index]),
            pragmatic_conflict: t.best_acceptable(k).is_empty(),
        })
        .collect();

    let equilibria = algorithms.contains(&Algorithm::Full).then(|| {
        t.equilibria()
            .into_iter()
            .map(|i| t.grid.profile(i))
            .collect()
    });

    Ok(DecisionReport {
        scenario: scenario.name().to_string(),
        agents,
        joint,
        conflict: common.is_empty(),
        equilibria,
    })
}
