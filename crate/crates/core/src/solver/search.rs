use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use web_time::Instant;

use super::model::{Model, PropagationResult, VarId};
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum VarSelect {
    /// Fewest remaining values first; ties go to the earlier variable.
    #[default]
    SmallestDomain,
    /// The first unfixed variable in the decision list.
    InputOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValueSelect {
    #[default]
    Min,
    Max,
    /// Uniformly shuffled per node from a seeded stream.
    Shuffle(u64),
}

#[derive(Debug, Clone, Default)]
pub struct SearchConfig {
    pub var_select: VarSelect,
    pub value_select: ValueSelect,
    /// Variables to branch on, in order. Defaults to every variable.
    pub decision_vars: Option<Vec<VarId>>,
    pub solution_limit: Option<u64>,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl SearchConfig {
    fn validate(&self, model: &Model) -> Result<(), ModelError> {
        let positive = |x: Option<u64>| x.is_none_or(|n| n > 0);
        if !positive(self.solution_limit) || !positive(self.node_limit) {
            return Err(ModelError::InvalidLimit);
        }
        if self.time_limit.is_some_and(|t| t.is_zero()) {
            return Err(ModelError::InvalidLimit);
        }
        if let Some(vars) = &self.decision_vars {
            if let Some(&bad) = vars.iter().find(|v| v.index() >= model.num_variables()) {
                return Err(ModelError::UnknownVariable(bad));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Limit {
    Solutions,
    Nodes,
    Time,
}

/// Whether a search ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "limit")]
pub enum SearchStatus {
    Complete,
    LimitReached(Limit),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub failures: u64,
    pub solutions: u64,
    #[serde(skip)]
    pub wall: Duration,
}

/// A full assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    values: Vec<i64>,
    denominators: Vec<Option<u32>>,
}

impl Solution {
    fn capture(model: &Model) -> Self {
        let values = model
            .variables()
            .map(|v| model.store().value(v).expect("leaf with unfixed variable"))
            .collect();
        let denominators = model.variables().map(|v| model.denominator(v)).collect();
        Solution {
            values,
            denominators,
        }
    }

    pub fn value(&self, v: VarId) -> i64 {
        self.values[v.index()]
    }

    pub fn values(&self, vars: &[VarId]) -> Vec<i64> {
        vars.iter().map(|&v| self.value(v)).collect()
    }

    /// Rate variables as `(numerator, denominator)`.
    pub fn rational(&self, v: VarId) -> Option<(i64, u32)> {
        self.denominators[v.index()].map(|d| (self.values[v.index()], d))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub solution: Option<Solution>,
    pub status: SearchStatus,
    pub stats: SearchStats,
}

impl SolveResult {
    /// Search space exhausted without a solution.
    pub fn is_unsatisfiable(&self) -> bool {
        self.solution.is_none() && self.status == SearchStatus::Complete
    }
}

#[derive(Debug, Clone)]
pub struct EnumerateResult {
    pub count: u64,
    pub status: SearchStatus,
    pub stats: SearchStats,
}

struct Dfs<'a, F> {
    model: &'a mut Model,
    config: &'a SearchConfig,
    decision: Vec<VarId>,
    rng: Option<ChaCha8Rng>,
    started: Instant,
    stats: SearchStats,
    stop: Option<Limit>,
    on_solution: F,
}

impl<F: FnMut(&Solution) -> bool> Dfs<'_, F> {
    fn select_var(&self) -> Option<VarId> {
        let store = self.model.store();
        let mut open = self
            .decision
            .iter()
            .copied()
            .filter(|&v| !store.is_fixed(v));
        match self.config.var_select {
            VarSelect::InputOrder => open.next(),
            VarSelect::SmallestDomain => open.min_by_key(|&v| store.size(v)),
        }
    }

    fn values(&mut self, v: VarId) -> Vec<i64> {
        let d = self.model.domain(v);
        match self.config.value_select {
            ValueSelect::Min => d.to_vec(),
            ValueSelect::Max => d.iter().rev().collect(),
            ValueSelect::Shuffle(_) => {
                let mut vals = d.to_vec();
                vals.shuffle(self.rng.as_mut().expect("rng seeded"));
                vals
            }
        }
    }

    fn check_limits(&mut self) -> bool {
        if self
            .config
            .node_limit
            .is_some_and(|n| self.stats.nodes >= n)
        {
            self.stop = Some(Limit::Nodes);
        } else if self
            .config
            .time_limit
            .is_some_and(|t| self.started.elapsed() >= t)
        {
            self.stop = Some(Limit::Time);
        }
        self.stop.is_some()
    }

    fn run(&mut self) {
        if self.model.propagate_fixpoint() == PropagationResult::Failed {
            self.stats.failures += 1;
            return;
        }
        self.dfs();
    }

    fn dfs(&mut self) {
        if self.check_limits() {
            return;
        }
        self.stats.nodes += 1;
        let Some(var) = self.select_var() else {
            self.leaf();
            return;
        };
        for value in self.values(var) {
            let cp = self.model.store().checkpoint();
            let ok = self.model.store_mut().assign(var, value).is_ok()
                && self.model.propagate_changes() != PropagationResult::Failed;
            if ok {
                self.dfs();
            } else {
                self.stats.failures += 1;
            }
            self.model.store_mut().backtrack(cp);
            if self.stop.is_some() {
                return;
            }
        }
    }

    fn leaf(&mut self) {
        // Variables outside the decision list may still be open; branch on
        // them too so that solutions are complete.
        if let Some(var) = self
            .model
            .variables()
            .find(|&v| !self.model.store().is_fixed(v))
        {
            self.decision.push(var);
            self.dfs();
            self.decision.pop();
            return;
        }
        if !self.model.ground_satisfied() {
            self.stats.failures += 1;
            return;
        }
        self.stats.solutions += 1;
        let solution = Solution::capture(self.model);
        let keep_going = (self.on_solution)(&solution);
        if !keep_going
            || self
                .config
                .solution_limit
                .is_some_and(|n| self.stats.solutions >= n)
        {
            self.stop = Some(Limit::Solutions);
        }
    }
}

fn run_search<F: FnMut(&Solution) -> bool>(
    model: &mut Model,
    config: &SearchConfig,
    on_solution: F,
) -> Result<(SearchStats, Option<Limit>), ModelError> {
    config.validate(model)?;
    let decision = config
        .decision_vars
        .clone()
        .unwrap_or_else(|| model.variables().collect());
    let rng = match config.value_select {
        ValueSelect::Shuffle(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let root = model.store().checkpoint();
    let mut dfs = Dfs {
        model,
        config,
        decision,
        rng,
        started: Instant::now(),
        stats: SearchStats::default(),
        stop: None,
        on_solution,
    };
    dfs.run();
    let mut stats = dfs.stats;
    stats.wall = dfs.started.elapsed();
    let stop = dfs.stop;
    model.store_mut().backtrack(root);
    Ok((stats, stop))
}

/// Depth-first search for one solution. The model's domains are restored
/// to their state before the call.
pub fn solve(model: &mut Model, config: &SearchConfig) -> Result<SolveResult, ModelError> {
    let mut config = config.clone();
    config.solution_limit = Some(1);
    let mut found = None;
    let (stats, stop) = run_search(model, &config, |s| {
        found = Some(s.clone());
        false
    })?;
    let status = match (found.is_some(), stop) {
        (true, _) | (false, None) => SearchStatus::Complete,
        (false, Some(limit)) => SearchStatus::LimitReached(limit),
    };
    Ok(SolveResult {
        solution: found,
        status,
        stats,
    })
}

/// Visits every solution in search order. The visitor returns `false` to
/// stop early, which is reported as a solution limit.
pub fn enumerate(
    model: &mut Model,
    config: &SearchConfig,
    visitor: impl FnMut(&Solution) -> bool,
) -> Result<EnumerateResult, ModelError> {
    let (stats, stop) = run_search(model, config, visitor)?;
    Ok(EnumerateResult {
        count: stats.solutions,
        status: stop.map_or(SearchStatus::Complete, SearchStatus::LimitReached),
        stats,
    })
}
