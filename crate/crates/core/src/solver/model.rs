use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use super::domain::Domain;
use super::store::{Failure, Filter, Store};
use super::ModelError;

/// Dense handle into a model's variable table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A variable whose integer values `k` stand for the rationals
/// `k / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RateVar {
    pub var: VarId,
    pub denominator: u32,
}

impl RateVar {
    pub fn to_real(self, numerator: i64) -> f64 {
        numerator as f64 / self.denominator as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarKind {
    Integer,
    Rate { denominator: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagationResult {
    Fixpoint,
    Pruned,
    Failed,
}

/// A filtering algorithm attached to a model.
///
/// `filter` may leave work undone; the model re-runs it whenever one of its
/// variables changes. `is_satisfied` is only called once every variable of
/// the scope is fixed.
pub trait Propagator: fmt::Debug {
    fn name(&self) -> &'static str;

    fn scope(&self) -> Vec<VarId>;

    fn filter(&self, store: &mut Store) -> Filter;

    fn is_satisfied(&self, store: &Store) -> bool;

    /// Runs `filter` once and classifies what happened.
    fn propagate(&self, store: &mut Store) -> PropagationResult {
        let before = store.edits();
        match self.filter(store) {
            Err(_) => PropagationResult::Failed,
            Ok(()) if store.edits() != before => PropagationResult::Pruned,
            Ok(()) => PropagationResult::Fixpoint,
        }
    }
}

#[derive(Debug, Default)]
pub struct Model {
    store: Store,
    kinds: Vec<VarKind>,
    propagators: Vec<Box<dyn Propagator>>,
    watchers: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    last_failure: Option<String>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    fn register(&mut self, d: Domain, kind: VarKind) -> VarId {
        self.kinds.push(kind);
        self.watchers.push(Vec::new());
        self.store.push(d)
    }

    pub fn new_variable(&mut self, lower: i64, upper: i64) -> Result<VarId, ModelError> {
        let d = Domain::range(lower, upper).ok_or(ModelError::EmptyRange { lower, upper })?;
        Ok(self.register(d, VarKind::Integer))
    }

    pub fn new_variable_sparse(&mut self, values: &[i64]) -> Result<VarId, ModelError> {
        check_values(values)?;
        Ok(self.register(Domain::from_sorted(values.to_vec()), VarKind::Integer))
    }

    pub fn new_constant(&mut self, value: i64) -> VarId {
        self.register(Domain::from_sorted(vec![value]), VarKind::Integer)
    }

    /// Rate variable over `{n / denominator : n in numerators}`.
    pub fn new_rate_variable(
        &mut self,
        numerators: &[i64],
        denominator: u32,
    ) -> Result<RateVar, ModelError> {
        check_values(numerators)?;
        if denominator == 0 || numerators[0] <= 0 {
            return Err(ModelError::NonPositiveRate);
        }
        let var = self.register(
            Domain::from_sorted(numerators.to_vec()),
            VarKind::Rate { denominator },
        );
        Ok(RateVar { var, denominator })
    }

    pub fn num_variables(&self) -> usize {
        self.store.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = VarId> {
        (0..self.store.len()).map(VarId)
    }

    pub fn num_propagators(&self) -> usize {
        self.propagators.len()
    }

    pub fn propagators(&self) -> impl Iterator<Item = &dyn Propagator> {
        self.propagators.iter().map(|p| p.as_ref())
    }

    pub fn domain(&self, v: VarId) -> &Domain {
        self.store.domain(v)
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut Store {
        &mut self.store
    }

    pub(crate) fn denominator(&self, v: VarId) -> Option<u32> {
        match self.kinds[v.0] {
            VarKind::Integer => None,
            VarKind::Rate { denominator } => Some(denominator),
        }
    }

    /// Attaches a propagator. Every variable of its scope must belong to
    /// this model.
    pub fn post<P: Propagator + 'static>(&mut self, p: P) -> Result<(), ModelError> {
        let scope = p.scope();
        if let Some(&bad) = scope.iter().find(|v| v.0 >= self.store.len()) {
            return Err(ModelError::UnknownVariable(bad));
        }
        let idx = self.propagators.len();
        let mut seen = scope;
        seen.sort();
        seen.dedup();
        for v in seen {
            self.watchers[v.0].push(idx);
        }
        self.propagators.push(Box::new(p));
        self.queued.push(false);
        Ok(())
    }

    /// Reason attached to the most recent failed propagation, if any.
    pub fn last_failure(&self) -> Option<&str> {
        self.last_failure.as_deref()
    }

    fn enqueue(&mut self, p: usize) {
        if !self.queued[p] {
            self.queued[p] = true;
            self.queue.push_back(p);
        }
    }

    fn clear_queue(&mut self) {
        for p in self.queue.drain(..) {
            self.queued[p] = false;
        }
    }

    /// Runs every propagator until none of them prunes anything.
    pub fn propagate_fixpoint(&mut self) -> PropagationResult {
        for p in 0..self.propagators.len() {
            self.enqueue(p);
        }
        self.store.take_modified();
        self.run_queue()
    }

    /// Propagates after edits made directly on the store, waking only the
    /// propagators that watch a modified variable.
    pub fn propagate_changes(&mut self) -> PropagationResult {
        self.run_queue()
    }

    fn run_queue(&mut self) -> PropagationResult {
        let start = self.store.edits();
        for v in self.store.take_modified() {
            for i in 0..self.watchers[v.0].len() {
                self.enqueue(self.watchers[v.0][i]);
            }
        }
        while let Some(p) = self.queue.pop_front() {
            self.queued[p] = false;
            if let Err(Failure { reason }) = self.propagators[p].filter(&mut self.store) {
                self.last_failure = Some(match reason {
                    Some(r) => format!("{}: {r}", self.propagators[p].name()),
                    None => format!("{}: domain wipe-out", self.propagators[p].name()),
                });
                self.clear_queue();
                self.store.take_modified();
                return PropagationResult::Failed;
            }
            for v in self.store.take_modified() {
                for i in 0..self.watchers[v.0].len() {
                    self.enqueue(self.watchers[v.0][i]);
                }
            }
        }
        if self.store.edits() != start {
            PropagationResult::Pruned
        } else {
            PropagationResult::Fixpoint
        }
    }

    /// Ground check of every propagator whose scope is fully fixed.
    pub fn ground_satisfied(&self) -> bool {
        self.propagators.iter().all(|p| {
            !p.scope().iter().all(|&v| self.store.is_fixed(v)) || p.is_satisfied(&self.store)
        })
    }
}

fn check_values(values: &[i64]) -> Result<(), ModelError> {
    if values.is_empty() {
        return Err(ModelError::EmptyDomain);
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ModelError::NotIncreasing);
    }
    Ok(())
}
