use super::domain::{Bounds, Domain, EmptyDomain, Removal};
use super::VarId;

/// Propagation failed at the current node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Failure {
    pub reason: Option<String>,
}

impl Failure {
    pub fn because(reason: impl Into<String>) -> Self {
        Failure {
            reason: Some(reason.into()),
        }
    }
}

impl From<EmptyDomain> for Failure {
    fn from(_: EmptyDomain) -> Self {
        Failure::default()
    }
}

pub type Filter = Result<(), Failure>;

#[derive(Debug, Clone, Copy)]
enum TrailEntry {
    Bounds(VarId, Bounds),
    Value(VarId, usize),
}

/// Variable domains plus the undo log.
#[derive(Debug, Clone, Default)]
pub struct Store {
    domains: Vec<Domain>,
    trail: Vec<TrailEntry>,
    /// Variables touched since the last `take_modified`.
    modified: Vec<VarId>,
    is_modified: Vec<bool>,
    edits: u64,
}

/// Position in the trail to backtrack to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint(usize);

impl Store {
    pub(crate) fn push(&mut self, d: Domain) -> VarId {
        self.domains.push(d);
        self.is_modified.push(false);
        VarId(self.domains.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn domain(&self, v: VarId) -> &Domain {
        &self.domains[v.0]
    }

    pub fn min(&self, v: VarId) -> i64 {
        self.domains[v.0].min()
    }

    pub fn max(&self, v: VarId) -> i64 {
        self.domains[v.0].max()
    }

    pub fn size(&self, v: VarId) -> usize {
        self.domains[v.0].size()
    }

    pub fn is_fixed(&self, v: VarId) -> bool {
        self.domains[v.0].is_fixed()
    }

    pub fn value(&self, v: VarId) -> Option<i64> {
        self.domains[v.0].value()
    }

    pub fn contains(&self, v: VarId, x: i64) -> bool {
        self.domains[v.0].contains(x)
    }

    /// Number of domain edits performed so far; grows monotonically.
    pub fn edits(&self) -> u64 {
        self.edits
    }

    fn touched(&mut self, v: VarId) {
        self.edits += 1;
        if !self.is_modified[v.0] {
            self.is_modified[v.0] = true;
            self.modified.push(v);
        }
    }

    pub(crate) fn take_modified(&mut self) -> Vec<VarId> {
        for v in &self.modified {
            self.is_modified[v.0] = false;
        }
        std::mem::take(&mut self.modified)
    }

    fn change_bounds(
        &mut self,
        v: VarId,
        op: impl FnOnce(&mut Domain) -> Result<bool, EmptyDomain>,
    ) -> Result<bool, Failure> {
        let d = &mut self.domains[v.0];
        let saved = d.bounds();
        if op(d)? {
            self.trail.push(TrailEntry::Bounds(v, saved));
            self.touched(v);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Removes values below `x`.
    pub fn set_min(&mut self, v: VarId, x: i64) -> Result<bool, Failure> {
        self.change_bounds(v, |d| d.remove_below(x))
    }

    /// Removes values above `x`.
    pub fn set_max(&mut self, v: VarId, x: i64) -> Result<bool, Failure> {
        self.change_bounds(v, |d| d.remove_above(x))
    }

    pub fn assign(&mut self, v: VarId, x: i64) -> Result<bool, Failure> {
        self.change_bounds(v, |d| d.assign(x))
    }

    pub fn remove(&mut self, v: VarId, x: i64) -> Result<bool, Failure> {
        let d = &mut self.domains[v.0];
        let saved = d.bounds();
        match d.remove_value(x)? {
            Removal::Absent => return Ok(false),
            Removal::Bound => self.trail.push(TrailEntry::Bounds(v, saved)),
            Removal::Interior(idx) => self.trail.push(TrailEntry::Value(v, idx)),
        }
        self.touched(v);
        Ok(true)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint(self.trail.len())
    }

    /// Undoes every edit made after `cp`.
    pub fn backtrack(&mut self, cp: Checkpoint) {
        while self.trail.len() > cp.0 {
            match self.trail.pop().expect("trail longer than checkpoint") {
                TrailEntry::Bounds(v, b) => self.domains[v.0].restore_bounds(b),
                TrailEntry::Value(v, idx) => self.domains[v.0].restore_value(idx),
            }
        }
        // Pending notifications refer to undone edits.
        self.take_modified();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backtrack_restores_exactly() {
        let mut s = Store::default();
        let x = s.push(Domain::range(0, 9).unwrap());
        let y = s.push(Domain::from_sorted(vec![1, 4, 7]));
        let before = s.clone().domains;
        let cp = s.checkpoint();
        s.remove(x, 5).unwrap();
        s.set_min(x, 2).unwrap();
        s.remove(x, 2).unwrap();
        s.assign(y, 4).unwrap();
        s.set_max(x, 6).unwrap();
        assert_eq!(s.domain(x).to_vec(), vec![3, 4, 6]);
        assert!(s.set_max(y, 3).is_err());
        s.backtrack(cp);
        assert_eq!(s.domains, before);
    }

    #[test]
    fn modified_tracking() {
        let mut s = Store::default();
        let x = s.push(Domain::range(0, 3).unwrap());
        assert!(!s.set_min(x, 0).unwrap());
        assert!(s.take_modified().is_empty());
        s.set_min(x, 1).unwrap();
        s.set_max(x, 2).unwrap();
        assert_eq!(s.take_modified(), vec![x]);
        assert_eq!(s.edits(), 2);
    }
}
