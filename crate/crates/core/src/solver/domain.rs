use std::fmt;

/// Raised when an operation would leave a domain without values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyDomain;

/// A finite, ordered set of integers.
///
/// The initial values are kept in a sorted vector. Bound moves shift the
/// `first`/`last` cursors; interior removals clear a presence flag. Both are
/// O(1) to undo, which is what the trail relies on.
#[derive(Clone, PartialEq, Eq)]
pub struct Domain {
    values: Vec<i64>,
    present: Vec<bool>,
    first: usize,
    last: usize,
    size: usize,
}

/// Saved cursor state, restored on backtrack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Bounds {
    first: usize,
    last: usize,
    size: usize,
}

impl Domain {
    /// `values` must be non-empty and strictly increasing.
    pub(crate) fn from_sorted(values: Vec<i64>) -> Self {
        debug_assert!(!values.is_empty());
        debug_assert!(values.windows(2).all(|w| w[0] < w[1]));
        let n = values.len();
        Domain {
            present: vec![true; n],
            values,
            first: 0,
            last: n - 1,
            size: n,
        }
    }

    pub fn range(lower: i64, upper: i64) -> Option<Self> {
        (lower <= upper).then(|| Self::from_sorted((lower..=upper).collect()))
    }

    pub fn min(&self) -> i64 {
        self.values[self.first]
    }

    pub fn max(&self) -> i64 {
        self.values[self.last]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_fixed(&self) -> bool {
        self.size == 1
    }

    /// The value of a fixed domain.
    pub fn value(&self) -> Option<i64> {
        self.is_fixed().then(|| self.min())
    }

    fn index_of(&self, v: i64) -> Option<usize> {
        let idx = self.values.binary_search(&v).ok()?;
        (idx >= self.first && idx <= self.last && self.present[idx]).then_some(idx)
    }

    pub fn contains(&self, v: i64) -> bool {
        self.index_of(v).is_some()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = i64> + '_ {
        (self.first..=self.last)
            .filter(move |&i| self.present[i])
            .map(move |i| self.values[i])
    }

    pub fn to_vec(&self) -> Vec<i64> {
        self.iter().collect()
    }

    pub(crate) fn bounds(&self) -> Bounds {
        Bounds {
            first: self.first,
            last: self.last,
            size: self.size,
        }
    }

    pub(crate) fn restore_bounds(&mut self, b: Bounds) {
        self.first = b.first;
        self.last = b.last;
        self.size = b.size;
    }

    pub(crate) fn restore_value(&mut self, idx: usize) {
        self.present[idx] = true;
        self.size += 1;
    }

    /// Removes every value below `v`. Returns whether anything changed.
    pub fn remove_below(&mut self, v: i64) -> Result<bool, EmptyDomain> {
        if v <= self.min() {
            return Ok(false);
        }
        if v > self.max() {
            return Err(EmptyDomain);
        }
        let mut idx = self.first;
        while self.values[idx] < v || !self.present[idx] {
            if self.present[idx] {
                self.size -= 1;
            }
            idx += 1;
        }
        self.first = idx;
        Ok(true)
    }

    /// Removes every value above `v`. Returns whether anything changed.
    pub fn remove_above(&mut self, v: i64) -> Result<bool, EmptyDomain> {
        if v >= self.max() {
            return Ok(false);
        }
        if v < self.min() {
            return Err(EmptyDomain);
        }
        let mut idx = self.last;
        while self.values[idx] > v || !self.present[idx] {
            if self.present[idx] {
                self.size -= 1;
            }
            idx -= 1;
        }
        self.last = idx;
        Ok(true)
    }

    /// Removes a single value. Returns the index cleared for interior
    /// removals, so that the caller can trail it.
    pub(crate) fn remove_value(&mut self, v: i64) -> Result<Removal, EmptyDomain> {
        let Some(idx) = self.index_of(v) else {
            return Ok(Removal::Absent);
        };
        if self.size == 1 {
            return Err(EmptyDomain);
        }
        if idx == self.first {
            self.remove_below(v + 1)?;
            Ok(Removal::Bound)
        } else if idx == self.last {
            self.remove_above(v - 1)?;
            Ok(Removal::Bound)
        } else {
            self.present[idx] = false;
            self.size -= 1;
            Ok(Removal::Interior(idx))
        }
    }

    pub fn remove(&mut self, v: i64) -> Result<bool, EmptyDomain> {
        self.remove_value(v).map(|r| r != Removal::Absent)
    }

    /// Reduces the domain to `{v}`.
    pub fn assign(&mut self, v: i64) -> Result<bool, EmptyDomain> {
        if !self.contains(v) {
            return Err(EmptyDomain);
        }
        let changed = self.size > 1;
        self.remove_below(v)?;
        self.remove_above(v)?;
        Ok(changed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Removal {
    Absent,
    Bound,
    Interior(usize),
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size == (self.max() - self.min() + 1) as usize {
            write!(f, "{{{}..{}}}", self.min(), self.max())
        } else {
            f.debug_set().entries(self.iter()).finish()
        }
    }
}
