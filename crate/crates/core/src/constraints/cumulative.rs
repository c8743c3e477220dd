use crate::solver::{Failure, Filter, ModelError, Propagator, Store, VarId};

/// A task of fixed duration and demand with a variable start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Task {
    pub start: VarId,
    pub duration: i64,
    pub demand: i64,
}

/// At every time point the demand of the running tasks stays within
/// `capacity`. A task occupies `[start, start + duration)`.
///
/// Filtering is time-table based: compulsory parts build a resource
/// profile, and start bounds are pushed past any point where the task would
/// overload it.
#[derive(Debug, Clone)]
pub struct Cumulative {
    tasks: Vec<Task>,
    capacity: i64,
}

/// A maximal interval `[from, to)` of constant profile height.
#[derive(Debug, Clone, Copy)]
struct Segment {
    from: i64,
    to: i64,
    height: i64,
}

impl Cumulative {
    pub fn new(tasks: Vec<Task>, capacity: i64) -> Result<Self, ModelError> {
        if capacity < 0 {
            return Err(ModelError::InvalidConstraint("negative capacity".into()));
        }
        if tasks.iter().any(|t| t.duration < 0 || t.demand < 0) {
            return Err(ModelError::InvalidConstraint(
                "durations and demands must be non-negative".into(),
            ));
        }
        Ok(Cumulative { tasks, capacity })
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    fn active(t: &Task) -> bool {
        t.duration > 0 && t.demand > 0
    }

    /// Compulsory part `[latest start, earliest end)`, if non-empty.
    fn compulsory(t: &Task, store: &Store) -> Option<(i64, i64)> {
        let (lst, ect) = (store.max(t.start), store.min(t.start) + t.duration);
        (Self::active(t) && lst < ect).then_some((lst, ect))
    }

    fn profile(&self, store: &Store) -> Result<Vec<Segment>, Failure> {
        let mut events: Vec<(i64, i64)> = Vec::new();
        for t in &self.tasks {
            if let Some((a, b)) = Self::compulsory(t, store) {
                events.push((a, t.demand));
                events.push((b, -t.demand));
            }
        }
        events.sort_unstable();
        let mut segments = Vec::new();
        let mut height = 0;
        let mut i = 0;
        while i < events.len() {
            let at = events[i].0;
            while i < events.len() && events[i].0 == at {
                height += events[i].1;
                i += 1;
            }
            if height > self.capacity {
                return Err(Failure::because(format!(
                    "resource overload at time {at}: {height} > {}",
                    self.capacity
                )));
            }
            if height > 0 {
                let to = events[i].0;
                segments.push(Segment {
                    from: at,
                    to,
                    height,
                });
            }
        }
        Ok(segments)
    }

    /// Profile height at segment `s` excluding the task's own compulsory part.
    fn others(seg: &Segment, own: Option<(i64, i64)>, demand: i64) -> i64 {
        match own {
            Some((a, b)) if a <= seg.from && seg.to <= b => seg.height - demand,
            _ => seg.height,
        }
    }

    fn push_start_up(&self, t: &Task, segments: &[Segment], store: &mut Store) -> Filter {
        let own = Self::compulsory(t, store);
        loop {
            let est = store.min(t.start);
            let window_end = est + t.duration;
            let first = segments.partition_point(|s| s.to <= est);
            let conflict = segments[first..]
                .iter()
                .take_while(|s| s.from < window_end)
                .filter(|s| Self::others(s, own, t.demand) + t.demand > self.capacity)
                .last();
            match conflict {
                // Every start up to the end of the last conflicting
                // segment overlaps it.
                Some(s) => {
                    store.set_min(t.start, s.to)?;
                }
                None => return Ok(()),
            }
        }
    }

    fn push_start_down(&self, t: &Task, segments: &[Segment], store: &mut Store) -> Filter {
        let own = Self::compulsory(t, store);
        loop {
            let lst = store.max(t.start);
            let window_end = lst + t.duration;
            let first = segments.partition_point(|s| s.to <= lst);
            let conflict = segments[first..]
                .iter()
                .take_while(|s| s.from < window_end)
                .find(|s| Self::others(s, own, t.demand) + t.demand > self.capacity);
            match conflict {
                Some(s) => {
                    store.set_max(t.start, s.from - t.duration)?;
                }
                None => return Ok(()),
            }
        }
    }
}

impl Propagator for Cumulative {
    fn name(&self) -> &'static str {
        "cumulative"
    }

    fn scope(&self) -> Vec<VarId> {
        self.tasks.iter().map(|t| t.start).collect()
    }

    fn filter(&self, store: &mut Store) -> Filter {
        let segments = self.profile(store)?;
        if segments.is_empty() && self.capacity > 0 {
            return Ok(());
        }
        for t in self.tasks.iter().filter(|t| Self::active(t)) {
            if store.is_fixed(t.start) {
                continue;
            }
            if t.demand > self.capacity {
                return Err(Failure::because("task demand exceeds capacity"));
            }
            self.push_start_up(t, &segments, store)?;
            self.push_start_down(t, &segments, store)?;
        }
        Ok(())
    }

    fn is_satisfied(&self, store: &Store) -> bool {
        self.profile(store).is_ok()
            && self
                .tasks
                .iter()
                .all(|t| !Self::active(t) || t.demand <= self.capacity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve, Model, PropagationResult, SearchConfig};

    fn unit_tasks(m: &mut Model, n: usize, lo: i64, hi: i64) -> Vec<Task> {
        (0..n)
            .map(|_| Task {
                start: m.new_variable(lo, hi).unwrap(),
                duration: 1,
                demand: 1,
            })
            .collect()
    }

    #[test]
    fn at_capacity_is_fixpoint() {
        let mut m = Model::new();
        let tasks = unit_tasks(&mut m, 5, 1, 1);
        m.post(Cumulative::new(tasks, 5).unwrap()).unwrap();
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Fixpoint);
    }

    #[test]
    fn overload_fails() {
        let mut m = Model::new();
        let tasks = unit_tasks(&mut m, 6, 1, 1);
        m.post(Cumulative::new(tasks, 5).unwrap()).unwrap();
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Failed);
        assert!(m.last_failure().unwrap().contains("overload"));
    }

    #[test]
    fn starts_pushed_off_full_slots() {
        let mut m = Model::new();
        let mut tasks = unit_tasks(&mut m, 2, 3, 3);
        let free = m.new_variable(1, 6).unwrap();
        tasks.push(Task {
            start: free,
            duration: 3,
            demand: 1,
        });
        m.post(Cumulative::new(tasks, 2).unwrap()).unwrap();
        m.propagate_fixpoint();
        // Day 3 is full, so the 3-day task fits only at 4..6.
        assert_eq!(m.domain(free).to_vec(), vec![4, 5, 6]);
    }

    #[test]
    fn zero_capacity_is_unsatisfiable() {
        let mut m = Model::new();
        let tasks = unit_tasks(&mut m, 3, 1, 10);
        m.post(Cumulative::new(tasks, 0).unwrap()).unwrap();
        assert!(solve(&mut m, &SearchConfig::default())
            .unwrap()
            .is_unsatisfiable());
    }

    #[test]
    fn search_respects_capacity() {
        let mut m = Model::new();
        let tasks = unit_tasks(&mut m, 12, 1, 4);
        m.post(Cumulative::new(tasks.clone(), 3).unwrap()).unwrap();
        let s = solve(&mut m, &SearchConfig::default())
            .unwrap()
            .solution
            .unwrap();
        for day in 1..=4 {
            let used = tasks.iter().filter(|t| s.value(t.start) == day).count();
            assert_eq!(used, 3);
        }
    }
}
