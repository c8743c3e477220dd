//! Finite-domain constraint solver: domains, trailing, propagation to
//! fixpoint and depth-first search.

mod domain;
mod model;
mod search;
mod store;

pub use domain::{Domain, EmptyDomain};
pub use model::{Model, PropagationResult, Propagator, RateVar, VarId};
pub use search::{
    enumerate, solve, EnumerateResult, Limit, SearchConfig, SearchStats, SearchStatus, Solution,
    SolveResult, ValueSelect, VarSelect,
};
pub use store::{Checkpoint, Failure, Filter, Store};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("empty range {lower}..={upper}")]
    EmptyRange { lower: i64, upper: i64 },
    #[error("domain has no values")]
    EmptyDomain,
    #[error("domain values must be strictly increasing")]
    NotIncreasing,
    #[error("rate values must be positive")]
    NonPositiveRate,
    #[error("unknown variable {0}")]
    UnknownVariable(VarId),
    #[error("search limits must be positive")]
    InvalidLimit,
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error(transparent)]
    Stats(#[from] crate::stats::StatsError),
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `x <= c` or `x >= c`, for tests.
    #[derive(Debug)]
    struct Bound {
        x: VarId,
        c: i64,
        upper: bool,
    }

    impl Propagator for Bound {
        fn name(&self) -> &'static str {
            "bound"
        }
        fn scope(&self) -> Vec<VarId> {
            vec![self.x]
        }
        fn filter(&self, store: &mut Store) -> Filter {
            if self.upper {
                store.set_max(self.x, self.c)?;
            } else {
                store.set_min(self.x, self.c)?;
            }
            Ok(())
        }
        fn is_satisfied(&self, store: &Store) -> bool {
            let v = store.value(self.x).unwrap();
            if self.upper {
                v <= self.c
            } else {
                v >= self.c
            }
        }
    }

    /// `x != y`, checked at the leaves only.
    #[derive(Debug)]
    struct LazyNotEqual(VarId, VarId);

    impl Propagator for LazyNotEqual {
        fn name(&self) -> &'static str {
            "lazy-ne"
        }
        fn scope(&self) -> Vec<VarId> {
            vec![self.0, self.1]
        }
        fn filter(&self, _: &mut Store) -> Filter {
            Ok(())
        }
        fn is_satisfied(&self, store: &Store) -> bool {
            store.value(self.0) != store.value(self.1)
        }
    }

    #[test]
    fn variable_creation() {
        let mut m = Model::new();
        let m_var = m.new_variable(0, 20).unwrap();
        assert_eq!(m.domain(m_var).size(), 21);
        let fixed = m.new_variable(5, 5).unwrap();
        assert!(m.domain(fixed).is_fixed());
        assert_eq!(
            m.new_variable(3, 1),
            Err(ModelError::EmptyRange { lower: 3, upper: 1 })
        );
        let o = m.new_variable_sparse(&[9, 10, 11]).unwrap();
        assert_eq!(m.domain(o).to_vec(), vec![9, 10, 11]);
        let s = m.new_variable_sparse(&[5]).unwrap();
        assert_eq!(m.domain(s).value(), Some(5));
        assert_eq!(m.new_variable_sparse(&[]), Err(ModelError::EmptyDomain));
        assert_eq!(
            m.new_variable_sparse(&[2, 2]),
            Err(ModelError::NotIncreasing)
        );
        assert!(m.new_rate_variable(&[0, 1], 5).is_err());
        let r = m.new_rate_variable(&[1], 5).unwrap();
        assert_eq!(r.to_real(1), 0.2);
    }

    #[test]
    fn fixpoint_without_propagators() {
        let mut m = Model::new();
        let x = m.new_variable(0, 3).unwrap();
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Fixpoint);
        assert_eq!(m.domain(x).size(), 4);
    }

    #[test]
    fn contradictory_bounds_fail() {
        let mut m = Model::new();
        let x = m.new_variable(0, 10).unwrap();
        m.post(Bound {
            x,
            c: 3,
            upper: true,
        })
        .unwrap();
        m.post(Bound {
            x,
            c: 5,
            upper: false,
        })
        .unwrap();
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Failed);
        assert!(m.last_failure().unwrap().starts_with("bound"));
        let r = solve(&mut m, &SearchConfig::default()).unwrap();
        assert!(r.is_unsatisfiable());
    }

    #[test]
    fn post_rejects_foreign_variables() {
        let mut m = Model::new();
        let err = m.post(Bound {
            x: VarId(3),
            c: 0,
            upper: true,
        });
        assert_eq!(err, Err(ModelError::UnknownVariable(VarId(3))));
    }

    #[test]
    fn cartesian_enumeration() {
        let mut m = Model::new();
        let x = m.new_variable(0, 2).unwrap();
        let y = m.new_variable(0, 2).unwrap();
        let mut seen = Vec::new();
        let r = enumerate(&mut m, &SearchConfig::default(), |s| {
            seen.push((s.value(x), s.value(y)));
            true
        })
        .unwrap();
        assert_eq!(r.count, 9);
        assert_eq!(r.status, SearchStatus::Complete);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 9);
        // Domains are restored after search.
        assert_eq!(m.domain(x).size(), 3);
    }

    #[test]
    fn ground_model_has_one_solution() {
        let mut m = Model::new();
        let x = m.new_constant(4);
        m.post(Bound {
            x,
            c: 5,
            upper: true,
        })
        .unwrap();
        let r = enumerate(&mut m, &SearchConfig::default(), |_| true).unwrap();
        assert_eq!(r.count, 1);
    }

    #[test]
    fn leaf_check_filters_lazy_constraints() {
        let mut m = Model::new();
        let x = m.new_variable(0, 2).unwrap();
        let y = m.new_variable(0, 2).unwrap();
        m.post(LazyNotEqual(x, y)).unwrap();
        let r = enumerate(&mut m, &SearchConfig::default(), |_| true).unwrap();
        assert_eq!(r.count, 6);
        assert_eq!(r.stats.failures, 3);
    }

    #[test]
    fn limits_are_reported() {
        let mut m = Model::new();
        for _ in 0..4 {
            m.new_variable(0, 3).unwrap();
        }
        let config = SearchConfig {
            solution_limit: Some(10),
            ..Default::default()
        };
        let r = enumerate(&mut m, &config, |_| true).unwrap();
        assert_eq!(r.count, 10);
        assert_eq!(r.status, SearchStatus::LimitReached(Limit::Solutions));

        let config = SearchConfig {
            node_limit: Some(3),
            ..Default::default()
        };
        let r = enumerate(&mut m, &config, |_| true).unwrap();
        assert_eq!(r.status, SearchStatus::LimitReached(Limit::Nodes));

        let config = SearchConfig {
            node_limit: Some(0),
            ..Default::default()
        };
        assert_eq!(
            enumerate(&mut m, &config, |_| true).unwrap_err(),
            ModelError::InvalidLimit
        );
    }

    #[test]
    fn value_orders() {
        let mut m = Model::new();
        let x = m.new_variable(0, 9).unwrap();
        let first = |m: &mut Model, vs| {
            let config = SearchConfig {
                value_select: vs,
                ..Default::default()
            };
            solve(m, &config).unwrap().solution.unwrap().value(x)
        };
        assert_eq!(first(&mut m, ValueSelect::Min), 0);
        assert_eq!(first(&mut m, ValueSelect::Max), 9);
        let a = first(&mut m, ValueSelect::Shuffle(7));
        assert_eq!(a, first(&mut m, ValueSelect::Shuffle(7)));
    }

    #[test]
    fn rate_values_are_rational() {
        let mut m = Model::new();
        let r = m.new_rate_variable(&[1, 2], 10).unwrap();
        let s = solve(&mut m, &SearchConfig::default())
            .unwrap()
            .solution
            .unwrap();
        assert_eq!(s.rational(r.var), Some((1, 10)));
    }
}
