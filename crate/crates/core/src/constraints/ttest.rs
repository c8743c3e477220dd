use crate::solver::{Failure, Filter, ModelError, Propagator, Store, VarId};
use crate::stats::{
    check_alpha, mean_feasible_interval, ttest_one_sample_verdict, ttest_two_sample_verdict,
    Relation, Result, StatsError,
};

/// One-sample t-test constraint: the observations fail to reject the null
/// hypothesis `mean w m`.
///
/// Filtering only happens once every observation is fixed; `D(m)` is then
/// intersected with the set of means the test does not reject.
#[derive(Debug, Clone)]
pub struct TTest {
    obs: Vec<VarId>,
    mean: VarId,
    alpha: f64,
    relation: Relation,
}

impl TTest {
    pub fn new(
        obs: Vec<VarId>,
        mean: VarId,
        alpha: f64,
        relation: Relation,
    ) -> std::result::Result<Self, ModelError> {
        if obs.len() < 2 {
            return Err(ModelError::InvalidConstraint(
                "t-test needs at least two observations".into(),
            ));
        }
        check_alpha(alpha)?;
        Ok(TTest {
            obs,
            mean,
            alpha,
            relation,
        })
    }

    pub fn observations(&self) -> &[VarId] {
        &self.obs
    }

    pub fn mean(&self) -> VarId {
        self.mean
    }

    fn sample(&self, store: &Store) -> Option<Vec<f64>> {
        ground(&self.obs, store)
    }
}

fn ground(vars: &[VarId], store: &Store) -> Option<Vec<f64>> {
    vars.iter()
        .map(|&v| store.value(v).map(|x| x as f64))
        .collect()
}

fn degenerate(e: StatsError) -> Failure {
    Failure::because(format!("t statistic undefined: {e}"))
}

impl Propagator for TTest {
    fn name(&self) -> &'static str {
        "t-test"
    }

    fn scope(&self) -> Vec<VarId> {
        let mut s = self.obs.clone();
        s.push(self.mean);
        s
    }

    fn filter(&self, store: &mut Store) -> Filter {
        let Some(sample) = self.sample(store) else {
            return Ok(());
        };
        let interval =
            mean_feasible_interval(&sample, self.alpha, self.relation).map_err(degenerate)?;
        if interval.complement {
            let inside: Vec<i64> = store
                .domain(self.mean)
                .iter()
                .filter(|&m| !interval.admits(m as f64))
                .collect();
            for m in inside {
                store.remove(self.mean, m)?;
            }
        } else {
            if interval.lower.is_finite() {
                store.set_min(self.mean, interval.lower.ceil() as i64)?;
            }
            if interval.upper.is_finite() {
                store.set_max(self.mean, interval.upper.floor() as i64)?;
            }
        }
        Ok(())
    }

    fn is_satisfied(&self, store: &Store) -> bool {
        match (self.sample(store), store.value(self.mean)) {
            (Some(sample), Some(m)) => {
                check_ground_ttest(&sample, m as f64, self.alpha, self.relation).unwrap_or(false)
            }
            _ => false,
        }
    }
}

/// Two-sample pooled t-test constraint, checked once ground.
#[derive(Debug, Clone)]
pub struct TTestTwoSample {
    s1: Vec<VarId>,
    s2: Vec<VarId>,
    alpha: f64,
    relation: Relation,
}

impl TTestTwoSample {
    pub fn new(
        s1: Vec<VarId>,
        s2: Vec<VarId>,
        alpha: f64,
        relation: Relation,
    ) -> std::result::Result<Self, ModelError> {
        if s1.is_empty() || s2.is_empty() || s1.len() + s2.len() < 3 {
            return Err(ModelError::InvalidConstraint(
                "two-sample t-test needs non-empty samples and three observations".into(),
            ));
        }
        check_alpha(alpha)?;
        Ok(TTestTwoSample {
            s1,
            s2,
            alpha,
            relation,
        })
    }

    fn check(&self, store: &Store) -> Option<bool> {
        let a = ground(&self.s1, store)?;
        let b = ground(&self.s2, store)?;
        Some(check_ground_ttest_two_sample(&a, &b, self.alpha, self.relation).unwrap_or(false))
    }
}

impl Propagator for TTestTwoSample {
    fn name(&self) -> &'static str {
        "t-test-two-sample"
    }

    fn scope(&self) -> Vec<VarId> {
        self.s1.iter().chain(&self.s2).copied().collect()
    }

    fn filter(&self, store: &mut Store) -> Filter {
        match self.check(store) {
            Some(false) => Err(Failure::because("two-sample t-test verdict violated")),
            _ => Ok(()),
        }
    }

    fn is_satisfied(&self, store: &Store) -> bool {
        self.check(store).unwrap_or(false)
    }
}

fn consistent(reject: bool, relation: Relation) -> bool {
    if relation == Relation::Ne {
        reject
    } else {
        !reject
    }
}

/// `true` iff the ground assignment satisfies the one-sample t-test
/// constraint.
pub fn check_ground_ttest(values: &[f64], mu: f64, alpha: f64, relation: Relation) -> Result<bool> {
    let o = ttest_one_sample_verdict(values, mu, alpha, relation)?;
    Ok(consistent(o.reject, relation))
}

pub fn check_ground_ttest_two_sample(
    v1: &[f64],
    v2: &[f64],
    alpha: f64,
    relation: Relation,
) -> Result<bool> {
    let o = ttest_two_sample_verdict(v1, v2, alpha, relation)?;
    Ok(consistent(o.reject, relation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{Model, PropagationResult};

    const SAMPLE: [i64; 10] = [8, 14, 6, 12, 12, 9, 10, 9, 10, 5];

    fn with_sample(m: &mut Model, lo: i64, hi: i64, relation: Relation) -> VarId {
        let obs: Vec<_> = SAMPLE.iter().map(|&v| m.new_constant(v)).collect();
        let mean = m.new_variable(lo, hi).unwrap();
        m.post(TTest::new(obs, mean, 0.05, relation).unwrap())
            .unwrap();
        mean
    }

    #[test]
    fn sample_domain() {
        let mut m = Model::new();
        let mean = with_sample(&mut m, 0, 20, Relation::Eq);
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Pruned);
        assert_eq!(m.domain(mean).to_vec(), vec![8, 9, 10, 11]);
    }

    #[test]
    fn ne_with_admitted_mean_fails() {
        let mut m = Model::new();
        with_sample(&mut m, 9, 9, Relation::Ne);
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Failed);
        let mut m = Model::new();
        let mean = with_sample(&mut m, 0, 20, Relation::Ne);
        m.propagate_fixpoint();
        assert!(!m.domain(mean).contains(9));
        assert!(m.domain(mean).contains(0) && m.domain(mean).contains(20));
    }

    #[test]
    fn mean_equal_to_sample_mean() {
        assert!(check_ground_ttest(&[1.0, 2.0, 3.0], 2.0, 0.05, Relation::Eq).unwrap());
        assert!(!check_ground_ttest(&[1.0, 2.0, 3.0], 2.0, 0.05, Relation::Ne).unwrap());
    }

    #[test]
    fn degenerate_sample_fails_with_reason() {
        let mut m = Model::new();
        let obs: Vec<_> = (0..3).map(|_| m.new_constant(4)).collect();
        let mean = m.new_variable(0, 9).unwrap();
        m.post(TTest::new(obs, mean, 0.05, Relation::Eq).unwrap())
            .unwrap();
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Failed);
        assert!(m.last_failure().unwrap().contains("zero variance"));
    }

    #[test]
    fn two_sample_ground_only() {
        let mut m = Model::new();
        let a: Vec<_> = SAMPLE.iter().map(|&v| m.new_constant(v)).collect();
        let b: Vec<_> = SAMPLE.iter().map(|&v| m.new_constant(v + 20)).collect();
        m.post(TTestTwoSample::new(a, b, 0.05, Relation::Eq).unwrap())
            .unwrap();
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Failed);
    }
}
