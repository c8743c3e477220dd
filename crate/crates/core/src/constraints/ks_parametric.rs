use std::sync::Arc;

use super::ks_rule::{KsOptions, KsRule, Side};
use crate::solver::{Failure, Filter, ModelError, Propagator, RateVar, Store, VarId};
use crate::stats::{
    ks_one_sample_with, ExponentialFamily, KsStatistic, ParametricFamily, Relation, Result,
};

/// One-sample KS constraint: the observations fail to reject the null
/// hypothesis `w` against the family member selected by the rate variable.
///
/// `Ge` guards `d+` (observations stochastically no smaller than the
/// reference), `Le` guards `d-`, `Eq` both, `Ne` is checked once ground.
#[derive(Debug, Clone)]
pub struct ParametricKs {
    obs: Vec<VarId>,
    rate: RateVar,
    family: Arc<dyn ParametricFamily>,
    alpha: f64,
    options: KsOptions,
    rule: KsRule,
}

impl ParametricKs {
    pub fn new(
        obs: Vec<VarId>,
        rate: RateVar,
        family: Arc<dyn ParametricFamily>,
        alpha: f64,
        relation: Relation,
        options: KsOptions,
    ) -> std::result::Result<Self, ModelError> {
        if obs.is_empty() {
            return Err(ModelError::InvalidConstraint(
                "KS constraint needs at least one observation".into(),
            ));
        }
        let rule = KsRule::new(relation, alpha, obs.len() as f64, &options)?;
        Ok(ParametricKs {
            obs,
            rate,
            family,
            alpha,
            options,
            rule,
        })
    }

    /// Against `exponential(rate)`.
    pub fn exponential(
        obs: Vec<VarId>,
        rate: RateVar,
        alpha: f64,
        relation: Relation,
        options: KsOptions,
    ) -> std::result::Result<Self, ModelError> {
        Self::new(
            obs,
            rate,
            Arc::new(ExponentialFamily),
            alpha,
            relation,
            options,
        )
    }

    pub fn observations(&self) -> &[VarId] {
        &self.obs
    }

    pub fn rate(&self) -> RateVar {
        self.rate
    }

    pub fn relation(&self) -> Relation {
        self.rule.relation
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn options(&self) -> &KsOptions {
        &self.options
    }

    fn statistic(&self, values: &[f64], numerator: i64) -> KsStatistic {
        let param = self.rate.to_real(numerator);
        let family = &self.family;
        ks_one_sample_with(values, &|x: f64| family.cdf(param, x), self.options.sup)
            .expect("observation list is non-empty")
    }

    /// Whether the completion `values` with rate numerator `numerator`
    /// passes the one-sided test on `side`.
    fn passes(&self, side: Side, values: &[f64], numerator: i64) -> bool {
        self.rule
            .accepts(side.of(&self.statistic(values, numerator)))
    }

    /// Observation bound that keeps the statistic on `side` smallest.
    fn favourable_obs(side: Side, store: &Store, v: VarId) -> i64 {
        match side {
            Side::Plus => store.max(v),
            Side::Minus => store.min(v),
        }
    }

    /// Rate bound that keeps the statistic on `side` smallest. `d+` shrinks
    /// as the reference CDF grows.
    fn favourable_rate(&self, side: Side, store: &Store) -> i64 {
        let grow = self.family.cdf_increasing_in_param();
        let v = self.rate.var;
        if (side == Side::Plus) == grow {
            store.max(v)
        } else {
            store.min(v)
        }
    }

    fn unfavourable_rate(&self, side: Side, store: &Store) -> i64 {
        let v = self.rate.var;
        if self.favourable_rate(side, store) == store.max(v) {
            store.min(v)
        } else {
            store.max(v)
        }
    }

    /// One pass of bound propagation for one side.
    fn shave(&self, side: Side, store: &mut Store) -> Filter {
        let mut w: Vec<f64> = self
            .obs
            .iter()
            .map(|&o| Self::favourable_obs(side, store, o) as f64)
            .collect();
        let lambda = self.favourable_rate(side, store);
        for (i, &o) in self.obs.iter().enumerate() {
            loop {
                let bound = match side {
                    Side::Plus => store.min(o),
                    Side::Minus => store.max(o),
                };
                w[i] = bound as f64;
                if self.passes(side, &w, lambda) {
                    break;
                }
                store.remove(o, bound).map_err(|_| self.wipeout(side, o))?;
            }
            w[i] = Self::favourable_obs(side, store, o) as f64;
        }
        loop {
            let lambda = self.unfavourable_rate(side, store);
            if self.passes(side, &w, lambda) {
                break;
            }
            let rv = self.rate.var;
            store
                .remove(rv, lambda)
                .map_err(|_| self.wipeout(side, rv))?;
        }
        Ok(())
    }

    fn wipeout(&self, side: Side, v: VarId) -> Failure {
        let stat = match side {
            Side::Plus => "d+",
            Side::Minus => "d-",
        };
        Failure::because(format!(
            "{stat} rejects every value of {v} at alpha = {}",
            self.alpha
        ))
    }

    fn ground_values(&self, store: &Store) -> Option<(Vec<f64>, i64)> {
        let values = self
            .obs
            .iter()
            .map(|&o| store.value(o).map(|x| x as f64))
            .collect::<Option<Vec<_>>>()?;
        Some((values, store.value(self.rate.var)?))
    }

    /// Test statistic and verdict for a ground assignment.
    pub fn diagnose(&self, store: &Store) -> Option<(KsStatistic, f64, bool)> {
        let (values, num) = self.ground_values(store)?;
        let s = self.statistic(&values, num);
        Some((s, self.rule.p_value(s.d), self.rule.satisfied(&s)))
    }
}

impl Propagator for ParametricKs {
    fn name(&self) -> &'static str {
        "ks-parametric"
    }

    fn scope(&self) -> Vec<VarId> {
        let mut s = self.obs.clone();
        s.push(self.rate.var);
        s
    }

    fn filter(&self, store: &mut Store) -> Filter {
        if self.rule.relation == Relation::Ne {
            return match self.ground_values(store) {
                Some((values, num)) if !self.rule.satisfied(&self.statistic(&values, num)) => {
                    Err(Failure::because("two-sided KS test fails to reject"))
                }
                _ => Ok(()),
            };
        }
        loop {
            let before = store.edits();
            for &side in Side::for_relation(self.rule.relation) {
                self.shave(side, store)?;
            }
            if store.edits() == before {
                return Ok(());
            }
        }
    }

    fn is_satisfied(&self, store: &Store) -> bool {
        self.diagnose(store).is_some_and(|(_, _, ok)| ok)
    }
}

/// Ground one-sample check against `exponential(rate)`, with default options.
pub fn check_ground_ks_parametric(
    values: &[f64],
    rate: f64,
    alpha: f64,
    relation: Relation,
) -> Result<bool> {
    check_ground_ks_parametric_with(
        values,
        &ExponentialFamily,
        rate,
        alpha,
        relation,
        &KsOptions::default(),
    )
}

/// Ground one-sample check: `true` iff the assignment is consistent, i.e.
/// the test identified by `relation` fails to reject (`Ne`: the two-sided
/// test rejects).
pub fn check_ground_ks_parametric_with(
    values: &[f64],
    family: &dyn ParametricFamily,
    param: f64,
    alpha: f64,
    relation: Relation,
    options: &KsOptions,
) -> Result<bool> {
    if !(param > 0.0 && param.is_finite()) {
        return Err(crate::stats::StatsError::InvalidRate(param));
    }
    let rule = KsRule::new(relation, alpha, values.len() as f64, options)?;
    let s = ks_one_sample_with(values, &|x: f64| family.cdf(param, x), options.sup)?;
    Ok(rule.satisfied(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{Model, PropagationResult};

    #[test]
    fn ground_examples() {
        // A single value at the median of exponential(0.2).
        let median = 5.0 * 2f64.ln();
        assert!(check_ground_ks_parametric(&[median], 0.2, 0.05, Relation::Eq).unwrap());
        assert!(!check_ground_ks_parametric(&[0.0; 4], 0.2, 0.1, Relation::Eq).unwrap());
        assert!(check_ground_ks_parametric(&[0.0; 4], 0.2, 0.1, Relation::Ne).unwrap());
        assert!(check_ground_ks_parametric(&[1.0], 0.2, 1.0, Relation::Eq).is_err());
        assert!(check_ground_ks_parametric(&[1.0], 0.0, 0.1, Relation::Eq).is_err());
    }

    #[test]
    fn ground_model_is_fixpoint() {
        let mut m = Model::new();
        let obs: Vec<_> = [1, 3, 5, 8, 12]
            .iter()
            .map(|&v| m.new_constant(v))
            .collect();
        let rate = m.new_rate_variable(&[1], 5).unwrap();
        m.post(
            ParametricKs::exponential(obs, rate, 0.1, Relation::Eq, KsOptions::default()).unwrap(),
        )
        .unwrap();
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Fixpoint);
    }

    #[test]
    fn single_large_observation() {
        // o in {100..120} against exponential(0.2): GE never rejects a
        // large value, LE rejects all of them.
        for (relation, survivors) in [(Relation::Ge, 21), (Relation::Le, 0)] {
            let mut m = Model::new();
            let o = m.new_variable(100, 120).unwrap();
            let rate = m.new_rate_variable(&[1], 5).unwrap();
            m.post(
                ParametricKs::exponential(vec![o], rate, 0.1, relation, KsOptions::default())
                    .unwrap(),
            )
            .unwrap();
            let r = m.propagate_fixpoint();
            if survivors == 0 {
                assert_eq!(r, PropagationResult::Failed);
            } else {
                assert_eq!(m.domain(o).size(), survivors);
            }
        }
    }
}
