use super::ks_rule::{KsOptions, KsRule, Side};
use crate::solver::{Failure, Filter, ModelError, Propagator, Store, VarId};
use crate::stats::{ks_two_sample_with, KsStatistic, Relation, Result};

/// Two-sample KS constraint over two lists of observation variables.
///
/// `d+` measures `F_s1 - F_s2`; `Ge` states that the first sample is not
/// stochastically smaller than the second.
#[derive(Debug, Clone)]
pub struct NonParametricKs {
    s1: Vec<VarId>,
    s2: Vec<VarId>,
    alpha: f64,
    options: KsOptions,
    rule: KsRule,
}

/// Which sample a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sample {
    First,
    Second,
}

impl NonParametricKs {
    pub fn new(
        s1: Vec<VarId>,
        s2: Vec<VarId>,
        alpha: f64,
        relation: Relation,
        options: KsOptions,
    ) -> std::result::Result<Self, ModelError> {
        if s1.is_empty() || s2.is_empty() {
            return Err(ModelError::InvalidConstraint(
                "both KS samples need at least one observation".into(),
            ));
        }
        let (a, b) = (s1.len() as f64, s2.len() as f64);
        let rule = KsRule::new(relation, alpha, a * b / (a + b), &options)?;
        Ok(NonParametricKs {
            s1,
            s2,
            alpha,
            options,
            rule,
        })
    }

    pub fn samples(&self) -> (&[VarId], &[VarId]) {
        (&self.s1, &self.s2)
    }

    pub fn relation(&self) -> Relation {
        self.rule.relation
    }

    pub fn options(&self) -> &KsOptions {
        &self.options
    }

    fn statistic(&self, w1: &[f64], w2: &[f64]) -> KsStatistic {
        ks_two_sample_with(w1, w2, self.options.sup).expect("samples are non-empty")
    }

    /// Bound that keeps the statistic on `side` smallest: for `d+` the
    /// first sample sits high and the second low.
    fn favourable(side: Side, sample: Sample, store: &Store, v: VarId) -> i64 {
        let high = (side == Side::Plus) == (sample == Sample::First);
        if high {
            store.max(v)
        } else {
            store.min(v)
        }
    }

    fn unfavourable(side: Side, sample: Sample, store: &Store, v: VarId) -> i64 {
        if Self::favourable(side, sample, store, v) == store.max(v) {
            store.min(v)
        } else {
            store.max(v)
        }
    }

    fn shave(&self, side: Side, store: &mut Store) -> Filter {
        let init = |vars: &[VarId], sample| -> Vec<f64> {
            vars.iter()
                .map(|&v| Self::favourable(side, sample, store, v) as f64)
                .collect()
        };
        let mut w1 = init(&self.s1, Sample::First);
        let mut w2 = init(&self.s2, Sample::Second);
        for sample in [Sample::First, Sample::Second] {
            let vars = match sample {
                Sample::First => &self.s1,
                Sample::Second => &self.s2,
            };
            for (i, &o) in vars.iter().enumerate() {
                loop {
                    let bound = Self::unfavourable(side, sample, store, o);
                    match sample {
                        Sample::First => w1[i] = bound as f64,
                        Sample::Second => w2[i] = bound as f64,
                    }
                    if self.rule.accepts(side.of(&self.statistic(&w1, &w2))) {
                        break;
                    }
                    store.remove(o, bound).map_err(|_| {
                        Failure::because(format!(
                            "two-sample KS rejects every value of {o} at alpha = {}",
                            self.alpha
                        ))
                    })?;
                }
                let fav = Self::favourable(side, sample, store, o) as f64;
                match sample {
                    Sample::First => w1[i] = fav,
                    Sample::Second => w2[i] = fav,
                }
            }
        }
        Ok(())
    }

    fn ground_values(&self, store: &Store) -> Option<(Vec<f64>, Vec<f64>)> {
        let get = |vars: &[VarId]| {
            vars.iter()
                .map(|&v| store.value(v).map(|x| x as f64))
                .collect::<Option<Vec<_>>>()
        };
        Some((get(&self.s1)?, get(&self.s2)?))
    }

    /// Test statistic, p-value of `d` and verdict for a ground assignment.
    pub fn diagnose(&self, store: &Store) -> Option<(KsStatistic, f64, bool)> {
        let (w1, w2) = self.ground_values(store)?;
        let s = self.statistic(&w1, &w2);
        Some((s, self.rule.p_value(s.d), self.rule.satisfied(&s)))
    }
}

impl Propagator for NonParametricKs {
    fn name(&self) -> &'static str {
        "ks-nonparametric"
    }

    fn scope(&self) -> Vec<VarId> {
        self.s1.iter().chain(&self.s2).copied().collect()
    }

    fn filter(&self, store: &mut Store) -> Filter {
        if self.rule.relation == Relation::Ne {
            return match self.diagnose(store) {
                Some((_, _, false)) => Err(Failure::because("two-sided KS test fails to reject")),
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

/// Ground two-sample check with default options.
pub fn check_ground_ks_nonparametric(
    v1: &[f64],
    v2: &[f64],
    alpha: f64,
    relation: Relation,
) -> Result<bool> {
    check_ground_ks_nonparametric_with(v1, v2, alpha, relation, &KsOptions::default())
}

pub fn check_ground_ks_nonparametric_with(
    v1: &[f64],
    v2: &[f64],
    alpha: f64,
    relation: Relation,
    options: &KsOptions,
) -> Result<bool> {
    let s = ks_two_sample_with(v1, v2, options.sup)?;
    let rule = KsRule::new(relation, alpha, s.n_eff, options)?;
    Ok(rule.satisfied(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{Model, PropagationResult};

    const O1: [f64; 10] = [9.0, 10.0, 9.0, 6.0, 11.0, 8.0, 10.0, 11.0, 14.0, 11.0];

    #[test]
    fn known_sample_verdicts() {
        let feasible = [5.0, 5.0, 9.0, 9.0, 9.0, 9.0, 9.0, 10.0, 10.0, 11.0];
        let infeasible = [5.0, 5.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0];
        for options in [KsOptions::default(), KsOptions::envelope_finite()] {
            let check = |v2: &[f64]| {
                check_ground_ks_nonparametric_with(&O1, v2, 0.05, Relation::Eq, &options).unwrap()
            };
            assert!(check(&feasible), "{options:?}");
            assert!(!check(&infeasible), "{options:?}");
        }
    }

    #[test]
    fn identical_samples_pass() {
        for &alpha in &[0.01, 0.5, 0.99] {
            assert!(check_ground_ks_nonparametric(&O1, &O1, alpha, Relation::Eq).unwrap());
        }
    }

    #[test]
    fn equal_ground_samples_are_fixpoint() {
        let mut m = Model::new();
        let a: Vec<_> = O1.iter().map(|&v| m.new_constant(v as i64)).collect();
        let b: Vec<_> = O1.iter().map(|&v| m.new_constant(v as i64)).collect();
        m.post(NonParametricKs::new(a, b, 0.05, Relation::Eq, KsOptions::default()).unwrap())
            .unwrap();
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Fixpoint);
    }
}
