use serde::{Deserialize, Serialize};

use crate::solver::{Filter, ModelError, Propagator, Store, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearRelation {
    Eq,
    Ge,
}

/// `sum(a_i * x_i) = c` or `sum(a_i * x_i) >= c`, filtered to bound
/// consistency.
#[derive(Debug, Clone)]
pub struct LinearEq {
    terms: Vec<(i64, VarId)>,
    constant: i64,
    relation: LinearRelation,
}

impl LinearEq {
    pub fn new(
        terms: Vec<(i64, VarId)>,
        relation: LinearRelation,
        constant: i64,
    ) -> Result<Self, ModelError> {
        let terms: Vec<_> = terms.into_iter().filter(|&(a, _)| a != 0).collect();
        if terms.is_empty() {
            return Err(ModelError::InvalidConstraint(
                "linear constraint needs a non-zero term".into(),
            ));
        }
        Ok(LinearEq {
            terms,
            constant,
            relation,
        })
    }

    /// `x - y = c`.
    pub fn difference(x: VarId, y: VarId, c: i64) -> Self {
        Self::new(vec![(1, x), (-1, y)], LinearRelation::Eq, c).expect("two terms")
    }

    /// `x >= y + c`.
    pub fn at_least(x: VarId, y: VarId, c: i64) -> Self {
        Self::new(vec![(1, x), (-1, y)], LinearRelation::Ge, c).expect("two terms")
    }

    fn term_bounds(a: i64, v: VarId, store: &Store) -> (i64, i64) {
        let (lo, hi) = (a * store.min(v), a * store.max(v));
        (lo.min(hi), lo.max(hi))
    }

    /// Tightens `a * x` to `[lo, hi]`.
    fn restrict(store: &mut Store, a: i64, x: VarId, lo: Option<i64>, hi: Option<i64>) -> Filter {
        let (lo_x, hi_x) = if a > 0 {
            (lo.map(|l| div_ceil(l, a)), hi.map(|h| div_floor(h, a)))
        } else {
            (hi.map(|h| div_ceil(h, a)), lo.map(|l| div_floor(l, a)))
        };
        if let Some(l) = lo_x {
            store.set_min(x, l)?;
        }
        if let Some(h) = hi_x {
            store.set_max(x, h)?;
        }
        Ok(())
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

impl Propagator for LinearEq {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn scope(&self) -> Vec<VarId> {
        self.terms.iter().map(|&(_, v)| v).collect()
    }

    fn filter(&self, store: &mut Store) -> Filter {
        loop {
            let before = store.edits();
            let bounds: Vec<_> = self
                .terms
                .iter()
                .map(|&(a, v)| Self::term_bounds(a, v, store))
                .collect();
            let sum_lo: i64 = bounds.iter().map(|b| b.0).sum();
            let sum_hi: i64 = bounds.iter().map(|b| b.1).sum();
            for (&(a, v), &(lo, hi)) in self.terms.iter().zip(&bounds) {
                // a*v >= c - (sum of the others' maxima)
                let need = self.constant - (sum_hi - hi);
                let cap = match self.relation {
                    LinearRelation::Eq => Some(self.constant - (sum_lo - lo)),
                    LinearRelation::Ge => None,
                };
                Self::restrict(store, a, v, Some(need), cap)?;
            }
            if store.edits() == before {
                return Ok(());
            }
        }
    }

    fn is_satisfied(&self, store: &Store) -> bool {
        let sum: i64 = self
            .terms
            .iter()
            .map(|&(a, v)| a * store.value(v).expect("ground"))
            .sum();
        match self.relation {
            LinearRelation::Eq => sum == self.constant,
            LinearRelation::Ge => sum >= self.constant,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{Model, PropagationResult};

    #[test]
    fn division_rounding() {
        assert_eq!(div_floor(7, 2), 3);
        assert_eq!(div_floor(-7, 2), -4);
        assert_eq!(div_ceil(-7, 2), -3);
        assert_eq!(div_ceil(7, -2), -3);
        assert_eq!(div_floor(6, -3), -2);
    }

    #[test]
    fn interval_channel() {
        // i = s2 - s1 - 1
        let mut m = Model::new();
        let s1 = m.new_constant(3);
        let s2 = m.new_constant(10);
        let i = m.new_variable(0, 36).unwrap();
        m.post(LinearEq::new(vec![(1, i), (-1, s2), (1, s1)], LinearRelation::Eq, -1).unwrap())
            .unwrap();
        m.propagate_fixpoint();
        assert_eq!(m.domain(i).to_vec(), vec![6]);
    }

    #[test]
    fn last_end_bound() {
        let mut m = Model::new();
        let e = m.new_variable(1, 365).unwrap();
        m.post(LinearEq::new(vec![(1, e)], LinearRelation::Ge, 365 - 36).unwrap())
            .unwrap();
        m.propagate_fixpoint();
        assert_eq!((m.domain(e).min(), m.domain(e).max()), (329, 365));
    }

    #[test]
    fn ordering_intersects_bounds() {
        let mut m = Model::new();
        let s1 = m.new_variable(5, 9).unwrap();
        let s2 = m.new_variable(1, 7).unwrap();
        m.post(LinearEq::at_least(s2, s1, 0)).unwrap();
        m.propagate_fixpoint();
        assert_eq!(m.domain(s2).to_vec(), vec![5, 6, 7]);
        assert_eq!(m.domain(s1).to_vec(), vec![5, 6, 7]);
    }

    #[test]
    fn infeasible_fails() {
        let mut m = Model::new();
        let x = m.new_variable(0, 3).unwrap();
        let y = m.new_variable(0, 3).unwrap();
        m.post(LinearEq::new(vec![(2, x), (3, y)], LinearRelation::Ge, 16).unwrap())
            .unwrap();
        assert_eq!(m.propagate_fixpoint(), PropagationResult::Failed);
    }
}
