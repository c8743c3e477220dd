use serde::{Deserialize, Serialize};

use crate::stats::{KsStatistic, KsTest, NullDistribution, Relation, Result, SupMode};

/// How the two-sided (`Eq`/`Ne`) KS constraint picks its significance level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EqMode {
    /// Reject iff `Pr{D > max(d+, d-)} < alpha`.
    #[default]
    TwoTailed,
    /// Both one-sided tests at level `1 - (1 - alpha) / 2`.
    AdjustedDecomposition,
}

/// Numerical choices shared by the KS constraints and their ground checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KsOptions {
    pub sup: SupMode,
    pub null: NullDistribution,
    pub eq: EqMode,
}

impl KsOptions {
    /// Envelope supremum with the finite-sample null; the `ks-sets` default.
    pub fn envelope_finite() -> Self {
        KsOptions {
            sup: SupMode::Envelope,
            null: NullDistribution::FiniteSample,
            eq: EqMode::TwoTailed,
        }
    }
}

/// The accept/reject rule of a KS constraint for a fixed sample size.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KsRule {
    pub relation: Relation,
    test: KsTest,
}

impl KsRule {
    pub fn new(relation: Relation, alpha: f64, n_eff: f64, options: &KsOptions) -> Result<Self> {
        crate::stats::check_alpha(alpha)?;
        let two_sided = matches!(relation, Relation::Eq | Relation::Ne);
        let level = if two_sided && options.eq == EqMode::AdjustedDecomposition {
            1.0 - (1.0 - alpha) / 2.0
        } else {
            alpha
        };
        Ok(KsRule {
            relation,
            test: KsTest::new(options.null, n_eff, level)?,
        })
    }

    /// Fail-to-reject for the one-sided statistic.
    pub fn accepts(&self, d: f64) -> bool {
        !self.test.rejects(d)
    }

    pub fn satisfied(&self, s: &KsStatistic) -> bool {
        let both = || self.accepts(s.d_plus) && self.accepts(s.d_minus);
        match self.relation {
            Relation::Ge => self.accepts(s.d_plus),
            Relation::Le => self.accepts(s.d_minus),
            Relation::Eq => both(),
            Relation::Ne => !both(),
        }
    }

    pub fn p_value(&self, d: f64) -> f64 {
        self.test.p_value(d)
    }
}

/// Which signed deviation a propagation pass guards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn of(self, s: &KsStatistic) -> f64 {
        match self {
            Side::Plus => s.d_plus,
            Side::Minus => s.d_minus,
        }
    }

    /// Sides to enforce for a relation; `Ne` has none.
    pub fn for_relation(r: Relation) -> &'static [Side] {
        match r {
            Relation::Ge => &[Side::Plus],
            Relation::Le => &[Side::Minus],
            Relation::Eq => &[Side::Plus, Side::Minus],
            Relation::Ne => &[],
        }
    }
}
