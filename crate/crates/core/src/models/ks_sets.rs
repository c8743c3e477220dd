use serde::Serialize;

use crate::constraints::{check_ground_ks_nonparametric_with, KsOptions, NonParametricKs};
use crate::solver::{
    enumerate, Model, ModelError, SearchConfig, SearchStats, SearchStatus, VarId, VarSelect,
};
use crate::stats::{Relation, Result as StatsResult};

/// The fixed first sample.
pub const KS_SETS_O1: [i64; 10] = [9, 10, 9, 6, 11, 8, 10, 11, 14, 11];
/// Fixed prefix of the second sample.
pub const KS_SETS_O2_FIXED: [i64; 2] = [5, 5];
/// Candidate values for each free member of the second sample.
pub const KS_SETS_O2_VALUES: [i64; 3] = [9, 10, 11];
/// Number of free members of the second sample.
pub const KS_SETS_O2_FREE: usize = 8;

#[derive(Debug)]
pub struct KsSetsModel {
    pub model: Model,
    pub o1: Vec<VarId>,
    pub o2: Vec<VarId>,
}

impl KsSetsModel {
    /// Branch on the free second-sample variables in order, smallest value
    /// first, so that solutions come out in lexicographic order.
    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            var_select: VarSelect::InputOrder,
            decision_vars: Some(self.o2.clone()),
            ..Default::default()
        }
    }
}

/// Two-sample KS `Eq` constraint between the fixed first sample and a
/// second sample with two members fixed at 5 and eight in `{9, 10, 11}`.
pub fn build_ks_sets_model(alpha: f64, options: KsOptions) -> Result<KsSetsModel, ModelError> {
    let mut model = Model::new();
    let o1: Vec<_> = KS_SETS_O1.iter().map(|&v| model.new_constant(v)).collect();
    let mut o2: Vec<_> = KS_SETS_O2_FIXED
        .iter()
        .map(|&v| model.new_constant(v))
        .collect();
    for _ in 0..KS_SETS_O2_FREE {
        o2.push(model.new_variable_sparse(&KS_SETS_O2_VALUES)?);
    }
    model.post(NonParametricKs::new(
        o1.clone(),
        o2.clone(),
        alpha,
        Relation::Eq,
        options,
    )?)?;
    Ok(KsSetsModel { model, o1, o2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KsSetsCounts {
    pub total: u64,
    pub rejected: u64,
    pub feasible: u64,
}

fn as_f64(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

/// All ordered assignments of the free second-sample members, in
/// lexicographic order.
pub fn ks_sets_assignments() -> impl Iterator<Item = Vec<i64>> {
    let k = KS_SETS_O2_VALUES.len();
    let total = k.pow(KS_SETS_O2_FREE as u32);
    (0..total).map(move |mut code| {
        let mut o2 = KS_SETS_O2_FIXED.to_vec();
        let mut free = vec![0; KS_SETS_O2_FREE];
        for slot in free.iter_mut().rev() {
            *slot = KS_SETS_O2_VALUES[code % k];
            code /= k;
        }
        o2.extend(free);
        o2
    })
}

/// Counts by pure ground checking of every assignment; no propagation.
/// `visit` sees each assignment with its verdict.
pub fn enumerate_ks_sets_ground(
    alpha: f64,
    options: &KsOptions,
    mut visit: impl FnMut(&[i64], bool),
) -> StatsResult<KsSetsCounts> {
    let o1 = as_f64(&KS_SETS_O1);
    let mut counts = KsSetsCounts {
        total: 0,
        rejected: 0,
        feasible: 0,
    };
    for o2 in ks_sets_assignments() {
        let ok =
            check_ground_ks_nonparametric_with(&o1, &as_f64(&o2), alpha, Relation::Eq, options)?;
        counts.total += 1;
        if ok {
            counts.feasible += 1;
        } else {
            counts.rejected += 1;
        }
        visit(&o2, ok);
    }
    Ok(counts)
}

/// Counts by propagation and search; `rejected` is the complement of the
/// solution count within the full assignment space.
pub fn enumerate_ks_sets_search(
    alpha: f64,
    options: KsOptions,
    mut visit: impl FnMut(&[i64]),
) -> Result<(KsSetsCounts, SearchStats, SearchStatus), ModelError> {
    let mut m = build_ks_sets_model(alpha, options)?;
    let config = m.search_config();
    let o2 = m.o2.clone();
    let r = enumerate(&mut m.model, &config, |s| {
        visit(&s.values(&o2));
        true
    })?;
    let total = (KS_SETS_O2_VALUES.len() as u64).pow(KS_SETS_O2_FREE as u32);
    Ok((
        KsSetsCounts {
            total,
            rejected: total - r.count,
            feasible: r.count,
        },
        r.stats,
        r.status,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignment_space() {
        let all: Vec<_> = ks_sets_assignments().collect();
        assert_eq!(all.len(), 6561);
        assert_eq!(all[0], vec![5, 5, 9, 9, 9, 9, 9, 9, 9, 9]);
        assert_eq!(all[6560], vec![5, 5, 11, 11, 11, 11, 11, 11, 11, 11]);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 6561);
    }

    #[test]
    fn ground_and_search_agree() {
        let options = KsOptions::envelope_finite();
        let mut ground = Vec::new();
        let g = enumerate_ks_sets_ground(0.05, &options, |o2, ok| {
            if ok {
                ground.push(o2.to_vec());
            }
        })
        .unwrap();
        let mut searched = Vec::new();
        let (s, _, status) =
            enumerate_ks_sets_search(0.05, options, |o2| searched.push(o2.to_vec())).unwrap();
        assert_eq!(status, SearchStatus::Complete);
        assert_eq!(g, s);
        assert_eq!(ground, searched);
    }
}
