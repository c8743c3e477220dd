use crate::constraints::TTest;
use crate::solver::{Model, ModelError, VarId};
use crate::stats::Relation;

/// Observed values of the mean-inference example.
pub const TTEST_SAMPLE: [i64; 10] = [8, 14, 6, 12, 12, 9, 10, 9, 10, 5];

#[derive(Debug)]
pub struct TTestMeanModel {
    pub model: Model,
    pub observations: Vec<VarId>,
    pub mean: VarId,
}

/// Ten fixed observations and a mean `m` in `0..=20` linked by an `Eq`
/// t-test constraint at level `alpha`.
pub fn build_ttest_mean_model(alpha: f64) -> Result<TTestMeanModel, ModelError> {
    let mut model = Model::new();
    let observations: Vec<_> = TTEST_SAMPLE
        .iter()
        .map(|&v| model.new_constant(v))
        .collect();
    let mean = model.new_variable(0, 20)?;
    model.post(TTest::new(observations.clone(), mean, alpha, Relation::Eq)?)?;
    Ok(TTestMeanModel {
        model,
        observations,
        mean,
    })
}
