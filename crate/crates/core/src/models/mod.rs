//! The built-in example models, their ground-checking oracles and plot data.

mod inspection;
mod ks_sets;
mod plot;
mod ttest_mean;

pub use inspection::{
    build_inspection_model, build_inspection_model_with, check_plan, check_plan_with,
    InspectionHeuristic, InspectionModel, InspectionParams, InspectionPlan, PlanCheck, Rate,
    Violation,
};
pub use ks_sets::{
    build_ks_sets_model, enumerate_ks_sets_ground, enumerate_ks_sets_search, ks_sets_assignments,
    KsSetsCounts, KsSetsModel, KS_SETS_O1, KS_SETS_O2_FIXED, KS_SETS_O2_FREE, KS_SETS_O2_VALUES,
};
pub use plot::{cdf_rows_to_csv, emit_cdf_plot_data, CdfRow, PlotReference};
pub use ttest_mean::{build_ttest_mean_model, TTestMeanModel, TTEST_SAMPLE};
