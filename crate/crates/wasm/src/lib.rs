//! Browser bindings for `www/index.html`. Every export takes plain numbers
//! and strings and returns a JSON string; failures come back as
//! `{"error": "..."}`.

use std::time::Duration;

use serde_json::{json, Value};
use statcp::constraints::{check_ground_ks_nonparametric_with, KsOptions, TTest};
use statcp::models::{
    build_inspection_model, check_plan, emit_cdf_plot_data, InspectionHeuristic, InspectionParams,
    PlotReference, Rate,
};
use statcp::solver::{solve, Model, PropagationResult, ValueSelect};
use statcp::stats::{
    ks_two_sample_with, mean_feasible_interval, Exponential, KsTest, Relation, SupMode,
};
use wasm_bindgen::prelude::*;

fn parse_sample(text: &str) -> Result<Vec<i64>, String> {
    let values: Result<Vec<i64>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>())
        .collect();
    let values = values.map_err(|e| format!("bad sample: {e}"))?;
    if values.is_empty() {
        return Err("sample is empty".into());
    }
    Ok(values)
}

fn to_f64(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

fn relation(name: &str) -> Result<Relation, String> {
    match name {
        "eq" => Ok(Relation::Eq),
        "ne" => Ok(Relation::Ne),
        "le" => Ok(Relation::Le),
        "ge" => Ok(Relation::Ge),
        _ => Err(format!("unknown relation {name}")),
    }
}

fn sup_mode(name: &str) -> Result<SupMode, String> {
    match name {
        "exact" => Ok(SupMode::Exact),
        "pointwise" => Ok(SupMode::Pointwise),
        "envelope" => Ok(SupMode::Envelope),
        _ => Err(format!("unknown sup mode {name}")),
    }
}

fn finish(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Means in `lo..=hi` that a one-sample t-test does not reject.
pub fn mean_domain_json(
    sample: &str,
    alpha: f64,
    rel: &str,
    lo: i64,
    hi: i64,
) -> Result<Value, String> {
    let values = parse_sample(sample)?;
    let rel = relation(rel)?;
    let mut m = Model::new();
    let obs = values.iter().map(|&v| m.new_constant(v)).collect();
    let mean = m.new_variable(lo, hi).map_err(|e| e.to_string())?;
    m.post(TTest::new(obs, mean, alpha, rel).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let status = m.propagate_fixpoint();
    let domain = if status == PropagationResult::Failed {
        vec![]
    } else {
        m.domain(mean).to_vec()
    };
    let interval = mean_feasible_interval(&to_f64(&values), alpha, rel).ok();
    Ok(json!({
        "domain": domain,
        "interval": interval,
        "reason": m.last_failure(),
    }))
}

/// Two-sample KS verdict and plot rows of `b` against `a`.
pub fn ks_compare_json(a: &str, b: &str, alpha: f64, sup: &str) -> Result<Value, String> {
    let a = to_f64(&parse_sample(a)?);
    let b = to_f64(&parse_sample(b)?);
    let options = KsOptions {
        sup: sup_mode(sup)?,
        ..KsOptions::default()
    };
    let s = ks_two_sample_with(&a, &b, options.sup).map_err(|e| e.to_string())?;
    let feasible = check_ground_ks_nonparametric_with(&a, &b, alpha, Relation::Eq, &options)
        .map_err(|e| e.to_string())?;
    let test =
        KsTest::two_sample(options.null, a.len(), b.len(), alpha).map_err(|e| e.to_string())?;
    let rows =
        emit_cdf_plot_data(&b, PlotReference::Sample(&a), alpha).map_err(|e| e.to_string())?;
    Ok(json!({
        "statistic": s,
        "p_value": test.p_value(s.d),
        "feasible": feasible,
        "rows": rows,
    }))
}

/// Solves an inspection instance; `seed == 0` keeps the default value order.
#[allow(clippy::too_many_arguments)]
pub fn inspect_json(
    units: usize,
    inspections: usize,
    horizon: i64,
    max_gap: i64,
    capacity: i64,
    rate: &str,
    alpha: f64,
    seed: u64,
    time_limit_ms: u32,
) -> Result<Value, String> {
    let params = InspectionParams {
        units,
        inspections,
        horizon,
        max_gap,
        capacity,
        rate: rate.parse::<Rate>().map_err(|e| e.to_string())?,
        alpha,
        ..InspectionParams::default()
    };
    let mut m = build_inspection_model(params).map_err(|e| e.to_string())?;
    let mut config = m.search_config(InspectionHeuristic::default(), None);
    if seed != 0 {
        config.value_select = ValueSelect::Shuffle(seed);
    }
    config.time_limit = Some(Duration::from_millis(time_limit_ms.max(1) as u64));
    let r = solve(&mut m.model, &config).map_err(|e| e.to_string())?;
    let stats = json!({
        "nodes": r.stats.nodes,
        "failures": r.stats.failures,
        "ms": r.stats.wall.as_secs_f64() * 1e3,
    });
    let Some(solution) = &r.solution else {
        return Ok(json!({
            "found": false,
            "status": r.status,
            "reason": m.model.last_failure(),
            "stats": stats,
        }));
    };
    let plan = m.plan(solution);
    let check = check_plan(&plan, &params);
    let gaps = plan.intervals();
    let reference = Exponential::new(params.rate.to_f64()).map_err(|e| e.to_string())?;
    let rows = match gaps.first() {
        Some(g) if !g.is_empty() => {
            emit_cdf_plot_data(&to_f64(g), PlotReference::Distribution(&reference), alpha)
                .map_err(|e| e.to_string())?
        }
        _ => vec![],
    };
    Ok(json!({
        "found": true,
        "plan": plan,
        "intervals": gaps,
        "check": check,
        "rows": rows,
        "stats": stats,
    }))
}

#[wasm_bindgen]
pub fn mean_domain(sample: &str, alpha: f64, rel: &str, lo: i32, hi: i32) -> String {
    finish(mean_domain_json(sample, alpha, rel, lo.into(), hi.into()))
}

#[wasm_bindgen]
pub fn ks_compare(a: &str, b: &str, alpha: f64, sup: &str) -> String {
    finish(ks_compare_json(a, b, alpha, sup))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn inspect(
    units: u32,
    inspections: u32,
    horizon: i32,
    max_gap: i32,
    capacity: i32,
    rate: &str,
    alpha: f64,
    seed: u32,
    time_limit_ms: u32,
) -> String {
    finish(inspect_json(
        units as usize,
        inspections as usize,
        horizon.into(),
        max_gap.into(),
        capacity.into(),
        rate,
        alpha,
        seed.into(),
        time_limit_ms,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_domain_matches_cli_example() {
        let v = mean_domain_json("8,14,6,12,12,9,10,9,10,5", 0.05, "eq", 0, 20).unwrap();
        assert_eq!(v["domain"], json!([8, 9, 10, 11]));
    }

    #[test]
    fn bad_input_is_reported() {
        let out = mean_domain("8, x", 0.05, "eq", 0, 20);
        assert!(out.contains("error"));
        let out = ks_compare("1,2", "3", 0.05, "nearest");
        assert!(out.contains("unknown sup mode"));
    }

    #[test]
    fn ks_compare_verdicts() {
        let o1 = "9,10,9,6,11,8,10,11,14,11";
        let ok = ks_compare_json(o1, "5,5,9,9,9,9,9,10,10,11", 0.05, "exact").unwrap();
        let bad = ks_compare_json(o1, "5,5,9,9,9,9,9,9,9,9", 0.05, "exact").unwrap();
        assert_eq!(ok["feasible"], true);
        assert_eq!(bad["feasible"], false);
        assert!(!ok["rows"].as_array().unwrap().is_empty());
    }

    #[test]
    fn inspect_small_instance() {
        let v = inspect_json(4, 10, 150, 15, 2, "1/5", 0.1, 0, 5000).unwrap();
        assert_eq!(v["found"], true);
        assert_eq!(v["check"]["ok"], true);
        let v = inspect_json(4, 10, 150, 15, 0, "1/5", 0.1, 0, 5000).unwrap();
        assert_eq!(v["found"], false);
    }
}
