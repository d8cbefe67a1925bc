use serde_json::{json, Map, Value};

use domp::algorithms::{run, AlgorithmConfig, AlgorithmReport};
use domp::linalg::max_abs;

use crate::args::RecoverArgs;
use crate::failure::{CliResult, Failure};
use crate::output::{emit_json, load_matrix, load_vector};

/// Nonzero entries as `"index": value` with 1-based indices in ascending order.
pub fn sparse_estimate(report: &AlgorithmReport) -> Value {
    let mut map = Map::new();
    for (i, v) in report.estimate().iter().enumerate() {
        if *v != 0.0 {
            map.insert((i + 1).to_string(), json!(v));
        }
    }
    Value::Object(map)
}

pub fn report_json(config: &AlgorithmConfig, report: &AlgorithmReport) -> Value {
    let state = &report.final_state;
    let mut out = json!({
        "algorithm": config.algorithm.name(),
        "sparsity": config.sparsity,
        "stopping": config.effective_stopping().to_string(),
        "iterations": report.iterations,
        "termination": report.termination.name(),
        "estimate": sparse_estimate(report),
        "support": state.support.to_one_based(),
        "residual_norm": state.residual_norm,
        "gradient_max": max_abs(&state.gradient),
        "residual_trace": report.trace.iter().map(|t| t.residual_norm).collect::<Vec<_>>(),
        "relative_error": report.relative_error,
        "success": report.success,
        "warnings": report.warnings,
        "wall_time_s": report.wall_time.as_secs_f64(),
    });
    if config.algorithm.uses_gamma() {
        out["gamma"] = json!(config.gamma);
    }
    out
}

pub fn recover(args: &RecoverArgs) -> CliResult<()> {
    let mut config = AlgorithmConfig::new(args.algo, args.sparsity)
        .with_gamma(args.gamma)
        .with_group_size(args.group_size)
        .with_reset_support(args.reset_support);
    if let Some(rule) = args.stop {
        config = config.with_stopping(rule);
    }
    if let Some(cap) = args.max_iter {
        config = config.with_iteration_cap(cap);
    }
    if let Some(t) = args.success_threshold {
        config = config.with_success_threshold(t);
    }
    config.validate()?;

    let a = load_matrix(&args.matrix)?;
    let y = load_vector(&args.measurements)?;
    let truth = args.truth.as_deref().map(load_vector).transpose()?;
    if y.len() != a.rows() {
        return Err(Failure::data(format!(
            "{} has {} measurements but the matrix has {} rows",
            args.measurements.display(),
            y.len(),
            a.rows()
        )));
    }
    if let Some(t) = &truth {
        if t.len() != a.cols() {
            return Err(Failure::data(format!(
                "true signal has length {} but the matrix has {} columns",
                t.len(),
                a.cols()
            )));
        }
    }

    let report = run(&a, &y, truth.as_ref(), &config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    emit_json(args.output.as_ref(), &report_json(&config, &report))
}
