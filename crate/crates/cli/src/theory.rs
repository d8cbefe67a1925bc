use serde_json::json;

use domp::algorithms::Algorithm;
use domp::theory::{
    helper_lemma_suite, highest_rip_order_with_cap, proximity_suite, ric_exact_with_cap,
    ric_monotone_suite, stationarity_suite, theorem_suite, theta_suite, TheoremEnsemble,
};

use crate::args::{RicArgs, Suite, VerifyArgs};
use crate::failure::{CliResult, EXIT_OK, EXIT_VIOLATIONS};
use crate::output::{emit_json, load_matrix};

pub fn ric(args: &RicArgs) -> CliResult<()> {
    let a = load_matrix(&args.matrix)?;
    let highest = highest_rip_order_with_cap(&a, args.cap)?;
    let orders = match &args.orders {
        Some(o) => o.clone(),
        None => (1..=highest.max(1).min(a.cols())).collect(),
    };
    let estimates = orders
        .iter()
        .map(|&q| ric_exact_with_cap(&a, q, args.cap))
        .collect::<domp::Result<Vec<_>>>()?;
    emit_json(
        args.output.as_ref(),
        &json!({
            "rows": a.rows(),
            "cols": a.cols(),
            "highest_rip_order": highest,
            "estimates": estimates,
        }),
    )
}

/// Runs the suite and returns the exit code: 0 when nothing was violated.
pub fn verify(args: &VerifyArgs) -> CliResult<u8> {
    let (t, seed) = (args.trials, args.seed);
    let theorem = |alg| {
        let ensemble = TheoremEnsemble {
            m: args.m,
            n: args.n,
            k: args.k,
            c: args.c,
            gamma: args.gamma,
            ..TheoremEnsemble::default()
        };
        theorem_suite(alg, &ensemble, t, seed)
    };
    let records = match args.suite {
        Suite::Proximity => vec![proximity_suite(t, seed)?],
        Suite::Stationarity => vec![stationarity_suite(t, seed)?],
        Suite::HelperLemmas => helper_lemma_suite(t, seed)?,
        Suite::TheoremDomp => vec![theorem(Algorithm::Domp)?],
        Suite::TheoremEdomp => vec![theorem(Algorithm::Edomp)?],
        Suite::Theta => vec![theta_suite(t, seed)?],
        Suite::RicMonotone => vec![ric_monotone_suite(t, seed)?],
    };
    let violations: usize = records.iter().map(|r| r.violations).sum();
    let all_inconclusive = records
        .iter()
        .all(|r| r.checks == 0 && r.inconclusive == r.instances);
    let status = if violations > 0 {
        "violated"
    } else if all_inconclusive {
        "inconclusive"
    } else {
        "passed"
    };
    emit_json(
        args.output.as_ref(),
        &json!({
            "status": status,
            "violations": violations,
            "records": records,
        }),
    )?;
    Ok(if violations == 0 {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    })
}
