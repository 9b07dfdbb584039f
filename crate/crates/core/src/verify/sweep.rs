//! One-parameter families of checks, evaluated in parallel.

use rayon::prelude::*;

use super::{Case, Verifier};
use crate::report::{DeficitReport, SweepPoint};
use crate::surface::Generator;

/// Runs `case` on `base` with `parameter` set to each of `values`.
///
/// Reports come back in the order of `values`; a value that produces an
/// invalid surface yields a report with status `error` rather than aborting
/// the sweep.
pub fn sweep(
    verifier: &Verifier,
    case: Case,
    base: &Generator,
    parameter: &str,
    values: &[f64],
) -> Vec<DeficitReport> {
    values
        .par_iter()
        .map(|&value| {
            let mut report = match base.with_param(parameter, value, verifier.manifold()) {
                Ok(g) => verifier.check(case, &g),
                Err(e) => DeficitReport::failure(case.name(), &e),
            };
            report.sweep = Some(SweepPoint {
                parameter: parameter.to_string(),
                value,
            });
            report
        })
        .collect()
}
