//! Random search for projections of `L` close to a low-dimensional cross-polytope.

use super::{Criterion, ExperimentConfig, ExperimentReport, Params};
use crate::error::{Error, Result};
use crate::geometry::SymVPolytope;
use crate::random::gluskin_polytope;
use crate::ratio::{regime_reference, sharpness_reference, sharpness_search, trivial_bound, VrOptions};
use crate::rng;
use crate::tol::MAX_EXACT_DIM;

const BODIES: [&str; 2] = ["cross-polytope", "gaussian-polytope"];

pub(super) fn defaults() -> Params {
    Params { n: Some(16), ks: Some(vec![1, 2, 3, 4]), trials: Some(20), restarts: Some(8), c: Some(1.0), ..Params::default() }
}

pub(super) fn run(config: ExperimentConfig) -> Result<ExperimentReport> {
    let p = &config.params;
    let n = Params::get(p.n, "n")?;
    let trials = Params::get(p.trials, "trials")?;
    let restarts = Params::get(p.restarts, "restarts")?;
    let c = Params::get(p.c, "c")?;
    let ks = p.ks.clone().ok_or_else(|| Error::param("ks", "missing"))?;
    if let Some(&bad) = ks.iter().find(|&&k| k > n.min(MAX_EXACT_DIM)) {
        return Err(Error::param("ks", format!("rank {bad} exceeds min(n, {MAX_EXACT_DIM})")));
    }
    let big_n = p.big_n.unwrap_or(n * (n as f64).ln().ceil().max(1.0) as usize);
    let seed = config.seed;
    let bodies = [SymVPolytope::cross_polytope(n), gluskin_polytope(n, big_n, seed)?.into_body()];

    let mut report = ExperimentReport::new(config, &["body", "k", "trial", "vr"]);
    let mut lowest = f64::INFINITY;
    let mut coordinate_worst = 0.0f64;
    for (b, l) in bodies.iter().enumerate() {
        for &k in &ks {
            let opts = VrOptions::new(restarts, rng::derive(seed, 7, (b * 64 + k) as u64));
            let r = sharpness_search(l, k, trials, rng::derive(seed, 8, (b * 64 + k) as u64), &opts)?;
            for (t, v) in r.values.iter().enumerate() {
                lowest = lowest.min(*v);
                report.push_row(vec![b as f64, k as f64, t as f64, *v]);
            }
            if b == 0 {
                coordinate_worst = coordinate_worst.max(r.values[0]);
            }
            let name = BODIES[b];
            report.reference(&format!("best_{name}_k{k}"), r.best.value);
            report.reference(&format!("sharpness_reference_k{k}"), sharpness_reference(n, k, c));
            report.reference(&format!("regime_reference_k{k}"), regime_reference(n, k, c));
            report.reference(&format!("trivial_bound_k{k}"), trivial_bound(k));
            report.reference(&format!("gap_{name}_k{k}"), r.best.value / sharpness_reference(n, k, c));
        }
    }
    report.note("tolerance", "values are certified upper bounds; the reference curves are reported, not asserted");
    report.check(Criterion::at_least("lowest_value", "every computed vr is at least 1", lowest, 1.0 - 1e-9));
    report.check(Criterion::at_most(
        "coordinate_case",
        "vr(B_1^k, Q B_1^n) at the coordinate projection",
        coordinate_worst,
        1.0 + 1e-2,
    ));
    Ok(report)
}
