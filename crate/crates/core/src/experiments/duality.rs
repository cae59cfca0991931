//! Projection of the polar against the polar of the section.

use rayon::prelude::*;

use super::{gaussian_body, Criterion, ExperimentConfig, ExperimentReport, Params};
use crate::error::{Error, Result};
use crate::geometry::{minkowski_norm, project_body, support, FacetGauge};
use crate::random::{gaussian_vector, haar_projection};
use crate::rng;

pub(super) fn defaults() -> Params {
    Params { dims: Some(vec![2, 3, 4]), trials: Some(50), samples: Some(1000), tolerance: Some(1e-6), ..Params::default() }
}

pub(super) fn run(config: ExperimentConfig) -> Result<ExperimentReport> {
    let p = &config.params;
    let dims = p.dims.clone().ok_or_else(|| Error::param("dims", "missing"))?;
    let trials = Params::get(p.trials, "trials")?;
    let directions = Params::get(p.samples, "samples")?;
    let tolerance = Params::get(p.tolerance, "tolerance")?;
    if let Some(&bad) = dims.iter().find(|&&n| !(2..=4).contains(&n)) {
        return Err(Error::param("dims", format!("dimension {bad} outside 2..=4")));
    }
    let seed = config.seed;
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let n = dims[t % dims.len()];
            let mut g = rng::stream(rng::derive(seed, 8, t as u64), 0);
            let k = 1 + t / dims.len() % (n - 1);
            let body = gaussian_body(n, n + 3, &mut g);
            let e = haar_projection(n, k, &mut g)?;
            let projected_polar = project_body(&FacetGauge::new(&body)?.polar_body(), &e)?;
            let mut worst = 0.0f64;
            for _ in 0..directions {
                let u = gaussian_vector(k, &mut g).normalize();
                let section_gauge = minkowski_norm(&body, &(e.frame() * &u))?;
                let h = support(&projected_polar, &u)?;
                worst = worst.max((h - section_gauge).abs() / section_gauge.abs().max(f64::MIN_POSITIVE));
            }
            Ok(vec![t as f64, n as f64, k as f64, worst])
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    let mut report = ExperimentReport::new(config, &["case", "n", "k", "max_relative_error"]);
    for r in rows {
        report.push_row(r);
    }
    report.note("tolerance", "relative agreement of the two support functions on every sampled direction");
    report.check(Criterion::at_most(
        "max_relative_error",
        "support of P_E(K°) against the gauge of E ∩ K",
        worst,
        tolerance,
    ));
    Ok(report)
}
