//! Volume of an absolute convex hull against its Gaussian-type bound.

use rand::Rng as _;
use rayon::prelude::*;

use super::{Criterion, ExperimentConfig, ExperimentReport, Params};
use crate::error::{Error, Result};
use crate::geometry::SymVPolytope;
use crate::random::gaussian_matrix;
use crate::rng;
use crate::volume::{absconv_volume_bound, exact_volume, BoundInputs};

pub(super) fn defaults() -> Params {
    Params { dims: Some(vec![2, 3]), trials: Some(200), ..Params::default() }
}

pub(super) fn run(config: ExperimentConfig) -> Result<ExperimentReport> {
    let p = &config.params;
    let dims = p.dims.clone().ok_or_else(|| Error::param("dims", "missing"))?;
    let trials = Params::get(p.trials, "trials")?;
    if let Some(&bad) = dims.iter().find(|&&n| n > 6) {
        return Err(Error::param("dims", format!("dimension {bad} exceeds the exact-volume limit 6")));
    }
    let seed = config.seed;
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let n = dims[t % dims.len()];
            let mut g = rng::stream(rng::derive(seed, 3, t as u64), 0);
            let count = n + g.random_range(0..=6);
            let mut w = gaussian_matrix(n, count, &mut g);
            for mut c in w.column_iter_mut() {
                c *= (2.0 * g.random::<f64>() - 1.0).exp2();
            }
            let body = loop {
                match SymVPolytope::from_columns(w.clone()) {
                    Ok(b) => break b,
                    Err(_) => w = gaussian_matrix(n, count, &mut g),
                }
            };
            // Half the instances sit at the smallest admissible α.
            let stretch = if t % 2 == 0 { 1.0 } else { 1.0 + 3.0 * g.random::<f64>() };
            let alpha = std::f64::consts::SQRT_2 * body.max_generator_norm() * stretch;
            let bound = absconv_volume_bound(&BoundInputs::from_body(&body, alpha)?);
            let root = exact_volume(&body)?.root(n);
            Ok(vec![n as f64, count as f64, alpha, root, bound, root / bound])
        })
        .collect::<Result<_>>()?;
    let ok = rows.iter().filter(|r| r[3] <= r[4]).count();
    let mut report = ExperimentReport::new(config, &["n", "generators", "alpha", "volume_root", "bound", "ratio"]);
    for r in rows {
        report.push_row(r);
    }
    report.note("tolerance", "exact volumes; the bound must hold on every instance");
    report.check(Criterion::at_least(
        "fraction_below_bound",
        "share of instances with |absconv{w_i}|^{1/n} at most the bound",
        ok as f64 / trials as f64,
        1.0,
    ));
    Ok(report)
}
