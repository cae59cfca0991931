//! Monte Carlo check of the small-ball probability bound for a fixed
//! volume-preserving map between projections.

use rayon::prelude::*;

use super::{Criterion, ExperimentConfig, ExperimentReport, Params};
use crate::error::{Error, Result};
use crate::geometry::{project_body, FacetGauge, LinearMap, Projection, SymVPolytope};
use crate::random::{gaussian_matrix, haar_projection};
use crate::rng;

const TRIAL_BLOCK: usize = 256;

pub(super) fn defaults() -> Params {
    Params {
        n: Some(3),
        k: Some(2),
        big_n: Some(3),
        trials: Some(10_000),
        target_bound: Some(0.45),
        ..Params::default()
    }
}

pub(super) fn run(config: ExperimentConfig) -> Result<ExperimentReport> {
    let p = &config.params;
    let n = Params::get(p.n, "n")?;
    let k = Params::get(p.k, "k")?;
    let big_n = Params::get(p.big_n, "N")?;
    let trials = Params::get(p.trials, "trials")?;
    let target = Params::get(p.target_bound, "target_bound")?;
    if k > n || n > 6 {
        return Err(Error::param("k", "need k <= n <= 6"));
    }
    if target >= 1.0 {
        return Err(Error::param("target_bound", "must be below 1"));
    }
    let seed = config.seed;
    let mut setup = rng::stream(seed, 0);
    let k_body = SymVPolytope::cross_polytope(n);
    let q0 = Projection::coordinate(n, &(0..k).collect::<Vec<_>>())?;
    let q1 = haar_projection(n, k, &mut setup)?;
    let t0 = loop {
        if let Ok(t) = LinearMap::volume_preserving(gaussian_matrix(k, k, &mut setup)) {
            break t;
        }
    };
    let gauge = FacetGauge::new(&project_body(&k_body, &q1)?)?;
    let kn = (k * big_n) as f64;
    // (A/√2π)^{kN}·|Q₁K|^N = target
    let a = std::f64::consts::TAU.sqrt() * ((target.ln() - big_n as f64 * gauge.volume().ln()) / kn).exp();
    let bound = (kn * (a / std::f64::consts::TAU.sqrt()).ln() + big_n as f64 * gauge.volume().ln()).exp();
    let map = t0.matrix() * q0.frame().transpose();

    let blocks = trials.div_ceil(TRIAL_BLOCK);
    let rows: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut g = rng::stream(seed, rng::tagged(41, b as u64));
            let len = TRIAL_BLOCK.min(trials - b * TRIAL_BLOCK);
            (0..len)
                .map(|j| {
                    let img = &map * gaussian_matrix(n, big_n, &mut g);
                    let worst = img.column_iter().map(|c| gauge.norm(c.as_slice())).fold(0.0, f64::max);
                    vec![(b * TRIAL_BLOCK + j) as f64, worst, f64::from(u8::from(worst <= a))]
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let hits = rows.iter().filter(|r| r[2] == 1.0).count();
    let p_hat = hits as f64 / trials as f64;
    let stderr = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();

    let mut report = ExperimentReport::new(config, &["trial", "max_norm", "hit"]);
    for r in rows {
        report.push_row(r);
    }
    report.reference("A", a);
    report.reference("bound", bound);
    report.reference("p_hat", p_hat);
    report.reference("stderr", stderr);
    report.reference("det_t0", t0.det());
    report.note("tolerance", "empirical probability may exceed the bound by at most three binomial standard errors");
    report.check(Criterion::at_most(
        "probability",
        "empirical P{every ‖T₀Q₀g_i‖ in Q₁K is at most A} against bound + 3·stderr",
        p_hat,
        bound + 3.0 * stderr,
    ));
    Ok(report)
}
