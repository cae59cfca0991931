//! Close projections of a body in the Löwner sandwich have comparable volumes.

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;

use super::{gaussian_body, Criterion, ExperimentConfig, ExperimentReport, Params};
use crate::error::{Error, Result};
use crate::geometry::{project_body, Projection};
use crate::random::{gaussian_matrix, haar_projection, projection_distance};
use crate::ratio::loewner_normalize;
use crate::rng;
use crate::volume::exact_volume;

pub(super) fn defaults() -> Params {
    Params { dims: Some(vec![4, 6]), trials: Some(1000), ..Params::default() }
}

/// Cayley transform `(I − A/2)⁻¹(I + A/2)` of a skew matrix.
fn cayley(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let half = a * 0.5;
    (&id - &half).lu().solve(&(&id + &half)).expect("I − A/2 is invertible for skew A")
}

/// A projection at distance `target` from `p`, found by bisection along a
/// random one-parameter family of rotations starting at `p`.
fn nearby(p: &Projection, target: f64, g: &mut rng::Rng) -> Result<(Projection, f64)> {
    let n = p.ambient_dim();
    let f = p.frame();
    // Generator mixing range(P) with its orthogonal complement.
    let h = gaussian_matrix(n, f.ncols(), g);
    let out = &h - f * f.tr_mul(&h);
    let skew = &out * f.transpose() - f * out.transpose();
    let skew = &skew / skew.norm();
    let at = |t: f64| -> Result<(Projection, f64)> {
        let q = Projection::from_spanning(&(cayley(&(&skew * t)) * p.frame()))?;
        let d = projection_distance(p, &q)?;
        Ok((q, d))
    };
    let mut hi = 1.0;
    while at(hi)?.1 < target {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Precondition("rotation family never reaches the target distance".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if at(mid)?.1 < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

pub(super) fn run(config: ExperimentConfig) -> Result<ExperimentReport> {
    let p = &config.params;
    let dims = p.dims.clone().ok_or_else(|| Error::param("dims", "missing"))?;
    let trials = Params::get(p.trials, "trials")?;
    if let Some(&bad) = dims.iter().find(|&&n| !(2..=12).contains(&n)) {
        return Err(Error::param("dims", format!("dimension {bad} outside 2..=12")));
    }
    let k_override = p.k;
    let seed = config.seed;

    let mut report = ExperimentReport::new(config, &["n", "k", "trial", "distance", "ratio"]);
    let mut inside = 0usize;
    let mut total = 0usize;
    let mut worst = 1.0f64;
    for &n in &dims {
        let k = k_override.unwrap_or(n / 2).clamp(1, n - 1);
        let radius = 1.0 / (2.0 * (n as f64).sqrt());
        let rows: Vec<Vec<f64>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut g = rng::stream(rng::derive(seed, n as u16, t as u64), 0);
                let body = loewner_normalize(&gaussian_body(n, n + 4, &mut g))?;
                let pp = haar_projection(n, k, &mut g)?;
                let target = radius * (1.0 - g.random::<f64>());
                let (q, d) = nearby(&pp, target, &mut g)?;
                let vp = exact_volume(&project_body(&body, &pp)?)?.root(k);
                let vq = exact_volume(&project_body(&body, &q)?)?.root(k);
                Ok(vec![n as f64, k as f64, t as f64, d, vp / vq])
            })
            .collect::<Result<_>>()?;
        for r in rows {
            total += 1;
            if r[3] <= radius && (0.5..=2.0).contains(&r[4]) {
                inside += 1;
            }
            worst = worst.max(r[4]).max(1.0 / r[4]);
            report.push_row(r);
        }
        report.reference(&format!("distance_limit_n{n}"), radius);
    }
    report.note("tolerance", "exact volumes; the window [1/2, 2] must hold on every trial");
    report.reference("worst_ratio_or_inverse", worst);
    report.check(Criterion::at_least(
        "fraction_in_window",
        "share of trials with ‖P−Q‖ ≤ 1/(2√n) and |PK|^{1/k}/|QK|^{1/k} in [1/2, 2]",
        inside as f64 / total as f64,
        1.0,
    ));
    Ok(report)
}
