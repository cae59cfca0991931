//! Random searches over projections.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{project_body, Projection, SymVPolytope};
use crate::random::haar_projection;
use crate::ratio::solver::{vr_projected_with, vr_upper_with, VrOptions, VrResult};
use crate::{rng, tol};

const TAG_SEARCH: u16 = 0x5348;
const TAG_PAIR_P: u16 = 0x5050;
const TAG_PAIR_Q: u16 = 0x5051;

fn first_axes(n: usize, k: usize) -> Result<Projection> {
    Projection::coordinate(n, &(0..k).collect::<Vec<_>>())
}

#[derive(Debug, Clone)]
pub struct SharpnessResult {
    pub best_projection: Projection,
    pub best: VrResult,
    /// `vr(B_1^k, QL)` per trial; trial 0 is the coordinate projection onto
    /// the first `k` axes, the rest are Haar samples.
    pub values: Vec<f64>,
}

/// Minimizes `vr(B_1^k, QL)` over `trials` projections `Q`.
pub fn sharpness_search(l: &SymVPolytope, k: usize, trials: usize, seed: u64, opts: &VrOptions) -> Result<SharpnessResult> {
    let n = l.dim();
    if k == 0 || k > n || k > tol::MAX_EXACT_DIM {
        return Err(Error::Precondition(format!("rank k = {k} must lie in 1..={}", n.min(tol::MAX_EXACT_DIM))));
    }
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let b1 = SymVPolytope::cross_polytope(k);
    let outcomes: Vec<(Projection, VrResult)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let q = if t == 0 {
                first_axes(n, k)?
            } else {
                haar_projection(n, k, &mut rng::stream(seed, rng::tagged(TAG_SEARCH, t as u64)))?
            };
            let r = vr_upper_with(&b1, &project_body(l, &q)?, opts)?;
            Ok((q, r))
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = outcomes.iter().map(|(_, r)| r.value).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("trials >= 1");
    let (best_projection, best) = outcomes.into_iter().nth(best).expect("index in range");
    Ok(SharpnessResult { best_projection, best, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PvrMode {
    /// `sup_L inf_{P,Q} vr(PK, QL)`
    Pvr,
    /// `sup_L inf_{P,Q} vr(PL, QK)`
    Povr,
}

/// Projection pairs for [`pvr_povr_estimate`]: pair 0 is `(P, P)` with `P`
/// the coordinate projection onto the first `k` axes; the rest are
/// independent Haar pairs.
pub fn sample_pairs(n: usize, k: usize, count: usize, seed: u64) -> Result<Vec<(Projection, Projection)>> {
    (0..count)
        .map(|i| {
            if i == 0 {
                let p = first_axes(n, k)?;
                Ok((p.clone(), p))
            } else {
                let p = haar_projection(n, k, &mut rng::stream(seed, rng::tagged(TAG_PAIR_P, i as u64)))?;
                let q = haar_projection(n, k, &mut rng::stream(seed, rng::tagged(TAG_PAIR_Q, i as u64)))?;
                Ok((p, q))
            }
        })
        .collect()
}

/// Heuristic point estimate of `pvr_k(K)` or `povr_k(K)`: the maximum over
/// the candidates `L` of the minimum over the sampled pairs of the computed
/// volume ratio. Each inner value is an upper bound on the true ratio, so
/// the estimate is neither an upper nor a lower bound of the sup–inf.
pub fn pvr_povr_estimate(
    mode: PvrMode,
    k_body: &SymVPolytope,
    k: usize,
    candidates: &[SymVPolytope],
    pair_samples: usize,
    seed: u64,
    opts: &VrOptions,
) -> Result<f64> {
    if pair_samples == 0 {
        return Err(Error::Precondition("at least one projection pair is required".into()));
    }
    let pairs = sample_pairs(k_body.dim(), k, pair_samples, seed)?;
    pvr_povr_with_pairs(mode, k_body, candidates, &pairs, opts)
}

pub fn pvr_povr_with_pairs(
    mode: PvrMode,
    k_body: &SymVPolytope,
    candidates: &[SymVPolytope],
    pairs: &[(Projection, Projection)],
    opts: &VrOptions,
) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::Precondition("candidate list is empty".into()));
    }
    if pairs.is_empty() {
        return Err(Error::Precondition("at least one projection pair is required".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for l in candidates {
        let values: Vec<f64> = pairs
            .par_iter()
            .map(|(p, q)| {
                let r = match mode {
                    PvrMode::Pvr => vr_projected_with(k_body, p, l, q, opts)?,
                    PvrMode::Povr => vr_projected_with(l, p, k_body, q, opts)?,
                };
                Ok(r.value)
            })
            .collect::<Result<_>>()?;
        let inner = values.into_iter().fold(f64::INFINITY, f64::min);
        best = best.max(inner);
    }
    Ok(best)
}
