//! Gaussian norm tails and the Ω₀ event.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{Criterion, ExperimentConfig, ExperimentReport, Params};
use crate::error::Result;
use crate::random::{gluskin_polytope, lower_tail_bound, omega0_probability_bound, tail_bound};
use crate::rng;

const BLOCK: usize = 4096;
const TAG_DRAWS: u16 = 1;
const TAG_OMEGA: u16 = 2;

pub(super) fn defaults() -> Params {
    Params { n: Some(64), big_n: Some(128), samples: Some(100_000), trials: Some(200), ..Params::default() }
}

pub(super) fn run(config: ExperimentConfig) -> Result<ExperimentReport> {
    let p = &config.params;
    let n = Params::get(p.n, "n")?;
    let big_n = Params::get(p.big_n, "N")?;
    let samples = Params::get(p.samples, "samples")?;
    let trials = Params::get(p.trials, "trials")?;
    let seed = config.seed;
    let rn = (n as f64).sqrt();
    let (lo, hi) = (rn / 4.0, 2.0 * rn);

    let blocks = samples.div_ceil(BLOCK);
    let counts: Vec<(u64, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut g = rng::stream(seed, rng::tagged(TAG_DRAWS, b as u64));
            let len = BLOCK.min(samples - b * BLOCK);
            let (mut upper, mut lower) = (0, 0);
            for _ in 0..len {
                let sq: f64 = (0..n)
                    .map(|_| {
                        let x: f64 = StandardNormal.sample(&mut g);
                        x * x
                    })
                    .sum();
                let norm = sq.sqrt();
                upper += u64::from(norm >= hi);
                lower += u64::from(norm <= lo);
            }
            (upper, lower)
        })
        .collect();
    let upper: u64 = counts.iter().map(|c| c.0).sum();
    let lower: u64 = counts.iter().map(|c| c.1).sum();

    let omega: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = gluskin_polytope(n, big_n, rng::derive(seed, TAG_OMEGA, t as u64))?;
            let norms: Vec<f64> = s.gaussians().column_iter().map(|c| c.norm()).collect();
            let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
            let max = norms.iter().copied().fold(0.0, f64::max);
            Ok(vec![t as f64, min, max, f64::from(u8::from(s.omega0))])
        })
        .collect::<Result<_>>()?;
    let hits = omega.iter().filter(|r| r[3] == 1.0).count();
    let freq = hits as f64 / trials as f64;

    let upper_ref = tail_bound(n, hi)?;
    let omega_ref = omega0_probability_bound(n, big_n);
    let mut report = ExperimentReport::new(config, &["trial", "min_norm", "max_norm", "omega0"]);
    for row in omega {
        report.push_row(row);
    }
    report.reference("upper_tail_bound", upper_ref);
    report.reference("omega0_probability_bound", omega_ref);
    if let Ok(b) = lower_tail_bound(n) {
        report.reference("lower_tail_bound", b);
    }
    report.reference("upper_tail_frequency", upper as f64 / samples as f64);
    report.reference("lower_tail_frequency", lower as f64 / samples as f64);
    report.note(
        "tolerance",
        "tail counts are exact; at these bounds the expected number of exceedances in the sample is far below one, so any exceedance fails",
    );
    report.check(Criterion::at_most(
        "upper_tail_count",
        "draws with ‖g‖ ≥ 2√n",
        upper as f64,
        0.0,
    ));
    report.check(Criterion::at_most("lower_tail_count", "draws with ‖g‖ ≤ √n/4", lower as f64, 0.0));
    report.check(Criterion::at_least(
        "omega0_frequency",
        "fraction of samples in Ω₀ against 1 − 2N·exp(−n/4)",
        freq,
        omega_ref,
    ));
    Ok(report)
}
