//! Volume products and the difference-body identity for simplices.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{gaussian_body, Criterion, ExperimentConfig, ExperimentReport, Params};
use crate::error::{Error, Result};
use crate::geometry::{difference_body, GeneralVPolytope, SymVPolytope};
use crate::random::gaussian_matrix;
use crate::rng;
use crate::volume::{exact_volume, santalo_gap};

pub(super) fn defaults() -> Params {
    Params { dims: Some(vec![2, 3]), trials: Some(100), samples: Some(10), ..Params::default() }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub(super) fn run(config: ExperimentConfig) -> Result<ExperimentReport> {
    let p = &config.params;
    let dims = p.dims.clone().ok_or_else(|| Error::param("dims", "missing"))?;
    let trials = Params::get(p.trials, "trials")?;
    let simplices = Params::get(p.samples, "samples")?;
    if let Some(&bad) = dims.iter().find(|&&n| !(2..=4).contains(&n)) {
        return Err(Error::param("dims", format!("dimension {bad} outside 2..=4")));
    }
    let seed = config.seed;

    let products: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let n = dims[t % dims.len()];
            let mut g = rng::stream(rng::derive(seed, 9, t as u64), 0);
            let (product, reference) = santalo_gap(&gaussian_body(n, n + 1 + t % 5, &mut g))?;
            Ok(vec![0.0, n as f64, t as f64, product, reference, product / reference])
        })
        .collect::<Result<_>>()?;
    let rs: Vec<Vec<f64>> = dims
        .iter()
        .flat_map(|&n| (0..simplices).map(move |i| (n, i)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(n, i)| {
            let mut g = rng::stream(rng::derive(seed, 10, (n * simplices + i) as u64), 0);
            let w = loop {
                let pts: DMatrix<f64> = gaussian_matrix(n, n + 1, &mut g);
                if let Ok(w) = GeneralVPolytope::from_columns(pts) {
                    break w;
                }
            };
            let vw = exact_volume(&w)?.value;
            let vd = exact_volume(&difference_body(&w)?)?.value;
            let want = binomial(2 * n, n) * vw;
            Ok(vec![1.0, n as f64, i as f64, vd, want, vd / want])
        })
        .collect::<Result<_>>()?;

    let disk = santalo_gap(&SymVPolytope::regular_polygon(64)?)?;
    let above = products.iter().map(|r| r[5]).fold(0.0, f64::max);
    let floor = products.iter().map(|r| r[5]).fold(f64::INFINITY, f64::min);
    let rs_err = rs.iter().map(|r| (r[5] - 1.0).abs()).fold(0.0, f64::max);
    if rs.is_empty() {
        return Err(Error::param("dims", "no simplices to test"));
    }

    let mut report = ExperimentReport::new(config, &["kind", "n", "case", "value", "reference", "ratio"]);
    for r in products.into_iter().chain(rs) {
        report.push_row(r);
    }
    report.reference("disk_product", disk.0);
    report.reference("disk_reference", disk.1);
    report.note("kind", "0 = volume product against |B_2^n|^{2/n}; 1 = |W−W| against binom(2n, n)·|W|");
    report.note("tolerance", "exact volumes throughout");
    report.check(Criterion::at_most(
        "santalo_upper",
        "largest |K|^{1/n}|K°|^{1/n} / |B_2^n|^{2/n}",
        above,
        1.0 + 1e-6,
    ));
    report.check(Criterion::at_least("santalo_floor", "smallest volume-product ratio", floor, 0.5));
    report.check(Criterion::at_least(
        "disk_equality",
        "volume-product ratio of the 64-gon",
        disk.0 / disk.1,
        0.98,
    ));
    report.check(Criterion::at_most(
        "rogers_shephard",
        "largest relative error of |W−W| = binom(2n, n)·|W| over simplices",
        rs_err,
        1e-6,
    ));
    Ok(report)
}
