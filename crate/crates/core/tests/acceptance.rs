//! Acceptance suite: one line per criterion, all run sequentially so that the
//! wall-clock limits are measured without competing test threads.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use vrlab::experiments::{run_experiment, ExperimentConfig, ExperimentReport, EXPERIMENTS};
use vrlab::geometry::{difference_body, FacetGauge, GeneralVPolytope, SymVPolytope};
use vrlab::random::gaussian_matrix;
use vrlab::ratio::vr_upper;
use vrlab::rng;
use vrlab::volume::{exact_volume, mc_volume};

const FITTED_QZN: f64 = 3.638828158295814;
const C_HAT_CUBE: f64 = 1.1378697268056825;
const C_HAT_CROSS: f64 = 1.0662819053236743;
const LOCK_TOLERANCE: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

struct Suite {
    pool: rayon::ThreadPool,
    reports: BTreeMap<String, ExperimentReport>,
    lines: Vec<(usize, String, bool)>,
}

impl Suite {
    fn run(&mut self, id: usize, name: &str, limit: Duration, f: impl FnOnce(&mut Self) -> Outcome) {
        let start = Instant::now();
        let out = f(self);
        let took = start.elapsed();
        let pass = out.pass && took <= limit;
        let line = format!(
            "{} [{id:2}] {name}: {} ({:.2} s, limit {:.0} s)",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            limit.as_secs_f64()
        );
        println!("{line}");
        self.lines.push((id, line, pass));
    }

    fn experiment(&mut self, name: &str) -> ExperimentReport {
        if let Some(r) = self.reports.get(name) {
            return r.clone();
        }
        let config = ExperimentConfig::new(name, 0);
        let r = self.pool.install(|| run_experiment(&config)).expect("experiment runs");
        self.reports.insert(name.to_string(), r.clone());
        r
    }
}

fn observed(r: &ExperimentReport, criterion: &str) -> f64 {
    r.criterion(criterion).unwrap_or_else(|| panic!("criterion {criterion} missing")).observed
}

fn criteria_line(r: &ExperimentReport) -> String {
    r.criteria
        .iter()
        .map(|c| format!("{} = {:.6e} {} {:.6e}", c.name, c.observed, c.relation, c.threshold))
        .collect::<Vec<_>>()
        .join("; ")
}

fn random_body(dim: usize, count: usize, seed: u64) -> SymVPolytope {
    let mut g = rng::stream(seed, 0);
    loop {
        if let Ok(b) = SymVPolytope::from_columns(gaussian_matrix(dim, count, &mut g)) {
            return b;
        }
    }
}

fn well_conditioned(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut g = rng::stream(seed, 1);
    loop {
        let m = DMatrix::identity(dim, dim) + gaussian_matrix(dim, dim, &mut g) * 0.5;
        let sv = m.singular_values();
        if sv.max() / sv.min() < 4.0 {
            return m;
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn exact_volume_criterion(_: &mut Suite) -> Outcome {
    let mut worst = 0.0f64;
    let mut factorial = 1.0;
    for k in 1..=6 {
        factorial *= k as f64;
        let want = 2f64.powi(k as i32) / factorial;
        let got = exact_volume(&SymVPolytope::cross_polytope(k)).unwrap().value;
        worst = worst.max((got / want - 1.0).abs());
    }
    Outcome { pass: worst <= 1e-9, detail: format!("max relative error over k = 1..6 is {worst:.3e} (≤ 1e-9)") }
}

fn mc_criterion(_: &mut Suite) -> Outcome {
    let mut within = 0;
    for i in 0..20u64 {
        let k = random_body(3, 3 + (i as usize % 5), 100 + i);
        let exact = exact_volume(&k).unwrap().value;
        let g = FacetGauge::new(&k).unwrap();
        let est = mc_volume(&g, k.max_generator_norm(), 1_000_000, 200 + i).unwrap();
        if (est.value - exact).abs() <= 3.0 * est.stderr {
            within += 1;
        }
    }
    Outcome { pass: within >= 19, detail: format!("{within}/20 estimates within 3 stderr (≥ 19)") }
}

fn santalo_criterion(s: &mut Suite) -> Outcome {
    let r = s.experiment("santalo-rs");
    let upper = observed(&r, "santalo_upper");
    let disk = observed(&r, "disk_equality");
    let pass = r.criterion("santalo_upper").unwrap().pass && r.criterion("disk_equality").unwrap().pass;
    Outcome {
        pass,
        detail: format!("max product ratio {upper:.6} (≤ 1 + 1e-6), 64-gon ratio {disk:.6} (within 2% of 1)"),
    }
}

fn rogers_shephard_criterion(_: &mut Suite) -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=3 {
        let mut simplices = vec![GeneralVPolytope::standard_simplex(n)];
        let mut g = rng::stream(300 + n as u64, 0);
        while simplices.len() < 6 {
            if let Ok(w) = GeneralVPolytope::from_columns(gaussian_matrix(n, n + 1, &mut g)) {
                simplices.push(w);
            }
        }
        for w in &simplices {
            let vw = exact_volume(w).unwrap().value;
            let vd = exact_volume(&difference_body(w).unwrap()).unwrap().value;
            worst = worst.max((vd / (binomial(2 * n, n) * vw) - 1.0).abs());
        }
    }
    Outcome { pass: worst <= 1e-6, detail: format!("max relative error {worst:.3e} over 12 simplices (≤ 1e-6)") }
}

fn experiment_criterion(s: &mut Suite, name: &str) -> Outcome {
    let r = s.experiment(name);
    Outcome { pass: r.pass, detail: criteria_line(&r) }
}

fn qzn_criterion(s: &mut Suite) -> Outcome {
    let r = s.experiment("qzn-volume");
    let fitted = observed(&r, "fitted_constant");
    let locked = (fitted / FITTED_QZN - 1.0).abs() <= LOCK_TOLERANCE;
    Outcome {
        pass: r.pass && locked,
        detail: format!("{}; locked fitted constant {FITTED_QZN:.10} matches: {locked}", criteria_line(&r)),
    }
}

fn solver_criterion(_: &mut Suite) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let self_worst = (0..5)
        .map(|i| {
            let k = random_body(2 + i % 3, 6, 400 + i as u64);
            (vr_upper(&k, &k, 20, i as u64).unwrap().value - 1.0).abs()
        })
        .fold(0.0, f64::max);
    pass &= self_worst <= 1e-3;
    notes.push(format!("|vr(K,K) − 1| ≤ {self_worst:.2e}"));

    let square = SymVPolytope::cube(2).unwrap();
    let diamond = SymVPolytope::cross_polytope(2);
    let sd = vr_upper(&square, &diamond, 20, 0).unwrap().value;
    pass &= (sd - 1.0).abs() <= 1e-2;
    notes.push(format!("square/diamond {sd:.6}"));

    let disk = SymVPolytope::regular_polygon(256).unwrap();
    let dd = vr_upper(&disk, &diamond, 20, 0).unwrap().value;
    let rel = (dd / FRAC_PI_2.sqrt() - 1.0).abs();
    pass &= rel <= 0.02;
    notes.push(format!("disk/diamond {dd:.6} (rel {rel:.2e})"));

    let mut drifts: Vec<f64> = (0..50u64)
        .map(|i| {
            let k = random_body(2, 5, 1000 + i);
            let l = random_body(2, 4, 2000 + i);
            let a = well_conditioned(2, 3000 + i);
            let b = well_conditioned(2, 4000 + i);
            let v0 = vr_upper(&k, &l, 20, i).unwrap().value;
            let v1 = vr_upper(&k.transformed(&a).unwrap(), &l.transformed(&b).unwrap(), 20, i).unwrap().value;
            (v1 / v0 - 1.0).abs()
        })
        .collect();
    drifts.sort_by(f64::total_cmp);
    let median = 0.5 * (drifts[24] + drifts[25]);
    pass &= median <= 0.05;
    notes.push(format!("median affine drift {median:.2e}"));
    Outcome { pass, detail: notes.join(", ") }
}

fn main_theorem_criterion(s: &mut Suite) -> Outcome {
    let r = s.experiment("main-theorem");
    let cube = observed(&r, "c_hat_cube");
    let cross = observed(&r, "c_hat_cross-polytope");
    let locked = (cube / C_HAT_CUBE - 1.0).abs() <= LOCK_TOLERANCE && (cross / C_HAT_CROSS - 1.0).abs() <= LOCK_TOLERANCE;
    Outcome {
        pass: r.pass && locked,
        detail: format!("ĉ(cube) = {cube:.10}, ĉ(cross) = {cross:.10}, both > 0; locked values match: {locked}"),
    }
}

fn determinism_criterion(s: &mut Suite) -> Outcome {
    let other = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let mut mismatched = Vec::new();
    for name in EXPERIMENTS {
        let first = s.experiment(name);
        let config = ExperimentConfig::new(name, 0);
        let second = other.install(|| run_experiment(&config)).unwrap();
        let same = first.to_canonical_json().unwrap() == second.to_canonical_json().unwrap()
            && first.to_csv().unwrap() == second.to_csv().unwrap();
        if !same {
            mismatched.push(name);
        }
    }
    Outcome {
        pass: mismatched.is_empty(),
        detail: format!(
            "{} experiments rerun on 3 threads against 1 thread; mismatches: {:?}",
            EXPERIMENTS.len(),
            mismatched
        ),
    }
}

#[test]
fn acceptance() {
    let mut s = Suite {
        pool: rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap(),
        reports: BTreeMap::new(),
        lines: Vec::new(),
    };
    let secs = Duration::from_secs;
    s.run(1, "exact volume of cross-polytopes", secs(1), exact_volume_criterion);
    s.run(2, "Monte Carlo against exact volume", secs(30), mc_criterion);
    s.run(3, "volume product", secs(60), santalo_criterion);
    s.run(4, "difference body of simplices", secs(1), rogers_shephard_criterion);
    s.run(5, "close projections (projection-volume-lemma)", secs(120), |s| {
        experiment_criterion(s, "projection-volume-lemma")
    });
    s.run(6, "gaussian tails (gaussian-tails)", secs(30), |s| experiment_criterion(s, "gaussian-tails"));
    s.run(7, "absolute convex hull bound (absconv-bound)", secs(60), |s| experiment_criterion(s, "absconv-bound"));
    s.run(8, "projected gaussian polytopes (qzn-volume)", secs(300), qzn_criterion);
    s.run(9, "volume ratio solver quality", secs(120), solver_criterion);
    s.run(10, "projected ratio shadow (main-theorem)", secs(600), main_theorem_criterion);
    s.run(11, "small-ball probability (lemma41-probability)", secs(120), |s| {
        experiment_criterion(s, "lemma41-probability")
    });
    s.run(12, "projected polar against section polar (duality)", secs(60), |s| experiment_criterion(s, "duality"));
    s.run(13, "determinism across thread counts", secs(900), determinism_criterion);

    let passed = s.lines.iter().filter(|l| l.2).count();
    println!("acceptance: {passed}/{} criteria pass", s.lines.len());
    let failed: Vec<&str> = s.lines.iter().filter(|l| !l.2).map(|l| l.1.as_str()).collect();
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.join("\n"));
}
