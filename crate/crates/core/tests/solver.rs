use nalgebra::DMatrix;
use rand::Rng as _;
use vrlab::geometry::{difference_body, minkowski_norm, FacetGauge, GeneralVPolytope, SymVPolytope};
use vrlab::random::gaussian_matrix;
use vrlab::ratio::{vr_upper, vr_upper_affine, VrOptions};
use vrlab::rng;

fn random_body(dim: usize, count: usize, seed: u64) -> SymVPolytope {
    let mut g = rng::stream(seed, 11);
    SymVPolytope::from_columns(gaussian_matrix(dim, count, &mut g)).unwrap()
}

fn well_conditioned(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut g = rng::stream(seed, 12);
    loop {
        let m = DMatrix::identity(dim, dim) + gaussian_matrix(dim, dim, &mut g) * 0.5;
        let sv = m.singular_values();
        if sv.max() / sv.min() < 4.0 {
            return m;
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Largest area of a symmetric square inscribed in `k`, scanning the rotation angle.
fn best_inscribed_square(k: &SymVPolytope) -> f64 {
    let g = FacetGauge::new(k).unwrap();
    (0..20_000)
        .map(|i| {
            let t = std::f64::consts::FRAC_PI_2 * i as f64 / 20_000.0;
            let (c, s) = (t.cos(), t.sin());
            let r = g.norm(&[c, s]).max(g.norm(&[-s, c]));
            2.0 / (r * r)
        })
        .fold(0.0, f64::max)
}

#[test]
fn disk_over_diamond_matches_inscribed_square_scan() {
    let disk = SymVPolytope::regular_polygon(256).unwrap();
    let area = FacetGauge::new(&disk).unwrap().volume();
    let oracle = (area / best_inscribed_square(&disk)).sqrt();
    let r = vr_upper(&disk, &SymVPolytope::cross_polytope(2), 20, 3).unwrap();
    assert!((r.value / oracle - 1.0).abs() < 1e-3, "{} vs {oracle}", r.value);
    assert!((r.value / std::f64::consts::FRAC_PI_2.sqrt() - 1.0).abs() < 0.02);
}

#[test]
fn witnesses_are_feasible_by_linear_programming() {
    for seed in 0..10 {
        let k = random_body(3, 7, seed);
        let l = random_body(3, 6, seed + 100);
        let r = vr_upper(&k, &l, 6, seed).unwrap();
        let worst = l
            .generators()
            .column_iter()
            .map(|v| minkowski_norm(&k, &(r.witness.matrix() * v)).unwrap())
            .fold(0.0, f64::max);
        assert!(worst <= 1.0 + 1e-7, "seed {seed}: {worst}");
        assert!(r.feasibility_slack <= 1e-7);
        assert!(r.value >= 1.0 - 1e-9);
    }
}

#[test]
fn affine_drift_is_small() {
    let drifts: Vec<f64> = (0..50)
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
    let m = median(drifts.clone());
    let worst = drifts.iter().copied().fold(0.0, f64::max);
    assert!(m <= 0.05, "median drift {m}, worst {worst}");
}

#[test]
fn polar_near_symmetry() {
    let mut inside = 0;
    for i in 0..50 {
        let k = random_body(2, 5, 5000 + i);
        let l = random_body(2, 4, 6000 + i);
        let v = vr_upper(&k, &l, 20, i).unwrap().value;
        let kp = FacetGauge::new(&k).unwrap().polar_body();
        let lp = FacetGauge::new(&l).unwrap().polar_body();
        let w = vr_upper(&lp, &kp, 20, i).unwrap().value;
        if (0.25..=4.0).contains(&(v / w)) {
            inside += 1;
        }
    }
    assert!(inside >= 45, "{inside} of 50");
}

#[test]
fn rogers_shephard_at_ratio_level() {
    let mut g = rng::stream(77, 0);
    for i in 0..20 {
        let count = if i % 2 == 0 { 3 } else { 4 };
        let pts: Vec<Vec<f64>> = (0..count).map(|_| vec![g.random::<f64>() * 2.0 - 1.0, g.random::<f64>() * 2.0 - 1.0]).collect();
        let Ok(w) = GeneralVPolytope::from_rows(&pts) else { continue };
        let d = difference_body(&w).unwrap();
        let r = vr_upper_affine(&d, &w, &VrOptions::new(10, i)).unwrap();
        assert!(r.value <= 4.5, "instance {i}: {}", r.value);
        assert!(r.feasibility_slack <= 1e-7);
    }
}

#[test]
fn projected_golden_cross_polytope_against_gaussian_polytope() {
    let l = vrlab::random::gluskin_polytope(4, 8, 11).unwrap().into_body();
    let pairs = vrlab::ratio::sample_pairs(4, 2, 2, 5).unwrap();
    let (p, q) = &pairs[1];
    let r = vrlab::ratio::vr_projected(&SymVPolytope::cross_polytope(4), p, &l, q, 20, 0).unwrap();
    assert!(r.feasibility_slack <= 1e-7);
    assert!(r.value >= 1.0);
    let golden = 1.0519725604108758;
    assert!((r.value / golden - 1.0).abs() <= 1e-6, "{}", r.value);
}

#[test]
fn projected_reductions() {
    let b = SymVPolytope::cross_polytope(5);
    let p = vrlab::geometry::Projection::coordinate(5, &[1, 3]).unwrap();
    let r = vrlab::ratio::vr_projected(&b, &p, &b, &p, 4, 0).unwrap();
    assert!((r.value - 1.0).abs() <= 1e-2);

    let k = random_body(3, 6, 21);
    let l = random_body(3, 5, 22);
    let id = vrlab::geometry::Projection::identity(3);
    let a = vrlab::ratio::vr_projected(&k, &id, &l, &id, 6, 1).unwrap().value;
    let direct = vr_upper(&k, &l, 6, 1).unwrap().value;
    assert!((a / direct - 1.0).abs() <= 1e-12);
}
