use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use vrlab::geometry::{minkowski_norm, project_body, support, FacetGauge, Projection, SymVPolytope};
use vrlab::io::{parse_bodies, write_body, Body};
use vrlab::random::{
    clamped_lll, clamped_ln, dec_rearrangement, eps_choice, gaussian_matrix, haar_projection, lambda_schedule,
    projection_distance,
};
use vrlab::ratio::{loewner_normalize, main_bound, vr_upper, vr_upper_with, VrOptions};
use vrlab::rng;
use vrlab::volume::{absconv_volume_bound, exact_volume, BoundInputs};

fn body(dim: usize, count: usize, seed: u64) -> SymVPolytope {
    let mut g = rng::stream(seed, 0);
    loop {
        if let Ok(b) = SymVPolytope::from_columns(gaussian_matrix(dim, count, &mut g)) {
            return b;
        }
    }
}

fn rotation(dim: usize, seed: u64) -> DMatrix<f64> {
    haar_projection(dim, dim, &mut rng::stream(seed, 1)).unwrap().frame().clone()
}

fn vector(dim: usize, seed: u64) -> DVector<f64> {
    gaussian_matrix(dim, 1, &mut rng::stream(seed, 2)).column(0).into_owned()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn gauge_is_homogeneous(dim in 2usize..5, extra in 0usize..4, seed: u64, t in -5.0f64..5.0) {
        let k = body(dim, dim + extra, seed);
        let x = vector(dim, seed);
        let a = minkowski_norm(&k, &(&x * t)).unwrap();
        let b = t.abs() * minkowski_norm(&k, &x).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * (1.0 + b));
    }

    #[test]
    fn support_is_the_polar_gauge(dim in 2usize..5, extra in 0usize..4, seed: u64) {
        let k = body(dim, dim + extra, seed);
        let y = vector(dim, seed ^ 1);
        let h = support(&k, &y).unwrap();
        let polar = FacetGauge::new(&FacetGauge::new(&k).unwrap().polar_body()).unwrap();
        prop_assert!(close(h, polar.norm(y.as_slice()), 1e-8));
    }

    #[test]
    fn facet_gauge_matches_linear_programming(dim in 2usize..5, extra in 0usize..4, seed: u64) {
        let k = body(dim, dim + extra, seed);
        let x = vector(dim, seed ^ 2);
        let lp = minkowski_norm(&k, &x).unwrap();
        prop_assert!(close(lp, FacetGauge::new(&k).unwrap().norm(x.as_slice()), 1e-8));
    }

    #[test]
    fn volume_scales_and_is_rotation_invariant(dim in 1usize..5, extra in 0usize..4, seed: u64, s in 0.1f64..4.0) {
        let k = body(dim, dim + extra, seed);
        let v = exact_volume(&k).unwrap().value;
        let scaled = exact_volume(&k.scaled(s).unwrap()).unwrap().value;
        prop_assert!(close(scaled, v * s.powi(dim as i32), 1e-9));
        let rotated = exact_volume(&k.transformed(&rotation(dim, seed)).unwrap()).unwrap().value;
        prop_assert!(close(rotated, v, 1e-9));
    }

    #[test]
    fn volume_follows_the_determinant(dim in 2usize..5, seed: u64) {
        let k = body(dim, dim + 2, seed);
        let m = DMatrix::identity(dim, dim) + gaussian_matrix(dim, dim, &mut rng::stream(seed, 3)) * 0.3;
        let det = m.determinant().abs();
        prop_assume!(det > 1e-3);
        let v = exact_volume(&k).unwrap().value;
        let w = exact_volume(&k.transformed(&m).unwrap()).unwrap().value;
        prop_assert!(close(w, det * v, 1e-9));
    }

    #[test]
    fn polar_of_polar_is_the_body(dim in 2usize..4, extra in 0usize..4, seed: u64) {
        let k = body(dim, dim + extra, seed);
        let g = FacetGauge::new(&k).unwrap();
        let back = FacetGauge::new(&FacetGauge::new(&g.polar_body()).unwrap().polar_body()).unwrap();
        prop_assert!(close(back.volume(), g.volume(), 1e-9));
    }

    #[test]
    fn absconv_bound_dominates(dim in 2usize..4, extra in 0usize..5, seed: u64, stretch in 1.0f64..3.0) {
        let k = body(dim, dim + extra, seed);
        let alpha = std::f64::consts::SQRT_2 * k.max_generator_norm() * stretch;
        let bound = absconv_volume_bound(&BoundInputs::from_body(&k, alpha).unwrap());
        prop_assert!(exact_volume(&k).unwrap().root(dim) <= bound);
    }

    #[test]
    fn loewner_sandwich(dim in 2usize..5, extra in 0usize..5, seed: u64) {
        let k = loewner_normalize(&body(dim, dim + extra, seed)).unwrap();
        let r = (dim as f64).sqrt();
        prop_assert!(k.max_generator_norm() <= r * (1.0 + 1e-6));
        // Unit ball inside: every facet is at distance at least 1 from the origin.
        let g = FacetGauge::new(&k).unwrap();
        for row in g.rows().row_iter() {
            prop_assert!(row.norm() <= 1.0 + 1e-6);
        }
    }

    #[test]
    fn projection_distance_is_a_metric(n in 2usize..7, seed: u64) {
        let k = 1 + (seed as usize) % (n - 1);
        let mut g = rng::stream(seed, 4);
        let p = haar_projection(n, k, &mut g).unwrap();
        let q = haar_projection(n, k, &mut g).unwrap();
        let r = haar_projection(n, k, &mut g).unwrap();
        let d = |a: &Projection, b: &Projection| projection_distance(a, b).unwrap();
        prop_assert!(d(&p, &p) <= 1e-12);
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() <= 1e-12);
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
        prop_assert!(d(&p, &q) <= 1.0 + 1e-12);
    }

    #[test]
    fn body_files_round_trip(dim in 1usize..6, extra in 0usize..4, seed: u64) {
        let b = Body::Sym(body(dim, dim + extra, seed));
        let text = write_body(&b);
        prop_assert_eq!(parse_bodies(&text).unwrap(), vec![b]);
    }

    #[test]
    fn schedule_is_nonincreasing(n in 4usize..200, big_n in 1usize..300, kk in 1usize..8, c in 1.0f64..400.0) {
        let k = kk.min(n);
        let eps = eps_choice(n, big_n.max(k), k);
        let s = lambda_schedule(n, big_n, k, eps, c).unwrap();
        prop_assert!(s.values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        prop_assert!(s.values.iter().all(|&l| l >= 2.0 * eps * (n as f64).sqrt() - 1e-12));
    }

    #[test]
    fn clamped_logs_are_at_least_one(x in 0.0f64..1e12) {
        prop_assert!(clamped_ln(x) >= 1.0);
        prop_assert!(clamped_lll(x) >= 1.0);
    }

    #[test]
    fn rearrangement_is_a_sorted_permutation(v in proptest::collection::vec(-1e6f64..1e6, 0..40)) {
        let r = dec_rearrangement(&v);
        prop_assert!(r.windows(2).all(|w| w[0] >= w[1]));
        let mut a = v.clone();
        let mut b = r.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn main_bound_is_monotone_in_k(n in 3usize..400) {
        let mut prev = 0.0;
        for k in 1..=n.min(60) {
            let b = main_bound(n, k).unwrap();
            prop_assert!(b.is_finite() && b >= prev - 1e-12);
            prev = b;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn vr_is_at_least_one_and_witness_is_feasible(dim in 2usize..4, seed: u64) {
        let k = body(dim, dim + 2, seed);
        let l = body(dim, dim + 1, seed ^ 5);
        let r = vr_upper(&k, &l, 4, seed).unwrap();
        prop_assert!(r.value >= 1.0 - 1e-9);
        prop_assert!(r.feasibility_slack <= 1e-7);
        for v in l.generators().column_iter() {
            prop_assert!(minkowski_norm(&k, &(r.witness.matrix() * v)).unwrap() <= 1.0 + 1e-7);
        }
    }

    #[test]
    fn vr_is_scale_invariant(dim in 2usize..4, seed: u64, s in 0.2f64..5.0) {
        let k = body(dim, dim + 2, seed);
        let l = body(dim, dim + 1, seed ^ 6);
        let a = vr_upper(&k, &l, 4, seed).unwrap().value;
        let b = vr_upper(&k.scaled(s).unwrap(), &l, 4, seed).unwrap().value;
        prop_assert!(close(a, b, 1e-6), "{a} vs {b}");
    }

    #[test]
    fn vr_of_a_body_with_itself_is_one(dim in 2usize..5, seed: u64) {
        let k = body(dim, dim + 2, seed);
        prop_assert!((vr_upper(&k, &k, 2, seed).unwrap().value - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn supplied_starts_bound_the_result(dim in 2usize..4, seed: u64) {
        let k = body(dim, dim + 2, seed);
        let l = body(dim, dim + 1, seed ^ 7);
        let s = gaussian_matrix(dim, dim, &mut rng::stream(seed, 8));
        prop_assume!(s.determinant().abs() > 1e-3);
        // Value induced by S after scaling it onto the boundary.
        let gk = FacetGauge::new(&k).unwrap();
        let gl = FacetGauge::new(&l).unwrap();
        let worst = gk.max_norm(&(&s * gl.vertices()));
        let induced = ((gk.volume() / (gl.volume() * (s.determinant().abs() / worst.powi(dim as i32)))).ln()
            / dim as f64)
            .exp();
        let opts = VrOptions { extra_starts: vec![s], ..VrOptions::new(1, seed) };
        let r = vr_upper_with(&k, &l, &opts).unwrap();
        prop_assert!(r.value <= induced * (1.0 + 1e-9), "{} vs {induced}", r.value);
    }

    #[test]
    fn projection_then_volume_is_rotation_invariant(n in 3usize..6, seed: u64) {
        let k = body(n, n + 3, seed);
        let q = haar_projection(n, 2, &mut rng::stream(seed, 9)).unwrap();
        let rot = rotation(n, seed ^ 10);
        // (R K) projected onto R(range Q) equals K projected onto Q, up to an isometry.
        let rq = Projection::from_spanning(&(&rot * q.frame())).unwrap();
        let a = exact_volume(&project_body(&k, &q).unwrap()).unwrap().value;
        let b = exact_volume(&project_body(&k.transformed(&rot).unwrap(), &rq).unwrap()).unwrap().value;
        prop_assert!(close(a, b, 1e-9));
    }
}
