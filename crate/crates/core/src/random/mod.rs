//! Gaussian polytopes, Haar projections, greedy projection nets and the
//! λ-schedule used to control rearrangements of projected Gaussian norms.

mod schedule;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Projection, SymVPolytope};
use crate::rng::{self, Rng};

pub use schedule::{alpha_choice, clamped_lll, clamped_ln, eps_choice, lambda_schedule, LambdaSchedule};

pub fn gaussian_vector(n: usize, rng: &mut Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> DMatrix<f64> {
    // Column-major fill so that column j equals the j-th successive gaussian_vector draw.
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    m
}

/// `Z_N = absconv{√n e_1, ..., √n e_n, g_1, ..., g_N}` with the flag for the
/// event that every `‖g_j‖` lies in `[√n/4, 2√n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GluskinSample {
    pub n: usize,
    pub big_n: usize,
    pub seed: u64,
    pub omega0: bool,
    body: SymVPolytope,
}

impl GluskinSample {
    pub fn body(&self) -> &SymVPolytope {
        &self.body
    }

    pub fn into_body(self) -> SymVPolytope {
        self.body
    }

    /// The Gaussian generators `g_1..g_N` as columns.
    pub fn gaussians(&self) -> DMatrix<f64> {
        self.body.generators().columns(self.n, self.big_n).into_owned()
    }
}

/// `[√n/4, 2√n]`
pub fn omega0_window(n: usize) -> (f64, f64) {
    let r = (n as f64).sqrt();
    (r / 4.0, 2.0 * r)
}

pub fn in_omega0(n: usize, gaussians: &DMatrix<f64>) -> bool {
    let (lo, hi) = omega0_window(n);
    gaussians.column_iter().all(|c| {
        let x = c.norm();
        (lo..=hi).contains(&x)
    })
}

pub fn gluskin_polytope(n: usize, big_n: usize, seed: u64) -> Result<GluskinSample> {
    if n == 0 || big_n == 0 {
        return Err(Error::Precondition("need n >= 1 and N >= 1".into()));
    }
    let mut rng = rng::stream(seed, 0);
    let mut gens = DMatrix::zeros(n, n + big_n);
    let r = (n as f64).sqrt();
    for i in 0..n {
        gens[(i, i)] = r;
    }
    let g = gaussian_matrix(n, big_n, &mut rng);
    gens.columns_mut(n, big_n).copy_from(&g);
    let omega0 = in_omega0(n, &g);
    Ok(GluskinSample { n, big_n, seed, omega0, body: SymVPolytope::from_columns(gens)? })
}

/// `P(‖g‖ ≥ λ) ≤ exp(−λ²/8)`, valid for `λ ≥ 2√n`.
pub fn tail_bound(n: usize, lambda: f64) -> Result<f64> {
    let threshold = 2.0 * (n as f64).sqrt();
    if !(lambda >= threshold * (1.0 - 1e-15)) {
        return Err(Error::Precondition(format!("tail bound needs λ >= 2√n = {threshold}, got {lambda}")));
    }
    Ok((-lambda * lambda / 8.0).exp())
}

/// `P(‖g‖ ≤ √n/4) ≤ exp(−n/4)`, valid for `n ≥ 50`.
pub fn lower_tail_bound(n: usize) -> Result<f64> {
    if n < 50 {
        return Err(Error::Precondition(format!("lower tail bound needs n >= 50, got {n}")));
    }
    Ok((-(n as f64) / 4.0).exp())
}

/// `1 − 2N·exp(−n/4)`, the guaranteed probability of the Ω₀ event.
pub fn omega0_probability_bound(n: usize, big_n: usize) -> f64 {
    1.0 - 2.0 * big_n as f64 * (-(n as f64) / 4.0).exp()
}

pub fn haar_projection(n: usize, k: usize, rng: &mut Rng) -> Result<Projection> {
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("rank {k} must lie in 1..={n}")));
    }
    loop {
        match Projection::from_spanning(&gaussian_matrix(n, k, rng)) {
            Ok(p) => return Ok(p),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Operator norm of `P − Q` for the projectors (not the frames).
pub fn projection_distance(p: &Projection, q: &Projection) -> Result<f64> {
    if p.ambient_dim() != q.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: p.ambient_dim(), got: q.ambient_dim() });
    }
    let d = p.projector() - q.projector();
    Ok(d.symmetric_eigenvalues().amax())
}

#[derive(Debug, Clone)]
pub struct NetSample {
    pub projections: Vec<Projection>,
    /// Largest distance from a held-out Haar sample to the returned set.
    pub covering_radius: f64,
    pub test_points: usize,
}

pub const NET_TEST_POINTS: usize = 200;

/// Greedy farthest-point selection among `budget` Haar samples, stopped once
/// every sample lies within `eps/2` of the selection. Coverage is then
/// measured on an independent held-out set.
pub fn net_sample(n: usize, k: usize, eps: f64, budget: usize, seed: u64) -> Result<NetSample> {
    if !(eps > 0.0) || budget == 0 {
        return Err(Error::Precondition("need eps > 0 and budget >= 1".into()));
    }
    if k == n {
        return Ok(NetSample { projections: vec![Projection::identity(n)], covering_radius: 0.0, test_points: 0 });
    }
    let draw = |tag: u16, count: usize| -> Result<Vec<Projection>> {
        (0..count)
            .into_par_iter()
            .map(|i| haar_projection(n, k, &mut rng::stream(seed, rng::tagged(tag, i as u64))))
            .collect()
    };
    let pool = draw(1, budget)?;
    let projectors: Vec<DMatrix<f64>> = pool.iter().map(Projection::projector).collect();
    let dist = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a - b).symmetric_eigenvalues().amax();

    let mut chosen = vec![0usize];
    let mut nearest: Vec<f64> = projectors.iter().map(|p| dist(p, &projectors[0])).collect();
    loop {
        let (far, &d) = nearest
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("pool is non-empty");
        if d <= eps / 2.0 {
            break;
        }
        chosen.push(far);
        let pf = &projectors[far];
        let update: Vec<f64> = projectors.par_iter().map(|p| dist(p, pf)).collect();
        nearest.iter_mut().zip(update).for_each(|(a, b)| *a = a.min(b));
    }

    let tests = draw(2, NET_TEST_POINTS)?;
    let covering_radius = tests
        .par_iter()
        .map(|t| {
            let pt = t.projector();
            chosen.iter().map(|&c| dist(&pt, &projectors[c])).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    Ok(NetSample {
        projections: chosen.into_iter().map(|c| pool[c].clone()).collect(),
        covering_radius,
        test_points: NET_TEST_POINTS,
    })
}

pub fn dec_rearrangement(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gluskin_layout() {
        let s = gluskin_polytope(2, 3, 1).unwrap();
        let g = s.body().generators();
        assert_eq!(g.ncols(), 5);
        assert_eq!(g.column(0).as_slice(), &[2f64.sqrt(), 0.0]);
        assert_eq!(g.column(1).as_slice(), &[0.0, 2f64.sqrt()]);
        assert_eq!(s, gluskin_polytope(2, 3, 1).unwrap());
        assert_ne!(s, gluskin_polytope(2, 3, 2).unwrap());
    }

    #[test]
    fn tail_bounds() {
        assert!((tail_bound(64, 16.0).unwrap() - (-32f64).exp()).abs() < 1e-25);
        assert!(tail_bound(64, 15.0).is_err());
        assert_eq!(lower_tail_bound(64).unwrap(), (-16f64).exp());
        assert!(lower_tail_bound(49).is_err());
    }

    #[test]
    fn projection_distance_examples() {
        let e1 = Projection::coordinate(2, &[0]).unwrap();
        let e2 = Projection::coordinate(2, &[1]).unwrap();
        assert!((projection_distance(&e1, &e2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(projection_distance(&e1, &e1).unwrap(), 0.0);
    }

    #[test]
    fn haar_full_rank_is_orthogonal() {
        let p = haar_projection(4, 4, &mut rng::stream(3, 0)).unwrap();
        assert!((p.projector() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn net_edge_cases() {
        let full = net_sample(3, 3, 0.1, 10, 0).unwrap();
        assert_eq!(full.projections.len(), 1);
        assert_eq!(full.covering_radius, 0.0);
        let loose = net_sample(4, 2, 2.0, 50, 0).unwrap();
        assert_eq!(loose.projections.len(), 1);
        assert!(loose.covering_radius <= 1.0 + 1e-12);
    }

    #[test]
    fn rearrangement() {
        assert_eq!(dec_rearrangement(&[1.0, 3.0, 2.0]), vec![3.0, 2.0, 1.0]);
        assert_eq!(dec_rearrangement(&[2.0; 3]), vec![2.0; 3]);
    }
}
