//! Exact and Monte Carlo volumes, and closed-form volume bounds.

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::hull::Hull;
use crate::geometry::{FacetGauge, GeneralVPolytope, HPolytope, SymVPolytope};
use crate::{geometry, rng, tol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: VolumeMethod,
    pub samples: u64,
}

impl VolumeEstimate {
    pub fn exact(value: f64) -> Self {
        VolumeEstimate { value, stderr: 0.0, method: VolumeMethod::Exact, samples: 0 }
    }

    pub fn ln_value(&self) -> f64 {
        self.value.ln()
    }

    /// `value^(1/dim)`.
    pub fn root(&self, dim: usize) -> f64 {
        (self.ln_value() / dim as f64).exp()
    }
}

/// `ln |B_2^n|`, by the recursion `|B_2^n| = (2π/n)|B_2^{n-2}|` summed in log space.
pub fn ln_ball_volume(n: usize) -> f64 {
    let (mut acc, start) = if n.is_multiple_of(2) { (0.0, 2) } else { (2f64.ln(), 3) };
    let mut m = start;
    while m <= n {
        acc += (std::f64::consts::TAU / m as f64).ln();
        m += 2;
    }
    acc
}

/// `|B_2^n| = π^{n/2} / Γ(n/2 + 1)`.
pub fn ball_volume(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("ball dimension must be at least 1".into()));
    }
    Ok(ln_ball_volume(n).exp())
}

pub trait ExactVolume {
    fn exact_volume(&self) -> Result<VolumeEstimate>;
}

fn check_exact_dim(dim: usize) -> Result<()> {
    if dim > tol::MAX_EXACT_DIM {
        Err(Error::DimensionTooLarge { dim, max: tol::MAX_EXACT_DIM, what: "exact volume" })
    } else {
        Ok(())
    }
}

impl ExactVolume for SymVPolytope {
    fn exact_volume(&self) -> Result<VolumeEstimate> {
        check_exact_dim(self.dim())?;
        Ok(VolumeEstimate::exact(Hull::new(self.dim(), self.symmetric_point_buffer())?.volume()))
    }
}

impl ExactVolume for GeneralVPolytope {
    fn exact_volume(&self) -> Result<VolumeEstimate> {
        check_exact_dim(self.dim())?;
        Ok(VolumeEstimate::exact(Hull::new(self.dim(), self.point_buffer())?.volume()))
    }
}

impl ExactVolume for HPolytope {
    fn exact_volume(&self) -> Result<VolumeEstimate> {
        geometry::h_to_v(self)?.exact_volume()
    }
}

impl ExactVolume for FacetGauge {
    fn exact_volume(&self) -> Result<VolumeEstimate> {
        Ok(VolumeEstimate::exact(self.volume()))
    }
}

pub fn exact_volume<B: ExactVolume + ?Sized>(body: &B) -> Result<VolumeEstimate> {
    body.exact_volume()
}

/// Membership oracle for hit-or-miss estimation.
pub trait Membership: Sync {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    /// An upper bound on `max_{x ∈ K} ‖x‖₂`, when cheaply known.
    fn circumradius(&self) -> Option<f64> {
        None
    }
}

impl Membership for FacetGauge {
    fn dim(&self) -> usize {
        FacetGauge::dim(self)
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.norm(x) <= 1.0
    }
    fn circumradius(&self) -> Option<f64> {
        Some(self.vertices().column_iter().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

impl Membership for HPolytope {
    fn dim(&self) -> usize {
        HPolytope::dim(self)
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.rows().row_iter().all(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs() <= 1.0)
    }
}

/// Membership through the gauge linear program; usable in any dimension.
impl Membership for SymVPolytope {
    fn dim(&self) -> usize {
        SymVPolytope::dim(self)
    }
    fn contains(&self, x: &[f64]) -> bool {
        let v = nalgebra::DVector::from_row_slice(x);
        geometry::minkowski_norm(self, &v).is_ok_and(|n| n <= 1.0)
    }
    fn circumradius(&self) -> Option<f64> {
        Some(self.max_generator_norm())
    }
}

const MC_BLOCK: u64 = 4096;

/// Hit-or-miss estimate over the ball of radius `radius`. Sample block `b`
/// draws from stream `(seed, b)`, so the estimate does not depend on how the
/// blocks are scheduled across threads.
pub fn mc_volume<B: Membership + ?Sized>(body: &B, radius: f64, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    let n = body.dim();
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    if let Some(r) = body.circumradius() {
        if r > radius * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "body reaches radius {r:.6} outside the sampling ball of radius {radius:.6}"
            )));
        }
    }
    let blocks = samples.div_ceil(MC_BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng::stream(seed, b);
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut x = vec![0.0; n];
            let mut hits = 0u64;
            for _ in 0..count {
                sample_ball(&mut rng, radius, &mut x);
                if body.contains(&x) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    if hits == 0 {
        return Err(Error::ZeroHits(format!(
            "no hits in {samples} samples; shrink the radius or raise the sample count"
        )));
    }
    let p = hits as f64 / samples as f64;
    let ball = (ln_ball_volume(n) + n as f64 * radius.ln()).exp();
    Ok(VolumeEstimate {
        value: p * ball,
        stderr: (p * (1.0 - p) / samples as f64).sqrt() * ball,
        method: VolumeMethod::MonteCarlo,
        samples,
    })
}

fn sample_ball(rng: &mut rng::Rng, radius: f64, x: &mut [f64]) {
    let n = x.len();
    loop {
        let mut s = 0.0;
        for xi in x.iter_mut() {
            *xi = rng.sample(StandardNormal);
            s += *xi * *xi;
        }
        if s > 0.0 {
            let u: f64 = rng.random();
            let r = radius * u.powf(1.0 / n as f64) / s.sqrt();
            x.iter_mut().for_each(|xi| *xi *= r);
            return;
        }
    }
}

/// Inputs to [`absconv_volume_bound`]: Euclidean lengths of the generators,
/// the free parameter `alpha`, and the ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    norms: Vec<f64>,
    alpha: f64,
    n: usize,
}

impl BoundInputs {
    pub fn new(norms: Vec<f64>, alpha: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("dimension must be at least 1".into()));
        }
        if norms.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Precondition("generator norms must be finite and nonnegative".into()));
        }
        let max = norms.iter().copied().fold(0.0, f64::max);
        if !(alpha > 0.0 && alpha.is_finite()) || alpha < std::f64::consts::SQRT_2 * max * (1.0 - 1e-15) {
            return Err(Error::Precondition(format!(
                "alpha = {alpha} must be positive and at least √2 · max‖w_i‖ = {}",
                std::f64::consts::SQRT_2 * max
            )));
        }
        Ok(BoundInputs { norms, alpha, n })
    }

    pub fn from_body(k: &SymVPolytope, alpha: f64) -> Result<Self> {
        let norms = k.generators().column_iter().map(|c| c.norm()).collect();
        BoundInputs::new(norms, alpha, k.dim())
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Upper bound on `|absconv{w_i}|^{1/n}`:
/// `(√(2π)·e·α/n) · exp((2/n) Σ_i exp(−α²/(2‖w_i‖²)))`.
pub fn absconv_volume_bound(b: &BoundInputs) -> f64 {
    let n = b.n as f64;
    let a2 = b.alpha * b.alpha;
    let tail: f64 = b
        .norms
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| (-a2 / (2.0 * w * w)).exp())
        .sum();
    let ln = 0.5 * std::f64::consts::TAU.ln() + 1.0 + b.alpha.ln() - n.ln() + 2.0 * tail / n;
    ln.exp()
}

/// `C·√(log(2N/n))/n`.
pub fn gcp_bound(big_n: usize, n: usize, c: f64) -> Result<f64> {
    if n == 0 || big_n < n {
        return Err(Error::Precondition(format!("need N >= n >= 1 (N = {big_n}, n = {n})")));
    }
    if !(c > 0.0) {
        return Err(Error::Precondition("constant must be positive".into()));
    }
    Ok(c * (2.0 * big_n as f64 / n as f64).ln().sqrt() / n as f64)
}

/// `(|K|^{1/n}·|K°|^{1/n}, |B_2^n|^{2/n})` for `K` in dimension ≤ 4.
pub fn santalo_gap(k: &SymVPolytope) -> Result<(f64, f64)> {
    let n = k.dim();
    if n > 4 {
        return Err(Error::DimensionTooLarge { dim: n, max: 4, what: "volume product" });
    }
    let body = FacetGauge::new(k)?;
    let polar = FacetGauge::new(&body.polar_body())?;
    let nf = n as f64;
    let product = ((body.volume().ln() + polar.volume().ln()) / nf).exp();
    let reference = (2.0 * ln_ball_volume(n) / nf).exp();
    Ok((product, reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volume_small_dims() {
        assert!((ball_volume(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((ball_volume(2).unwrap() - PI).abs() < 1e-15);
        assert!((ball_volume(3).unwrap() / (4.0 * PI / 3.0) - 1.0).abs() < 1e-12);
        // π^32 / 32! by direct product in log space.
        let direct: f64 = 32.0 * PI.ln() - (1..=32).map(|i| (i as f64).ln()).sum::<f64>();
        assert!((ln_ball_volume(64) - direct).abs() < 1e-12);
        assert!(ball_volume(0).is_err());
    }

    #[test]
    fn cross_polytope_volumes() {
        let mut fact = 1.0;
        for k in 1..=6 {
            fact *= k as f64;
            let v = exact_volume(&SymVPolytope::cross_polytope(k)).unwrap().value;
            let want = 2f64.powi(k as i32) / fact;
            assert!((v / want - 1.0).abs() < 1e-9, "k = {k}: {v} vs {want}");
        }
        let sq = SymVPolytope::from_rows(&[vec![1., 1.], vec![1., -1.]]).unwrap();
        assert!((exact_volume(&sq).unwrap().value - 4.0).abs() < 1e-12);
        assert!(matches!(
            exact_volume(&SymVPolytope::cross_polytope(7)),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn general_and_h_volumes() {
        let s = GeneralVPolytope::standard_simplex(3);
        assert!((exact_volume(&s).unwrap().value - 1.0 / 6.0).abs() < 1e-14);
        assert!((exact_volume(&HPolytope::cube(3)).unwrap().value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn mc_is_deterministic_and_reports_zero_hits() {
        let g = FacetGauge::new(&SymVPolytope::cross_polytope(3)).unwrap();
        let a = mc_volume(&g, 1.0, 20_000, 5).unwrap();
        let b = mc_volume(&g, 1.0, 20_000, 5).unwrap();
        assert_eq!(a, b);
        let tiny = FacetGauge::new(&SymVPolytope::cross_polytope(3).scaled(1e-6).unwrap()).unwrap();
        assert!(matches!(mc_volume(&tiny, 1.0, 1000, 1), Err(Error::ZeroHits(_))));
        assert!(mc_volume(&g, 0.5, 1000, 1).is_err());
    }

    #[test]
    fn bound_formula_values() {
        let b = BoundInputs::new(vec![1.0, 1.0], 2.0, 2).unwrap();
        let want = (2.0 * PI).sqrt() * std::f64::consts::E * (2.0 * (-2.0f64).exp()).exp();
        assert!((absconv_volume_bound(&b) - want).abs() < 1e-12);
        assert!((want - 8.93).abs() < 0.01);
        assert!(BoundInputs::new(vec![1.0, 2.0], 2.0, 2).is_err());
    }

    #[test]
    fn gcp_values() {
        assert!((gcp_bound(3, 3, 1.0).unwrap() - 2f64.ln().sqrt() / 3.0).abs() < 1e-15);
        assert!((gcp_bound(8, 2, 1.0).unwrap() - 8f64.ln().sqrt() / 2.0).abs() < 1e-15);
        assert!(gcp_bound(10, 4, 1.0).unwrap() < gcp_bound(11, 4, 1.0).unwrap());
        assert!(gcp_bound(1, 2, 1.0).is_err());
    }

    #[test]
    fn santalo_examples() {
        let (p, r) = santalo_gap(&SymVPolytope::cross_polytope(2)).unwrap();
        assert!((p - 8f64.sqrt()).abs() < 1e-12);
        assert!((r - PI).abs() < 1e-12);
        let (p, r) = santalo_gap(&SymVPolytope::regular_polygon(64).unwrap()).unwrap();
        assert!(p <= r && p / r > 0.98);
    }
}
