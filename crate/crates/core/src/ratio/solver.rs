//! Volume ratio by determinant maximization.
//!
//! For symmetric `K, L ⊂ R^k` we maximize `ln|det T|` subject to
//! `|⟨f_a, T v_b⟩| ≤ 1` for the facet normals `f_a` of `K` and the vertices
//! `v_b` of `L`, i.e. `T(L) ⊂ K`. Each start is followed along a log-barrier
//! path with damped Newton steps in the local coordinates `T ← T(I + H)`,
//! where every iterate is strictly feasible. The final iterate is rescaled
//! onto the boundary, so the returned value is attained by a feasible map and
//! is an upper bound on the true volume ratio.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{project_body, FacetGauge, GeneralVPolytope, LinearMap, Projection, SymVPolytope};
use crate::random::haar_projection;
use crate::ratio::ellipsoid::{mvee, Ellipsoid};
use crate::{rng, tol};

const TAG_ROTATION: u16 = 0x7652;
/// Newton decrement at which intermediate barrier stages stop.
const STAGE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct VrOptions {
    /// Number of generated starts: identity, Löwner matching, then Löwner
    /// matching composed with Haar rotations.
    pub restarts: usize,
    pub seed: u64,
    /// Additional `k × k` start maps. Each is rescaled onto the feasible
    /// region and also counts as a candidate witness by itself.
    pub extra_starts: Vec<DMatrix<f64>>,
    pub mu_start: f64,
    pub mu_end: f64,
    pub mu_factor: f64,
    pub max_newton: usize,
    pub newton_tolerance: f64,
}

impl Default for VrOptions {
    fn default() -> Self {
        VrOptions {
            restarts: 20,
            seed: 0,
            extra_starts: Vec::new(),
            mu_start: 1.0,
            mu_end: 1e-12,
            mu_factor: 0.1,
            max_newton: 200,
            newton_tolerance: 1e-11,
        }
    }
}

impl VrOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        VrOptions { restarts, seed, ..VrOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct VrResult {
    /// `(|K| / (|det T|·|L|))^{1/k}` for the witness.
    pub value: f64,
    pub witness: LinearMap,
    /// Translation of the witness; present only for non-symmetric inner bodies.
    pub translation: Option<DVector<f64>>,
    pub restarts: usize,
    /// Whether the start that produced the witness finished its barrier path
    /// with a Newton decrement below tolerance.
    pub converged: bool,
    /// `max_j ‖T v_j‖_K − 1` over the vertices of the inner body.
    pub feasibility_slack: f64,
    pub best_start: usize,
}

impl VrResult {
    pub fn det(&self) -> f64 {
        self.witness.det()
    }
}

struct Problem {
    k: usize,
    facets: DMatrix<f64>,
    /// Inner vertices as columns, with a trailing row of ones when affine.
    points: DMatrix<f64>,
    /// Row `b` holds `p_b p_bᵀ` flattened row-major.
    outer_products: DMatrix<f64>,
    affine: bool,
    ln_vol_outer: f64,
    ln_vol_inner: f64,
    outer: Ellipsoid,
    inner: Ellipsoid,
    inner_center: DVector<f64>,
}

impl Problem {
    fn symmetric(outer: &SymVPolytope, inner: &SymVPolytope) -> Result<Self> {
        if outer.dim() != inner.dim() {
            return Err(Error::DimensionMismatch { expected: outer.dim(), got: inner.dim() });
        }
        let gk = FacetGauge::new(outer)?;
        let gl = FacetGauge::new(inner)?;
        Ok(Problem {
            k: outer.dim(),
            facets: gk.rows().clone(),
            outer_products: outer_products(gl.vertices()),
            points: gl.vertices().clone(),
            affine: false,
            ln_vol_outer: gk.volume().ln(),
            ln_vol_inner: gl.volume().ln(),
            outer: mvee(gk.vertices())?,
            inner: mvee(gl.vertices())?,
            inner_center: DVector::zeros(outer.dim()),
        })
    }

    fn affine(outer: &SymVPolytope, inner: &GeneralVPolytope) -> Result<Self> {
        if outer.dim() != inner.dim() {
            return Err(Error::DimensionMismatch { expected: outer.dim(), got: inner.dim() });
        }
        let k = outer.dim();
        if k > tol::MAX_EXACT_DIM {
            return Err(Error::DimensionTooLarge { dim: k, max: tol::MAX_EXACT_DIM, what: "volume ratio" });
        }
        let gk = FacetGauge::new(outer)?;
        let hull = crate::geometry::hull::Hull::new(k, inner.point_buffer())?;
        let idx = hull.vertex_indices();
        let verts = DMatrix::from_fn(k, idx.len(), |r, c| hull.point(idx[c])[r]);
        let center = verts.column_mean();
        let centered = DMatrix::from_fn(k, verts.ncols(), |r, c| verts[(r, c)] - center[r]);
        let mut points = DMatrix::from_element(k + 1, verts.ncols(), 1.0);
        points.rows_mut(0, k).copy_from(&verts);
        Ok(Problem {
            k,
            facets: gk.rows().clone(),
            outer_products: outer_products(&points),
            points,
            affine: true,
            ln_vol_outer: gk.volume().ln(),
            ln_vol_inner: hull.volume().ln(),
            outer: mvee(gk.vertices())?,
            inner: mvee(&centered)?,
            inner_center: center,
        })
    }

    fn cols(&self) -> usize {
        self.points.nrows()
    }

    /// Augmented map `[T | b]` (or `T`) for a linear start.
    fn augment(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        if self.affine {
            let mut a = DMatrix::zeros(self.k, self.k + 1);
            a.columns_mut(0, self.k).copy_from(t);
            a.set_column(self.k, &(-(t * &self.inner_center)));
            a
        } else {
            t.clone()
        }
    }

    fn slacks(&self, ta: &DMatrix<f64>) -> DMatrix<f64> {
        &self.facets * (ta * &self.points)
    }

    fn ln_value(&self, ln_det: f64) -> f64 {
        (self.ln_vol_outer - ln_det - self.ln_vol_inner) / self.k as f64
    }
}

fn outer_products(points: &DMatrix<f64>) -> DMatrix<f64> {
    let c = points.nrows();
    DMatrix::from_fn(points.ncols(), c * c, |b, rs| points[(rs / c, b)] * points[(rs % c, b)])
}

struct Outcome {
    map: DMatrix<f64>,
    ln_value: f64,
    converged: bool,
}

fn ln_abs_det(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant().abs().ln()
}

fn barrier(s: &DMatrix<f64>) -> f64 {
    s.iter().map(|x| (1.0 - x * x).ln()).sum()
}

/// Feasible rescaling of `ta` onto the boundary and its objective value.
fn boundary_value(p: &Problem, ta: &DMatrix<f64>) -> Option<(DMatrix<f64>, f64)> {
    let smax = p.slacks(ta).amax();
    if !(smax > 0.0 && smax.is_finite()) {
        return None;
    }
    let scaled = ta / smax;
    let ld = ln_abs_det(&scaled.columns(0, p.k).into_owned());
    ld.is_finite().then(|| (scaled, p.ln_value(ld)))
}

fn follow_path(p: &Problem, start: &DMatrix<f64>, opts: &VrOptions) -> Option<Outcome> {
    let k = p.k;
    let cols = p.cols();
    let dim = k * cols;
    let mut ta = p.augment(start);
    let smax = p.slacks(&ta).amax();
    if !(smax > 0.0 && smax.is_finite()) {
        return None;
    }
    ta /= smax / 0.9;
    let (bound_map, bound_ln) = boundary_value(p, &ta)?;

    // Barrier weight per constraint, so the first center sits near the boundary
    // regardless of how many constraints there are.
    let constraints = (p.facets.nrows() * p.points.ncols()) as f64;
    let mut mu = (opts.mu_start * k as f64 / constraints).max(opts.mu_end);
    let last_stage = opts.mu_end * (1.0 + 1e-9);
    let mut converged;
    loop {
        converged = false;
        for _ in 0..opts.max_newton {
            let t = ta.columns(0, k).into_owned();
            let ln_det = ln_abs_det(&t);
            if !ln_det.is_finite() {
                return None;
            }
            let s = p.slacks(&ta);
            let u = &p.facets * &t;
            let c = s.map(|x| -2.0 * mu * x / (1.0 - x * x));
            let w = s.map(|x| 2.0 * mu * (1.0 + x * x) / ((1.0 - x * x) * (1.0 - x * x)));

            let mut g = u.transpose() * (&c * p.points.transpose());
            for i in 0..k {
                g[(i, i)] += 1.0;
            }
            // Σ_a (u_a u_aᵀ) ⊗ (Σ_b w_ab p_b p_bᵀ), as uu2ᵀ · (w · pp).
            let uu = DMatrix::from_fn(p.facets.nrows(), k * k, |a, ij| u[(a, ij / k)] * u[(a, ij % k)]);
            let x = uu.tr_mul(&(&w * &p.outer_products));
            let mut metric = DMatrix::<f64>::identity(dim, dim);
            for ij in 0..k * k {
                let (i, j) = (ij / k, ij % k);
                for rs in 0..cols * cols {
                    metric[(i * cols + rs / cols, j * cols + rs % cols)] += x[(ij, rs)];
                }
            }
            let rhs = DVector::from_iterator(dim, (0..k).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| g[(i, j)]));
            let Some(chol) = metric.cholesky() else { break };
            let d = chol.solve(&rhs);
            let decrement = rhs.dot(&d);
            let stage_tolerance = if mu <= last_stage { opts.newton_tolerance } else { STAGE_TOLERANCE };
            if decrement < stage_tolerance {
                converged = true;
                break;
            }
            let dm = DMatrix::from_fn(k, cols, |i, j| d[i * cols + j]);
            let ds = &u * (&dm * &p.points);
            let mut t_max = f64::INFINITY;
            for (x, dx) in s.iter().zip(ds.iter()) {
                if *dx > 0.0 {
                    t_max = t_max.min((1.0 - x) / dx);
                } else if *dx < 0.0 {
                    t_max = t_max.min((-1.0 - x) / dx);
                }
            }
            let phi0 = ln_det + mu * barrier(&s);
            let h = dm.columns(0, k).into_owned();
            let mut step = (0.95 * t_max).min(1.0);
            let mut accepted = false;
            for _ in 0..60 {
                let st = &s + &ds * step;
                if st.amax() < 1.0 {
                    let ih = DMatrix::<f64>::identity(k, k) + &h * step;
                    let phi = ln_det + ln_abs_det(&ih) + mu * barrier(&st);
                    if phi.is_finite() && phi >= phi0 + 1e-4 * step * decrement {
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            ta += &t * &dm * step;
        }
        if mu <= last_stage {
            break;
        }
        mu = (mu * opts.mu_factor).max(opts.mu_end);
    }
    let (map, ln_value) = boundary_value(p, &ta)?;
    if ln_value <= bound_ln {
        Some(Outcome { map, ln_value, converged })
    } else {
        Some(Outcome { map: bound_map, ln_value: bound_ln, converged })
    }
}

fn starts(p: &Problem, opts: &VrOptions) -> Result<Vec<DMatrix<f64>>> {
    let k = p.k;
    let a_out = p.outer.inv_sqrt_shape();
    let a_in = p.inner.sqrt_shape();
    let mut out = Vec::with_capacity(opts.restarts + opts.extra_starts.len());
    for r in 0..opts.restarts {
        let m = match r {
            0 => DMatrix::identity(k, k),
            1 => &a_out * &a_in,
            _ => {
                let mut g = rng::stream(opts.seed, rng::tagged(TAG_ROTATION, r as u64));
                let rot = haar_projection(k, k, &mut g)?.frame().clone();
                &a_out * rot * &a_in
            }
        };
        out.push(m);
    }
    for s in &opts.extra_starts {
        if s.shape() != (k, k) {
            return Err(Error::DimensionMismatch { expected: k, got: s.nrows() });
        }
        out.push(s.clone());
    }
    Ok(out)
}

fn solve(p: &Problem, opts: &VrOptions) -> Result<VrResult> {
    if opts.restarts == 0 && opts.extra_starts.is_empty() {
        return Err(Error::Precondition("at least one start is required".into()));
    }
    let starts = starts(p, opts)?;
    let outcomes: Vec<Option<Outcome>> = starts.par_iter().map(|s| follow_path(p, s, opts)).collect();
    let (best_start, best) = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(i, o)| o.map(|o| (i, o)))
        .min_by(|a, b| a.1.ln_value.total_cmp(&b.1.ln_value).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::Degenerate("no start produced a nonsingular feasible map".into()))?;
    let k = p.k;
    let t = best.map.columns(0, k).into_owned();
    let translation = p.affine.then(|| best.map.column(k).into_owned());
    let slack = p.slacks(&best.map).amax() - 1.0;
    Ok(VrResult {
        value: best.ln_value.exp(),
        witness: LinearMap::new(t)?,
        translation,
        restarts: starts.len(),
        converged: best.converged,
        feasibility_slack: slack,
        best_start,
    })
}

fn check_dim(k: usize) -> Result<()> {
    if k > tol::MAX_EXACT_DIM {
        Err(Error::DimensionTooLarge { dim: k, max: tol::MAX_EXACT_DIM, what: "volume ratio" })
    } else {
        Ok(())
    }
}

/// Upper bound on `vr(K, L)` for symmetric bodies of equal dimension ≤ 6.
pub fn vr_upper(k: &SymVPolytope, l: &SymVPolytope, restarts: usize, seed: u64) -> Result<VrResult> {
    vr_upper_with(k, l, &VrOptions::new(restarts, seed))
}

pub fn vr_upper_with(k: &SymVPolytope, l: &SymVPolytope, opts: &VrOptions) -> Result<VrResult> {
    check_dim(k.dim())?;
    solve(&Problem::symmetric(k, l)?, opts)
}

/// Upper bound on `vr(K, W)` over affine maps, for symmetric `K` and a
/// general polytope `W`.
pub fn vr_upper_affine(k: &SymVPolytope, w: &GeneralVPolytope, opts: &VrOptions) -> Result<VrResult> {
    solve(&Problem::affine(k, w)?, opts)
}

/// `vr(PK, QL)` with both projections expressed in their frame coordinates.
pub fn vr_projected(
    k: &SymVPolytope,
    p: &Projection,
    l: &SymVPolytope,
    q: &Projection,
    restarts: usize,
    seed: u64,
) -> Result<VrResult> {
    vr_projected_with(k, p, l, q, &VrOptions::new(restarts, seed))
}

pub fn vr_projected_with(
    k: &SymVPolytope,
    p: &Projection,
    l: &SymVPolytope,
    q: &Projection,
    opts: &VrOptions,
) -> Result<VrResult> {
    if p.rank() != q.rank() {
        return Err(Error::DimensionMismatch { expected: p.rank(), got: q.rank() });
    }
    check_dim(p.rank())?;
    vr_upper_with(&project_body(k, p)?, &project_body(l, q)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_bodies() {
        let k = SymVPolytope::from_rows(&[vec![1.0, 0.3], vec![-0.2, 1.0], vec![0.7, 0.7]]).unwrap();
        let r = vr_upper(&k, &k, 3, 0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-3, "{}", r.value);
        assert!(r.feasibility_slack <= 1e-7);
    }

    #[test]
    fn square_over_diamond() {
        let sq = SymVPolytope::cube(2).unwrap();
        let r = vr_upper(&sq, &SymVPolytope::cross_polytope(2), 4, 1).unwrap();
        assert!((r.value - 1.0).abs() < 1e-2, "{}", r.value);
    }

    #[test]
    fn caller_start_is_never_beaten_upwards() {
        let sq = SymVPolytope::cube(2).unwrap();
        let d = SymVPolytope::cross_polytope(2);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let opts = VrOptions { restarts: 0, extra_starts: vec![s], ..VrOptions::default() };
        let r = vr_upper_with(&sq, &d, &opts).unwrap();
        assert!(r.value <= 1.0 + 1e-12);
    }
}
