use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{body::columns_span, SymVPolytope};
use crate::tol;

/// `{x : xᵀ A x ≤ 1}` with `A` symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    shape: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(shape: DMatrix<f64>) -> Result<Self> {
        if !shape.is_square() || shape.nrows() == 0 {
            return Err(Error::Precondition("shape must be a non-empty square matrix".into()));
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > tol::SYMMETRY * shape.amax().max(1.0) {
            return Err(Error::Precondition(format!("shape is not symmetric (error {asym:.3e})")));
        }
        let shape = (&shape + shape.transpose()) * 0.5;
        if shape.symmetric_eigenvalues().min() <= 0.0 {
            return Err(Error::Degenerate("shape is not positive definite".into()));
        }
        Ok(Ellipsoid { shape })
    }

    pub fn dim(&self) -> usize {
        self.shape.nrows()
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// `√(xᵀ A x)`
    pub fn gauge(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.shape * x)).max(0.0).sqrt()
    }

    /// `A^{1/2}`, mapping the ellipsoid onto the unit ball.
    pub fn sqrt_shape(&self) -> DMatrix<f64> {
        sym_power(&self.shape, 0.5)
    }

    /// `A^{-1/2}`, mapping the unit ball onto the ellipsoid.
    pub fn inv_sqrt_shape(&self) -> DMatrix<f64> {
        sym_power(&self.shape, -0.5)
    }

    /// `ln |E| = ln |B| − ½ ln det A`.
    pub fn ln_volume(&self) -> f64 {
        crate::volume::ln_ball_volume(self.dim()) - 0.5 * self.shape.determinant().ln()
    }
}

pub(crate) fn sym_power(a: &DMatrix<f64>, p: f64) -> DMatrix<f64> {
    let eig = a.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).powf(p)));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

pub const MVEE_TOLERANCE: f64 = 1e-9;

/// Minimum-volume centered ellipsoid containing `±x_i` for the columns `x_i`
/// of `points`.
pub fn mvee(points: &DMatrix<f64>) -> Result<Ellipsoid> {
    mvee_with_tolerance(points, MVEE_TOLERANCE)
}

/// Khachiyan's coordinate ascent on the design weights with Wolfe–Atwood away
/// steps, stopped when `max_i x_iᵀ M(u)⁻¹ x_i ≤ n(1 + tol)`. The ellipsoid
/// `M⁻¹/n` is finally scaled so that the farthest point lies on its boundary.
pub fn mvee_with_tolerance(points: &DMatrix<f64>, tolerance: f64) -> Result<Ellipsoid> {
    let (n, m) = points.shape();
    if n == 0 || !columns_span(points) {
        return Err(Error::Degenerate("points do not span the ambient space".into()));
    }
    let nf = n as f64;
    let mut u = vec![1.0 / m as f64; m];
    let weighted = |u: &[f64]| {
        let mut w = points.clone();
        for (j, mut c) in w.column_iter_mut().enumerate() {
            c *= u[j].sqrt();
        }
        &w * w.transpose()
    };
    let inverse = |mm: DMatrix<f64>| {
        mm.cholesky()
            .map(|c| c.inverse())
            .ok_or_else(|| Error::Degenerate("design matrix lost positive definiteness".into()))
    };
    let leverages = |minv: &DMatrix<f64>| -> Vec<f64> {
        let y = minv * points;
        y.column_iter().zip(points.column_iter()).map(|(a, b)| a.dot(&b)).collect()
    };
    let mut minv = inverse(weighted(&u))?;
    let mut kappa = leverages(&minv);
    let max_iter = 200_000 + 200 * m;
    for iter in 0..max_iter {
        if iter % 256 == 255 {
            minv = inverse(weighted(&u))?;
            kappa = leverages(&minv);
        }
        let (j, &kj) = argmax(&kappa);
        if kj <= nf * (1.0 + tolerance) {
            break;
        }
        let (i, ki) = (0..m)
            .filter(|&i| u[i] > 0.0)
            .map(|i| (i, kappa[i]))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("weights sum to one");
        let (idx, tau) = if nf - ki > kj - nf {
            let floor = -u[i] / (1.0 - u[i]);
            let t = if ki > 1.0 { (ki - nf) / (nf * (ki - 1.0)) } else { f64::NEG_INFINITY };
            (i, t.max(floor))
        } else {
            (j, (kj - nf) / (nf * (kj - 1.0)))
        };
        if tau == 0.0 || !tau.is_finite() {
            break;
        }
        // Rank-one update of M⁻¹ and the leverages for M' = (1−τ)M + τ x xᵀ.
        let x = points.column(idx);
        let mx = &minv * x;
        let kx = kappa[idx];
        let r = tau / (1.0 - tau);
        let c = r / (1.0 + r * kx);
        let proj = points.tr_mul(&mx);
        for (l, k) in kappa.iter_mut().enumerate() {
            *k = (*k - c * proj[l] * proj[l]) / (1.0 - tau);
        }
        minv = (&minv - (&mx * mx.transpose()) * c) / (1.0 - tau);
        for w in u.iter_mut() {
            *w *= 1.0 - tau;
        }
        u[idx] += tau;
        if u[idx] < 1e-300 {
            u[idx] = 0.0;
        }
    }
    let minv = inverse(weighted(&u))?;
    let mut shape = minv / nf;
    shape = (&shape + shape.transpose()) * 0.5;
    let reach = points.column_iter().map(|x| x.dot(&(&shape * x))).fold(0.0, f64::max);
    Ellipsoid::new(shape / reach)
}

fn argmax(v: &[f64]) -> (usize, &f64) {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("non-empty")
}

/// `√n · A^{1/2} K` where `{xᵀAx ≤ 1}` is the minimum-volume ellipsoid of
/// `K`; the result satisfies `B_2^n ⊂ K' ⊂ √n B_2^n`.
pub fn loewner_normalize(k: &SymVPolytope) -> Result<SymVPolytope> {
    let (body, _) = loewner_normalize_with_map(k)?;
    Ok(body)
}

/// Same as [`loewner_normalize`], also returning the applied linear map.
pub fn loewner_normalize_with_map(k: &SymVPolytope) -> Result<(SymVPolytope, DMatrix<f64>)> {
    let e = mvee(k.generators())?;
    let map = e.sqrt_shape() * (k.dim() as f64).sqrt();
    Ok((k.transformed(&map)?, map))
}
