use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol;

/// Rank-`k` orthogonal projection of R^n, stored as an `n × k` frame with
/// orthonormal columns spanning its range. The projector is `frame·frameᵀ`;
/// projected bodies are expressed in frame coordinates `frameᵀ x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    frame: DMatrix<f64>,
}

impl Projection {
    pub fn new(frame: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(frame, tol::FRAME)
    }

    pub fn with_tolerance(frame: DMatrix<f64>, tolerance: f64) -> Result<Self> {
        let (n, k) = frame.shape();
        if k == 0 || k > n {
            return Err(Error::Precondition(format!("projection rank {k} must lie in 1..={n}")));
        }
        if frame.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBody("non-finite frame entry".into()));
        }
        let gram = frame.transpose() * &frame;
        let err = (gram - DMatrix::<f64>::identity(k, k)).amax();
        if err > tolerance {
            return Err(Error::Precondition(format!("frame is not orthonormal (error {err:.3e})")));
        }
        Ok(Projection { frame })
    }

    /// Orthonormalizes an arbitrary full-rank `n × k` matrix (thin QR with
    /// the sign convention `diag(R) > 0`).
    pub fn from_spanning(m: &DMatrix<f64>) -> Result<Self> {
        let (n, k) = m.shape();
        if k == 0 || k > n {
            return Err(Error::Precondition(format!("projection rank {k} must lie in 1..={n}")));
        }
        let qr = m.clone().qr();
        let r = qr.r();
        let mut q = qr.q();
        let scale = m.amax().max(f64::MIN_POSITIVE);
        for j in 0..k {
            let d = r[(j, j)];
            if d.abs() <= tol::RANK * scale {
                return Err(Error::Degenerate("spanning matrix is rank deficient".into()));
            }
            if d < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        Projection::new(q)
    }

    pub fn identity(n: usize) -> Self {
        Projection { frame: DMatrix::identity(n, n) }
    }

    /// Coordinate projection onto the listed axes, in the given order.
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        let mut f = DMatrix::zeros(n, axes.len());
        for (j, &a) in axes.iter().enumerate() {
            if a >= n {
                return Err(Error::Precondition(format!("axis {a} out of range for R^{n}")));
            }
            f[(a, j)] = 1.0;
        }
        Projection::new(f)
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn rank(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.frame * self.frame.transpose()
    }

    /// Coordinates of the projection of `x` in the frame basis.
    pub fn coords(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), got: x.len() });
        }
        Ok(self.frame.tr_mul(x))
    }

    /// Embeds frame coordinates back into R^n.
    pub fn lift(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        if y.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: y.len() });
        }
        Ok(&self.frame * y)
    }
}

/// Square linear map between k-dimensional coordinate spaces, with its
/// determinant recorded at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
    det: f64,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::Precondition("linear map must be a non-empty square matrix".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBody("non-finite matrix entry".into()));
        }
        let det = matrix.determinant();
        Ok(LinearMap { matrix, det })
    }

    pub fn identity(k: usize) -> Self {
        LinearMap { matrix: DMatrix::identity(k, k), det: 1.0 }
    }

    /// Rescales `matrix` to `|det| = 1` (a member of the volume-preserving family).
    pub fn volume_preserving(matrix: DMatrix<f64>) -> Result<Self> {
        let m = LinearMap::new(matrix)?;
        let k = m.dim() as f64;
        if m.det == 0.0 {
            return Err(Error::Degenerate("singular map cannot be volume preserving".into()));
        }
        let s = m.det.abs().powf(-1.0 / k);
        LinearMap::new(m.matrix * s)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(&self.matrix * x)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let k = self.dim() as i32;
        LinearMap { matrix: &self.matrix * s, det: self.det * s.powi(k) }
    }
}
