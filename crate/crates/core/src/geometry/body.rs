use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol;

/// Centrally symmetric polytope `absconv{w_1, ..., w_m}`; each stored
/// generator stands for the pair `±w_i`. Generators are the columns of a
/// `dim × m` matrix. Redundant (interior) generators are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SymVPolytope {
    generators: DMatrix<f64>,
}

/// Convex hull of finitely many points, not necessarily symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralVPolytope {
    vertices: DMatrix<f64>,
}

/// Symmetric slab intersection `{x : |<h_j, x>| <= 1 for all j}`; the rows
/// `h_j` are stored as rows of an `m × dim` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    rows: DMatrix<f64>,
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidBody("non-finite coordinate".into()))
    }
}

/// True if the columns of `m` span R^{rows}.
pub(crate) fn columns_span(m: &DMatrix<f64>) -> bool {
    let d = m.nrows();
    if d == 0 || m.ncols() < d {
        return false;
    }
    let gram = m * m.transpose();
    let eig = gram.symmetric_eigenvalues();
    let max = eig.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = eig.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    max > 0.0 && min > tol::RANK * tol::RANK * max
}

impl SymVPolytope {
    pub fn from_columns(generators: DMatrix<f64>) -> Result<Self> {
        check_finite(&generators)?;
        let dim = generators.nrows();
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be at least 1".into()));
        }
        if generators.ncols() < dim {
            return Err(Error::InvalidBody(format!(
                "{} generators cannot span R^{dim}",
                generators.ncols()
            )));
        }
        if let Some(j) = (0..generators.ncols()).find(|&j| generators.column(j).iter().all(|&x| x == 0.0)) {
            return Err(Error::InvalidBody(format!("generator {j} is the zero vector")));
        }
        if !columns_span(&generators) {
            return Err(Error::Degenerate("generators do not span the ambient space".into()));
        }
        Ok(SymVPolytope { generators })
    }

    pub fn from_points(dim: usize, points: &[DVector<f64>]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        Self::from_columns(DMatrix::from_fn(dim, points.len(), |r, c| points[c][r]))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
        }
        Self::from_columns(DMatrix::from_fn(dim, rows.len(), |r, c| rows[c][r]))
    }

    /// `B_1^n = absconv{e_1, ..., e_n}`.
    pub fn cross_polytope(n: usize) -> Self {
        SymVPolytope { generators: DMatrix::identity(n, n) }
    }

    /// `B_∞^n` as the absolute convex hull of its `2^(n-1)` vertex pairs.
    pub fn cube(n: usize) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(Error::DimensionTooLarge { dim: n, max: 20, what: "cube vertex list" });
        }
        let m = 1usize << (n - 1);
        let gens = DMatrix::from_fn(n, m, |r, c| {
            if r == 0 || (c >> (r - 1)) & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        });
        Ok(SymVPolytope { generators: gens })
    }

    /// Regular `2m`-gon inscribed in the unit circle (`m` vertex pairs).
    pub fn regular_polygon(vertices: usize) -> Result<Self> {
        if vertices < 4 || !vertices.is_multiple_of(2) {
            return Err(Error::InvalidBody("a symmetric polygon needs an even vertex count >= 4".into()));
        }
        let m = vertices / 2;
        let step = std::f64::consts::TAU / vertices as f64;
        Ok(SymVPolytope {
            generators: DMatrix::from_fn(2, m, |r, c| {
                let a = step * c as f64;
                if r == 0 {
                    a.cos()
                } else {
                    a.sin()
                }
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.generators.nrows()
    }

    pub fn len(&self) -> usize {
        self.generators.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> DVector<f64> {
        self.generators.column(i).into_owned()
    }

    /// Generators together with their negatives, row-major, for hull routines.
    pub(crate) fn symmetric_point_buffer(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(2 * d * self.len());
        for sign in [1.0, -1.0] {
            for c in self.generators.column_iter() {
                out.extend(c.iter().map(|x| sign * x));
            }
        }
        out
    }

    /// Image under the linear map `m` (square, same dimension).
    pub fn transformed(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: m.ncols() });
        }
        Self::from_columns(m * &self.generators)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_columns(&self.generators * factor)
    }

    pub fn max_generator_norm(&self) -> f64 {
        self.generators.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl GeneralVPolytope {
    pub fn from_columns(vertices: DMatrix<f64>) -> Result<Self> {
        check_finite(&vertices)?;
        let dim = vertices.nrows();
        if dim == 0 || vertices.ncols() < dim + 1 {
            return Err(Error::InvalidBody("need at least dim + 1 vertices".into()));
        }
        let base = vertices.column(0).into_owned();
        let diffs = DMatrix::from_fn(dim, vertices.ncols() - 1, |r, c| vertices[(r, c + 1)] - base[r]);
        if !columns_span(&diffs) {
            return Err(Error::Degenerate("affine hull of the vertices is not the whole space".into()));
        }
        Ok(GeneralVPolytope { vertices })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
        }
        Self::from_columns(DMatrix::from_fn(dim, rows.len(), |r, c| rows[c][r]))
    }

    /// Standard simplex `conv{0, e_1, ..., e_n}`.
    pub fn standard_simplex(n: usize) -> Self {
        let mut v = DMatrix::zeros(n, n + 1);
        for i in 0..n {
            v[(i, i + 1)] = 1.0;
        }
        GeneralVPolytope { vertices: v }
    }

    pub fn dim(&self) -> usize {
        self.vertices.nrows()
    }

    pub fn len(&self) -> usize {
        self.vertices.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> &DMatrix<f64> {
        &self.vertices
    }

    pub fn centroid(&self) -> DVector<f64> {
        self.vertices.column_mean()
    }

    pub(crate) fn point_buffer(&self) -> Vec<f64> {
        self.vertices.column_iter().flat_map(|c| c.iter().copied().collect::<Vec<_>>()).collect()
    }
}

impl From<&SymVPolytope> for GeneralVPolytope {
    fn from(k: &SymVPolytope) -> Self {
        let g = k.generators();
        let mut v = DMatrix::zeros(k.dim(), 2 * k.len());
        v.columns_mut(0, k.len()).copy_from(g);
        v.columns_mut(k.len(), k.len()).copy_from(&(-g));
        GeneralVPolytope { vertices: v }
    }
}

impl HPolytope {
    pub fn from_rows_matrix(rows: DMatrix<f64>) -> Result<Self> {
        check_finite(&rows)?;
        if rows.ncols() == 0 {
            return Err(Error::InvalidBody("dimension must be at least 1".into()));
        }
        if !columns_span(&rows.transpose()) {
            return Err(Error::Degenerate("rows do not span; the slab intersection is unbounded".into()));
        }
        Ok(HPolytope { rows })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
        }
        Self::from_rows_matrix(DMatrix::from_fn(rows.len(), dim, |r, c| rows[r][c]))
    }

    /// The cube `{|x_i| <= 1}`.
    pub fn cube(n: usize) -> Self {
        HPolytope { rows: DMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    /// Gauge `max_j |<h_j, x>|`.
    pub fn gauge(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok((&self.rows * x).amax())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_are_enforced() {
        assert!(SymVPolytope::from_rows(&[vec![1.0, 0.0]]).is_err());
        assert!(SymVPolytope::from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0]]).is_err());
        assert!(SymVPolytope::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]).is_err());
        assert!(SymVPolytope::from_rows(&[vec![1.0, f64::NAN], vec![0.0, 1.0]]).is_err());
        assert!(HPolytope::from_rows(&[vec![1.0, 0.0]]).is_err());
        assert!(GeneralVPolytope::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
    }

    #[test]
    fn cube_generators_are_distinct_pairs() {
        let c = SymVPolytope::cube(3).unwrap();
        assert_eq!(c.len(), 4);
        for j in 0..4 {
            assert_eq!(c.generators()[(0, j)], 1.0);
            assert!(c.generator(j).iter().all(|x| x.abs() == 1.0));
        }
    }
}
