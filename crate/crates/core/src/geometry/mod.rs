//! Convex bodies and the exact primitives built on them.

pub(crate) mod body;
pub mod hull;
pub mod lp;
mod projection;

use nalgebra::{DMatrix, DVector};

pub use body::{GeneralVPolytope, HPolytope, SymVPolytope};
pub use projection::{LinearMap, Projection};

use crate::error::{Error, Result};
use crate::tol;
use hull::{dedup_rows, Hull};
use lp::LpStatus;

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

fn check_exact_dim(dim: usize, what: &'static str) -> Result<()> {
    if dim > tol::MAX_EXACT_DIM {
        Err(Error::DimensionTooLarge { dim, max: tol::MAX_EXACT_DIM, what })
    } else {
        Ok(())
    }
}

/// Gauge `‖x‖_K = min Σ|a_i|` over representations `x = Σ a_i w_i`, solved
/// as a linear program in the split variables `a = a⁺ - a⁻`.
pub fn minkowski_norm(k: &SymVPolytope, x: &DVector<f64>) -> Result<f64> {
    check_dim(k.dim(), x.len())?;
    if x.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let (d, m) = (k.dim(), k.len());
    let w = k.generators();
    let mut a = DMatrix::zeros(d, 2 * m);
    a.columns_mut(0, m).copy_from(w);
    a.columns_mut(m, m).copy_from(&(-w));
    let cost = vec![1.0; 2 * m];
    match lp::solve(&a, x.as_slice(), &cost)? {
        LpStatus::Optimal(s) => Ok(s.value),
        LpStatus::Infeasible => Err(Error::NotSpanning),
        LpStatus::Unbounded => Err(Error::Lp("unbounded gauge program".into())),
    }
}

/// Support function `h_K(x) = max_i |<w_i, x>|`.
pub fn support(k: &SymVPolytope, x: &DVector<f64>) -> Result<f64> {
    check_dim(k.dim(), x.len())?;
    Ok(k.generators().tr_mul(x).amax())
}

/// Polar body: the slabs `|<w_i, x>| <= 1`.
pub fn polar(k: &SymVPolytope) -> HPolytope {
    HPolytope::from_rows_matrix(k.generators().transpose())
        .expect("generators of a valid body span, so the polar is bounded")
}

/// Chooses the sign of `v` that makes its first significant entry positive.
fn canonical_sign(v: &mut [f64], scale: f64) {
    if let Some(&x) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if x < 0.0 {
            v.iter_mut().for_each(|y| *y = -*y);
        }
    }
}

/// Points `p` stored with a canonical sign, deduplicated up to `±`.
fn distinct_pairs(mut points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let scale = points.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    points.iter_mut().for_each(|p| canonical_sign(p, scale));
    dedup_rows(&mut points, tol * scale);
    points
}

/// Vertex enumeration of a symmetric slab intersection (dimension ≤ 6).
/// The vertices of `H` are the polar points `n / b` of the facets
/// `<n, x> = b` of `absconv{h_j}`.
pub fn h_to_v(h: &HPolytope) -> Result<SymVPolytope> {
    check_exact_dim(h.dim(), "vertex enumeration")?;
    let d = h.dim();
    let mut buf = Vec::with_capacity(2 * h.len() * d);
    for sign in [1.0, -1.0] {
        for r in h.rows().row_iter() {
            buf.extend(r.iter().map(|x| sign * x));
        }
    }
    let hull = Hull::new(d, buf).map_err(|e| match e {
        Error::Degenerate(_) => Error::Degenerate("slab intersection is unbounded".into()),
        other => other,
    })?;
    let verts: Vec<Vec<f64>> = hull
        .distinct_planes(1e-9)
        .into_iter()
        .map(|(n, b)| n.iter().map(|x| x / b).collect())
        .collect();
    SymVPolytope::from_rows(&distinct_pairs(verts, 1e-9))
}

/// `Q K` in the frame coordinates of `Q`.
pub fn project_body(k: &SymVPolytope, q: &Projection) -> Result<SymVPolytope> {
    check_dim(q.ambient_dim(), k.dim())?;
    let g = q.frame().tr_mul(k.generators());
    let rank = q.rank();
    let nonzero: Vec<usize> = (0..g.ncols()).filter(|&j| g.column(j).iter().any(|&x| x != 0.0)).collect();
    if nonzero.len() < rank {
        return Err(Error::Degenerate("projected generators do not span the range".into()));
    }
    let g = if nonzero.len() == g.ncols() { g } else { g.select_columns(nonzero.iter()) };
    SymVPolytope::from_columns(g).map_err(|e| match e {
        Error::Degenerate(_) => Error::Degenerate("projected generators do not span the range".into()),
        other => other,
    })
}

/// `W - W = absconv{p_i - p_j : i < j}`.
pub fn difference_body(w: &GeneralVPolytope) -> Result<SymVPolytope> {
    let v = w.vertices();
    let m = v.ncols();
    let cols: Vec<DVector<f64>> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .map(|(i, j)| v.column(i) - v.column(j))
        .filter(|d| d.iter().any(|&x| x != 0.0))
        .collect();
    SymVPolytope::from_points(w.dim(), &cols)
}

/// `‖T : X_K → X_L‖ = max_i ‖T w_i‖_L`, evaluated by linear programs.
pub fn op_norm_between(t: &LinearMap, k: &SymVPolytope, l: &SymVPolytope) -> Result<f64> {
    check_dim(k.dim(), t.dim())?;
    check_dim(l.dim(), t.dim())?;
    let images = t.matrix() * k.generators();
    images.column_iter().try_fold(0.0f64, |acc, c| Ok(acc.max(minkowski_norm(l, &c.into_owned())?)))
}

/// Facet description of a symmetric polytope in dimension ≤ 6, giving the
/// gauge as `max_j |<f_j, x>|` without solving a program per point. Also
/// carries the hull vertices (one per `±` pair) and the exact volume.
#[derive(Debug, Clone)]
pub struct FacetGauge {
    rows: DMatrix<f64>,
    vertices: DMatrix<f64>,
    volume: f64,
}

impl FacetGauge {
    pub fn new(k: &SymVPolytope) -> Result<Self> {
        check_exact_dim(k.dim(), "facet enumeration")?;
        let d = k.dim();
        let hull = Hull::new(d, k.symmetric_point_buffer())?;
        let planes: Vec<Vec<f64>> = hull
            .distinct_planes(1e-9)
            .into_iter()
            .map(|(n, b)| n.iter().map(|x| x / b).collect())
            .collect();
        let rows = distinct_pairs(planes, 1e-9);
        let verts: Vec<Vec<f64>> = hull.vertex_indices().into_iter().map(|i| hull.point(i).to_vec()).collect();
        let verts = distinct_pairs(verts, 1e-12);
        Ok(FacetGauge {
            rows: DMatrix::from_fn(rows.len(), d, |r, c| rows[r][c]),
            vertices: DMatrix::from_fn(d, verts.len(), |r, c| verts[c][r]),
            volume: hull.volume(),
        })
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    /// Facet normals scaled so that the facets are `|<f_j, x>| = 1`.
    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    /// Hull vertices, one column per `±` pair.
    pub fn vertices(&self) -> &DMatrix<f64> {
        &self.vertices
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.rows.row_iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs()).fold(0.0, f64::max)
    }

    /// Maximum gauge over the columns of `points`.
    pub fn max_norm(&self, points: &DMatrix<f64>) -> f64 {
        (&self.rows * points).amax()
    }

    /// The body as its vertex generators.
    pub fn to_body(&self) -> SymVPolytope {
        SymVPolytope::from_columns(self.vertices.clone()).expect("hull vertices span")
    }

    /// The polar body as an H-description is `rows = vertices`; this returns
    /// the V-description of the polar, whose generators are the facet rows.
    pub fn polar_body(&self) -> SymVPolytope {
        SymVPolytope::from_columns(self.rows.transpose()).expect("facet normals span")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn minkowski_norm_examples() {
        let b13 = SymVPolytope::cross_polytope(3);
        assert_eq!(minkowski_norm(&b13, &v(&[0., 0., 0.])).unwrap(), 0.0);
        assert!((minkowski_norm(&b13, &v(&[0., 1., 0.])).unwrap() - 1.0).abs() < 1e-12);
        let b12 = SymVPolytope::cross_polytope(2);
        assert!((minkowski_norm(&b12, &v(&[0.5, 0.5])).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(minkowski_norm(&b12, &v(&[1.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn support_examples() {
        let b12 = SymVPolytope::cross_polytope(2);
        assert_eq!(support(&b12, &v(&[1., -2.])).unwrap(), 2.0);
        assert_eq!(support(&b12, &v(&[0., 0.])).unwrap(), 0.0);
        let sq = SymVPolytope::from_rows(&[vec![1., 1.], vec![1., -1.]]).unwrap();
        assert_eq!(support(&sq, &v(&[1., 0.])).unwrap(), 1.0);
    }

    #[test]
    fn polar_examples() {
        assert_eq!(polar(&SymVPolytope::cross_polytope(3)).rows(), &DMatrix::<f64>::identity(3, 3));
        let sq = SymVPolytope::from_rows(&[vec![1., 1.], vec![1., -1.]]).unwrap();
        assert_eq!(polar(&sq).rows(), &DMatrix::from_row_slice(2, 2, &[1., 1., 1., -1.]));
    }

    #[test]
    fn double_polar_of_square_recovers_vertices() {
        // Square [-1,1]^2 as V; polar is the diamond; enumerating the polar of
        // the diamond's V-description returns the square's vertices.
        let square = h_to_v(&HPolytope::cube(2)).unwrap();
        let diamond = h_to_v(&polar(&square)).unwrap();
        let back = h_to_v(&polar(&diamond)).unwrap();
        assert_eq!(back.len(), 2);
        let mut cols: Vec<Vec<f64>> = back.generators().column_iter().map(|c| c.iter().copied().collect()).collect();
        cols.sort_by(|a, b| a[1].total_cmp(&b[1]));
        assert!((cols[0][0] - 1.0).abs() < 1e-9 && (cols[0][1] + 1.0).abs() < 1e-9);
        assert!((cols[1][0] - 1.0).abs() < 1e-9 && (cols[1][1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn h_to_v_cube_has_all_vertices() {
        for d in 1..=5 {
            let c = h_to_v(&HPolytope::cube(d)).unwrap();
            assert_eq!(c.len(), 1 << (d - 1), "d = {d}");
            assert!(c.generators().iter().all(|x| (x.abs() - 1.0).abs() < 1e-9));
        }
        assert!(matches!(h_to_v(&HPolytope::cube(7)), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn project_body_examples() {
        let b = SymVPolytope::cross_polytope(4);
        let q = Projection::coordinate(4, &[0, 1]).unwrap();
        let p = project_body(&b, &q).unwrap();
        assert_eq!(p, SymVPolytope::cross_polytope(2));
        let same = project_body(&b, &Projection::identity(4)).unwrap();
        assert_eq!(same, b);
        let g = SymVPolytope::from_rows(&[vec![0., 0., 1.], vec![0., 1., 0.], vec![1., 0., 0.], vec![0., 0., 2.]]).unwrap();
        let p = project_body(&g, &Projection::coordinate(3, &[0, 1]).unwrap()).unwrap();
        assert_eq!(p.len(), 2);
        assert!(matches!(project_body(&g, &Projection::identity(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn difference_body_of_segment() {
        let seg = GeneralVPolytope::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let d = difference_body(&seg).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.generators()[(0, 0)].abs(), 1.0);
    }

    #[test]
    fn op_norm_examples() {
        let k = SymVPolytope::cross_polytope(2);
        assert!((op_norm_between(&LinearMap::identity(2), &k, &k).unwrap() - 1.0).abs() < 1e-12);
        let two = LinearMap::new(DMatrix::identity(2, 2) * 2.0).unwrap();
        assert!((op_norm_between(&two, &k, &k).unwrap() - 2.0).abs() < 1e-12);
        let t = LinearMap::new(DMatrix::from_row_slice(2, 2, &[1., 1., 1., -1.])).unwrap();
        let square = h_to_v(&HPolytope::cube(2)).unwrap();
        assert!((op_norm_between(&t, &k, &square).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn facet_gauge_agrees_with_lp() {
        let k = SymVPolytope::from_rows(&[vec![1., 0.2, 0.], vec![0.3, 1., 0.1], vec![0., 0.4, 1.], vec![0.5, 0.5, 0.5]]).unwrap();
        let g = FacetGauge::new(&k).unwrap();
        for x in [[1., 2., 3.], [-0.5, 0.1, 0.7], [0., 0., 1.]] {
            let a = g.norm(&x);
            let b = minkowski_norm(&k, &v(&x)).unwrap();
            assert!((a - b).abs() < 1e-9 * b.max(1.0), "{a} vs {b}");
        }
    }
}
