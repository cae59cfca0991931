//! Convex hull in low dimension (Quickhull with simplicial facets).
//!
//! Facets are kept as simplices; coplanar neighbours are not merged, which is
//! harmless for volumes and for the facet-plane lists (those are deduplicated
//! by [`Hull::distinct_planes`]). Ties are broken by lowest point index, and
//! the first point of the initial simplex is the lexicographically smallest,
//! so the output depends only on the input sequence.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone)]
pub struct Facet {
    /// Indices into the hull's point list.
    pub vertices: Vec<usize>,
    /// Unit outward normal.
    pub normal: Vec<f64>,
    /// `<normal, v>` for every vertex `v` of the facet.
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct Hull {
    dim: usize,
    coords: Vec<f64>,
    facets: Vec<Facet>,
    interior: Vec<f64>,
}

struct WorkFacet {
    vertices: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    neighbors: Vec<usize>,
    outside: Vec<usize>,
    alive: bool,
}

impl Hull {
    /// Hull of `coords.len() / dim` points stored row-major.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(dim, coords, tol::HULL)
    }

    pub fn with_tolerance(dim: usize, coords: Vec<f64>, rel_tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Degenerate("zero-dimensional hull".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidBody("coordinate buffer is not a multiple of dim".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBody("non-finite coordinate".into()));
        }
        let count = coords.len() / dim;
        if count < dim + 1 {
            return Err(Error::Degenerate(format!(
                "{count} points cannot span a {dim}-dimensional hull"
            )));
        }
        let scale = coords.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return Err(Error::Degenerate("all points are zero".into()));
        }
        let eps = rel_tol * scale;
        let mut builder = Builder { dim, coords: &coords, eps, facets: Vec::new(), interior: vec![] };
        builder.run()?;
        let interior = builder.interior.clone();
        let facets = builder
            .facets
            .into_iter()
            .filter(|f| f.alive)
            .map(|f| Facet { vertices: f.vertices, normal: f.normal, offset: f.offset })
            .collect();
        Ok(Hull { dim, coords, facets, interior })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// A point strictly inside the hull (centroid of the initial simplex).
    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    /// Sorted indices of points that are vertices of some facet.
    pub fn vertex_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.facets.iter().flat_map(|f| f.vertices.iter().copied()).collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    /// Volume by fan triangulation from the interior point.
    pub fn volume(&self) -> f64 {
        let d = self.dim;
        let mut m = vec![0.0; d * d];
        let mut total = 0.0;
        for f in &self.facets {
            for (r, &v) in f.vertices.iter().enumerate() {
                let p = self.point(v);
                for c in 0..d {
                    m[r * d + c] = p[c] - self.interior[c];
                }
            }
            total += det_in_place(&mut m, d).abs();
        }
        total / factorial(d)
    }

    /// Distinct supporting hyperplanes `(normal, offset)`, merging the
    /// simplicial pieces of each true facet. Planes are compared after
    /// scaling normals to unit length, within `tol` in every component.
    pub fn distinct_planes(&self, tol: f64) -> Vec<(Vec<f64>, f64)> {
        let mut planes: Vec<Vec<f64>> = self
            .facets
            .iter()
            .map(|f| {
                let mut p = f.normal.clone();
                p.push(f.offset);
                p
            })
            .collect();
        dedup_rows(&mut planes, tol);
        planes
            .into_iter()
            .map(|mut p| {
                let off = p.pop().unwrap();
                (p, off)
            })
            .collect()
    }
}

/// Sorts rows lexicographically and removes rows within `tol` (max-norm) of
/// their predecessor.
pub(crate) fn dedup_rows(rows: &mut Vec<Vec<f64>>, tol: f64) {
    rows.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            let o = x.total_cmp(y);
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for r in rows.drain(..) {
        let dup = out.iter().rev().take(8).any(|o| {
            o.iter().zip(&r).all(|(x, y)| (x - y).abs() <= tol)
        });
        if !dup {
            out.push(r);
        }
    }
    *rows = out;
}

struct Builder<'a> {
    dim: usize,
    coords: &'a [f64],
    eps: f64,
    facets: Vec<WorkFacet>,
    interior: Vec<f64>,
}

impl Builder<'_> {
    fn count(&self) -> usize {
        self.coords.len() / self.dim
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn distance(&self, f: &WorkFacet, i: usize) -> f64 {
        dot(&f.normal, self.point(i)) - f.offset
    }

    fn initial_simplex(&self) -> Result<Vec<usize>> {
        let d = self.dim;
        let n = self.count();
        let mut first = 0;
        for i in 1..n {
            if lex_less(self.point(i), self.point(first)) {
                first = i;
            }
        }
        let mut chosen = vec![first];
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
        let origin = self.point(first).to_vec();
        for _ in 0..d {
            let mut best = None;
            let mut best_dist = 0.0;
            for i in 0..n {
                let mut r: Vec<f64> = self.point(i).iter().zip(&origin).map(|(a, b)| a - b).collect();
                for b in &basis {
                    let c = dot(&r, b);
                    for (x, y) in r.iter_mut().zip(b) {
                        *x -= c * y;
                    }
                }
                let dist = norm(&r);
                if dist > best_dist {
                    best_dist = dist;
                    best = Some((i, r));
                }
            }
            match best {
                Some((i, r)) if best_dist > self.eps * 10.0 => {
                    chosen.push(i);
                    basis.push(r.iter().map(|x| x / best_dist).collect());
                }
                _ => {
                    return Err(Error::Degenerate(format!(
                        "points span only {} of {} dimensions",
                        basis.len(),
                        d
                    )))
                }
            }
        }
        Ok(chosen)
    }

    fn make_facet(&self, vertices: Vec<usize>) -> WorkFacet {
        let d = self.dim;
        let base = self.point(vertices[0]);
        let rows: Vec<Vec<f64>> = vertices[1..]
            .iter()
            .map(|&v| self.point(v).iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let mut normal = cofactor_normal(&rows, d);
        let len = norm(&normal);
        if len > 0.0 {
            normal.iter_mut().for_each(|x| *x /= len);
        }
        let mut offset = dot(&normal, base);
        if dot(&normal, &self.interior) > offset {
            normal.iter_mut().for_each(|x| *x = -*x);
            offset = -offset;
        }
        WorkFacet { vertices, normal, offset, neighbors: vec![usize::MAX; d], outside: Vec::new(), alive: true }
    }

    fn run(&mut self) -> Result<()> {
        let d = self.dim;
        let simplex = self.initial_simplex()?;
        let mut interior = vec![0.0; d];
        for &v in &simplex {
            for (c, x) in interior.iter_mut().zip(self.point(v)) {
                *c += x / (d + 1) as f64;
            }
        }
        self.interior = interior;
        for omit in 0..=d {
            let verts: Vec<usize> =
                simplex.iter().enumerate().filter(|&(i, _)| i != omit).map(|(_, &v)| v).collect();
            let mut f = self.make_facet(verts);
            // Facet `omit` is opposite simplex vertex `omit`; the neighbour
            // across the ridge lacking simplex vertex j is facet j.
            let mut t = 0;
            for j in 0..=d {
                if j != omit {
                    f.neighbors[t] = j;
                    t += 1;
                }
            }
            self.facets.push(f);
        }

        let in_simplex: Vec<bool> = {
            let mut m = vec![false; self.count()];
            simplex.iter().for_each(|&v| m[v] = true);
            m
        };
        for i in 0..self.count() {
            if in_simplex[i] {
                continue;
            }
            for fi in 0..self.facets.len() {
                if self.distance(&self.facets[fi], i) > self.eps {
                    self.facets[fi].outside.push(i);
                    break;
                }
            }
        }

        let mut cursor = 0;
        while cursor < self.facets.len() {
            if !self.facets[cursor].alive || self.facets[cursor].outside.is_empty() {
                cursor += 1;
                continue;
            }
            self.add_point(cursor)?;
        }
        Ok(())
    }

    fn add_point(&mut self, start: usize) -> Result<()> {
        let d = self.dim;
        let apex = {
            let f = &self.facets[start];
            let mut best = f.outside[0];
            let mut best_d = self.distance(f, best);
            for &i in &f.outside[1..] {
                let di = self.distance(f, i);
                if di > best_d || (di == best_d && i < best) {
                    best = i;
                    best_d = di;
                }
            }
            best
        };

        let mut visible = vec![start];
        let mut is_visible: HashMap<usize, bool> = HashMap::new();
        is_visible.insert(start, true);
        let mut head = 0;
        while head < visible.len() {
            let f = visible[head];
            head += 1;
            for t in 0..d {
                let nb = self.facets[f].neighbors[t];
                if is_visible.contains_key(&nb) {
                    continue;
                }
                let vis = self.distance(&self.facets[nb], apex) > self.eps;
                is_visible.insert(nb, vis);
                if vis {
                    visible.push(nb);
                }
            }
        }

        // Horizon ridges: (ridge vertices, facet beyond, old visible facet).
        let mut horizon: Vec<(Vec<usize>, usize, usize)> = Vec::new();
        for &f in &visible {
            for t in 0..d {
                let nb = self.facets[f].neighbors[t];
                if !is_visible[&nb] {
                    let ridge: Vec<usize> = self.facets[f]
                        .vertices
                        .iter()
                        .enumerate()
                        .filter(|&(s, _)| s != t)
                        .map(|(_, &v)| v)
                        .collect();
                    horizon.push((ridge, nb, f));
                }
            }
        }
        if horizon.is_empty() {
            return Err(Error::Degenerate("empty horizon while building hull".into()));
        }

        let first_new = self.facets.len();
        let mut ridge_map: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        for (ridge, beyond, old) in horizon {
            let mut verts = ridge.clone();
            verts.push(apex);
            let mut nf = self.make_facet(verts);
            let id = self.facets.len();
            nf.neighbors[d - 1] = beyond;
            let slot = self.facets[beyond].neighbors.iter().position(|&x| x == old).ok_or_else(|| {
                Error::Degenerate("inconsistent hull adjacency".into())
            })?;
            self.facets[beyond].neighbors[slot] = id;
            for s in 0..d - 1 {
                let mut key: Vec<usize> =
                    ridge.iter().enumerate().filter(|&(r, _)| r != s).map(|(_, &v)| v).collect();
                key.sort_unstable();
                if let Some((other, other_slot)) = ridge_map.remove(&key) {
                    nf.neighbors[s] = other;
                    self.facets[other].neighbors[other_slot] = id;
                } else {
                    ridge_map.insert(key, (id, s));
                }
            }
            self.facets.push(nf);
        }
        if !ridge_map.is_empty() {
            return Err(Error::Degenerate("unmatched ridges while building hull".into()));
        }

        let mut orphans: Vec<usize> = Vec::new();
        for &f in &visible {
            self.facets[f].alive = false;
            orphans.append(&mut self.facets[f].outside);
        }
        orphans.sort_unstable();
        for i in orphans {
            if i == apex {
                continue;
            }
            for fi in first_new..self.facets.len() {
                if self.distance(&self.facets[fi], i) > self.eps {
                    self.facets[fi].outside.push(i);
                    break;
                }
            }
        }
        Ok(())
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn factorial(d: usize) -> f64 {
    (1..=d).map(|i| i as f64).product()
}

/// Generalized cross product of `d - 1` vectors in R^d.
fn cofactor_normal(rows: &[Vec<f64>], d: usize) -> Vec<f64> {
    let m = d - 1;
    let mut minor = vec![0.0; m * m];
    (0..d)
        .map(|j| {
            for (r, row) in rows.iter().enumerate() {
                let mut c = 0;
                for (col, &x) in row.iter().enumerate() {
                    if col != j {
                        minor[r * m + c] = x;
                        c += 1;
                    }
                }
            }
            let det = if m == 0 { 1.0 } else { det_in_place(&mut minor, m) };
            if j % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

/// Determinant by Gaussian elimination with partial pivoting; clobbers `m`.
pub(crate) fn det_in_place(m: &mut [f64], d: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..d {
        let mut piv = col;
        for r in col + 1..d {
            if m[r * d + col].abs() > m[piv * d + col].abs() {
                piv = r;
            }
        }
        let p = m[piv * d + col];
        if p == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..d {
                m.swap(piv * d + c, col * d + c);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..d {
            let f = m[r * d + col] / p;
            if f != 0.0 {
                for c in col..d {
                    m[r * d + c] -= f * m[col * d + c];
                }
            }
        }
    }
    det
}
