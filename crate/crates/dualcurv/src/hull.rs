//! Exact-by-enumeration polytope machinery for low dimension.
//!
//! Everything here is brute force on purpose: with dimension <= 4 and at
//! most a few dozen facets or vertices, enumerating all d-subsets is cheap,
//! has no degenerate-position corner cases beyond explicit tolerance checks,
//! and is easy to trust. No incremental hull, no pivoting.
//!
//! Conventions: hyperplanes are stored as a unit `normal` and an `offset`
//! with the body on the side `<normal, x> <= offset`; tolerances are
//! relative to the coordinate scale of the input.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative geometric tolerance used for incidence and deduplication.
pub const GEOM_TOL: f64 = 1e-9;

/// A closed halfspace boundary: `<normal, x> = offset` with `|normal| = 1`.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    pub normal: DVector<f64>,
    pub offset: f64,
}

/// Visit all `k`-element subsets of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Vector orthogonal to `d - 1` given vectors in R^d, by cofactor expansion
/// of the determinant along the unknown row. Zero output means the inputs
/// are linearly dependent.
fn orthogonal_complement_vector(rows: &[DVector<f64>], dim: usize) -> DVector<f64> {
    debug_assert_eq!(rows.len() + 1, dim);
    if dim == 1 {
        return DVector::from_vec(vec![1.0]);
    }
    let mut normal = DVector::zeros(dim);
    for i in 0..dim {
        let mut minor = DMatrix::zeros(dim - 1, dim - 1);
        for (r, row) in rows.iter().enumerate() {
            let mut c = 0;
            for j in 0..dim {
                if j == i {
                    continue;
                }
                minor[(r, c)] = row[j];
                c += 1;
            }
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        normal[i] = sign * minor.determinant();
    }
    normal
}

fn coordinate_scale(points: &[DVector<f64>]) -> f64 {
    points
        .iter()
        .map(|p| p.amax())
        .fold(1.0f64, |a, b| a.max(b))
}

/// Facet-defining hyperplanes of the convex hull of `points` in R^dim.
///
/// Tries every dim-subset as a candidate supporting hyperplane and keeps it
/// when all points lie (weakly) on one side. Duplicates from different
/// subsets spanning the same facet are merged. Subsets of deficient rank are
/// skipped, so collinear or repeated input points are harmless.
pub fn facet_planes(points: &[DVector<f64>], dim: usize) -> Result<Vec<Hyperplane>> {
    if points.len() < dim + 1 {
        return Err(Error::invalid_body(format!(
            "need at least {} points to span a {dim}-dimensional body, got {}",
            dim + 1,
            points.len()
        )));
    }
    let scale = coordinate_scale(points);
    let tol = GEOM_TOL * scale;
    let mut planes: Vec<Hyperplane> = Vec::new();
    let mut keep = |normal: DVector<f64>, offset: f64| {
        for p in &planes {
            if p.normal.dot(&normal) > 1.0 - 1e-9 && (p.offset - offset).abs() <= tol {
                return;
            }
        }
        planes.push(Hyperplane { normal, offset });
    };
    for_each_subset(points.len(), dim, |subset| {
        let base = &points[subset[0]];
        let edges: Vec<DVector<f64>> = subset[1..].iter().map(|&j| &points[j] - base).collect();
        let raw = orthogonal_complement_vector(&edges, dim);
        let len = raw.norm();
        if len <= 1e-12 * scale.powi(dim as i32 - 1).max(1e-12) {
            return; // degenerate subset
        }
        let normal = raw / len;
        let offset = normal.dot(base);
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for p in points {
            let s = normal.dot(p) - offset;
            hi = hi.max(s);
            lo = lo.min(s);
        }
        if hi <= tol {
            keep(normal, offset);
        } else if lo >= -tol {
            keep(-normal, -offset);
        }
    });
    if planes.is_empty() {
        return Err(Error::invalid_body(
            "points do not span a full-dimensional body",
        ));
    }
    Ok(planes)
}

/// Vertices of the polytope `{x : rows[i] . x <= offsets[i]}`.
///
/// Solves every dim-subset of tight constraints and keeps solutions feasible
/// for the whole system. Returns an empty list for an empty polytope; an
/// unbounded one simply yields the vertices of its closed face lattice, so
/// boundedness must be checked separately (see `positively_spans`).
pub fn vertex_enumeration(
    normals: &[DVector<f64>],
    offsets: &[f64],
    dim: usize,
) -> Vec<DVector<f64>> {
    let m = normals.len();
    let scale_b = offsets.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    let mut vertices: Vec<DVector<f64>> = Vec::new();
    for_each_subset(m, dim, |subset| {
        let mut a = DMatrix::zeros(dim, dim);
        let mut b = DVector::zeros(dim);
        for (r, &i) in subset.iter().enumerate() {
            a.set_row(r, &normals[i].transpose());
            b[r] = offsets[i];
        }
        let lu = a.clone().full_piv_lu();
        let Some(x) = lu.solve(&b) else {
            return;
        };
        // Reject ill-conditioned intersections (nearly parallel constraints).
        if (&a * &x - &b).amax() > 1e-7 * scale_b.max(x.amax()) {
            return;
        }
        let tol = GEOM_TOL * scale_b.max(x.norm());
        for i in 0..m {
            if normals[i].dot(&x) > offsets[i] + tol {
                return;
            }
        }
        for v in &vertices {
            if (v - &x).amax() <= tol {
                return;
            }
        }
        vertices.push(x);
    });
    vertices
}

/// True when the given unit vectors positively span R^dim, i.e. the origin
/// is interior to their convex hull. This is exactly the boundedness test
/// for a halfspace intersection with those outer normals.
pub fn positively_spans(normals: &[DVector<f64>], dim: usize) -> bool {
    if normals.len() < dim + 1 {
        return false;
    }
    let Ok(planes) = facet_planes(normals, dim) else {
        return false;
    };
    // Origin strictly inside the hull of the normal endpoints.
    planes.iter().all(|p| p.offset > 1e-9)
}

/// Convex hull of a 2-D point set, counterclockwise, no repeated endpoint.
/// Collinear intermediate points are dropped.
pub fn convex_hull_2d(points: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let scale = coordinate_scale(points);
    let tol = GEOM_TOL * scale;
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("non-finite coordinate"));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol);
    if pts.len() <= 2 {
        return pts
            .into_iter()
            .map(|(x, y)| DVector::from_vec(vec![x, y]))
            .collect();
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol * scale {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol * scale {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
        .into_iter()
        .map(|(x, y)| DVector::from_vec(vec![x, y]))
        .collect()
}

/// Orthonormal basis (rows) of the tangent space of a facet, given its
/// vertices and dimension `dim - 1`, by Gram–Schmidt over the edge vectors.
fn facet_basis(vertices: &[DVector<f64>], dim: usize) -> Option<Vec<DVector<f64>>> {
    let base = &vertices[0];
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim - 1);
    for v in &vertices[1..] {
        let mut e = v - base;
        for b in &basis {
            let c = b.dot(&e);
            e -= b * c;
        }
        let len = e.norm();
        if len > 1e-9 {
            basis.push(e / len);
            if basis.len() == dim - 1 {
                return Some(basis);
            }
        }
    }
    None
}

/// Decompose the convex hull of `vertices` (full-dimensional in R^dim,
/// dim <= 4) into simplices, each returned as dim+1 points. Facets are
/// triangulated recursively and coned to the vertex average.
pub fn triangulate(vertices: &[DVector<f64>], dim: usize) -> Result<Vec<Vec<DVector<f64>>>> {
    match dim {
        1 => {
            let lo = vertices
                .iter()
                .cloned()
                .min_by(|a, b| a[0].partial_cmp(&b[0]).unwrap())
                .ok_or_else(|| Error::invalid_body("no vertices"))?;
            let hi = vertices
                .iter()
                .cloned()
                .max_by(|a, b| a[0].partial_cmp(&b[0]).unwrap())
                .ok_or_else(|| Error::invalid_body("no vertices"))?;
            Ok(vec![vec![lo, hi]])
        }
        2 => {
            let hull = convex_hull_2d(vertices);
            if hull.len() < 3 {
                return Err(Error::invalid_body(
                    "points do not span a full-dimensional body",
                ));
            }
            let mut out = Vec::with_capacity(hull.len() - 2);
            for i in 1..hull.len() - 1 {
                out.push(vec![hull[0].clone(), hull[i].clone(), hull[i + 1].clone()]);
            }
            Ok(out)
        }
        3 | 4 => {
            let planes = facet_planes(vertices, dim)?;
            let scale = coordinate_scale(vertices);
            let tol = GEOM_TOL * scale;
            let apex = vertices.iter().sum::<DVector<f64>>() / vertices.len() as f64;
            let mut out = Vec::new();
            for plane in &planes {
                let on: Vec<DVector<f64>> = vertices
                    .iter()
                    .filter(|v| (plane.normal.dot(v) - plane.offset).abs() <= tol)
                    .cloned()
                    .collect();
                if on.len() < dim {
                    continue;
                }
                let Some(basis) = facet_basis(&on, dim) else {
                    continue;
                };
                let origin = on[0].clone();
                let local: Vec<DVector<f64>> = on
                    .iter()
                    .map(|v| {
                        DVector::from_iterator(dim - 1, basis.iter().map(|b| b.dot(&(v - &origin))))
                    })
                    .collect();
                let cells = triangulate(&local, dim - 1)?;
                for cell in cells {
                    let mut simplex = Vec::with_capacity(dim + 1);
                    simplex.push(apex.clone());
                    for y in cell {
                        let mut p = origin.clone();
                        for (c, b) in y.iter().zip(&basis) {
                            p += b * *c;
                        }
                        simplex.push(p);
                    }
                    out.push(simplex);
                }
            }
            if out.is_empty() {
                return Err(Error::invalid_body(
                    "triangulation produced no cells; input may be degenerate",
                ));
            }
            Ok(out)
        }
        d => Err(Error::unsupported(format!(
            "triangulation supports dimensions 1-4, got {d}"
        ))),
    }
}

/// Volume of the convex hull of `vertices` in R^dim.
pub fn hull_volume(vertices: &[DVector<f64>], dim: usize) -> Result<f64> {
    Ok(triangulate(vertices, dim)?
        .iter()
        .map(|s| crate::quad::simplex_volume(s))
        .sum())
}

/// Centroid (center of mass) of the convex hull of `vertices` in R^dim.
pub fn hull_centroid(vertices: &[DVector<f64>], dim: usize) -> Result<DVector<f64>> {
    let mut vol = 0.0;
    let mut moment = DVector::zeros(vertices[0].len());
    for simplex in triangulate(vertices, dim)? {
        let v = crate::quad::simplex_volume(&simplex);
        let c = simplex.iter().sum::<DVector<f64>>() / simplex.len() as f64;
        vol += v;
        moment += c * v;
    }
    if vol <= 0.0 {
        return Err(Error::invalid_body("degenerate body: zero volume"));
    }
    Ok(moment / vol)
}

/// Vertices of the Minkowski sum of two 2-D convex polygons: pairwise vertex
/// sums followed by a hull pass. Counterclockwise order.
pub fn minkowski_sum_2d(a: &[DVector<f64>], b: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut sums = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            sums.push(p + q);
        }
    }
    convex_hull_2d(&sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v2(x: f64, y: f64) -> DVector<f64> {
        DVector::from_vec(vec![x, y])
    }

    fn cube_vertices(dim: usize) -> Vec<DVector<f64>> {
        (0..1usize << dim)
            .map(|mask| {
                DVector::from_iterator(
                    dim,
                    (0..dim).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }),
                )
            })
            .collect()
    }

    #[test]
    fn facet_planes_of_a_square() {
        let planes = facet_planes(&cube_vertices(2), 2).unwrap();
        assert_eq!(planes.len(), 4);
        for p in &planes {
            assert_relative_eq!(p.offset, 1.0, epsilon = 1e-12);
            assert_relative_eq!(p.normal.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn vertex_enumeration_recovers_the_cube() {
        for dim in [2usize, 3, 4] {
            let mut normals = Vec::new();
            let mut offsets = Vec::new();
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    let mut n = DVector::zeros(dim);
                    n[i] = s;
                    normals.push(n);
                    offsets.push(1.0);
                }
            }
            let verts = vertex_enumeration(&normals, &offsets, dim);
            assert_eq!(verts.len(), 1 << dim);
        }
    }

    #[test]
    fn volumes_of_reference_bodies() {
        assert_relative_eq!(hull_volume(&cube_vertices(3), 3).unwrap(), 8.0, epsilon = 1e-10);
        assert_relative_eq!(hull_volume(&cube_vertices(4), 4).unwrap(), 16.0, epsilon = 1e-9);
        // Cross-polytope in R^d has volume 2^d / d!.
        for dim in [2usize, 3, 4] {
            let mut verts = Vec::new();
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    let mut v = DVector::zeros(dim);
                    v[i] = s;
                    verts.push(v);
                }
            }
            let mut fact = 1.0;
            for i in 2..=dim {
                fact *= i as f64;
            }
            assert_relative_eq!(
                hull_volume(&verts, dim).unwrap(),
                (1u64 << dim) as f64 / fact,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn centroid_of_a_shifted_box() {
        // [0, 2] x [-1, 1]: centroid (1, 0).
        let verts = vec![v2(0.0, -1.0), v2(2.0, -1.0), v2(2.0, 1.0), v2(0.0, 1.0)];
        let c = hull_centroid(&verts, 2).unwrap();
        assert_relative_eq!(c[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(c[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hull_discards_interior_and_collinear_points() {
        let mut pts = cube_vertices(2);
        pts.push(v2(0.0, 0.0));
        pts.push(v2(1.0, 0.0)); // edge midpoint
        let hull = convex_hull_2d(&pts);
        assert_eq!(hull.len(), 4);
    }

    #[test]
    fn minkowski_sum_of_squares_scales() {
        let a = cube_vertices(2);
        let b: Vec<DVector<f64>> = a.iter().map(|p| p * 0.5).collect();
        let sum = minkowski_sum_2d(&a, &b);
        assert_eq!(sum.len(), 4);
        for p in &sum {
            assert_relative_eq!(p.amax(), 1.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn positive_span_detects_unbounded_systems() {
        let dim = 3;
        let mut normals: Vec<DVector<f64>> = Vec::new();
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut n = DVector::zeros(dim);
                n[i] = s;
                normals.push(n);
            }
        }
        assert!(positively_spans(&normals, dim));
        normals.remove(0); // drop +e1: now unbounded toward +x
        assert!(!positively_spans(&normals, dim));
    }
}
