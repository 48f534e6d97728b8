//! Convex body representations and their pointwise functionals.
//!
//! A [`Body`] is one of four kinds: a halfspace intersection, a vertex hull,
//! a product of two unit balls, or the unit ball itself. All bodies live in
//! R^n with n in 2..=4, are bounded, and contain the origin in their
//! interior — construction fails otherwise. Polytope bodies keep both
//! descriptions around (the dual one is computed eagerly at construction by
//! brute-force enumeration), so support/radial evaluations and facet walks
//! are cheap afterward.
//!
//! Conventions: facet constraints are `<normal, x> <= offset` with unit
//! normals and strictly positive offsets; the radial function is evaluated
//! on any nonzero direction and is homogeneous of degree -1; ties in the
//! touching-facet map are broken toward the lowest facet index and flagged.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hull;

/// Dimensions this crate supports.
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 4;
/// Cap on facet/vertex counts: enumeration is combinatorial.
pub const MAX_FACETS: usize = 64;
pub const MAX_VERTICES: usize = 64;

/// Relative tolerance deciding whether two facets tie for the touching map.
const TIE_TOL: f64 = 1e-10;
/// Directions shorter than this are rejected as degenerate.
const DIR_TOL: f64 = 1e-12;
/// Offsets must exceed this after normal normalization (origin interior).
const OFFSET_FLOOR: f64 = 1e-9;

/// Outer unit normal of the supporting facet hit by a ray, with a flag that
/// is false when several facets tie within tolerance (ray hits a ridge).
#[derive(Debug, Clone)]
pub struct BoundaryNormal {
    pub normal: DVector<f64>,
    pub unique: bool,
}

/// Largest gamma with -gamma K contained in K, plus the facet that attains
/// the minimum for polytope bodies.
#[derive(Debug, Clone)]
pub struct Asymmetry {
    pub gamma: f64,
    pub witness_facet: Option<usize>,
}

/// One facet of a polytope body, with its incident vertices.
#[derive(Debug, Clone)]
pub struct Facet {
    pub index: usize,
    pub normal: DVector<f64>,
    pub offset: f64,
    pub vertices: Vec<DVector<f64>>,
}

#[derive(Debug, Clone)]
pub struct HPolytope {
    normals: Vec<DVector<f64>>,
    offsets: Vec<f64>,
    vertices: Vec<DVector<f64>>,
}

#[derive(Debug, Clone)]
pub struct VPolytope {
    vertices: Vec<DVector<f64>>,
    normals: Vec<DVector<f64>>,
    offsets: Vec<f64>,
}

/// B^split x B^(dim-split): the product of two unit balls in complementary
/// coordinate blocks.
#[derive(Debug, Clone, Copy)]
pub struct ProductBall {
    pub dim: usize,
    pub split: usize,
}

#[derive(Debug, Clone)]
pub enum BodyKind {
    HPolytope(HPolytope),
    VPolytope(VPolytope),
    ProductBall(ProductBall),
    Ball,
}

/// A named convex body with the origin interior.
#[derive(Debug, Clone)]
pub struct Body {
    name: String,
    dim: usize,
    kind: BodyKind,
}

fn check_dim(dim: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(Error::unsupported(format!(
            "ambient dimension must be in {MIN_DIM}..={MAX_DIM}, got {dim}"
        )));
    }
    Ok(())
}

/// Normalize constraint rows, then validate: unit normals, offsets bounded
/// away from zero, no duplicate facet directions.
fn normalize_constraints(
    raw_normals: Vec<DVector<f64>>,
    raw_offsets: Vec<f64>,
    dim: usize,
) -> Result<(Vec<DVector<f64>>, Vec<f64>)> {
    if raw_normals.len() != raw_offsets.len() {
        return Err(Error::invalid_body(format!(
            "{} normals but {} offsets",
            raw_normals.len(),
            raw_offsets.len()
        )));
    }
    if raw_normals.len() > MAX_FACETS {
        return Err(Error::invalid_body(format!(
            "too many facets: {} (limit {MAX_FACETS})",
            raw_normals.len()
        )));
    }
    let mut normals = Vec::with_capacity(raw_normals.len());
    let mut offsets = Vec::with_capacity(raw_offsets.len());
    for (i, (a, b)) in raw_normals.into_iter().zip(raw_offsets).enumerate() {
        if a.len() != dim {
            return Err(Error::invalid_body(format!(
                "normal {i} has length {} in dimension {dim}",
                a.len()
            )));
        }
        let len = a.norm();
        if len <= DIR_TOL {
            return Err(Error::invalid_body(format!("normal {i} is (numerically) zero")));
        }
        let unit = a / len;
        let offset = b / len;
        if offset <= OFFSET_FLOOR {
            return Err(Error::invalid_body(format!(
                "constraint {i} has offset {offset:.3e} after normalization; \
                 the origin must be interior"
            )));
        }
        for (j, earlier) in normals.iter().enumerate() {
            let dot: f64 = unit.dot(earlier);
            if dot > 1.0 - TIE_TOL {
                return Err(Error::invalid_body(format!(
                    "constraints {j} and {i} have the same facet direction"
                )));
            }
        }
        normals.push(unit);
        offsets.push(offset);
    }
    Ok((normals, offsets))
}

impl Body {
    /// Halfspace intersection `{x : normals[i] . x <= offsets[i]}`.
    pub fn hpolytope(
        name: impl Into<String>,
        normals: Vec<DVector<f64>>,
        offsets: Vec<f64>,
        dim: usize,
    ) -> Result<Self> {
        check_dim(dim)?;
        let (normals, offsets) = normalize_constraints(normals, offsets, dim)?;
        if !hull::positively_spans(&normals, dim) {
            return Err(Error::invalid_body(
                "halfspace intersection is unbounded (facet normals do not positively span)",
            ));
        }
        let vertices = hull::vertex_enumeration(&normals, &offsets, dim);
        if vertices.len() < dim + 1 {
            return Err(Error::invalid_body(format!(
                "only {} vertices enumerated; body is degenerate",
                vertices.len()
            )));
        }
        if vertices.len() > MAX_VERTICES {
            return Err(Error::invalid_body(format!(
                "too many vertices: {} (limit {MAX_VERTICES})",
                vertices.len()
            )));
        }
        // Every constraint must actually be a facet; a never-tight row would
        // silently distort facet-based integrals, so reject it outright.
        let scale = vertices.iter().fold(1.0f64, |m, v| m.max(v.amax()));
        for (i, (a, b)) in normals.iter().zip(&offsets).enumerate() {
            let incident = vertices
                .iter()
                .filter(|v| (a.dot(v) - b).abs() <= hull::GEOM_TOL * scale)
                .count();
            if incident < dim {
                return Err(Error::invalid_body(format!(
                    "constraint {i} is redundant (tight at {incident} vertices; needs {dim})"
                )));
            }
        }
        Ok(Body {
            name: name.into(),
            dim,
            kind: BodyKind::HPolytope(HPolytope {
                normals,
                offsets,
                vertices,
            }),
        })
    }

    /// Convex hull of a vertex list.
    pub fn vpolytope(
        name: impl Into<String>,
        vertices: Vec<DVector<f64>>,
        dim: usize,
    ) -> Result<Self> {
        check_dim(dim)?;
        if vertices.len() > MAX_VERTICES {
            return Err(Error::invalid_body(format!(
                "too many vertices: {} (limit {MAX_VERTICES})",
                vertices.len()
            )));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::invalid_body(format!(
                    "vertex {i} has length {} in dimension {dim}",
                    v.len()
                )));
            }
        }
        // Full-dimensionality: the edge span from vertex 0 must have rank dim.
        if vertices.len() < dim + 1 {
            return Err(Error::invalid_body(format!(
                "need at least {} vertices in dimension {dim}",
                dim + 1
            )));
        }
        let mut edges = DMatrix::zeros(vertices.len() - 1, dim);
        for (r, v) in vertices[1..].iter().enumerate() {
            edges.set_row(r, &(v - &vertices[0]).transpose());
        }
        let scale = vertices.iter().fold(1.0f64, |m, v| m.max(v.amax()));
        if edges.svd(false, false).rank(1e-9 * scale) < dim {
            return Err(Error::invalid_body(
                "vertices do not span a full-dimensional body",
            ));
        }
        let planes = hull::facet_planes(&vertices, dim)?;
        if planes.len() > MAX_FACETS {
            return Err(Error::invalid_body(format!(
                "too many facets: {} (limit {MAX_FACETS})",
                planes.len()
            )));
        }
        for (i, p) in planes.iter().enumerate() {
            if p.offset <= OFFSET_FLOOR {
                return Err(Error::invalid_body(format!(
                    "facet {i} passes within {:.1e} of the origin; the origin must be interior",
                    p.offset.max(0.0)
                )));
            }
        }
        // Keep only vertices that are extreme (on at least dim facets); the
        // hull pass also drops interior input points.
        let tol = hull::GEOM_TOL * scale;
        let extreme: Vec<DVector<f64>> = vertices
            .iter()
            .filter(|v| {
                planes
                    .iter()
                    .filter(|p| (p.normal.dot(v) - p.offset).abs() <= tol)
                    .count()
                    >= dim
            })
            .cloned()
            .collect();
        let mut deduped: Vec<DVector<f64>> = Vec::with_capacity(extreme.len());
        for v in extreme {
            if !deduped.iter().any(|u| (u - &v).amax() <= tol) {
                deduped.push(v);
            }
        }
        let (normals, offsets) = planes.into_iter().map(|p| (p.normal, p.offset)).unzip();
        Ok(Body {
            name: name.into(),
            dim,
            kind: BodyKind::VPolytope(VPolytope {
                vertices: deduped,
                normals,
                offsets,
            }),
        })
    }

    /// Product of unit balls B^split x B^(dim - split).
    pub fn product_ball(name: impl Into<String>, dim: usize, split: usize) -> Result<Self> {
        check_dim(dim)?;
        if split == 0 || split >= dim {
            return Err(Error::invalid_body(format!(
                "product split must satisfy 1 <= split <= dim-1, got {split} with dim {dim}"
            )));
        }
        Ok(Body {
            name: name.into(),
            dim,
            kind: BodyKind::ProductBall(ProductBall { dim, split }),
        })
    }

    /// Unit Euclidean ball.
    pub fn ball(name: impl Into<String>, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Body {
            name: name.into(),
            dim,
            kind: BodyKind::Ball,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            BodyKind::HPolytope(_) => "hpolytope",
            BodyKind::VPolytope(_) => "vpolytope",
            BodyKind::ProductBall(_) => "product_ball",
            BodyKind::Ball => "ball",
        }
    }

    pub fn is_polytope(&self) -> bool {
        matches!(&self.kind, BodyKind::HPolytope(_) | BodyKind::VPolytope(_))
    }

    /// Facet constraints for polytope kinds.
    fn constraints(&self) -> Option<(&[DVector<f64>], &[f64])> {
        match &self.kind {
            BodyKind::HPolytope(h) => Some((&h.normals, &h.offsets)),
            BodyKind::VPolytope(v) => Some((&v.normals, &v.offsets)),
            _ => None,
        }
    }

    /// Vertices for polytope kinds.
    pub fn vertices(&self) -> Result<&[DVector<f64>]> {
        match &self.kind {
            BodyKind::HPolytope(h) => Ok(&h.vertices),
            BodyKind::VPolytope(v) => Ok(&v.vertices),
            _ => Err(Error::unsupported(format!(
                "vertex access requires a polytope body, got {}",
                self.kind_name()
            ))),
        }
    }

    /// Largest coordinate magnitude over the body (used to scale tolerances).
    pub fn coord_scale(&self) -> f64 {
        match &self.kind {
            BodyKind::HPolytope(h) => h.vertices.iter().fold(1.0f64, |m, v| m.max(v.amax())),
            BodyKind::VPolytope(v) => v.vertices.iter().fold(1.0f64, |m, v| m.max(v.amax())),
            _ => 1.0,
        }
    }

    /// Support function h(u) = max over the body of <u, x>. Defined for all
    /// u; positively homogeneous of degree 1.
    pub fn support(&self, u: &DVector<f64>) -> f64 {
        match &self.kind {
            BodyKind::HPolytope(h) => h
                .vertices
                .iter()
                .map(|v| u.dot(v))
                .fold(f64::NEG_INFINITY, f64::max),
            BodyKind::VPolytope(v) => v
                .vertices
                .iter()
                .map(|p| u.dot(p))
                .fold(f64::NEG_INFINITY, f64::max),
            BodyKind::ProductBall(pb) => {
                let (a, b) = split_norms(u, pb.split);
                a + b
            }
            BodyKind::Ball => u.norm(),
        }
    }

    /// Radial function rho(u): the boundary is at rho(u) * u. Homogeneous of
    /// degree -1; `u` need not be unit. Fails on (numerically) zero input.
    pub fn radial(&self, u: &DVector<f64>) -> Result<f64> {
        let len = u.norm();
        if len <= DIR_TOL {
            return Err(Error::domain(
                "radial function evaluated on a (numerically) zero direction",
            ));
        }
        match &self.kind {
            BodyKind::HPolytope(_) | BodyKind::VPolytope(_) => {
                let (normals, offsets) = self.constraints().expect("polytope kind");
                let mut best = f64::INFINITY;
                for (a, b) in normals.iter().zip(offsets) {
                    let den = a.dot(u);
                    if den > DIR_TOL * len {
                        best = best.min(b / den);
                    }
                }
                if best.is_finite() {
                    Ok(best)
                } else {
                    Err(Error::domain(
                        "direction escapes the body (unbounded radial value)",
                    ))
                }
            }
            BodyKind::ProductBall(pb) => {
                let (a, b) = split_norms(u, pb.split);
                Ok(1.0 / a.max(b))
            }
            BodyKind::Ball => Ok(1.0 / len),
        }
    }

    /// Membership test with an absolute tolerance.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        match &self.kind {
            BodyKind::HPolytope(_) | BodyKind::VPolytope(_) => {
                let (normals, offsets) = self.constraints().expect("polytope kind");
                normals
                    .iter()
                    .zip(offsets)
                    .all(|(a, b)| a.dot(x) <= b + tol)
            }
            BodyKind::ProductBall(pb) => {
                let (a, b) = split_norms(x, pb.split);
                a <= 1.0 + tol && b <= 1.0 + tol
            }
            BodyKind::Ball => x.norm() <= 1.0 + tol,
        }
    }

    /// Outer unit normal at the boundary point rho(u) u, i.e. the touching
    /// facet (or sphere patch) hit by the ray through `u`. Ties within a
    /// relative 1e-10 are broken toward the lowest facet index and flagged
    /// `unique: false`.
    pub fn boundary_normal(&self, u: &DVector<f64>) -> Result<BoundaryNormal> {
        let len = u.norm();
        if len <= DIR_TOL {
            return Err(Error::domain(
                "touching-facet map evaluated on a (numerically) zero direction",
            ));
        }
        match &self.kind {
            BodyKind::HPolytope(_) | BodyKind::VPolytope(_) => {
                let (normals, offsets) = self.constraints().expect("polytope kind");
                let mut best = f64::INFINITY;
                let mut best_i = usize::MAX;
                let mut ratios = Vec::with_capacity(normals.len());
                for (i, (a, b)) in normals.iter().zip(offsets).enumerate() {
                    let den = a.dot(u);
                    let r = if den > DIR_TOL * len {
                        b / den
                    } else {
                        f64::INFINITY
                    };
                    ratios.push(r);
                    if r < best {
                        best = r;
                        best_i = i;
                    }
                }
                if !best.is_finite() {
                    return Err(Error::domain(
                        "direction escapes the body (unbounded radial value)",
                    ));
                }
                let ties = ratios
                    .iter()
                    .filter(|r| r.is_finite() && **r <= best * (1.0 + TIE_TOL))
                    .count();
                Ok(BoundaryNormal {
                    normal: normals[best_i].clone(),
                    unique: ties == 1,
                })
            }
            BodyKind::ProductBall(pb) => {
                let (a, b) = split_norms(u, pb.split);
                let m = a.max(b);
                // Boundary point z = u / m; the touched patch is the block
                // whose norm is maximal. Ties (the product's edge) resolve
                // to the first block.
                let unique = (a - b).abs() > TIE_TOL * m;
                let mut normal = DVector::zeros(self.dim);
                if a >= b {
                    for i in 0..pb.split {
                        normal[i] = u[i] / a;
                    }
                } else {
                    for i in pb.split..self.dim {
                        normal[i] = u[i] / b;
                    }
                }
                Ok(BoundaryNormal { normal, unique })
            }
            BodyKind::Ball => Ok(BoundaryNormal {
                normal: u / len,
                unique: true,
            }),
        }
    }

    /// Asymmetry constant: the largest gamma in (0, 1] with -gamma K inside
    /// K. For polytopes this is the minimum over facets of
    /// offset / h(-normal); ball kinds are symmetric and return exactly 1.
    pub fn asymmetry(&self) -> Asymmetry {
        match &self.kind {
            BodyKind::HPolytope(_) | BodyKind::VPolytope(_) => {
                let (normals, offsets) = self.constraints().expect("polytope kind");
                let mut gamma = f64::INFINITY;
                let mut witness = 0;
                for (i, (a, b)) in normals.iter().zip(offsets).enumerate() {
                    let denom = self.support(&(-a));
                    let g = b / denom;
                    if g < gamma {
                        gamma = g;
                        witness = i;
                    }
                }
                // A symmetric body evaluates to 1 up to roundoff; snap so the
                // symmetric-body code paths (exact reference bounds) engage.
                if (gamma - 1.0).abs() <= 1e-12 {
                    gamma = 1.0;
                }
                Asymmetry {
                    gamma,
                    witness_facet: Some(witness),
                }
            }
            BodyKind::ProductBall(_) | BodyKind::Ball => Asymmetry {
                gamma: 1.0,
                witness_facet: None,
            },
        }
    }

    /// Independent route to the asymmetry constant: bisection on the
    /// containment predicate "-gamma K inside K" (checked on vertices for
    /// polytopes). Intended as a cross-check of [`Body::asymmetry`].
    pub fn asymmetry_by_bisection(&self, tol: f64) -> f64 {
        let verts = match self.vertices() {
            Ok(v) => v,
            Err(_) => return 1.0, // ball kinds are symmetric
        };
        let fits = |g: f64| -> bool {
            verts.iter().all(|v| {
                let p = v * (-g);
                self.contains(&p, 1e-12 * self.coord_scale())
            })
        };
        let mut lo = 0.0;
        let mut hi = 1.0;
        if fits(1.0) {
            return 1.0;
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Center of mass. Polytope kinds integrate over the triangulation;
    /// ball kinds are centered by construction.
    pub fn centroid(&self) -> Result<DVector<f64>> {
        match &self.kind {
            BodyKind::HPolytope(_) | BodyKind::VPolytope(_) => {
                hull::hull_centroid(self.vertices()?, self.dim)
            }
            BodyKind::ProductBall(_) | BodyKind::Ball => Ok(DVector::zeros(self.dim)),
        }
    }

    /// Facets with their incident vertices (polytope kinds only).
    pub fn facets(&self) -> Result<Vec<Facet>> {
        let (normals, offsets) = self.constraints().ok_or_else(|| {
            Error::unsupported(format!(
                "facet enumeration requires a polytope body, got {}",
                self.kind_name()
            ))
        })?;
        let vertices = self.vertices()?;
        let tol = hull::GEOM_TOL * self.coord_scale();
        let mut out = Vec::with_capacity(normals.len());
        for (i, (a, b)) in normals.iter().zip(offsets).enumerate() {
            let incident: Vec<DVector<f64>> = vertices
                .iter()
                .filter(|v| (a.dot(v) - b).abs() <= tol)
                .cloned()
                .collect();
            out.push(Facet {
                index: i,
                normal: a.clone(),
                offset: *b,
                vertices: incident,
            });
        }
        Ok(out)
    }

    /// The dilate alpha K (polytope kinds only; the ball kinds are fixed at
    /// unit scale by their definition).
    pub fn scale(&self, alpha: f64) -> Result<Body> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::config(format!("scale factor must be positive, got {alpha}")));
        }
        match &self.kind {
            BodyKind::HPolytope(h) => Body::hpolytope(
                format!("{}*{alpha}", self.name),
                h.normals.clone(),
                h.offsets.iter().map(|b| b * alpha).collect(),
                self.dim,
            ),
            BodyKind::VPolytope(v) => Body::vpolytope(
                format!("{}*{alpha}", self.name),
                v.vertices.iter().map(|p| p * alpha).collect(),
                self.dim,
            ),
            _ => Err(Error::unsupported(format!(
                "scaling is implemented for polytope bodies, got {}",
                self.kind_name()
            ))),
        }
    }
}

/// Norms of the two coordinate blocks of `x` split at `split`.
fn split_norms(x: &DVector<f64>, split: usize) -> (f64, f64) {
    let mut a = 0.0;
    let mut b = 0.0;
    for i in 0..x.len() {
        if i < split {
            a += x[i] * x[i];
        } else {
            b += x[i] * x[i];
        }
    }
    (a.sqrt(), b.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_cube(dim: usize) -> Body {
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..dim {
            for s in [1.0f64, -1.0] {
                let mut n = DVector::zeros(dim);
                n[i] = s;
                normals.push(n);
                offsets.push(1.0);
            }
        }
        Body::hpolytope(format!("cube{dim}"), normals, offsets, dim).unwrap()
    }

    fn shifted_cube(t: f64) -> Body {
        // [-1, 1]^3 translated by t e1.
        let dim = 3;
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..dim {
            for s in [1.0f64, -1.0] {
                let mut n = DVector::zeros(dim);
                n[i] = s;
                normals.push(n);
                offsets.push(if i == 0 { 1.0 + s * t } else { 1.0 });
            }
        }
        Body::hpolytope(format!("shifted_cube({t})"), normals, offsets, dim).unwrap()
    }

    /// Independent radial value: bisection on the membership predicate.
    fn radial_by_bisection(body: &Body, u: &DVector<f64>) -> f64 {
        let mut lo = 0.0;
        let mut hi = 16.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if body.contains(&(u * (mid / u.norm())), 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi) / u.norm()
    }

    #[test]
    fn cube_radial_along_the_diagonal() {
        let cube = unit_cube(3);
        let u = DVector::from_vec(vec![1.0, 1.0, 1.0]) / 3.0f64.sqrt();
        // Boundary at the corner: distance sqrt(3).
        assert_relative_eq!(cube.radial(&u).unwrap(), 1.7320508075688772, epsilon = 1e-14);
        assert_relative_eq!(
            cube.radial(&u).unwrap(),
            radial_by_bisection(&cube, &u),
            epsilon = 1e-10
        );
        // Homogeneity of degree -1 (powers of two are exact in binary).
        let r1 = cube.radial(&u).unwrap();
        let r2 = cube.radial(&(&u * 2.0)).unwrap();
        assert_eq!(r1, 2.0 * r2);
    }

    #[test]
    fn radial_matches_bisection_on_an_asymmetric_body() {
        let body = shifted_cube(0.3);
        for dir in [
            vec![0.3, -0.7, 0.2],
            vec![-1.0, 0.1, 0.05],
            vec![0.9, 0.9, -0.8],
            vec![-0.2, -0.2, -0.9],
        ] {
            let u = DVector::from_vec(dir);
            assert_relative_eq!(
                body.radial(&u).unwrap(),
                radial_by_bisection(&body, &u),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn support_of_a_centered_triangle() {
        // Equilateral triangle, circumradius 1, one vertex straight up.
        let verts = vec![
            DVector::from_vec(vec![0.0, 1.0]),
            DVector::from_vec(vec![-(0.75f64.sqrt()), -0.5]),
            DVector::from_vec(vec![0.75f64.sqrt(), -0.5]),
        ];
        let tri = Body::vpolytope("triangle", verts, 2).unwrap();
        let up = DVector::from_vec(vec![0.0, 1.0]);
        assert_relative_eq!(tri.support(&up), 1.0, epsilon = 1e-14);
        assert_relative_eq!(tri.support(&(-up)), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn touching_facet_map_and_tie_flag() {
        let cube = unit_cube(3);
        let off_axis = DVector::from_vec(vec![0.9, 0.1, -0.2]);
        let bn = cube.boundary_normal(&off_axis).unwrap();
        assert!(bn.unique);
        assert_relative_eq!(bn.normal[0], 1.0, epsilon = 1e-14);
        let diagonal = DVector::from_vec(vec![1.0, 1.0, 1.0]);
        let tie = cube.boundary_normal(&diagonal).unwrap();
        assert!(!tie.unique);
        // Lowest-index winner: +e1 comes before +e2/+e3 in the constructor.
        assert_relative_eq!(tie.normal[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn asymmetry_of_reference_bodies() {
        let cube = unit_cube(3);
        let a = cube.asymmetry();
        assert_eq!(a.gamma, 1.0);

        let shifted = shifted_cube(0.3);
        let a = shifted.asymmetry();
        // (1 - t) / (1 + t) at t = 0.3.
        assert_relative_eq!(a.gamma, 0.5384615384615384, epsilon = 1e-12);
        // The witness is the facet -e1 . x <= 1 - t (index 1 in construction).
        assert_eq!(a.witness_facet, Some(1));
        assert_relative_eq!(
            shifted.asymmetry_by_bisection(1e-10),
            a.gamma,
            epsilon = 1e-8
        );

        let ball = Body::ball("ball3", 3).unwrap();
        assert_eq!(ball.asymmetry().gamma, 1.0);
    }

    #[test]
    fn product_ball_functionals() {
        let pb = Body::product_ball("cyl", 3, 1).unwrap();
        let axis = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert_relative_eq!(pb.radial(&axis).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(pb.support(&axis), 1.0, epsilon = 1e-14);
        // Corner direction: both blocks at norm 1, boundary at (1, 1, 0).
        let corner = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        assert_relative_eq!(pb.radial(&corner).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(pb.support(&corner), 2.0, epsilon = 1e-14);
        let bn = pb.boundary_normal(&corner).unwrap();
        assert!(!bn.unique); // edge of the cylinder
        assert_relative_eq!(bn.normal[0], 1.0, epsilon = 1e-14);
        let side = DVector::from_vec(vec![0.0, 0.6, 0.8]);
        let bn = pb.boundary_normal(&side).unwrap();
        assert!(bn.unique);
        assert_relative_eq!(bn.normal[1], 0.6, epsilon = 1e-14);
        assert_relative_eq!(bn.normal[2], 0.8, epsilon = 1e-14);
    }

    #[test]
    fn centroid_of_polytopes() {
        let cube = unit_cube(3);
        assert!(cube.centroid().unwrap().amax() <= 1e-12);
        // Shifted cube's centroid moves with the shift.
        let c = shifted_cube(0.25).centroid().unwrap();
        assert_relative_eq!(c[0], 0.25, epsilon = 1e-10);
        assert_relative_eq!(c[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn construction_rejects_bad_bodies() {
        // Origin not interior: offset 0 on one facet.
        let err = Body::hpolytope(
            "bad",
            vec![
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![-1.0, 0.0]),
                DVector::from_vec(vec![0.0, 1.0]),
                DVector::from_vec(vec![0.0, -1.0]),
            ],
            vec![1.0, 0.0, 1.0, 1.0],
            2,
        );
        assert!(matches!(err, Err(Error::InvalidBody(_))));

        // Unbounded: no ceiling.
        let err = Body::hpolytope(
            "open",
            vec![
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![-1.0, 0.0]),
                DVector::from_vec(vec![0.0, -1.0]),
            ],
            vec![1.0, 1.0, 1.0],
            2,
        );
        assert!(matches!(err, Err(Error::InvalidBody(_))));

        // Duplicate facet direction.
        let err = Body::hpolytope(
            "dup",
            vec![
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![2.0, 0.0]),
                DVector::from_vec(vec![-1.0, 0.0]),
                DVector::from_vec(vec![0.0, 1.0]),
                DVector::from_vec(vec![0.0, -1.0]),
            ],
            vec![1.0, 3.0, 1.0, 1.0, 1.0],
            2,
        );
        assert!(matches!(err, Err(Error::InvalidBody(_))));

        // Redundant (never tight) constraint.
        let err = Body::hpolytope(
            "redundant",
            vec![
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![-1.0, 0.0]),
                DVector::from_vec(vec![0.0, 1.0]),
                DVector::from_vec(vec![0.0, -1.0]),
                DVector::from_vec(vec![1.0, 1.0]),
            ],
            vec![1.0, 1.0, 1.0, 1.0, 5.0],
            2,
        );
        assert!(matches!(err, Err(Error::InvalidBody(_))));

        // Hull of points that miss the origin.
        let err = Body::vpolytope(
            "offside",
            vec![
                DVector::from_vec(vec![0.1, 0.1]),
                DVector::from_vec(vec![1.0, 0.2]),
                DVector::from_vec(vec![0.5, 1.0]),
            ],
            2,
        );
        assert!(matches!(err, Err(Error::InvalidBody(_))));

        // Unsupported dimension.
        assert!(Body::ball("b5", 5).is_err());
    }

    #[test]
    fn normals_are_normalized_on_load() {
        let body = Body::hpolytope(
            "scaled-rows",
            vec![
                DVector::from_vec(vec![2.0, 0.0]),
                DVector::from_vec(vec![-3.0, 0.0]),
                DVector::from_vec(vec![0.0, 0.5]),
                DVector::from_vec(vec![0.0, -1.0]),
            ],
            vec![2.0, 3.0, 0.5, 1.0],
            2,
        )
        .unwrap();
        let (normals, offsets) = body.constraints().unwrap();
        for a in normals {
            assert_relative_eq!(a.norm(), 1.0, epsilon = 1e-14);
        }
        for b in offsets {
            assert_relative_eq!(*b, 1.0, epsilon = 1e-14);
        }
        assert_eq!(body.vertices().unwrap().len(), 4);
    }

    #[test]
    fn scaling_dilates_the_radial_function() {
        let cube = unit_cube(2);
        let double = cube.scale(2.0).unwrap();
        let u = DVector::from_vec(vec![0.6, -0.8]);
        assert_relative_eq!(
            double.radial(&u).unwrap(),
            2.0 * cube.radial(&u).unwrap(),
            epsilon = 1e-12
        );
    }
}
