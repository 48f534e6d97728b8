//! Orthogonal shadows and affine slices of a body.
//!
//! For a body K and a proper subspace L, the *shadow* is the orthogonal
//! projection K|L expressed in L-coordinates, and the *slice* at a point
//! x of the shadow is K intersected with the affine complement x + L^perp,
//! expressed in complement coordinates. A slice point w corresponds to the
//! ambient point z = base + E w with base in L and the columns of E
//! orthonormal in L^perp, so |z|^2 = |x|^2 + |w|^2 exactly — the radial
//! weights in this crate lean on that splitting.
//!
//! Product-ball bodies support slicing only when L is exactly the first
//! ball's coordinate block (the one configuration where the slice is again
//! a ball); anything else would produce product-shaped slices that nothing
//! downstream needs.

use nalgebra::{DMatrix, DVector};

use crate::body::{Body, BodyKind};
use crate::error::{Error, Result};
use crate::hull::{self, Hyperplane};
use crate::subspace::Subspace;

const THIN_TOL: f64 = 1e-12;

/// Shape payload shared by shadows and slices.
#[derive(Debug, Clone)]
pub enum SectionShape {
    Polytope {
        planes: Vec<Hyperplane>,
        vertices: Vec<DVector<f64>>,
    },
    Ball {
        radius: f64,
    },
}

/// The orthogonal projection K|L, in L-coordinates.
#[derive(Debug, Clone)]
pub struct Shadow {
    pub dim: usize,
    pub shape: SectionShape,
}

/// A slice K with one affine complement fiber, in complement coordinates.
#[derive(Debug, Clone)]
pub struct Slice {
    /// Dimension n - k of the slice.
    pub dim: usize,
    pub shape: SectionShape,
    /// Ambient base point: the L-embedding of x.
    pub base: DVector<f64>,
    /// |x|; the ambient norm of a slice point w is sqrt(|x|^2 + |w|^2).
    pub base_norm: f64,
    /// n x (n-k) embedding: ambient point of w is base + embed * w.
    pub embed: DMatrix<f64>,
}

impl SectionShape {
    pub fn contains(&self, c: &DVector<f64>, tol: f64) -> bool {
        match self {
            SectionShape::Polytope { planes, .. } => {
                planes.iter().all(|p| p.normal.dot(c) <= p.offset + tol)
            }
            SectionShape::Ball { radius } => c.norm() <= radius + tol,
        }
    }

    /// Largest t with t * dir inside the shape. Requires the origin inside
    /// (true for shadows of our bodies and for slices through x = 0).
    pub fn radial_from_origin(&self, dir: &DVector<f64>) -> Result<f64> {
        let len = dir.norm();
        if len <= THIN_TOL {
            return Err(Error::domain("radial direction is (numerically) zero"));
        }
        match self {
            SectionShape::Polytope { planes, .. } => {
                let mut best = f64::INFINITY;
                for p in planes {
                    if p.offset < -THIN_TOL {
                        return Err(Error::domain(
                            "radial evaluation requires the origin inside the section",
                        ));
                    }
                    let den = p.normal.dot(dir);
                    if den > THIN_TOL * len {
                        best = best.min(p.offset / den);
                    }
                }
                if best.is_finite() {
                    Ok(best)
                } else {
                    Err(Error::domain("section is unbounded in this direction"))
                }
            }
            SectionShape::Ball { radius } => Ok(radius / len),
        }
    }

    /// Axis-aligned bounding box.
    pub fn bbox(&self, dim: usize) -> (DVector<f64>, DVector<f64>) {
        match self {
            SectionShape::Polytope { vertices, .. } => {
                let mut lo = DVector::from_element(dim, f64::INFINITY);
                let mut hi = DVector::from_element(dim, f64::NEG_INFINITY);
                for v in vertices {
                    for i in 0..dim {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            SectionShape::Ball { radius } => (
                DVector::from_element(dim, -radius),
                DVector::from_element(dim, *radius),
            ),
        }
    }
}

impl Shadow {
    pub fn contains(&self, c: &DVector<f64>, tol: f64) -> bool {
        self.shape.contains(c, tol)
    }

    pub fn bbox(&self) -> (DVector<f64>, DVector<f64>) {
        self.shape.bbox(self.dim)
    }
}

/// The orthogonal projection of `body` onto `l`, in L-coordinates.
pub fn project_body(body: &Body, l: &Subspace) -> Result<Shadow> {
    if l.ambient() != body.dim() {
        return Err(Error::config(format!(
            "subspace lives in dimension {} but the body in {}",
            l.ambient(),
            body.dim()
        )));
    }
    let k = l.dim();
    match body.kind() {
        BodyKind::HPolytope(_) | BodyKind::VPolytope(_) => {
            let projected: Vec<DVector<f64>> =
                body.vertices()?.iter().map(|v| l.to_coords(v)).collect();
            let (planes, vertices) = if k == 1 {
                let lo = projected.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = projected
                    .iter()
                    .map(|p| p[0])
                    .fold(f64::NEG_INFINITY, f64::max);
                (
                    vec![
                        Hyperplane {
                            normal: DVector::from_vec(vec![1.0]),
                            offset: hi,
                        },
                        Hyperplane {
                            normal: DVector::from_vec(vec![-1.0]),
                            offset: -lo,
                        },
                    ],
                    vec![
                        DVector::from_vec(vec![lo]),
                        DVector::from_vec(vec![hi]),
                    ],
                )
            } else {
                let planes = hull::facet_planes(&projected, k)?;
                let normals: Vec<DVector<f64>> = planes.iter().map(|p| p.normal.clone()).collect();
                let offsets: Vec<f64> = planes.iter().map(|p| p.offset).collect();
                let vertices = hull::vertex_enumeration(&normals, &offsets, k);
                (planes, vertices)
            };
            Ok(Shadow {
                dim: k,
                shape: SectionShape::Polytope { planes, vertices },
            })
        }
        BodyKind::ProductBall(pb) => {
            // Projection onto axes inside one block is a unit ball; onto the
            // exact first block in particular. Mixed-axis projections are
            // products and nothing downstream consumes them.
            let axes = l.coordinate_axes().ok_or_else(|| {
                Error::unsupported(
                    "product-ball projections require a coordinate subspace",
                )
            })?;
            let within_first = axes.iter().all(|&a| a < pb.split);
            let within_second = axes.iter().all(|&a| a >= pb.split);
            if !(within_first || within_second) {
                return Err(Error::unsupported(
                    "product-ball projections require the subspace inside one ball block",
                ));
            }
            Ok(Shadow {
                dim: k,
                shape: SectionShape::Ball { radius: 1.0 },
            })
        }
        BodyKind::Ball => Ok(Shadow {
            dim: k,
            shape: SectionShape::Ball { radius: 1.0 },
        }),
    }
}

/// The slice of `body` through x + L^perp, with `x` given in L-coordinates.
/// `x` must lie in the relative interior of the shadow; boundary and outside
/// points are rejected.
pub fn slice_body(body: &Body, l: &Subspace, x: &DVector<f64>) -> Result<Slice> {
    if l.ambient() != body.dim() {
        return Err(Error::config(format!(
            "subspace lives in dimension {} but the body in {}",
            l.ambient(),
            body.dim()
        )));
    }
    let k = l.dim();
    if x.len() != k {
        return Err(Error::config(format!(
            "slice point has {} coordinates for a {}-dimensional subspace",
            x.len(),
            k
        )));
    }
    let n = body.dim();
    let d = n - k;
    let base = l.embed(x);
    let comp = l.complement();
    let comp_rows = comp.basis_rows();
    let mut embed = DMatrix::zeros(n, d);
    for (j, r) in comp_rows.iter().enumerate() {
        embed.set_column(j, r);
    }
    let base_norm = x.norm();

    match body.kind() {
        BodyKind::HPolytope(_) | BodyKind::VPolytope(_) => {
            let facets = body.facets()?;
            let scale = body.coord_scale().max(base_norm);
            let mut planes: Vec<Hyperplane> = Vec::new();
            for f in &facets {
                let dir = comp.to_coords(&f.normal);
                let rhs = f.offset - f.normal.dot(&base);
                let len = dir.norm();
                if len <= THIN_TOL {
                    // The facet is parallel to the slice; it either excludes
                    // the whole fiber or constrains nothing.
                    if rhs < -hull::GEOM_TOL * scale {
                        return Err(Error::domain(format!(
                            "slice point lies outside the shadow of body {:?}",
                            body.name()
                        )));
                    }
                    continue;
                }
                planes.push(Hyperplane {
                    normal: dir / len,
                    offset: rhs / len,
                });
            }
            let normals: Vec<DVector<f64>> = planes.iter().map(|p| p.normal.clone()).collect();
            let offsets: Vec<f64> = planes.iter().map(|p| p.offset).collect();
            let vertices = hull::vertex_enumeration(&normals, &offsets, d);
            if vertices.len() < d + 1 || section_rank(&vertices, d) < d {
                return Err(Error::domain(
                    "slice has empty interior: the point is outside or on the boundary \
                     of the shadow"
                        ,
                ));
            }
            Ok(Slice {
                dim: d,
                shape: SectionShape::Polytope { planes, vertices },
                base,
                base_norm,
                embed,
            })
        }
        BodyKind::ProductBall(pb) => {
            let axes = l.coordinate_axes().ok_or_else(|| {
                Error::unsupported("product-ball slices require a coordinate subspace")
            })?;
            let is_first_block =
                axes.len() == pb.split && axes.iter().all(|&a| a < pb.split);
            if !is_first_block {
                return Err(Error::unsupported(
                    "product-ball slices require the subspace to be exactly the first \
                     ball's coordinate block"
                        ,
                ));
            }
            if base_norm >= 1.0 - THIN_TOL {
                return Err(Error::domain(
                    "slice point is outside or on the boundary of the shadow",
                ));
            }
            Ok(Slice {
                dim: d,
                shape: SectionShape::Ball { radius: 1.0 },
                base,
                base_norm,
                embed,
            })
        }
        BodyKind::Ball => {
            if base_norm >= 1.0 - THIN_TOL {
                return Err(Error::domain(
                    "slice point is outside or on the boundary of the shadow",
                ));
            }
            Ok(Slice {
                dim: d,
                shape: SectionShape::Ball {
                    radius: (1.0 - base_norm * base_norm).sqrt(),
                },
                base,
                base_norm,
                embed,
            })
        }
    }
}

/// Affine rank of a point set (dimension of its span around point 0).
fn section_rank(points: &[DVector<f64>], dim: usize) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let scale = points.iter().fold(1.0f64, |m, p| m.max(p.amax()));
    let mut edges = DMatrix::zeros(points.len() - 1, dim);
    for (r, p) in points[1..].iter().enumerate() {
        edges.set_row(r, &(p - &points[0]).transpose());
    }
    edges.svd(false, false).rank(1e-10 * scale)
}

impl Slice {
    /// Ambient point of slice coordinates w.
    pub fn to_ambient(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.base + &self.embed * w
    }

    /// Ambient norm of the slice point with complement coordinates w.
    pub fn ambient_norm(&self, w: &DVector<f64>) -> f64 {
        (self.base_norm * self.base_norm + w.norm_squared()).sqrt()
    }
}
