//! The slicing function g and the boundary-limit side of the identity.
//!
//! For x in the interior of the shadow K|L, `g(x)` integrates the weight
//! `phi(z) = |z|^(q-n) s(z/|z|)` over the perpendicular section
//! K cap (x + L-perp). Along any section the ambient norm splits as
//! `|z|^2 = |x|^2 + |w|^2` (w the in-section coordinate), which makes the
//! pure-power case a radial-power integral that the cone decompositions in
//! `quad` evaluate to machine accuracy — including at x = 0, where the
//! weight is genuinely singular and q > dim(L) is exactly the condition
//! for integrability.
//!
//! On top of g the module builds:
//!
//! * radial-derivative samples `<grad g(x), x>` by central differences,
//! * the shrinking-domain gradient integral `int over e^(-1/m) (K|L) of
//!   <grad g, x>`, evaluated on one transported grid and extrapolated in
//!   `1 - e^(-1/m)` to the limit,
//! * the divergence-identity check `ratio = k/q + limit / (n * total)`,
//! * the pointwise gradient bound `<grad g(x), x> <= c(q) g(x)` with the
//!   asymmetry-dependent constant c(q).

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};

use crate::body::Body;
use crate::error::{Error, Result};
use crate::hull::{self, Hyperplane};
use crate::measures::{self, QuadratureSpec};
use crate::phi::PhiSpec;
use crate::project::{slice_body, project_body, SectionShape, Slice};
use crate::quad;
use crate::subspace::Subspace;

/// Base points closer to the origin than this are treated as x = 0, where
/// the weight's direction is constant along rays and polar closed forms
/// apply.
const ORIGIN_TOL: f64 = 1e-13;

/// Relative step for the central finite differences in the radial
/// derivative.
#[derive(Debug, Clone, Copy)]
pub struct FdSpec {
    pub rel_step: f64,
}

impl Default for FdSpec {
    fn default() -> Self {
        FdSpec { rel_step: 1e-4 }
    }
}

// ---------------------------------------------------------------------------
// g itself

/// Evaluate g at `x` (coordinates in L). Requires q > dim(L); the integral
/// is divergent at x = 0 otherwise, and the identity this function feeds
/// needs the same restriction everywhere else.
pub fn g_value(
    body: &Body,
    l: &Subspace,
    x: &DVector<f64>,
    phi: &PhiSpec,
    order: usize,
) -> Result<f64> {
    let k = l.dim();
    check_q(phi, k)?;
    let slice = slice_body(body, l, x)?;
    g_on_slice(&slice, phi, order)
}

fn check_q(phi: &PhiSpec, k: usize) -> Result<()> {
    if phi.q <= k as f64 {
        return Err(Error::domain(format!(
            "the slicing function needs q > dim(L); got q = {} with dim(L) = {}",
            phi.q, k
        )));
    }
    Ok(())
}

fn g_on_slice(slice: &Slice, phi: &PhiSpec, order: usize) -> Result<f64> {
    let d = slice.dim;
    let x2 = slice.base_norm * slice.base_norm;
    let at_origin = slice.base_norm <= ORIGIN_TOL;
    if phi.is_pure_power() {
        let e = (phi.q - phi.n as f64) / 2.0;
        match &slice.shape {
            SectionShape::Polytope { planes, vertices } => match d {
                1 => {
                    let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
                    let hi = vertices
                        .iter()
                        .map(|v| v[0])
                        .fold(f64::NEG_INFINITY, f64::max);
                    Ok(quad::integrate_dyadic_toward(
                        lo,
                        hi,
                        0.0,
                        order.max(16),
                        |t| (x2 + t * t).powf(e),
                    ))
                }
                2 => {
                    let poly = hull::convex_hull_2d(vertices);
                    Ok(quad::polygon_radial_power_integral(
                        &poly,
                        x2,
                        e,
                        (4 * order).max(32),
                    ))
                }
                3 => polytope3_radial_integral(planes, vertices, x2, e, order),
                _ => Err(Error::unsupported(format!(
                    "sections of dimension {d} are out of range"
                ))),
            },
            SectionShape::Ball { radius } => Ok(ball_radial_integral(*radius, x2, e, d, order)),
        }
    } else {
        // Custom sphere profile. At x = 0 the direction z/|z| is constant
        // along rays from the section origin, so polar closed forms apply;
        // away from 0 the integrand is smooth and generic quadrature works.
        match &slice.shape {
            SectionShape::Polytope { planes: _, vertices } => {
                if at_origin {
                    polar_profile_polytope(slice, vertices, phi, order)
                } else {
                    let cells = hull::triangulate(vertices, d)?;
                    let mut total = 0.0;
                    for cell in &cells {
                        total +=
                            quad::integrate_simplex_adaptive(cell, order.max(8), 1e-10, 3, |w| {
                                phi.eval(&slice.to_ambient(w))
                            });
                    }
                    Ok(total)
                }
            }
            SectionShape::Ball { radius } => {
                let nodes = quad::sphere_nodes(d, (4 * order).max(16))?;
                if at_origin {
                    // int = R^(q-k) / (q-k) * int over S^(d-1) of s(dir)
                    let p = phi.q - (phi.n - d) as f64;
                    let mut ang = 0.0;
                    for (u, w) in &nodes {
                        ang += w * phi.profile_at(&direction(slice, u));
                    }
                    Ok(radius.powf(p) / p * ang)
                } else {
                    let mut total = 0.0;
                    for (u, w) in &nodes {
                        let radial = quad::integrate_dyadic_toward(0.0, *radius, 0.0, order, |r| {
                            r.powi(d as i32 - 1) * phi.eval(&slice.to_ambient(&(u * r)))
                        });
                        total += w * radial;
                    }
                    Ok(total)
                }
            }
        }
    }
}

/// Unit direction of the ambient lift of the in-section direction `u`
/// (only meaningful when the base point is the origin).
fn direction(slice: &Slice, u: &DVector<f64>) -> DVector<f64> {
    let z = slice.to_ambient(u);
    let norm = z.norm();
    z / norm
}

/// Radial-power integral over a centered d-ball: closed form for d = 2,
/// dyadic radial quadrature otherwise.
fn ball_radial_integral(radius: f64, x2: f64, e: f64, d: usize, order: usize) -> f64 {
    let r2 = radius * radius;
    match d {
        2 => {
            // 2 pi int_0^R r (x2+r^2)^e dr, exactly.
            if (e + 1.0).abs() < 1e-12 {
                std::f64::consts::PI * ((x2 + r2) / x2).ln()
            } else {
                std::f64::consts::PI * ((x2 + r2).powf(e + 1.0) - x2.powf(e + 1.0)) / (e + 1.0)
            }
        }
        _ => {
            let surface = match d {
                1 => 2.0,
                3 => 4.0 * std::f64::consts::PI,
                _ => unreachable!("section dimensions are 1..=3"),
            };
            surface
                * quad::integrate_dyadic_toward(0.0, radius, 0.0, order.max(16), |r| {
                    r.powi(d as i32 - 1) * (x2 + r * r).powf(e)
                })
        }
    }
}

/// Signed-cone evaluation of `int over a 3-D polytope of (x2+|y|^2)^e`:
/// every boundary facet is fanned into triangles oriented with the outward
/// normal, and each cone from the origin contributes
/// `det[a,b,c] * int over the standard triangle of int_0^1 t^2 (x2 +
/// t^2 |p(s)|^2)^e dt ds`. Signs cancel whatever side of the origin the
/// facets are on, so the formula needs no origin-inside assumption.
fn polytope3_radial_integral(
    planes: &[Hyperplane],
    vertices: &[DVector<f64>],
    x2: f64,
    e: f64,
    order: usize,
) -> Result<f64> {
    let scale = vertices.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut total = 0.0;
    for plane in planes {
        // A facet plane through the origin spans a zero-volume cone.
        if plane.offset.abs() <= 1e-12 * scale {
            continue;
        }
        let incident: Vec<&DVector<f64>> = vertices
            .iter()
            .filter(|v| (plane.normal.dot(v) - plane.offset).abs() <= 1e-8 * scale)
            .collect();
        if incident.len() < 3 {
            continue;
        }
        // Right-handed in-plane frame (u, w, normal): counterclockwise in
        // (u, w) coordinates orients triangles with the outward normal.
        let n = &plane.normal;
        let mut u = DVector::zeros(3);
        let pivot = (0..3)
            .min_by(|&i, &j| n[i].abs().partial_cmp(&n[j].abs()).unwrap())
            .unwrap();
        u[pivot] = 1.0;
        let c = n.dot(&u);
        u -= n * c;
        u /= u.norm();
        let w = cross3(n, &u);
        let center: DVector<f64> = incident.iter().fold(DVector::zeros(3), |a, v| a + *v)
            / incident.len() as f64;
        let mut ordered: Vec<(f64, &DVector<f64>)> = incident
            .iter()
            .map(|v| {
                let r = *v - &center;
                (r.dot(&w).atan2(r.dot(&u)), *v)
            })
            .collect();
        ordered.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let ring: Vec<&DVector<f64>> = ordered.into_iter().map(|(_, v)| v).collect();
        // Standard-triangle quadrature reused for every fan triangle.
        let std_tri = [
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0]),
        ];
        let nodes = quad::simplex_quadrature(&std_tri, (2 * order).max(16));
        for t in 1..ring.len() - 1 {
            let (a, b, c) = (ring[0], ring[t], ring[t + 1]);
            let det = a.dot(&cross3(&(b - a), &(c - a)));
            if det.abs() <= 1e-14 * scale.powi(3) {
                continue;
            }
            let mut tri_sum = 0.0;
            for (s, ws) in &nodes {
                let p = a + (b - a) * s[0] + (c - a) * s[1];
                let rho2 = p.norm_squared();
                let inner = quad::integrate_dyadic_toward(0.0, 1.0, 0.0, 8, |t| {
                    t * t * (x2 + t * t * rho2).powf(e)
                });
                tri_sum += ws * inner;
            }
            total += det * tri_sum;
        }
    }
    Ok(total)
}

fn cross3(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Custom profile at x = 0 over a polytope section: signed cones with the
/// radial integral in closed form (`rho^(q-n) s(dir) / (q-k)` per ray).
fn polar_profile_polytope(
    slice: &Slice,
    vertices: &[DVector<f64>],
    phi: &PhiSpec,
    order: usize,
) -> Result<f64> {
    let d = slice.dim;
    let p = phi.q - phi.n as f64; // radial exponent of the weight
    let pk = phi.q - (phi.n - d) as f64; // = q - dim(L), positive by check_q
    match d {
        1 => {
            let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vertices
                .iter()
                .map(|v| v[0])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            if hi > 0.0 {
                let dir = direction(slice, &DVector::from_vec(vec![1.0]));
                total += phi.profile_at(&dir) * (hi.powf(pk) - lo.max(0.0).powf(pk)) / pk;
            }
            if lo < 0.0 {
                let dir = direction(slice, &DVector::from_vec(vec![-1.0]));
                total += phi.profile_at(&dir) * ((-lo).powf(pk) - (-hi).max(0.0).powf(pk)) / pk;
            }
            Ok(total)
        }
        2 => {
            let poly = hull::convex_hull_2d(vertices);
            let rule = quad::gauss_legendre(order.max(16));
            let mut total = 0.0;
            for i in 0..poly.len() {
                let a = &poly[i];
                let b = &poly[(i + 1) % poly.len()];
                let cross = a[0] * b[1] - a[1] * b[0];
                if cross.abs() < 1e-300 {
                    continue;
                }
                let mut edge = 0.0;
                for (node, wgt) in rule.nodes.iter().zip(&rule.weights) {
                    let u = 0.5 * (node + 1.0);
                    let pt = a * (1.0 - u) + b * u;
                    let rho = pt.norm();
                    edge += 0.5 * wgt * rho.powf(p) * phi.profile_at(&direction(slice, &pt));
                }
                total += cross * edge / pk;
            }
            Ok(total)
        }
        3 => {
            // Triangulate, then cone each tetrahedron's faces from the
            // origin with signed volumes; the radial part closes to
            // rho^p / (q - k) per ray, leaving smooth angular integrals.
            let cells = hull::triangulate(vertices, 3)?;
            let mut total = 0.0;
            for cell in &cells {
                total += tet_polar_profile(slice, cell, phi, p, order)?;
            }
            Ok(total)
        }
        _ => Err(Error::unsupported(format!(
            "sections of dimension {d} are out of range"
        ))),
    }
}

/// Integral of `|w|^p s(dir(w))` over one tetrahedron, by coning its four
/// faces from the origin (signed), with the radial integral closed-form.
fn tet_polar_profile(
    slice: &Slice,
    cell: &[DVector<f64>],
    phi: &PhiSpec,
    p: f64,
    order: usize,
) -> Result<f64> {
    let pk = p + 3.0; // q - dim(L) when d = 3
    let std_tri = [
        DVector::from_vec(vec![0.0, 0.0]),
        DVector::from_vec(vec![1.0, 0.0]),
        DVector::from_vec(vec![0.0, 1.0]),
    ];
    let nodes = quad::simplex_quadrature(&std_tri, order.max(8));
    // The four faces of the tet, oriented outward by checking against the
    // opposite vertex.
    const FACES: [[usize; 4]; 4] = [[1, 2, 3, 0], [0, 3, 2, 1], [0, 1, 3, 2], [0, 2, 1, 3]];
    let mut total = 0.0;
    for face in FACES {
        let (a, b, c) = (&cell[face[0]], &cell[face[1]], &cell[face[2]]);
        let opp = &cell[face[3]];
        let nrm = cross3(&(b - a), &(c - a));
        // <a, (b-a) x (c-a)> with the orientation flipped if the face
        // normal points toward the opposite vertex (inward).
        let mut det = a.dot(&nrm);
        if nrm.dot(&(opp - a)) > 0.0 {
            det = -det;
        }
        if det.abs() < 1e-300 {
            continue;
        }
        let mut tri_sum = 0.0;
        for (s, ws) in &nodes {
            let pt = a + (b - a) * s[0] + (c - a) * s[1];
            let rho = pt.norm();
            // radial part: int_0^1 t^2 (t rho)^p dt = rho^p / (p + 3)
            tri_sum += ws * rho.powf(p) * phi.profile_at(&direction(slice, &pt));
        }
        total += det * tri_sum / pk;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Radial derivative and its integral over shrinking copies

/// `<grad g(x), x>` by differencing g along the ray through x.
#[derive(Debug, Clone, Copy)]
pub struct GradDot {
    pub value: f64,
    /// True when the forward point left the shadow and a one-sided
    /// difference was used instead.
    pub one_sided: bool,
}

pub fn g_gradient_dot(
    body: &Body,
    l: &Subspace,
    x: &DVector<f64>,
    phi: &PhiSpec,
    fd: &FdSpec,
    order: usize,
) -> Result<GradDot> {
    if x.norm() <= ORIGIN_TOL {
        return Err(Error::domain(
            "the radial derivative is not defined at the origin",
        ));
    }
    let delta = fd.rel_step;
    let up = g_value(body, l, &(x * (1.0 + delta)), phi, order);
    let down = g_value(body, l, &(x * (1.0 - delta)), phi, order)?;
    match up {
        Ok(up) => Ok(GradDot {
            value: (up - down) / (2.0 * delta),
            one_sided: false,
        }),
        Err(Error::Domain(_)) => {
            // x sits against the shadow boundary; difference backwards.
            let here = g_value(body, l, x, phi, order)?;
            Ok(GradDot {
                value: (here - down) / delta,
                one_sided: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// One row of a tabulated slice profile.
#[derive(Debug, Clone)]
pub struct SliceSample {
    pub x: Vec<f64>,
    pub g: f64,
    pub grad_dot: f64,
    pub one_sided: bool,
}

/// Tabulate g and its radial derivative on a midpoint grid over the shadow
/// (dim(L) <= 2; higher-dimensional tables are not worth printing).
pub fn slice_profile(
    body: &Body,
    l: &Subspace,
    phi: &PhiSpec,
    grid: usize,
    fd: &FdSpec,
    order: usize,
) -> Result<Vec<SliceSample>> {
    let k = l.dim();
    if k > 2 {
        return Err(Error::unsupported(
            "profiles are tabulated for dim(L) <= 2 only",
        ));
    }
    if grid < 2 {
        return Err(Error::config("profile grid must have at least 2 cells"));
    }
    check_q(phi, k)?;
    let pts = shadow_midpoint_grid(body, l, grid)?;
    let mut rows = Vec::with_capacity(pts.points.len());
    for x in &pts.points {
        let g = g_value(body, l, x, phi, order)?;
        let gd = if x.norm() <= ORIGIN_TOL {
            GradDot {
                value: 0.0,
                one_sided: false,
            }
        } else {
            g_gradient_dot(body, l, x, phi, fd, order)?
        };
        rows.push(SliceSample {
            x: x.iter().copied().collect(),
            g,
            grad_dot: gd.value,
            one_sided: gd.one_sided,
        });
    }
    Ok(rows)
}

struct ShadowGrid {
    points: Vec<DVector<f64>>,
    cell_volume: f64,
}

/// Midpoint grid over the shadow's bounding box, restricted to strictly
/// interior points.
fn shadow_midpoint_grid(body: &Body, l: &Subspace, grid: usize) -> Result<ShadowGrid> {
    let k = l.dim();
    let shadow = project_body(body, l)?;
    let (lo, hi) = shadow.bbox();
    let mut cell_volume = 1.0;
    for i in 0..k {
        cell_volume *= (hi[i] - lo[i]) / grid as f64;
    }
    let mut points = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let x = DVector::from_iterator(
            k,
            (0..k).map(|i| lo[i] + (hi[i] - lo[i]) * (idx[i] as f64 + 0.5) / grid as f64),
        );
        if shadow.shape.contains(&x, -1e-9) {
            points.push(x);
        }
        // odometer increment
        let mut carry = 0;
        while carry < k {
            idx[carry] += 1;
            if idx[carry] < grid {
                break;
            }
            idx[carry] = 0;
            carry += 1;
        }
        if carry == k {
            break;
        }
    }
    Ok(ShadowGrid {
        points,
        cell_volume,
    })
}

/// Default shrink levels scaled off the grid so that refining the grid
/// deepens the limit: {grid/16, grid/8, grid/4}.
pub fn default_shrink_levels(grid: usize) -> Vec<usize> {
    let mut levels: Vec<usize> = [grid / 16, grid / 8, grid / 4]
        .iter()
        .map(|&m| m.max(2))
        .collect();
    levels.dedup();
    levels
}

/// The gradient integral at one shrink level.
#[derive(Debug, Clone, Copy)]
pub struct LevelValue {
    pub m: usize,
    /// Shrink factor e^(-1/m).
    pub alpha: f64,
    pub value: f64,
}

/// The shrinking-domain gradient integral and its extrapolated limit.
#[derive(Debug, Clone)]
pub struct GradientIntegral {
    pub levels: Vec<LevelValue>,
    pub extrapolated: f64,
    pub grid: usize,
    /// Interior grid (or accepted sample) points.
    pub points: usize,
    pub one_sided_fraction: f64,
    /// Standard error of the deepest level, when Monte Carlo was used.
    pub mc_stderr: Option<f64>,
}

/// Evaluation controls for the gradient integral and the identity check.
#[derive(Debug, Clone)]
pub struct DivergenceOptions {
    /// Midpoint cells per axis over the shadow (dim(L) <= 2).
    pub grid: usize,
    /// Shrink levels m (alpha = e^(-1/m)); None takes them from the grid.
    pub levels: Option<Vec<usize>>,
    pub fd: FdSpec,
    pub order: usize,
    /// Measure evaluation for the ratio side; None picks the default
    /// method for the body.
    pub measure: Option<QuadratureSpec>,
    /// Sample count and seed for the dim(L) = 3 Monte Carlo grid.
    pub mc_samples: usize,
    pub mc_seed: u64,
}

impl Default for DivergenceOptions {
    fn default() -> Self {
        DivergenceOptions {
            grid: 64,
            levels: None,
            fd: FdSpec::default(),
            order: 8,
            measure: None,
            mc_samples: 50_000,
            mc_seed: 0,
        }
    }
}

/// Integral of `<grad g, x>` over e^(-1/m) (K|L) for each level m, with the
/// m -> infinity limit extrapolated at s = 1 - e^(-1/m) -> 0.
///
/// One fixed grid over K|L is transported into every level (the integral
/// over alpha (K|L) is alpha^k times the integral of the integrand at
/// alpha y over K|L), so level differences are free of grid-placement
/// noise and the extrapolation sees a smooth function of s.
pub fn gradient_integral(
    body: &Body,
    l: &Subspace,
    phi: &PhiSpec,
    opts: &DivergenceOptions,
) -> Result<GradientIntegral> {
    let k = l.dim();
    check_q(phi, k)?;
    let levels = match &opts.levels {
        Some(ls) => {
            let mut ls = ls.clone();
            ls.sort_unstable();
            ls.dedup();
            if ls.len() < 2 {
                return Err(Error::config(
                    "at least two distinct shrink levels are needed to extrapolate",
                ));
            }
            if ls[0] < 1 {
                return Err(Error::config("shrink levels must be >= 1"));
            }
            ls
        }
        None => default_shrink_levels(opts.grid),
    };
    let (points, cell_volume, mc) = if k <= 2 {
        if opts.grid < 2 {
            return Err(Error::config("gradient grid must have at least 2 cells"));
        }
        let g = shadow_midpoint_grid(body, l, opts.grid)?;
        if g.points.len() < 2 {
            return Err(Error::config(
                "the shadow grid has fewer than 2 interior points; refine the grid",
            ));
        }
        (g.points, g.cell_volume, false)
    } else {
        if opts.mc_samples < 100 {
            return Err(Error::config(
                "at least 100 Monte Carlo samples are needed for the gradient grid",
            ));
        }
        let g = shadow_mc_grid(body, l, opts.mc_samples, opts.mc_seed)?;
        (g.points, g.cell_volume, true)
    };
    let mut level_values = Vec::with_capacity(levels.len());
    let mut one_sided = 0usize;
    let mut evals = 0usize;
    let mut deepest_stderr = None;
    for &m in &levels {
        let alpha = (-1.0 / m as f64).exp();
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for y in &points {
            let gd = g_gradient_dot(body, l, &(y * alpha), phi, &opts.fd, opts.order)?;
            if gd.one_sided {
                one_sided += 1;
            }
            evals += 1;
            sum += gd.value;
            sumsq += gd.value * gd.value;
        }
        let npts = points.len() as f64;
        let scale = alpha.powi(k as i32) * cell_volume;
        level_values.push(LevelValue {
            m,
            alpha,
            value: scale * sum,
        });
        if mc {
            let mean = sum / npts;
            let var = ((sumsq / npts) - mean * mean).max(0.0) * npts / (npts - 1.0);
            deepest_stderr = Some(scale * npts * (var / npts).sqrt());
        }
    }
    let extrapolated = extrapolate_to_zero(&level_values);
    Ok(GradientIntegral {
        levels: level_values,
        extrapolated,
        grid: opts.grid,
        points: points.len(),
        one_sided_fraction: one_sided as f64 / evals.max(1) as f64,
        mc_stderr: if mc { deepest_stderr } else { None },
    })
}

/// Exact polynomial fit of degree min(#levels - 1, 2) in s = 1 - alpha
/// through the deepest levels, evaluated at s = 0.
fn extrapolate_to_zero(levels: &[LevelValue]) -> f64 {
    let deg = (levels.len() - 1).min(2);
    let pts = &levels[levels.len() - (deg + 1)..];
    let mut vand = DMatrix::zeros(deg + 1, deg + 1);
    let mut rhs = DVector::zeros(deg + 1);
    for (i, lv) in pts.iter().enumerate() {
        let s = 1.0 - lv.alpha;
        let mut p = 1.0;
        for j in 0..=deg {
            vand[(i, j)] = p;
            p *= s;
        }
        rhs[i] = lv.value;
    }
    match vand.full_piv_lu().solve(&rhs) {
        Some(coef) => coef[0],
        // Degenerate levels (duplicate s); fall back to the deepest value.
        None => pts[pts.len() - 1].value,
    }
}

/// Uniform rejection sampling of the shadow for dim(L) = 3 grids. The
/// effective "cell volume" is bbox volume / samples, so the same
/// transported-sum formula applies.
fn shadow_mc_grid(body: &Body, l: &Subspace, samples: usize, seed: u64) -> Result<ShadowGrid> {
    let k = l.dim();
    let shadow = project_body(body, l)?;
    let (lo, hi) = shadow.bbox();
    let side: Vec<Uniform<f64>> = (0..k).map(|i| Uniform::new(lo[i], hi[i])).collect();
    let mut bbox_vol = 1.0;
    for i in 0..k {
        bbox_vol *= hi[i] - lo[i];
    }
    let mut points = Vec::new();
    for idx in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0x51AD0 + idx as u64);
        let x = DVector::from_iterator(k, side.iter().map(|u| u.sample(&mut rng)));
        if shadow.shape.contains(&x, -1e-9) {
            points.push(x);
        }
    }
    if points.len() < 100 {
        return Err(Error::config(
            "fewer than 100 samples landed inside the shadow; increase the sample count",
        ));
    }
    Ok(ShadowGrid {
        cell_volume: bbox_vol / samples as f64,
        points,
    })
}

// ---------------------------------------------------------------------------
// The divergence identity

/// Everything the identity check measured, plus the residual.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    pub body: String,
    pub n: usize,
    pub k: usize,
    pub q: f64,
    /// Subspace concentration ratio (left side).
    pub ratio: f64,
    /// k/q.
    pub kq_term: f64,
    /// Gradient-limit correction: limit / (n * total).
    pub correction: f64,
    /// kq_term + correction (right side).
    pub rhs: f64,
    /// ratio - rhs.
    pub residual: f64,
    pub total_measure: f64,
    /// True when q > k + 1, the range the identity is established on.
    pub proven_range: bool,
    pub measure_method: String,
    pub flagged_fraction: f64,
    pub gradient: GradientIntegral,
}

/// Check `ratio = k/q + (1/(n * total)) * lim int over e^(-1/m)(K|L) of
/// <grad g, x>` by computing both sides independently: the left from the
/// boundary measure, the right from slicing integrals.
pub fn divergence_identity_check(
    body: &Body,
    l: &Subspace,
    phi: &PhiSpec,
    opts: &DivergenceOptions,
) -> Result<DivergenceReport> {
    let n = body.dim();
    let k = l.dim();
    check_q(phi, k)?;
    let spec = match &opts.measure {
        Some(s) => s.clone(),
        None => QuadratureSpec::with_method(measures::default_method(body, phi.q)),
    };
    let ratio = measures::concentration_ratio(body, phi, l, &spec)?;
    let gradient = gradient_integral(body, l, phi, opts)?;
    let kq_term = k as f64 / phi.q;
    let correction = gradient.extrapolated / (n as f64 * ratio.total.value);
    let rhs = kq_term + correction;
    Ok(DivergenceReport {
        body: body.name().to_string(),
        n,
        k,
        q: phi.q,
        ratio: ratio.ratio,
        kq_term,
        correction,
        rhs,
        residual: ratio.ratio - rhs,
        total_measure: ratio.total.value,
        proven_range: phi.q > k as f64 + 1.0,
        measure_method: ratio.method.name().to_string(),
        flagged_fraction: ratio.flagged_fraction,
        gradient,
    })
}

// ---------------------------------------------------------------------------
// Pointwise gradient bound

/// The constant c(q) in `<grad g(x), x> <= c(q) g(x)`:
/// `(1-gamma)/(1+gamma) * (q-k)` for k < q <= n, and
/// `(q-n) + (1-gamma)/(1+gamma) * (n-k)` for q >= n+1. No bound is
/// established on the open band (n, n+1).
pub fn gradient_bound_constant(n: usize, k: usize, q: f64, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain(format!(
            "asymmetry constant must lie in [0, 1], got {gamma}"
        )));
    }
    let nf = n as f64;
    let kf = k as f64;
    if q <= kf {
        return Err(Error::domain(format!(
            "the gradient bound needs q > dim(L); got q = {q} with dim(L) = {k}"
        )));
    }
    let c = (1.0 - gamma) / (1.0 + gamma);
    if q <= nf + 1e-12 {
        Ok(c * (q - kf))
    } else if q >= nf + 1.0 - 1e-12 {
        Ok((q - nf) + c * (nf - kf))
    } else {
        Err(Error::domain(format!(
            "no gradient bound is established for q strictly between n and n+1 \
             (n = {n}, q = {q})"
        )))
    }
}

/// One sampled comparison of `<grad g, x>` against `c(q) g`.
#[derive(Debug, Clone)]
pub struct GradientBoundSample {
    pub x: Vec<f64>,
    pub grad_dot: f64,
    pub bound: f64,
    /// (grad_dot - bound) / max(g, tiny) — positive means violation.
    pub rel_excess: f64,
    pub one_sided: bool,
}

/// Sweep of the pointwise bound over a shadow grid.
#[derive(Debug, Clone)]
pub struct GradientBoundReport {
    pub c: f64,
    pub gamma: f64,
    pub checked: usize,
    pub worst: Option<GradientBoundSample>,
    /// Largest relative excess seen (negative when the bound holds
    /// everywhere with margin).
    pub worst_excess: f64,
    pub pass: bool,
}

/// Relative tolerance granted to the finite-difference derivative when
/// judging the pointwise bound: differences near the shadow boundary and
/// across facet kinks (where the true gradient need not exist) carry
/// O(rel_step) noise.
pub const GRADIENT_BOUND_TOL: f64 = 1e-3;

pub fn gradient_bound_check(
    body: &Body,
    l: &Subspace,
    phi: &PhiSpec,
    grid: usize,
    fd: &FdSpec,
    order: usize,
) -> Result<GradientBoundReport> {
    if !phi.is_pure_power() {
        return Err(Error::unsupported(
            "the gradient bound is stated for the pure power weight",
        ));
    }
    let k = l.dim();
    check_q(phi, k)?;
    let gamma = body.asymmetry().gamma;
    let c = gradient_bound_constant(body.dim(), k, phi.q, gamma)?;
    let pts = shadow_midpoint_grid(body, l, grid)?;
    let mut worst: Option<GradientBoundSample> = None;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut checked = 0usize;
    for x in &pts.points {
        if x.norm() <= ORIGIN_TOL {
            continue;
        }
        let g = g_value(body, l, x, phi, order)?;
        let gd = g_gradient_dot(body, l, x, phi, fd, order)?;
        let bound = c * g;
        let rel = (gd.value - bound) / g.abs().max(1e-300);
        checked += 1;
        if rel > worst_excess {
            worst_excess = rel;
            worst = Some(GradientBoundSample {
                x: x.iter().copied().collect(),
                grad_dot: gd.value,
                bound,
                rel_excess: rel,
                one_sided: gd.one_sided,
            });
        }
    }
    if checked == 0 {
        return Err(Error::config(
            "no interior grid points to check; refine the grid",
        ));
    }
    Ok(GradientBoundReport {
        c,
        gamma,
        checked,
        worst,
        worst_excess,
        pass: worst_excess <= GRADIENT_BOUND_TOL,
    })
}
