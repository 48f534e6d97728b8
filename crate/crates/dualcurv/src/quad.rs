//! Deterministic quadrature building blocks.
//!
//! Everything here is seed-free and allocation-light: Gauss–Legendre rules
//! (cached per order), interval integration with dyadic refinement toward a
//! singular or kinked point, tensorized simplex rules built by the collapsed
//! (Duffy) map, and product rules on the unit sphere in dimensions 1–3.
//!
//! Assumptions: integrands are finite on the open integration domain;
//! endpoint singularities must be integrable and should be attacked with
//! [`integrate_dyadic_toward`] rather than a plain rule.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Nodes and weights on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn rule_cache() -> &'static Mutex<HashMap<usize, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Legendre polynomial value and derivative at `x` for degree `n`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let pj = (((2 * j - 1) as f64) * x * p1 - ((j - 1) as f64) * p0) / j as f64;
        p0 = p1;
        p1 = pj;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule of the given order (number of nodes) on [-1, 1].
/// Nodes are computed by Newton iteration from the Chebyshev initial guess
/// and cached for the lifetime of the process.
pub fn gauss_legendre(order: usize) -> Arc<GaussRule> {
    assert!(order >= 1, "quadrature order must be at least 1");
    let mut cache = rule_cache().lock().expect("quadrature cache poisoned");
    if let Some(rule) = cache.get(&order) {
        return Arc::clone(rule);
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    let rule = Arc::new(GaussRule { nodes, weights });
    cache.insert(order, Arc::clone(&rule));
    rule
}

/// Plain Gauss–Legendre integral of `f` over [a, b].
pub fn integrate_interval(a: f64, b: f64, order: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let rule = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut total = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        total += w * f(mid + half * x);
    }
    total * half
}

/// Integral of `f` over [a, b] with dyadic subdivision toward `c`.
///
/// Panels shrink geometrically as they approach `c`, so integrands that are
/// analytic away from `c` but singular or kinked there (think
/// `|t - c|^alpha` with `alpha > -1`) converge to near machine precision.
/// If `c` lies outside [a, b] this reduces to a plain panel rule.
pub fn integrate_dyadic_toward(
    a: f64,
    b: f64,
    c: f64,
    order: usize,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    debug_assert!(b >= a);
    let mut total = 0.0;
    let side = |lo: f64, hi: f64, toward_lo: bool, f: &mut dyn FnMut(f64) -> f64| -> f64 {
        // Integrate [lo, hi] with panels accumulating toward the `toward_lo`
        // end. 80 halvings take the innermost panel to ~1e-24 of the span,
        // small enough that even a t^(-1/2) endpoint tail is below 1e-13.
        let len = hi - lo;
        if len <= 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut fraction = 1.0;
        for level in 0..80 {
            let next = if level == 79 { 0.0 } else { fraction * 0.5 };
            let (plo, phi) = if toward_lo {
                (lo + next * len, lo + fraction * len)
            } else {
                (hi - fraction * len, hi - next * len)
            };
            acc += integrate_interval(plo, phi, order, &mut *f);
            fraction = next;
        }
        acc
    };
    if c <= a {
        total += side(a, b, true, &mut f);
    } else if c >= b {
        total += side(a, b, false, &mut f);
    } else {
        total += side(a, c, false, &mut f);
        total += side(c, b, true, &mut f);
    }
    total
}

/// Tensor rule on the d-simplex with the given vertices (d+1 points in R^d),
/// built from the collapsed-coordinate map off vertex 0. Returns node/weight
/// pairs; weights sum to the simplex volume.
pub fn simplex_quadrature(vertices: &[DVector<f64>], order: usize) -> Vec<(DVector<f64>, f64)> {
    let d = vertices.len() - 1;
    assert!((1..=3).contains(&d), "simplex rules cover dimensions 1-3");
    let dim = vertices[0].len();
    let rule = gauss_legendre(order);
    // Nodes mapped to [0, 1].
    let u: Vec<f64> = rule.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect();
    let w: Vec<f64> = rule.weights.iter().map(|w| 0.5 * w).collect();
    let e: Vec<DVector<f64>> = (0..d).map(|i| &vertices[i + 1] - &vertices[i]).collect();
    let vol = simplex_volume(vertices);
    let mut out = Vec::with_capacity(order.pow(d as u32));
    match d {
        1 => {
            for i in 0..order {
                let p = &vertices[0] + &e[0] * u[i];
                out.push((p, w[i] * vol));
            }
        }
        2 => {
            // x = v0 + u1 (v1 - v0) + u1 u2 (v2 - v1); |J| = 2 vol u1.
            for i in 0..order {
                for j in 0..order {
                    let mut p = DVector::zeros(dim);
                    p += &vertices[0];
                    p += &e[0] * u[i];
                    p += &e[1] * (u[i] * u[j]);
                    out.push((p, w[i] * w[j] * 2.0 * vol * u[i]));
                }
            }
        }
        3 => {
            // |J| = 6 vol u1^2 u2.
            for i in 0..order {
                for j in 0..order {
                    for l in 0..order {
                        let mut p = DVector::zeros(dim);
                        p += &vertices[0];
                        p += &e[0] * u[i];
                        p += &e[1] * (u[i] * u[j]);
                        p += &e[2] * (u[i] * u[j] * u[l]);
                        out.push((p, w[i] * w[j] * w[l] * 6.0 * vol * u[i] * u[i] * u[j]));
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

/// Volume of a d-simplex given as d+1 points in R^d.
pub fn simplex_volume(vertices: &[DVector<f64>]) -> f64 {
    let d = vertices.len() - 1;
    let dim = vertices[0].len();
    assert_eq!(d, dim, "simplex_volume expects d+1 points in R^d");
    let mut m = nalgebra::DMatrix::zeros(d, d);
    for j in 0..d {
        let e = &vertices[j + 1] - &vertices[0];
        m.set_column(j, &e);
    }
    let mut fact = 1.0;
    for i in 2..=d {
        fact *= i as f64;
    }
    m.determinant().abs() / fact
}

/// Integral of `f` over the simplex at a fixed order.
pub fn integrate_simplex(
    vertices: &[DVector<f64>],
    order: usize,
    mut f: impl FnMut(&DVector<f64>) -> f64,
) -> f64 {
    simplex_quadrature(vertices, order)
        .iter()
        .map(|(p, w)| w * f(p))
        .sum()
}

/// Integral of `f` over the simplex, doubling the order until two successive
/// values agree to `rel_tol` (relative, with a small absolute floor) or the
/// order budget runs out. Returns the finest value.
pub fn integrate_simplex_adaptive(
    vertices: &[DVector<f64>],
    start_order: usize,
    rel_tol: f64,
    max_doublings: usize,
    mut f: impl FnMut(&DVector<f64>) -> f64,
) -> f64 {
    let mut order = start_order.max(2);
    let mut value = integrate_simplex(vertices, order, &mut f);
    for _ in 0..max_doublings {
        order *= 2;
        let refined = integrate_simplex(vertices, order, &mut f);
        let scale = refined.abs().max(1e-14);
        let done = (refined - value).abs() <= rel_tol * scale;
        value = refined;
        if done {
            break;
        }
    }
    value
}

/// Integral of `(x2 + |y|^2)^e` over a convex polygon, by exact radial
/// integration over signed cones.
///
/// The polygon (counterclockwise, as produced by `hull::convex_hull_2d`)
/// is fanned from the origin into one signed cone per edge. Along each ray
/// the radial integral has the closed form
///
/// ```text
/// int_0^rho t (x2 + t^2)^e dt = ((x2 + rho^2)^(e+1) - x2^(e+1)) / (2 (e+1))
/// ```
///
/// (log form when e = -1), leaving a single smooth 1-D integral over the
/// edge parameter. This stays accurate uniformly in `x2`, including the
/// near-singular regime x2 -> 0 with e < 0 where tensor rules lose the
/// peak. The origin may lie inside, on, or outside the polygon — the
/// signed cross products cancel exterior cones.
///
/// Requirements: `x2 >= 0`; `e > -1` whenever the origin is inside or on
/// the polygon with `x2 = 0` (otherwise the integral diverges); no edge
/// may pass through the origin when `x2 = 0` and `e < 0`.
pub fn polygon_radial_power_integral(
    poly_ccw: &[DVector<f64>],
    x2: f64,
    e: f64,
    order: usize,
) -> f64 {
    debug_assert!(x2 >= 0.0);
    let rule = gauss_legendre(order);
    let m = poly_ccw.len();
    let log_form = (e + 1.0).abs() < 1e-12;
    let mut total = 0.0;
    for i in 0..m {
        let a = &poly_ccw[i];
        let b = &poly_ccw[(i + 1) % m];
        let cross = a[0] * b[1] - a[1] * b[0];
        if cross == 0.0 {
            continue;
        }
        let mut edge = 0.0;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let u = 0.5 * (t + 1.0);
            let cx = a[0] + u * (b[0] - a[0]);
            let cy = a[1] + u * (b[1] - a[1]);
            let rho2 = cx * cx + cy * cy;
            let inner = if rho2 <= 1e-10 * x2 {
                // Ray grazes the origin: take the series limit of the
                // closed form, which is x2^e / 2 up to O(rho2 / x2).
                0.5 * x2.powf(e)
            } else if log_form {
                0.5 * (1.0 + rho2 / x2).ln() / rho2
            } else {
                ((x2 + rho2).powf(e + 1.0) - x2.powf(e + 1.0)) / (2.0 * (e + 1.0) * rho2)
            };
            edge += 0.5 * w * inner;
        }
        total += cross * edge;
    }
    total
}

/// Product rule on the unit sphere of the given ambient dimension.
///
/// Dimension 1 is the two-point set {-1, +1}; dimension 2 uses equally
/// spaced angles (offset half a step so no node lands on an axis);
/// dimension 3 uses Gauss–Legendre in the polar cosine crossed with a
/// uniform azimuthal rule. Weights sum to the sphere's surface measure.
pub fn sphere_nodes(ambient_dim: usize, order: usize) -> Result<Vec<(DVector<f64>, f64)>> {
    match ambient_dim {
        1 => Ok(vec![
            (DVector::from_vec(vec![1.0]), 1.0),
            (DVector::from_vec(vec![-1.0]), 1.0),
        ]),
        2 => {
            let m = 4 * order.max(2);
            let step = std::f64::consts::TAU / m as f64;
            Ok((0..m)
                .map(|i| {
                    let t = (i as f64 + 0.5) * step;
                    (DVector::from_vec(vec![t.cos(), t.sin()]), step)
                })
                .collect())
        }
        3 => {
            let np = order.max(4);
            let rule = gauss_legendre(np);
            let m = 2 * np;
            let step = std::f64::consts::TAU / m as f64;
            let mut out = Vec::with_capacity(np * m);
            for (ct, wt) in rule.nodes.iter().zip(&rule.weights) {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for i in 0..m {
                    let t = (i as f64 + 0.5) * step;
                    out.push((
                        DVector::from_vec(vec![st * t.cos(), st * t.sin(), *ct]),
                        wt * step,
                    ));
                }
            }
            Ok(out)
        }
        d => Err(Error::unsupported(format!(
            "product-rule sphere quadrature is implemented for ambient dimensions 1-3, got {d}"
        ))),
    }
}

/// Surface measure of the unit sphere S^(n-1) in R^n.
pub fn sphere_surface_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => panic!("sphere_surface_area supports dimensions 1-4, got {n}"),
    }
}

/// Volume of the unit ball in R^n.
pub fn ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        4 => PI * PI / 2.0,
        _ => panic!("ball_volume supports dimensions 0-4, got {n}"),
    }
}
