//! The q-th dual curvature measure and its subspace concentration.
//!
//! For a body K with the origin interior, the measure of a set of sphere
//! directions eta is `(1/n) * integral over {u : touching normal in eta}
//! of s(u) rho_K(u)^q du`. Three evaluation routes are provided:
//!
//! * **Monte Carlo** over sphere directions — works for every body kind,
//!   returns a standard error, and is deterministic for a fixed seed and
//!   sample count regardless of thread count (per-sample counter streams).
//! * **Product rule** over the sphere (dimensions 2 and 3) — deterministic,
//!   no error bar; a sanity route, since the radial powers are only
//!   piecewise smooth on the sphere.
//! * **Facet decomposition** (polytopes, q > 0) — converts the measure of
//!   the directions touching a facet into a boundary integral
//!   `(offset / n) * integral over the facet of phi`, evaluated in facet
//!   coordinates around the foot of the perpendicular so the weight's
//!   radial structure is exact. This is the high-accuracy route.
//!
//! The subspace mass counts the directions whose touching facet normal
//! lies in L (within 1e-9); rays that tie between facets are counted by
//! the lowest facet index and reported via `flagged_fraction`.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::body::{Body, Facet};
use crate::error::{Error, Result};
use crate::phi::PhiSpec;
use crate::quad;
use crate::subspace::Subspace;

/// Samples per Monte Carlo work unit; the unit boundaries are what make the
/// parallel reduction order-independent.
const BATCH: usize = 4096;
/// A facet normal belongs to L when its distance to L is below this.
const NORMAL_IN_TOL: f64 = 1e-9;
/// Tie fractions above this deserve a warning in reports.
pub const FLAG_WARN_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMethod {
    MonteCarlo,
    Product,
    Facet,
}

impl QuadMethod {
    pub fn name(self) -> &'static str {
        match self {
            QuadMethod::MonteCarlo => "mc",
            QuadMethod::Product => "product",
            QuadMethod::Facet => "facet",
        }
    }
}

/// How to evaluate measures: method plus its tuning knobs.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    /// Monte Carlo sample count.
    pub samples: usize,
    /// Monte Carlo seed; the estimate is a pure function of (seed, samples).
    pub seed: u64,
    /// Base order for deterministic rules (facet and product routes scale
    /// it up internally as needed).
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            method: QuadMethod::MonteCarlo,
            samples: 100_000,
            seed: 0,
            order: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn with_method(method: QuadMethod) -> Self {
        QuadratureSpec {
            method,
            ..QuadratureSpec::default()
        }
    }
}

/// A value with an optional standard error (present for Monte Carlo).
#[derive(Debug, Clone, Copy)]
pub struct Measured {
    pub value: f64,
    pub stderr: Option<f64>,
}

/// Numerator, denominator, and ratio of the subspace concentration,
/// evaluated with matched methods so systematic errors cancel.
#[derive(Debug, Clone)]
pub struct RatioReport {
    pub total: Measured,
    pub subspace: Measured,
    pub ratio: f64,
    pub method: QuadMethod,
    /// Fraction of the total mass (or samples) on rays whose touching
    /// facet is ambiguous.
    pub flagged_fraction: f64,
}

/// The method `concentration_ratio` picks when the caller does not insist:
/// the facet route where it applies, Monte Carlo otherwise.
pub fn default_method(body: &Body, q: f64) -> QuadMethod {
    if body.is_polytope() && q > 0.0 {
        QuadMethod::Facet
    } else {
        QuadMethod::MonteCarlo
    }
}

/// Total measure of the sphere.
pub fn total_measure(body: &Body, phi: &PhiSpec, spec: &QuadratureSpec) -> Result<Measured> {
    check_phi(body, phi)?;
    match spec.method {
        QuadMethod::Facet => facet_measure(body, phi, None, spec),
        QuadMethod::MonteCarlo => {
            let scan = mc_scan(body, phi, None, spec.samples, spec.seed)?;
            Ok(scan.total)
        }
        QuadMethod::Product => {
            let scan = product_scan(body, phi, None, spec.order)?;
            Ok(scan.total)
        }
    }
}

/// Mass of the directions S^(n-1) intersect L.
pub fn subspace_measure(
    body: &Body,
    phi: &PhiSpec,
    l: &Subspace,
    spec: &QuadratureSpec,
) -> Result<Measured> {
    check_phi(body, phi)?;
    check_subspace(body, l)?;
    match spec.method {
        QuadMethod::Facet => facet_measure(body, phi, Some(l), spec),
        QuadMethod::MonteCarlo => {
            let scan = mc_scan(body, phi, Some(l), spec.samples, spec.seed)?;
            Ok(scan.subspace.expect("subspace requested"))
        }
        QuadMethod::Product => {
            let scan = product_scan(body, phi, Some(l), spec.order)?;
            Ok(scan.subspace.expect("subspace requested"))
        }
    }
}

/// Subspace concentration ratio with matched numerator and denominator.
pub fn concentration_ratio(
    body: &Body,
    phi: &PhiSpec,
    l: &Subspace,
    spec: &QuadratureSpec,
) -> Result<RatioReport> {
    check_phi(body, phi)?;
    check_subspace(body, l)?;
    match spec.method {
        QuadMethod::Facet => {
            let total = facet_measure(body, phi, None, spec)?;
            let subspace = facet_measure(body, phi, Some(l), spec)?;
            finish_ratio(total, subspace, QuadMethod::Facet, 0.0)
        }
        QuadMethod::MonteCarlo => {
            let scan = mc_scan(body, phi, Some(l), spec.samples, spec.seed)?;
            finish_ratio(
                scan.total,
                scan.subspace.expect("subspace requested"),
                QuadMethod::MonteCarlo,
                scan.flagged_fraction,
            )
        }
        QuadMethod::Product => {
            let scan = product_scan(body, phi, Some(l), spec.order)?;
            finish_ratio(
                scan.total,
                scan.subspace.expect("subspace requested"),
                QuadMethod::Product,
                scan.flagged_fraction,
            )
        }
    }
}

fn finish_ratio(
    total: Measured,
    subspace: Measured,
    method: QuadMethod,
    flagged_fraction: f64,
) -> Result<RatioReport> {
    if !(total.value > 0.0) {
        return Err(Error::domain(format!(
            "total measure is not positive ({:.3e}); cannot form a ratio",
            total.value
        )));
    }
    Ok(RatioReport {
        ratio: subspace.value / total.value,
        total,
        subspace,
        method,
        flagged_fraction,
    })
}

fn check_phi(body: &Body, phi: &PhiSpec) -> Result<()> {
    if phi.n != body.dim() {
        return Err(Error::config(format!(
            "weight is set up for dimension {} but the body has dimension {}",
            phi.n,
            body.dim()
        )));
    }
    Ok(())
}

fn check_subspace(body: &Body, l: &Subspace) -> Result<()> {
    if l.ambient() != body.dim() {
        return Err(Error::config(format!(
            "subspace lives in dimension {} but the body in {}",
            l.ambient(),
            body.dim()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Spherical routes

struct ScanOutcome {
    total: Measured,
    subspace: Option<Measured>,
    flagged_fraction: f64,
}

#[derive(Default, Clone, Copy)]
struct BatchSums {
    sum: f64,
    sumsq: f64,
    sub_sum: f64,
    sub_sumsq: f64,
    flagged: u64,
    count: u64,
}

fn unit_direction(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_iterator(n, (0..n).map(|_| -> f64 { StandardNormal.sample(rng) }));
        let len = v.norm();
        if len > 1e-8 {
            return v / len;
        }
    }
}

/// Monte Carlo sphere scan. Each sample index owns a counter-derived RNG
/// stream, and batches are reduced in index order, so the result is a pure
/// function of (seed, samples) — thread count cannot change a bit.
fn mc_scan(
    body: &Body,
    phi: &PhiSpec,
    l: Option<&Subspace>,
    samples: usize,
    seed: u64,
) -> Result<ScanOutcome> {
    if samples == 0 {
        return Err(Error::config("Monte Carlo sample count must be positive"));
    }
    let n = body.dim();
    let batches = samples.div_ceil(BATCH);
    let partials: Vec<BatchSums> = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<BatchSums> {
            let lo = b * BATCH;
            let hi = ((b + 1) * BATCH).min(samples);
            let mut acc = BatchSums::default();
            for idx in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(idx as u64);
                let u = unit_direction(&mut rng, n);
                let rho = body.radial(&u)?;
                let f = phi.profile_at(&u) * rho.powf(phi.q);
                acc.sum += f;
                acc.sumsq += f * f;
                if let Some(l) = l {
                    let bn = body.boundary_normal(&u)?;
                    if !bn.unique {
                        acc.flagged += 1;
                    }
                    if l.distance(&bn.normal) <= NORMAL_IN_TOL {
                        acc.sub_sum += f;
                        acc.sub_sumsq += f * f;
                    }
                }
                acc.count += 1;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sums = BatchSums::default();
    for p in partials {
        sums.sum += p.sum;
        sums.sumsq += p.sumsq;
        sums.sub_sum += p.sub_sum;
        sums.sub_sumsq += p.sub_sumsq;
        sums.flagged += p.flagged;
        sums.count += p.count;
    }
    let nf = sums.count as f64;
    let coeff = quad::sphere_surface_area(n) / n as f64;
    let stderr = |sum: f64, sumsq: f64| -> f64 {
        if sums.count < 2 {
            return f64::INFINITY;
        }
        let mean = sum / nf;
        let var = ((sumsq / nf) - mean * mean).max(0.0) * nf / (nf - 1.0);
        coeff * (var / nf).sqrt()
    };
    Ok(ScanOutcome {
        total: Measured {
            value: coeff * sums.sum / nf,
            stderr: Some(stderr(sums.sum, sums.sumsq)),
        },
        subspace: l.map(|_| Measured {
            value: coeff * sums.sub_sum / nf,
            stderr: Some(stderr(sums.sub_sum, sums.sub_sumsq)),
        }),
        flagged_fraction: sums.flagged as f64 / nf,
    })
}

/// Deterministic product-rule sphere scan (dimensions 2 and 3).
fn product_scan(
    body: &Body,
    phi: &PhiSpec,
    l: Option<&Subspace>,
    order: usize,
) -> Result<ScanOutcome> {
    let n = body.dim();
    if n > 3 {
        return Err(Error::unsupported(format!(
            "the product-rule method covers dimensions 2 and 3; dimension {n} needs \
             Monte Carlo or the facet route"
        )));
    }
    let nodes = quad::sphere_nodes(n, (8 * order).max(64))?;
    let mut sum = 0.0;
    let mut sub_sum = 0.0;
    let mut flagged_mass = 0.0;
    let mut mass = 0.0;
    for (u, w) in &nodes {
        let rho = body.radial(u)?;
        let f = phi.profile_at(u) * rho.powf(phi.q);
        sum += w * f;
        mass += w;
        if let Some(l) = l {
            let bn = body.boundary_normal(u)?;
            if !bn.unique {
                flagged_mass += w;
            }
            if l.distance(&bn.normal) <= NORMAL_IN_TOL {
                sub_sum += w * f;
            }
        }
    }
    let coeff = 1.0 / n as f64;
    Ok(ScanOutcome {
        total: Measured {
            value: coeff * sum,
            stderr: None,
        },
        subspace: l.map(|_| Measured {
            value: coeff * sub_sum,
            stderr: None,
        }),
        flagged_fraction: flagged_mass / mass,
    })
}

// ---------------------------------------------------------------------------
// Facet route

/// Facet-decomposition evaluation: the mass of the directions touching a
/// facet F equals `(offset / n) * integral over F of phi`. Restricting to
/// facets whose normal lies in L gives the subspace mass. Polytopes only;
/// requires q > 0 (the boundary formula carries a 1/q-compensated radial
/// integral that diverges otherwise).
pub fn facet_measure(
    body: &Body,
    phi: &PhiSpec,
    l: Option<&Subspace>,
    spec: &QuadratureSpec,
) -> Result<Measured> {
    if phi.q <= 0.0 {
        return Err(Error::domain(format!(
            "the facet decomposition requires q > 0, got q = {}",
            phi.q
        )));
    }
    let facets = body.facets()?;
    let n = body.dim();
    let mut total = 0.0;
    for f in &facets {
        if let Some(l) = l {
            if l.distance(&f.normal) > NORMAL_IN_TOL {
                continue;
            }
        }
        total += f.offset / n as f64 * facet_phi_integral(f, phi, n, spec.order)?;
    }
    Ok(Measured {
        value: total,
        stderr: None,
    })
}

/// Integral of the weight over one facet, in facet-plane coordinates around
/// the foot of the perpendicular from the origin, where the ambient norm
/// splits as |z|^2 = offset^2 + |y|^2.
fn facet_phi_integral(facet: &Facet, phi: &PhiSpec, n: usize, order: usize) -> Result<f64> {
    let d = n - 1;
    if facet.vertices.len() < d + 1 {
        return Err(Error::invalid_body(format!(
            "facet {} has only {} incident vertices",
            facet.index,
            facet.vertices.len()
        )));
    }
    let foot = &facet.normal * facet.offset;
    // Orthonormal in-plane directions by Gram-Schmidt over edge vectors.
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d);
    for v in &facet.vertices[1..] {
        let mut e = v - &facet.vertices[0];
        for b in &basis {
            let c = b.dot(&e);
            e -= b * c;
        }
        let len = e.norm();
        if len > 1e-9 {
            basis.push(e / len);
            if basis.len() == d {
                break;
            }
        }
    }
    if basis.len() < d {
        return Err(Error::invalid_body(format!(
            "facet {} is degenerate (vertices do not span it)",
            facet.index
        )));
    }
    let local: Vec<DVector<f64>> = facet
        .vertices
        .iter()
        .map(|v| DVector::from_iterator(d, basis.iter().map(|b| b.dot(&(v - &foot)))))
        .collect();
    let b2 = facet.offset * facet.offset;
    if phi.is_pure_power() {
        let e = (phi.q - n as f64) / 2.0;
        match d {
            1 => {
                let lo = local.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = local.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                Ok(quad::integrate_dyadic_toward(lo, hi, 0.0, order.max(16), |t| {
                    (b2 + t * t).powf(e)
                }))
            }
            2 => {
                let poly = crate::hull::convex_hull_2d(&local);
                Ok(quad::polygon_radial_power_integral(
                    &poly,
                    b2,
                    e,
                    (4 * order).max(32),
                ))
            }
            3 => {
                let cells = crate::hull::triangulate(&local, 3)?;
                let mut total = 0.0;
                for cell in &cells {
                    total += quad::integrate_simplex_adaptive(cell, order.max(4), 1e-10, 3, |y| {
                        (b2 + y.norm_squared()).powf(e)
                    });
                }
                Ok(total)
            }
            _ => unreachable!("ambient dimension is bounded by 4"),
        }
    } else {
        // Custom profile: integrate in facet coordinates through the ambient
        // lift. Simplex-decompose for any facet dimension.
        let cells = crate::hull::triangulate(&local, d)?;
        let lift = |y: &DVector<f64>| {
            let mut z = foot.clone();
            for (c, b) in y.iter().zip(&basis) {
                z += b * *c;
            }
            z
        };
        let mut total = 0.0;
        for cell in &cells {
            total += quad::integrate_simplex_adaptive(cell, order.max(8), 1e-10, 3, |y| {
                phi.eval(&lift(y))
            });
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::Body;
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

    fn shifted_cube3(t: f64) -> Body {
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..3 {
            for s in [1.0f64, -1.0] {
                let mut n = DVector::zeros(3);
                n[i] = s;
                normals.push(n);
                offsets.push(if i == 0 { 1.0 + s * t } else { 1.0 });
            }
        }
        Body::hpolytope(format!("shifted_cube3({t})"), normals, offsets, 3).unwrap()
    }

    fn axis_subspace(axes: &[usize], n: usize) -> Subspace {
        Subspace::from_axes(axes, n).unwrap()
    }

    fn facet_spec() -> QuadratureSpec {
        QuadratureSpec::with_method(QuadMethod::Facet)
    }

    #[test]
    fn cone_volume_case_is_exact_on_cubes() {
        // At q = n the measure is the cone-volume measure; its total is the
        // volume and each coordinate axis carries exactly k/n of it.
        for dim in [2usize, 3, 4] {
            let cube = unit_cube(dim);
            let phi = PhiSpec::power(dim as f64, dim).unwrap();
            let total = total_measure(&cube, &phi, &facet_spec()).unwrap();
            assert_relative_eq!(total.value, (1u64 << dim) as f64, epsilon = 1e-10);
            let l = axis_subspace(&[0], dim);
            let ratio = concentration_ratio(&cube, &phi, &l, &facet_spec()).unwrap();
            assert!((ratio.ratio - 1.0 / dim as f64).abs() <= 1e-14);
        }
    }

    #[test]
    fn facet_totals_match_independent_quadrature() {
        // All reference numbers below were computed with an independent
        // adaptive-quadrature implementation and frozen.
        let phi25 = PhiSpec::power(2.5, 3).unwrap();
        let cube = unit_cube(3);
        let total = total_measure(&cube, &phi25, &facet_spec()).unwrap();
        assert_relative_eq!(total.value, 7.1114258340541054, epsilon = 1e-9);

        let shifted = shifted_cube3(0.3);
        let total = total_measure(&shifted, &phi25, &facet_spec()).unwrap();
        assert_relative_eq!(total.value, 7.0244834040153785, epsilon = 1e-9);
        let l = axis_subspace(&[0], 3);
        let ratio = concentration_ratio(&shifted, &phi25, &l, &facet_spec()).unwrap();
        assert_relative_eq!(ratio.ratio, 0.33108419866776118, epsilon = 1e-9);

        let phi45 = PhiSpec::power(4.5, 3).unwrap();
        let total = total_measure(&shifted, &phi45, &facet_spec()).unwrap();
        assert_relative_eq!(total.value, 12.383151609976156, epsilon = 1e-8);
        let ratio = concentration_ratio(&shifted, &phi45, &l, &facet_spec()).unwrap();
        assert_relative_eq!(ratio.ratio, 0.34846980423184148, epsilon = 1e-9);

        // n = 2 cube at q = 1.5.
        let phi = PhiSpec::power(1.5, 2).unwrap();
        let total = total_measure(&unit_cube(2), &phi, &facet_spec()).unwrap();
        assert_relative_eq!(total.value, 3.7499590029877448, epsilon = 1e-10);
    }

    #[test]
    fn cross_polytope_total_matches_reference() {
        let mut verts = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut v = DVector::zeros(3);
                v[i] = s;
                verts.push(v);
            }
        }
        let body = Body::vpolytope("crosspoly3", verts, 3).unwrap();
        let phi = PhiSpec::power(2.5, 3).unwrap();
        let total = total_measure(&body, &phi, &facet_spec()).unwrap();
        assert_relative_eq!(total.value, 1.6003920780132008, epsilon = 1e-9);
    }

    #[test]
    fn centered_simplex_has_no_axis_mass() {
        let s3 = 3.0f64.sqrt();
        let verts: Vec<DVector<f64>> = [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ]
        .iter()
        .map(|p| DVector::from_vec(p.to_vec()) / s3)
        .collect();
        let body = Body::vpolytope("simplex3", verts, 3).unwrap();
        let phi = PhiSpec::power(2.5, 3).unwrap();
        let total = total_measure(&body, &phi, &facet_spec()).unwrap();
        assert_relative_eq!(total.value, 0.70216117178705650, epsilon = 1e-9);
        let phi45 = PhiSpec::power(4.5, 3).unwrap();
        let total = total_measure(&body, &phi45, &facet_spec()).unwrap();
        assert_relative_eq!(total.value, 0.21997881338898762, epsilon = 1e-9);
        // No facet normal lies in a coordinate axis: the subspace mass is 0.
        let l = axis_subspace(&[0], 3);
        let ratio = concentration_ratio(&body, &phi, &l, &facet_spec()).unwrap();
        assert_eq!(ratio.subspace.value, 0.0);
        assert_eq!(ratio.ratio, 0.0);
    }

    #[test]
    fn monte_carlo_agrees_with_the_facet_route() {
        let body = shifted_cube3(0.3);
        let phi = PhiSpec::power(2.5, 3).unwrap();
        let l = axis_subspace(&[0], 3);
        let exact = concentration_ratio(&body, &phi, &l, &facet_spec()).unwrap();
        let mc_spec = QuadratureSpec {
            method: QuadMethod::MonteCarlo,
            samples: 200_000,
            seed: 7,
            order: 8,
        };
        let mc = concentration_ratio(&body, &phi, &l, &mc_spec).unwrap();
        let tse = mc.total.stderr.unwrap();
        let sse = mc.subspace.stderr.unwrap();
        assert!(
            (mc.total.value - exact.total.value).abs() <= 3.0 * tse,
            "total {} vs {} (se {})",
            mc.total.value,
            exact.total.value,
            tse
        );
        assert!(
            (mc.subspace.value - exact.subspace.value).abs() <= 3.0 * sse,
            "subspace {} vs {} (se {})",
            mc.subspace.value,
            exact.subspace.value,
            sse
        );
        assert!(mc.flagged_fraction < FLAG_WARN_FRACTION);
    }

    #[test]
    fn product_rule_agrees_with_the_facet_route() {
        let body = unit_cube(3);
        let phi = PhiSpec::power(2.5, 3).unwrap();
        let l = axis_subspace(&[0], 3);
        let exact = concentration_ratio(&body, &phi, &l, &facet_spec()).unwrap();
        let spec = QuadratureSpec {
            method: QuadMethod::Product,
            ..QuadratureSpec::default()
        };
        let prod = concentration_ratio(&body, &phi, &l, &spec).unwrap();
        assert_relative_eq!(prod.total.value, exact.total.value, max_relative = 1e-2);
        assert_relative_eq!(prod.ratio, exact.ratio, max_relative = 1e-2);
        // Product rule is unsupported in dimension 4.
        let cube4 = unit_cube(4);
        let phi4 = PhiSpec::power(2.5, 4).unwrap();
        assert!(total_measure(&cube4, &phi4, &spec).is_err());
    }

    #[test]
    fn q_zero_total_is_the_ball_volume_for_every_body() {
        // At q = 0 the integrand is 1: the total is vol(B_n) regardless of
        // the body, and Monte Carlo has zero variance.
        let phi = PhiSpec::power(0.0, 3).unwrap();
        for body in [
            unit_cube(3),
            shifted_cube3(0.4),
            Body::ball("ball3", 3).unwrap(),
        ] {
            let spec = QuadratureSpec {
                samples: 1000,
                ..QuadratureSpec::default()
            };
            let total = total_measure(&body, &phi, &spec).unwrap();
            assert_relative_eq!(total.value, 4.0 * std::f64::consts::PI / 3.0, epsilon = 1e-12);
            assert!(total.stderr.unwrap() <= 1e-12);
        }
        // ...and the facet route refuses q <= 0.
        assert!(facet_measure(&unit_cube(3), &phi, None, &facet_spec()).is_err());
    }

    #[test]
    fn scaling_covariance_in_q() {
        // total(alpha K) = alpha^q total(K).
        let body = shifted_cube3(0.2);
        let scaled = body.scale(2.0).unwrap();
        let phi = PhiSpec::power(2.5, 3).unwrap();
        let a = total_measure(&body, &phi, &facet_spec()).unwrap().value;
        let b = total_measure(&scaled, &phi, &facet_spec()).unwrap().value;
        assert_relative_eq!(b, 2.0f64.powf(2.5) * a, max_relative = 1e-12);
    }

    #[test]
    fn axis_masses_add_up_to_the_total_on_the_cube() {
        // Every cube facet normal lies on some axis, so the three axis
        // masses partition the total exactly.
        let cube = unit_cube(3);
        let phi = PhiSpec::power(2.5, 3).unwrap();
        let total = total_measure(&cube, &phi, &facet_spec()).unwrap().value;
        let mut sum = 0.0;
        for axis in 0..3 {
            sum += subspace_measure(&cube, &phi, &axis_subspace(&[axis], 3), &facet_spec())
                .unwrap()
                .value;
        }
        assert_relative_eq!(sum, total, epsilon = 1e-12);
        // A 2-D coordinate plane carries two axes' worth.
        let plane = subspace_measure(&cube, &phi, &axis_subspace(&[0, 1], 3), &facet_spec())
            .unwrap()
            .value;
        assert_relative_eq!(plane, 2.0 * total / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn product_ball_ratio_matches_reference_values() {
        // Cylinder B^1 x B^2: reference numbers from independent adaptive
        // quadrature of the polar form.
        let body = Body::product_ball("cyl", 3, 1).unwrap();
        let phi = PhiSpec::power(2.5, 3).unwrap();
        let l = axis_subspace(&[0], 3);
        let spec = QuadratureSpec {
            method: QuadMethod::Product,
            order: 24,
            ..QuadratureSpec::default()
        };
        let r = concentration_ratio(&body, &phi, &l, &spec).unwrap();
        assert_relative_eq!(r.total.value, 5.8308726384318064, max_relative = 2e-3);
        assert_relative_eq!(r.subspace.value, 1.9039247534154045, max_relative = 2e-3);
        assert_relative_eq!(r.ratio, 0.32652483967261864, max_relative = 2e-3);

        let mc_spec = QuadratureSpec {
            method: QuadMethod::MonteCarlo,
            samples: 200_000,
            seed: 11,
            order: 8,
        };
        let mc = concentration_ratio(&body, &phi, &l, &mc_spec).unwrap();
        assert!((mc.total.value - 5.8308726384318064).abs() <= 3.0 * mc.total.stderr.unwrap());
        assert!(
            (mc.subspace.value - 1.9039247534154045).abs() <= 3.0 * mc.subspace.stderr.unwrap()
        );
    }

    #[test]
    fn monte_carlo_is_deterministic_across_thread_counts() {
        let body = shifted_cube3(0.3);
        let phi = PhiSpec::power(2.5, 3).unwrap();
        let l = axis_subspace(&[0], 3);
        let spec = QuadratureSpec {
            method: QuadMethod::MonteCarlo,
            samples: 50_000,
            seed: 42,
            order: 8,
        };
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| concentration_ratio(&body, &phi, &l, &spec).unwrap())
        };
        let one = run(1);
        let eight = run(8);
        assert_eq!(one.total.value.to_bits(), eight.total.value.to_bits());
        assert_eq!(one.subspace.value.to_bits(), eight.subspace.value.to_bits());
        assert_eq!(one.ratio.to_bits(), eight.ratio.to_bits());
        // And per-seed reproducibility.
        let again = run(4);
        assert_eq!(one.total.value.to_bits(), again.total.value.to_bits());
    }

    #[test]
    fn custom_profile_reduces_to_power_when_constant() {
        // A "custom" profile that is identically 1 must agree with the pure
        // power route (different code path, same measure).
        let body = unit_cube(3);
        let phi_custom = PhiSpec::with_profile(2.5, 3, "unit", |_| 1.0).unwrap();
        let phi_power = PhiSpec::power(2.5, 3).unwrap();
        let a = total_measure(&body, &phi_custom, &facet_spec()).unwrap().value;
        let b = total_measure(&body, &phi_power, &facet_spec()).unwrap().value;
        assert_relative_eq!(a, b, max_relative = 1e-8);
        // A genuinely tilted profile shifts axis masses the way symmetry says.
        let tilted = PhiSpec::with_profile(2.5, 3, "x-heavy", |u: &DVector<f64>| {
            1.0 + 0.5 * u[0] * u[0]
        })
        .unwrap();
        let x_mass = subspace_measure(&body, &tilted, &axis_subspace(&[0], 3), &facet_spec())
            .unwrap()
            .value;
        let y_mass = subspace_measure(&body, &tilted, &axis_subspace(&[1], 3), &facet_spec())
            .unwrap()
            .value;
        // Directions touching the x-facets have the largest first
        // coordinate, so the x-heavy profile loads them more than y's.
        assert!(x_mass > y_mass);
    }
}
