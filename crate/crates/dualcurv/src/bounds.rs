//! Subspace concentration bounds and their verification.
//!
//! The ratio of mass a dual curvature measure places on a subspace is
//! bounded in terms of n, q, dim(L), and the body's asymmetry constant
//! gamma (the largest factor with `gamma (-K)` inside K):
//!
//! * `q <= n` (and q > dim(L)+1): ratio <= (k + c (q-k)) / q,
//! * `q > n+1`: ratio <= ((k + q - n) + c (n-k)) / q,
//!
//! with `c = (1-gamma)/(1+gamma)`. Symmetric bodies (gamma = 1, c = 0)
//! tighten these to k/q and (k+q-n)/q, the former holding on all of
//! 0 < q < n; centered bodies admit gamma >= 1/n, which caps the same
//! formulas with `c = (n-1)/(n+1)`. At q = n the measure
//! is the cone-volume measure and centered or symmetric bodies satisfy
//! ratio <= k/n outright. Nothing is established on the open band
//! (n, n+1].
//!
//! The module also checks the two product-body integral inequalities the
//! bound proofs rest on (planar case), and sweeps body families to probe
//! how tight the bounds run.

use nalgebra::DVector;

use crate::body::Body;
use crate::error::{Error, Result};
use crate::hull;
use crate::measures::{self, QuadratureSpec, FLAG_WARN_FRACTION};
use crate::phi::PhiSpec;
use crate::quad;
use crate::subspace::Subspace;

/// Which bound formula produced a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    GeneralLowQ,
    GeneralHighQ,
    EvenLowQ,
    EvenHighQ,
    ConeVolume,
    Centered,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::GeneralLowQ => "general_low_q",
            BoundKind::GeneralHighQ => "general_high_q",
            BoundKind::EvenLowQ => "even_low_q",
            BoundKind::EvenHighQ => "even_high_q",
            BoundKind::ConeVolume => "cone_volume",
            BoundKind::Centered => "centered",
        }
    }
}

/// Tolerance for deciding q = n, q = n+1 and gamma = 1 exactly.
const EDGE_TOL: f64 = 1e-12;

/// Evaluate one bound formula, validating its range of applicability.
pub fn reference_bound(n: usize, k: usize, q: f64, gamma: f64, kind: BoundKind) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::domain(format!(
            "the subspace dimension must satisfy 0 < dim(L) < n, got {k} of {n}"
        )));
    }
    let nf = n as f64;
    let kf = k as f64;
    let c = match kind {
        BoundKind::EvenLowQ | BoundKind::EvenHighQ | BoundKind::ConeVolume => 0.0,
        BoundKind::Centered => (nf - 1.0) / (nf + 1.0),
        _ => {
            if !(gamma > 0.0 && gamma <= 1.0) {
                return Err(Error::domain(format!(
                    "asymmetry constant must lie in (0, 1], got {gamma}"
                )));
            }
            (1.0 - gamma) / (1.0 + gamma)
        }
    };
    match kind {
        BoundKind::ConeVolume => {
            if (q - nf).abs() > EDGE_TOL {
                return Err(Error::domain(format!(
                    "the cone-volume bound applies at q = n only, got q = {q}"
                )));
            }
            Ok(kf / nf)
        }
        BoundKind::EvenLowQ => {
            // The symmetric characterization covers all of 0 < q < n.
            if q <= 0.0 || q >= nf - EDGE_TOL {
                return Err(Error::domain(format!(
                    "the symmetric low-q bound needs 0 < q < n, got q = {q}"
                )));
            }
            Ok((kf / q).min(1.0))
        }
        BoundKind::EvenHighQ => {
            if q <= nf + 1.0 + EDGE_TOL {
                return Err(Error::domain(format!(
                    "the symmetric high-q bound needs q > n+1, got q = {q}"
                )));
            }
            Ok((kf + q - nf) / q)
        }
        BoundKind::GeneralLowQ | BoundKind::Centered if q <= nf + EDGE_TOL => {
            if q <= kf + 1.0 {
                return Err(Error::domain(format!(
                    "the bound needs q > dim(L)+1, got q = {q} with dim(L) = {k}"
                )));
            }
            Ok((kf + c * (q - kf)) / q)
        }
        BoundKind::GeneralHighQ | BoundKind::Centered => {
            if q <= nf + 1.0 + EDGE_TOL {
                return Err(Error::domain(format!(
                    "the high-q bound needs q > n+1, got q = {q}"
                )));
            }
            Ok((kf + q - nf + c * (nf - kf)) / q)
        }
        BoundKind::GeneralLowQ => Err(Error::domain(format!(
            "the low-q bound needs q <= n, got q = {q}"
        ))),
    }
}

/// Pick the best available bound for the given parameters, or None when no
/// formula applies (the open band (n, n+1], or small q on an asymmetric
/// body). `centered` admits the gamma >= 1/n fallback constant alongside
/// the measured-asymmetry bound.
pub fn select_bound(
    n: usize,
    k: usize,
    q: f64,
    gamma: f64,
    centered: bool,
) -> Option<(f64, BoundKind)> {
    let nf = n as f64;
    let symmetric = (gamma - 1.0).abs() <= EDGE_TOL;
    if (q - nf).abs() <= EDGE_TOL {
        if symmetric || centered {
            return Some((k as f64 / nf, BoundKind::ConeVolume));
        }
        return reference_bound(n, k, q, gamma, BoundKind::GeneralLowQ)
            .ok()
            .map(|b| (b, BoundKind::GeneralLowQ));
    }
    if symmetric {
        let kind = if q < nf {
            BoundKind::EvenLowQ
        } else {
            BoundKind::EvenHighQ
        };
        return reference_bound(n, k, q, gamma, kind).ok().map(|b| (b, kind));
    }
    let kind = if q < nf {
        BoundKind::GeneralLowQ
    } else {
        BoundKind::GeneralHighQ
    };
    let mut best = reference_bound(n, k, q, gamma, kind).ok().map(|b| (b, kind));
    if centered {
        if let Ok(b) = reference_bound(n, k, q, gamma, BoundKind::Centered) {
            // Keep the measured-asymmetry bound on ties: it is the direct one.
            if best.map_or(true, |(v, _)| b < v - EDGE_TOL) {
                best = Some((b, BoundKind::Centered));
            }
        }
    }
    best
}

/// One body/subspace/q verification row.
#[derive(Debug, Clone)]
pub struct VerificationRecord {
    pub body: String,
    pub subspace: String,
    pub n: usize,
    pub k: usize,
    pub q: f64,
    pub gamma: f64,
    pub centered: bool,
    pub ratio: f64,
    pub ratio_stderr: Option<f64>,
    pub bound: Option<f64>,
    pub bound_kind: Option<BoundKind>,
    /// bound - ratio (positive = satisfied with room).
    pub margin: Option<f64>,
    /// None when no bound applies at these parameters.
    pub pass: Option<bool>,
    pub method: String,
    pub note: String,
}

/// Human-readable label for a subspace: coordinate axes where possible.
pub fn subspace_label(l: &Subspace) -> String {
    match l.coordinate_axes() {
        Some(axes) => axes
            .iter()
            .map(|a| format!("e{}", a + 1))
            .collect::<Vec<_>>()
            .join("+"),
        None => format!("span({})", l.dim()),
    }
}

/// Compute the concentration ratio and compare it against the selected
/// bound. A missing bound still produces a row (ratio only).
pub fn verify_body(
    body: &Body,
    l: &Subspace,
    q: f64,
    spec: Option<&QuadratureSpec>,
) -> Result<VerificationRecord> {
    let n = body.dim();
    let k = l.dim();
    let phi = PhiSpec::power(q, n)?;
    let default_spec;
    let spec = match spec {
        Some(s) => s,
        None => {
            default_spec = QuadratureSpec::with_method(measures::default_method(body, q));
            &default_spec
        }
    };
    let rr = measures::concentration_ratio(body, &phi, l, spec)?;
    let gamma = body.asymmetry().gamma;
    let centroid = body.centroid()?;
    let centered = centroid.norm() <= 1e-9;
    let bound = select_bound(n, k, q, gamma, centered);
    let ratio_stderr = match (rr.subspace.stderr, rr.total.stderr) {
        (Some(ss), Some(ts)) => {
            let t = rr.total.value;
            Some(((ss / t).powi(2) + (rr.ratio * ts / t).powi(2)).sqrt())
        }
        _ => None,
    };
    let tol = 1e-9 + 3.0 * ratio_stderr.unwrap_or(0.0);
    let mut note = String::new();
    if rr.flagged_fraction >= FLAG_WARN_FRACTION {
        note = format!(
            "warning: {:.2}% of sampled rays had ambiguous touching facets",
            100.0 * rr.flagged_fraction
        );
    } else if bound.is_none() {
        let nf = n as f64;
        note = if q > nf && q <= nf + 1.0 + EDGE_TOL {
            "no bound is established for n < q <= n+1".to_string()
        } else {
            format!("no bound applies at q = {q} for this body")
        };
    }
    Ok(VerificationRecord {
        body: body.name().to_string(),
        subspace: subspace_label(l),
        n,
        k,
        q,
        gamma,
        centered,
        ratio: rr.ratio,
        ratio_stderr,
        bound: bound.map(|(b, _)| b),
        bound_kind: bound.map(|(_, kk)| kk),
        margin: bound.map(|(b, _)| b - rr.ratio),
        pass: bound.map(|(b, _)| rr.ratio <= b + tol),
        method: rr.method.name().to_string(),
        note,
    })
}

// ---------------------------------------------------------------------------
// The two planar integral inequalities behind the bounds

/// Result of checking one of the product-body inequalities.
#[derive(Debug, Clone)]
pub struct AndersonReport {
    pub branch: &'static str,
    pub p: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs - rhs (nonnegative when the inequality holds).
    pub margin: f64,
    pub pass: bool,
}

fn scale_poly(poly: &[DVector<f64>], s: f64) -> Vec<DVector<f64>> {
    poly.iter().map(|v| v * s).collect()
}

fn negate_poly(poly: &[DVector<f64>]) -> Vec<DVector<f64>> {
    poly.iter().map(|v| -v).collect()
}

/// `int over P of |z|^p`, with a guard against edges running through the
/// origin (where the radial closed form loses accuracy for p <= -1).
fn poly_power_integral(poly: &[DVector<f64>], p: f64, order: usize) -> Result<f64> {
    if p <= -1.0 {
        for i in 0..poly.len() {
            let a = &poly[i];
            let b = &poly[(i + 1) % poly.len()];
            let edge = b - a;
            let len2 = edge.norm_squared();
            if len2 < 1e-300 {
                continue;
            }
            let t = (-a.dot(&edge) / len2).clamp(0.0, 1.0);
            let closest = a + edge * t;
            if closest.norm() <= 1e-9 {
                return Err(Error::domain(
                    "a polygon edge passes through the origin; translate the body before \
                     integrating a strongly singular weight",
                ));
            }
        }
    }
    Ok(quad::polygon_radial_power_integral(
        poly,
        0.0,
        p / 2.0,
        order.max(48),
    ))
}

/// Quasiconcave branch (planar): for p in (-2, 0] and lambda_i > 0,
/// `int over (l0 K + l1 (-K)) of |z|^p >= (l0+l1)^(p+2) int over K`.
pub fn anderson_quasiconcave_check(
    polygon: &[DVector<f64>],
    p: f64,
    lambda0: f64,
    lambda1: f64,
    order: usize,
) -> Result<AndersonReport> {
    if !(p > -2.0 && p <= 0.0) {
        return Err(Error::domain(format!(
            "the quasiconcave inequality needs p in (-2, 0], got {p}"
        )));
    }
    check_lambdas(lambda0, lambda1)?;
    let k = hull::convex_hull_2d(polygon);
    if k.len() < 3 {
        return Err(Error::invalid_body("the polygon has empty interior"));
    }
    let sum = hull::minkowski_sum_2d(&scale_poly(&k, lambda0), &negate_poly(&scale_poly(&k, lambda1)));
    let lhs = poly_power_integral(&sum, p, order)?;
    let rhs = (lambda0 + lambda1).powf(p + 2.0) * poly_power_integral(&k, p, order)?;
    Ok(AndersonReport {
        branch: "quasiconcave",
        p,
        lambda0,
        lambda1,
        lhs,
        rhs,
        margin: lhs - rhs,
        pass: lhs >= rhs - 1e-9 * rhs.abs().max(1.0),
    })
}

/// Convex branch (planar): for p >= 1, lambda_i > 0, and equal-area K0, K1,
/// `int over (l0 K0 + l1 K1) + int over (l0 K1 + l1 K0) >=
/// (l0+l1)^2 |l0-l1|^p (int over K0 + int over K1)`.
pub fn anderson_convex_check(
    polygon0: &[DVector<f64>],
    polygon1: &[DVector<f64>],
    p: f64,
    lambda0: f64,
    lambda1: f64,
    order: usize,
) -> Result<AndersonReport> {
    if p < 1.0 {
        return Err(Error::domain(format!(
            "the convex-range inequality needs p >= 1, got {p}"
        )));
    }
    check_lambdas(lambda0, lambda1)?;
    let k0 = hull::convex_hull_2d(polygon0);
    let k1 = hull::convex_hull_2d(polygon1);
    if k0.len() < 3 || k1.len() < 3 {
        return Err(Error::invalid_body("both polygons need nonempty interior"));
    }
    let a0 = quad::polygon_radial_power_integral(&k0, 0.0, 0.0, 4);
    let a1 = quad::polygon_radial_power_integral(&k1, 0.0, 0.0, 4);
    if (a0 - a1).abs() > 1e-9 * a0.abs().max(a1.abs()) {
        return Err(Error::domain(format!(
            "the convex-range inequality requires equal areas, got {a0} and {a1}"
        )));
    }
    let mix0 = hull::minkowski_sum_2d(&scale_poly(&k0, lambda0), &scale_poly(&k1, lambda1));
    let mix1 = hull::minkowski_sum_2d(&scale_poly(&k1, lambda0), &scale_poly(&k0, lambda1));
    let lhs = poly_power_integral(&mix0, p, order)? + poly_power_integral(&mix1, p, order)?;
    let rhs = (lambda0 + lambda1).powi(2)
        * (lambda0 - lambda1).abs().powf(p)
        * (poly_power_integral(&k0, p, order)? + poly_power_integral(&k1, p, order)?);
    Ok(AndersonReport {
        branch: "convex",
        p,
        lambda0,
        lambda1,
        lhs,
        rhs,
        margin: lhs - rhs,
        pass: lhs >= rhs - 1e-9 * rhs.abs().max(1.0),
    })
}

fn check_lambdas(lambda0: f64, lambda1: f64) -> Result<()> {
    if lambda0 <= 0.0 || lambda1 <= 0.0 {
        return Err(Error::domain(format!(
            "combination weights must be positive, got {lambda0} and {lambda1}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tightness sweeps over body families

/// One sampled point of a family sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub param: f64,
    pub q: f64,
    pub gamma: f64,
    pub ratio: f64,
    pub bound: Option<f64>,
    pub bound_kind: Option<BoundKind>,
    pub margin: Option<f64>,
}

/// A parameter sweep of one family at fixed q and L, optionally refined
/// around the smallest margin.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub family: String,
    pub subspace: String,
    pub q: f64,
    pub points: Vec<SweepPoint>,
    /// Smallest bound margin among sampled points, if any bound applied.
    pub tightest: Option<SweepPoint>,
    /// Result of the golden-section refinement (param, margin), when run.
    pub refined: Option<(f64, f64)>,
}

/// Sweep `family(t)` over the given parameters, recording ratio and bound
/// at each; with `refine`, minimize the margin over the bracket around the
/// tightest sample.
pub fn tightness_sweep(
    family: &dyn Fn(f64) -> Result<Body>,
    family_name: &str,
    l: &Subspace,
    q: f64,
    params: &[f64],
    spec: Option<&QuadratureSpec>,
    refine: bool,
) -> Result<SweepReport> {
    if params.is_empty() {
        return Err(Error::config("a sweep needs at least one parameter value"));
    }
    let mut points = Vec::with_capacity(params.len());
    for &t in params {
        let body = family(t)?;
        let rec = verify_body(&body, l, q, spec)?;
        points.push(SweepPoint {
            param: t,
            q,
            gamma: rec.gamma,
            ratio: rec.ratio,
            bound: rec.bound,
            bound_kind: rec.bound_kind,
            margin: rec.margin,
        });
    }
    let tightest = points
        .iter()
        .filter(|pt| pt.margin.is_some())
        .min_by(|a, b| a.margin.unwrap().partial_cmp(&b.margin.unwrap()).unwrap())
        .cloned();
    let refined = if refine {
        match &tightest {
            Some(best) => {
                let idx = points
                    .iter()
                    .position(|pt| pt.param == best.param)
                    .expect("tightest came from points");
                let lo = if idx > 0 { points[idx - 1].param } else { best.param };
                let hi = if idx + 1 < points.len() {
                    points[idx + 1].param
                } else {
                    best.param
                };
                if hi > lo {
                    let margin_at = |t: f64| -> Result<f64> {
                        let body = family(t)?;
                        let rec = verify_body(&body, l, q, spec)?;
                        rec.margin.ok_or_else(|| {
                            Error::domain("the bound stopped applying inside the bracket")
                        })
                    };
                    Some(golden_section_minimize(margin_at, lo, hi, 1e-4, 60)?)
                } else {
                    None
                }
            }
            None => None,
        }
    } else {
        None
    };
    Ok(SweepReport {
        family: family_name.to_string(),
        subspace: subspace_label(l),
        q,
        points,
        tightest,
        refined,
    })
}

/// Golden-section minimization of a unimodal function on [a, b].
/// Returns (argmin, min).
pub fn golden_section_minimize(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)> {
    if !(b > a) {
        return Err(Error::config("minimization bracket must have b > a"));
    }
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    if f1 <= f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
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

    fn shifted_cube3(t: f64) -> Result<Body> {
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
        Body::hpolytope(format!("shifted_cube3({t})"), normals, offsets, 3)
    }

    fn e1(n: usize) -> Subspace {
        Subspace::from_axes(&[0], n).unwrap()
    }

    #[test]
    fn bound_formulas_evaluate_their_branches() {
        // Symmetric low q: k/q (capped at 1 below q = k).
        assert_relative_eq!(
            reference_bound(3, 1, 2.5, 1.0, BoundKind::EvenLowQ).unwrap(),
            0.4
        );
        assert_relative_eq!(
            reference_bound(3, 2, 1.5, 1.0, BoundKind::EvenLowQ).unwrap(),
            1.0
        );
        // Symmetric high q.
        assert_relative_eq!(
            reference_bound(3, 1, 4.5, 1.0, BoundKind::EvenHighQ).unwrap(),
            2.5 / 4.5
        );
        // General low q with the shifted-cube asymmetry c = t.
        let gamma = 0.7 / 1.3; // t = 0.3
        let b = reference_bound(3, 1, 2.5, gamma, BoundKind::GeneralLowQ).unwrap();
        assert_relative_eq!(b, (1.0 + 0.3 * 1.5) / 2.5, epsilon = 1e-12);
        // General high q.
        let b = reference_bound(3, 1, 4.5, gamma, BoundKind::GeneralHighQ).unwrap();
        assert_relative_eq!(b, (1.0 + 1.5 + 0.3 * 2.0) / 4.5, epsilon = 1e-12);
        // Cone volume at q = n.
        assert_relative_eq!(
            reference_bound(4, 2, 4.0, 0.5, BoundKind::ConeVolume).unwrap(),
            0.5
        );
        // The centered fallback uses c = (n-1)/(n+1).
        let b = reference_bound(3, 1, 2.5, 0.9, BoundKind::Centered).unwrap();
        assert_relative_eq!(b, (1.0 + 0.5 * 1.5) / 2.5, epsilon = 1e-12);
    }

    #[test]
    fn bound_formulas_reject_out_of_range_parameters() {
        // Open band (n, n+1]: nothing applies.
        assert!(reference_bound(3, 1, 3.5, 0.5, BoundKind::GeneralLowQ).is_err());
        assert!(reference_bound(3, 1, 3.5, 0.5, BoundKind::GeneralHighQ).is_err());
        assert!(reference_bound(3, 1, 4.0, 1.0, BoundKind::EvenHighQ).is_err());
        // q <= k+1 in the general low branch.
        assert!(reference_bound(3, 1, 1.8, 0.5, BoundKind::GeneralLowQ).is_err());
        // Cone volume away from q = n.
        assert!(reference_bound(3, 1, 2.5, 0.5, BoundKind::ConeVolume).is_err());
        // Bad subspace dimension.
        assert!(reference_bound(3, 3, 2.5, 0.5, BoundKind::GeneralLowQ).is_err());
        assert!(reference_bound(3, 0, 2.5, 0.5, BoundKind::GeneralLowQ).is_err());
    }

    #[test]
    fn selection_picks_the_expected_kind() {
        // Symmetric body below n.
        let (b, kind) = select_bound(3, 1, 2.5, 1.0, true).unwrap();
        assert_eq!(kind, BoundKind::EvenLowQ);
        assert_relative_eq!(b, 0.4);
        // Symmetric at q = n: cone volume.
        let (b, kind) = select_bound(3, 1, 3.0, 1.0, true).unwrap();
        assert_eq!(kind, BoundKind::ConeVolume);
        assert_relative_eq!(b, 1.0 / 3.0);
        // Open band: none, even symmetric.
        assert!(select_bound(3, 1, 3.5, 1.0, true).is_none());
        assert!(select_bound(3, 1, 4.0, 1.0, true).is_none());
        // Above n+1 symmetric.
        let (_, kind) = select_bound(3, 1, 4.5, 1.0, true).unwrap();
        assert_eq!(kind, BoundKind::EvenHighQ);
        // Asymmetric, not centered.
        let (_, kind) = select_bound(3, 1, 2.5, 0.5, false).unwrap();
        assert_eq!(kind, BoundKind::GeneralLowQ);
        // Asymmetric, small q: nothing.
        assert!(select_bound(3, 1, 1.5, 0.5, false).is_none());
        // Centered with weak measured asymmetry: the fallback is tighter
        // when gamma < 1/n.
        let (b, kind) = select_bound(3, 1, 2.5, 0.2, true).unwrap();
        assert_eq!(kind, BoundKind::Centered);
        assert_relative_eq!(b, (1.0 + 0.5 * 1.5) / 2.5, epsilon = 1e-12);
        // gamma = 1/n ties the fallback: the measured bound is kept.
        let (_, kind) = select_bound(3, 1, 2.5, 1.0 / 3.0, true).unwrap();
        assert_eq!(kind, BoundKind::GeneralLowQ);
    }

    #[test]
    fn verification_passes_on_cubes_and_shifted_cubes() {
        let l = e1(3);
        // Symmetric cube, q < n: ratio 1/3 against bound 0.4.
        let rec = verify_body(&unit_cube(3), &l, 2.5, None).unwrap();
        assert_eq!(rec.bound_kind, Some(BoundKind::EvenLowQ));
        assert!(rec.pass.unwrap());
        assert!(rec.margin.unwrap() > 0.05);
        // q = n: equality within tolerance.
        let rec = verify_body(&unit_cube(3), &l, 3.0, None).unwrap();
        assert_eq!(rec.bound_kind, Some(BoundKind::ConeVolume));
        assert!(rec.pass.unwrap());
        assert!(rec.margin.unwrap().abs() <= 1e-10);
        // Open band: ratio-only row.
        let rec = verify_body(&unit_cube(3), &l, 3.5, None).unwrap();
        assert!(rec.bound.is_none());
        assert!(rec.pass.is_none());
        assert!(rec.note.contains("n < q <= n+1"));
        // Shifted cube: general bound, satisfied.
        let body = shifted_cube3(0.3).unwrap();
        let rec = verify_body(&body, &l, 2.5, None).unwrap();
        assert_eq!(rec.bound_kind, Some(BoundKind::GeneralLowQ));
        assert_relative_eq!(rec.gamma, 0.7 / 1.3, epsilon = 1e-12);
        assert!(!rec.centered);
        assert!(rec.pass.unwrap());
        let rec = verify_body(&body, &l, 4.5, None).unwrap();
        assert_eq!(rec.bound_kind, Some(BoundKind::GeneralHighQ));
        assert!(rec.pass.unwrap());
    }

    #[test]
    fn verification_detects_the_centered_simplex() {
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
        let rec = verify_body(&body, &e1(3), 2.5, None).unwrap();
        assert!(rec.centered);
        // Regular simplex: gamma = 1/n, which ties the direct bound with
        // the centered fallback; the direct one is reported.
        assert_relative_eq!(rec.gamma, 1.0 / 3.0, epsilon = 1e-9);
        assert_eq!(rec.bound_kind, Some(BoundKind::GeneralLowQ));
        assert_eq!(rec.ratio, 0.0);
        assert!(rec.pass.unwrap());
    }

    #[test]
    fn anderson_quasiconcave_matches_frozen_instance() {
        // Fixed triangle and weights; lhs/rhs frozen from an independent
        // adaptive-quadrature computation.
        let c: Vec<DVector<f64>> = [[0.2, 0.1], [1.3, 0.4], [0.5, 1.1]]
            .iter()
            .map(|p| DVector::from_vec(p.to_vec()))
            .collect();
        let rep = anderson_quasiconcave_check(&c, -0.5, 0.7, 0.45, 16).unwrap();
        assert_relative_eq!(rep.lhs, 1.7065279097191837, epsilon = 1e-10);
        assert_relative_eq!(rep.rhs, 0.68920299250403760, epsilon = 1e-10);
        assert!(rep.pass);
        // p at the quasiconcave edge (p = 0) reduces to areas.
        let rep = anderson_quasiconcave_check(&c, 0.0, 1.0, 1.0, 8).unwrap();
        assert!(rep.pass);
        // Out-of-range p values are rejected.
        assert!(anderson_quasiconcave_check(&c, -2.0, 1.0, 1.0, 8).is_err());
        assert!(anderson_quasiconcave_check(&c, 0.5, 1.0, 1.0, 8).is_err());
    }

    #[test]
    fn anderson_convex_matches_frozen_instance() {
        let c: Vec<DVector<f64>> = [[0.2, 0.1], [1.3, 0.4], [0.5, 1.1]]
            .iter()
            .map(|p| DVector::from_vec(p.to_vec()))
            .collect();
        let neg: Vec<DVector<f64>> = c.iter().map(|v| -v).collect();
        let rep = anderson_convex_check(&c, &neg, 1.5, 0.8, 0.3, 16).unwrap();
        assert_relative_eq!(rep.lhs, 0.68937298553217485, epsilon = 1e-10);
        assert_relative_eq!(rep.rhs, 0.36532112801428668, epsilon = 1e-10);
        assert!(rep.pass);
        // Mismatched areas are rejected.
        let big: Vec<DVector<f64>> = c.iter().map(|v| v * 2.0).collect();
        assert!(anderson_convex_check(&c, &big, 1.5, 0.8, 0.3, 8).is_err());
        // p < 1 is out of range.
        assert!(anderson_convex_check(&c, &neg, 0.5, 0.8, 0.3, 8).is_err());
    }

    #[test]
    fn golden_section_finds_a_quadratic_minimum() {
        let (x, v) = golden_section_minimize(|t| Ok((t - 0.3) * (t - 0.3)), 0.0, 1.0, 1e-8, 100)
            .unwrap();
        assert_relative_eq!(x, 0.3, epsilon = 1e-6);
        assert!(v < 1e-12);
    }

    #[test]
    fn sweep_walks_the_shifted_cube_family() {
        let l = e1(3);
        let report = tightness_sweep(
            &|t| shifted_cube3(t),
            "shifted_cube3",
            &l,
            2.5,
            &[0.0, 0.2, 0.4, 0.6],
            None,
            true,
        )
        .unwrap();
        assert_eq!(report.points.len(), 4);
        for pt in &report.points {
            assert!(pt.margin.unwrap() > 0.0, "margin at t = {}", pt.param);
        }
        // gamma tracks (1-t)/(1+t) along the family.
        assert_relative_eq!(report.points[2].gamma, 0.6 / 1.4, epsilon = 1e-12);
        assert!(report.tightest.is_some());
        let (t_ref, m_ref) = report.refined.unwrap();
        assert!(m_ref > 0.0);
        assert!((0.0..=0.6).contains(&t_ref));
    }
}
