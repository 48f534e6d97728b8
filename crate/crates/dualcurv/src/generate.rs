//! Deterministic generators for the standard body families.
//!
//! The families are chosen so that the asymmetry constant covers its whole
//! interesting range: symmetric bodies (gamma = 1), centered regular
//! simplices (gamma = 1/n, the extreme centered case), and shifted cubes
//! (gamma = (1-t)/(1+t), a dial). Random circumscribing polytopes add
//! generic facet geometry with no special alignments, and product balls
//! contribute flat boundary pieces whose normals are atoms.
//!
//! Every generator is a pure function of its arguments — the random family
//! takes an explicit seed — so suites are reproducible across runs and
//! machines.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::body::Body;
use crate::error::{Error, Result};

/// Resample attempts before giving up on a bounded random polytope.
const MAX_RESAMPLES: u64 = 100;

fn axis_vector(i: usize, dim: usize, sign: f64) -> DVector<f64> {
    DVector::from_fn(dim, |r, _| if r == i { sign } else { 0.0 })
}

/// The cube [-1, 1]^dim as a halfspace intersection with rows +-e_i.
pub fn cube(dim: usize) -> Result<Body> {
    shifted_cube_named(format!("cube{dim}"), dim, 0.0)
}

/// The cube with its two x_1 facets moved to offsets 1 + t and 1 - t.
///
/// Its asymmetry constant is exactly (1 - t)/(1 + t): the reflection
/// -K fits inside K after shrinking by precisely that factor, certified
/// by the near facet. Requires 0 <= t < 1 so the origin stays interior.
pub fn shifted_cube(dim: usize, t: f64) -> Result<Body> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::config(format!(
            "shifted cube needs 0 <= t < 1 (origin interior), got t = {t}"
        )));
    }
    shifted_cube_named(format!("shifted_cube{dim}_t{t}"), dim, t)
}

fn shifted_cube_named(name: String, dim: usize, t: f64) -> Result<Body> {
    let mut normals = Vec::with_capacity(2 * dim);
    let mut offsets = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            normals.push(axis_vector(i, dim, sign));
            offsets.push(if i == 0 { 1.0 + sign * t } else { 1.0 });
        }
    }
    Body::hpolytope(name, normals, offsets, dim)
}

/// The cross-polytope conv{+-e_i} (the octahedron in dimension 3).
pub fn cross_polytope(dim: usize) -> Result<Body> {
    let mut vertices = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        vertices.push(axis_vector(i, dim, 1.0));
        vertices.push(axis_vector(i, dim, -1.0));
    }
    Body::vpolytope(format!("crosspoly{dim}"), vertices, dim)
}

/// The regular simplex with centroid at the origin and circumradius 1.
///
/// Dimensions 2 and 3 use explicit coordinates (an equilateral triangle
/// with apex e_2; alternate cube corners scaled to the unit sphere); the
/// general construction takes the dim+1 standard-basis points of
/// R^(dim+1), centers them on their common hyperplane, and expresses them
/// in an orthonormal basis of that hyperplane. A final recentering and
/// radius normalization pins the centroid to 0 at machine precision.
pub fn simplex_centered(dim: usize) -> Result<Body> {
    let raw = match dim {
        2 => {
            let s = 3f64.sqrt() / 2.0;
            vec![
                DVector::from_column_slice(&[0.0, 1.0]),
                DVector::from_column_slice(&[-s, -0.5]),
                DVector::from_column_slice(&[s, -0.5]),
            ]
        }
        3 => {
            let r = 1.0 / 3f64.sqrt();
            [
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ]
            .iter()
            .map(|c| DVector::from_iterator(3, c.iter().map(|&x| x * r)))
            .collect()
        }
        _ => lifted_simplex_vertices(dim),
    };
    Body::vpolytope(format!("simplex{dim}"), recenter_unit(raw), dim)
}

/// Vertices of a regular dim-simplex via the R^(dim+1) lift.
fn lifted_simplex_vertices(dim: usize) -> Vec<DVector<f64>> {
    let m = dim + 1;
    let shift = 1.0 / m as f64;
    let lifted: Vec<DVector<f64>> = (0..m)
        .map(|i| DVector::from_fn(m, |r, _| (if r == i { 1.0 } else { 0.0 }) - shift))
        .collect();
    // Orthonormal basis of the common hyperplane (sum of coordinates 0) by
    // Gram-Schmidt over the lifted points themselves.
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for p in &lifted {
        let mut w = p.clone();
        for b in &basis {
            w -= b * b.dot(p);
        }
        let len = w.norm();
        if len > 1e-9 {
            basis.push(w / len);
        }
        if basis.len() == dim {
            break;
        }
    }
    lifted
        .iter()
        .map(|p| DVector::from_iterator(dim, basis.iter().map(|b| b.dot(p))))
        .collect()
}

/// Subtract the vertex mean and scale the common vertex radius to 1.
fn recenter_unit(mut vertices: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let dim = vertices[0].len();
    let count = vertices.len() as f64;
    let mean = vertices.iter().fold(DVector::zeros(dim), |a, v| a + v) / count;
    for v in &mut vertices {
        *v -= &mean;
    }
    let radius = vertices[0].norm();
    for v in &mut vertices {
        *v /= radius;
    }
    vertices
}

/// Intersection of `m` halfspaces tangent to the unit sphere at uniformly
/// random normals (so the body always circumscribes the unit ball).
///
/// A draw whose normals fail to positively span — or is otherwise
/// degenerate — is thrown away and replaced by a fresh, deterministic
/// resample (attempt-indexed RNG streams); after 100 failed attempts the
/// generator reports the body as unbuildable.
pub fn random_tangent(dim: usize, m: usize, seed: u64) -> Result<Body> {
    if m < dim + 1 {
        return Err(Error::config(format!(
            "a bounded body in dimension {dim} needs at least {} tangent planes, got {m}",
            dim + 1
        )));
    }
    let name = format!("tangent{dim}_m{m}_s{seed}");
    let mut last = String::new();
    for attempt in 0..MAX_RESAMPLES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let normals: Vec<DVector<f64>> =
            (0..m).map(|_| random_direction(&mut rng, dim)).collect();
        match Body::hpolytope(&name, normals, vec![1.0; m], dim) {
            Ok(body) => return Ok(body),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::invalid_body(format!(
        "no bounded tangent polytope after {MAX_RESAMPLES} attempts \
         (dim = {dim}, m = {m}, seed = {seed}); last failure: {last}"
    )))
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_iterator(dim, (0..dim).map(|_| -> f64 { StandardNormal.sample(rng) }));
        let len = v.norm();
        if len > 1e-6 {
            return v / len;
        }
    }
}

/// Product of unit balls B^split x B^(dim - split), canonically named.
pub fn product_ball(dim: usize, split: usize) -> Result<Body> {
    Body::product_ball(format!("product_ball{dim}_{split}"), dim, split)
}

/// The standard verification suite: 21 bodies spanning dimensions 2..4,
/// every body kind, and asymmetry constants 1, 1/n, and a ladder of
/// (1-t)/(1+t) values.
pub fn standard_suite() -> Result<Vec<Body>> {
    let mut suite = Vec::new();
    for dim in 2..=4 {
        suite.push(cube(dim)?);
        suite.push(cross_polytope(dim)?);
        suite.push(simplex_centered(dim)?);
    }
    for t in [0.1, 0.2, 0.3, 0.4, 0.5] {
        suite.push(shifted_cube(3, t)?);
    }
    for seed in 1..=4 {
        suite.push(random_tangent(3, 8, seed)?);
    }
    suite.push(product_ball(3, 1)?);
    suite.push(product_ball(3, 2)?);
    suite.push(product_ball(4, 2)?);
    Ok(suite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull;

    fn unit(dim: usize, i: usize, sign: f64) -> DVector<f64> {
        axis_vector(i, dim, sign)
    }

    #[test]
    fn cube_has_axis_facets_and_volume() {
        let c = cube(3).unwrap();
        assert_eq!(c.name(), "cube3");
        let facets = c.facets().unwrap();
        assert_eq!(facets.len(), 6);
        for f in &facets {
            assert!((f.offset - 1.0).abs() <= 1e-15);
            let along_axis = (0..3).any(|i| {
                (&f.normal - unit(3, i, 1.0)).norm() <= 1e-12
                    || (&f.normal - unit(3, i, -1.0)).norm() <= 1e-12
            });
            assert!(along_axis, "facet normal {:?} is not an axis", f.normal);
        }
        let vol = hull::hull_volume(c.vertices().unwrap(), 3).unwrap();
        assert!((vol - 8.0).abs() <= 1e-10);
    }

    #[test]
    fn cross_polytope_shape() {
        let c = cross_polytope(3).unwrap();
        assert_eq!(c.vertices().unwrap().len(), 6);
        assert_eq!(c.facets().unwrap().len(), 8);
        assert!((c.asymmetry().gamma - 1.0).abs() <= 1e-12);
        // vol = 2^n / n!
        let vol = hull::hull_volume(c.vertices().unwrap(), 3).unwrap();
        assert!((vol - 8.0 / 6.0).abs() <= 1e-10);
    }

    #[test]
    fn simplices_are_regular_centered_unit() {
        for dim in 2..=4 {
            let s = simplex_centered(dim).unwrap();
            let verts = s.vertices().unwrap();
            assert_eq!(verts.len(), dim + 1, "dim {dim}");
            assert_eq!(s.facets().unwrap().len(), dim + 1, "dim {dim}");
            // Volume centroid (not just the vertex mean) sits at the origin.
            assert!(
                s.centroid().unwrap().norm() <= 1e-12,
                "dim {dim} centroid {:?}",
                s.centroid().unwrap()
            );
            for v in verts {
                assert!((v.norm() - 1.0).abs() <= 1e-12, "dim {dim} radius");
            }
            // All edges share the regular length sqrt(2 (n+1) / n).
            let edge = (2.0 * (dim as f64 + 1.0) / dim as f64).sqrt();
            for i in 0..verts.len() {
                for j in (i + 1)..verts.len() {
                    let d = (&verts[i] - &verts[j]).norm();
                    assert!((d - edge).abs() <= 1e-10, "dim {dim} edge {i}-{j}: {d}");
                }
            }
        }
    }

    #[test]
    fn simplex_asymmetry_is_one_over_n() {
        for dim in 2..=4 {
            let s = simplex_centered(dim).unwrap();
            let gamma = s.asymmetry().gamma;
            assert!(
                (gamma - 1.0 / dim as f64).abs() <= 1e-12,
                "dim {dim}: gamma = {gamma}"
            );
        }
    }

    #[test]
    fn shifted_cube_asymmetry_closed_form() {
        for t in [0.0, 0.1, 0.3, 0.7] {
            let b = shifted_cube(3, t).unwrap();
            let expect = (1.0 - t) / (1.0 + t);
            assert!(
                (b.asymmetry().gamma - expect).abs() <= 1e-15,
                "t = {t}: gamma = {}",
                b.asymmetry().gamma
            );
        }
        assert!(shifted_cube(3, 1.0).is_err());
        assert!(shifted_cube(3, -0.2).is_err());
    }

    #[test]
    fn random_tangent_is_deterministic_and_circumscribes() {
        let a = random_tangent(3, 8, 7).unwrap();
        let b = random_tangent(3, 8, 7).unwrap();
        let va = a.vertices().unwrap();
        let vb = b.vertices().unwrap();
        assert_eq!(va.len(), vb.len());
        for (x, y) in va.iter().zip(vb) {
            assert_eq!(x, y, "same seed must reproduce the same body");
        }
        assert_eq!(a.facets().unwrap().len(), 8, "every tangent plane is a facet");
        // Contains the unit ball: support >= 1 in a spread of directions.
        for dir in [
            unit(3, 0, 1.0),
            unit(3, 1, -1.0),
            DVector::from_column_slice(&[0.6, -0.48, 0.64]),
        ] {
            assert!(a.support(&dir) >= 1.0 - 1e-12);
        }
        let c = random_tangent(3, 8, 8).unwrap();
        assert!(
            a.vertices().unwrap().len() != c.vertices().unwrap().len()
                || a.vertices()
                    .unwrap()
                    .iter()
                    .zip(c.vertices().unwrap())
                    .any(|(x, y)| (x - y).amax() > 1e-9),
            "different seeds should give different bodies"
        );
    }

    #[test]
    fn random_tangent_rejects_too_few_planes() {
        assert!(random_tangent(3, 3, 0).is_err());
    }

    #[test]
    fn standard_suite_is_large_and_valid() {
        let suite = standard_suite().unwrap();
        assert!(suite.len() >= 20, "suite has {} bodies", suite.len());
        let mut names: Vec<&str> = suite.iter().map(|b| b.name()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), suite.len(), "names must be unique");
        for body in &suite {
            let origin = DVector::zeros(body.dim());
            assert!(body.contains(&origin, 1e-12), "{} loses the origin", body.name());
            let gamma = body.asymmetry().gamma;
            assert!(gamma > 0.0 && gamma <= 1.0 + 1e-12, "{}: gamma = {gamma}", body.name());
        }
    }
}
