//! Weight functions for the generalized measures.
//!
//! A [`PhiSpec`] is a weight of the form
//! `phi(z) = |z|^(q - n) * s(z / |z|)`: a homogeneity degree `q - n` glued
//! to a strictly positive profile `s` on the unit sphere. The plain power
//! weight has `s = 1` everywhere. Custom profiles carry an identifier so
//! reports stay self-describing; they are assumed continuous (Lipschitz if
//! you care about quadrature rates) and bounded between positive constants.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};

#[derive(Clone)]
pub enum SphereProfile {
    /// s = 1: the pure power weight |z|^(q-n).
    Constant,
    /// A custom positive profile on the unit sphere.
    Custom {
        id: String,
        f: Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for SphereProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphereProfile::Constant => write!(f, "Constant"),
            SphereProfile::Custom { id, .. } => write!(f, "Custom({id})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhiSpec {
    /// Total homogeneity degree of the associated measure.
    pub q: f64,
    /// Ambient dimension the weight lives in.
    pub n: usize,
    profile: SphereProfile,
}

impl PhiSpec {
    /// The pure power weight |z|^(q-n) in R^n.
    pub fn power(q: f64, n: usize) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::config(format!("q must be finite, got {q}")));
        }
        Ok(PhiSpec {
            q,
            n,
            profile: SphereProfile::Constant,
        })
    }

    /// A weight with a custom positive sphere profile.
    pub fn with_profile(
        q: f64,
        n: usize,
        id: impl Into<String>,
        f: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::config(format!("q must be finite, got {q}")));
        }
        Ok(PhiSpec {
            q,
            n,
            profile: SphereProfile::Custom {
                id: id.into(),
                f: Arc::new(f),
            },
        })
    }

    /// Identifier for reports: "euclidean" for the pure power weight.
    pub fn profile_id(&self) -> &str {
        match &self.profile {
            SphereProfile::Constant => "euclidean",
            SphereProfile::Custom { id, .. } => id,
        }
    }

    pub fn is_pure_power(&self) -> bool {
        matches!(self.profile, SphereProfile::Constant)
    }

    /// Profile value at a unit vector.
    pub fn profile_at(&self, u: &DVector<f64>) -> f64 {
        match &self.profile {
            SphereProfile::Constant => 1.0,
            SphereProfile::Custom { f, .. } => {
                let v = f(u);
                debug_assert!(v.is_finite() && v > 0.0, "sphere profile must be positive");
                v
            }
        }
    }

    /// Full weight at a nonzero point: |z|^(q-n) s(z/|z|).
    pub fn eval(&self, z: &DVector<f64>) -> f64 {
        let r = z.norm();
        debug_assert!(r > 0.0, "weight evaluated at the origin");
        let radial = r.powf(self.q - self.n as f64);
        match &self.profile {
            SphereProfile::Constant => radial,
            SphereProfile::Custom { f, .. } => radial * f(&(z / r)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_weight_is_homogeneous() {
        let phi = PhiSpec::power(2.5, 3).unwrap();
        let z = DVector::from_vec(vec![0.3, -0.4, 0.5]);
        let a = phi.eval(&(&z * 2.0));
        let b = phi.eval(&z) * 2.0f64.powf(2.5 - 3.0);
        assert_relative_eq!(a, b, epsilon = 1e-14);
        assert_eq!(phi.profile_id(), "euclidean");
    }

    #[test]
    fn custom_profile_multiplies_the_power() {
        let phi = PhiSpec::with_profile(3.0, 3, "tilted", |u: &DVector<f64>| {
            1.0 + 0.5 * u[0] * u[0]
        })
        .unwrap();
        let u = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert_relative_eq!(phi.profile_at(&u), 1.5, epsilon = 1e-14);
        // q = n: the weight equals the profile alone at any radius.
        assert_relative_eq!(phi.eval(&(&u * 7.0)), 1.5, epsilon = 1e-14);
        assert_eq!(phi.profile_id(), "tilted");
    }
}
