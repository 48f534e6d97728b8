//! Dual curvature measures, subspace concentration, and slicing integrals
//! of convex bodies in R^n, n = 2..4.
//!
//! The crate computes, at desk scale and deterministically:
//!
//! * q-th dual curvature measures of polytopes, product balls, and balls,
//!   by spherical Monte Carlo / product rules or exact-leaning facet
//!   decompositions ([`measures`]);
//! * subspace concentration ratios and the sharp upper bounds they satisfy,
//!   including the asymmetry-corrected bounds for non-symmetric bodies
//!   ([`bounds`]);
//! * slicing functions g(x) = integral of the weight over the fiber
//!   through x, their radial derivatives, and the shrink-limit identity
//!   connecting them to concentration ratios ([`slicing`]).
//!
//! Geometry lives in [`body`], [`subspace`], [`project`], and [`hull`];
//! quadrature in [`quad`]; weights in [`phi`]; generators for the standard
//! test families in [`generate`]; file formats and report emission in
//! [`io`].

pub mod body;
pub mod bounds;
pub mod error;
pub mod generate;
pub mod hull;
pub mod io;
pub mod measures;
pub mod phi;
pub mod project;
pub mod quad;
pub mod slicing;
pub mod subspace;

pub use body::{Asymmetry, Body, BodyKind, BoundaryNormal, Facet};
pub use bounds::{
    anderson_convex_check, anderson_quasiconcave_check, golden_section_minimize, select_bound,
    reference_bound, tightness_sweep, verify_body, AndersonReport, BoundKind, SweepReport,
    VerificationRecord,
};
pub use error::{Error, Result};
pub use measures::{
    concentration_ratio, default_method, subspace_measure, total_measure, Measured, QuadMethod,
    QuadratureSpec, RatioReport,
};
pub use phi::PhiSpec;
pub use project::{project_body, slice_body, SectionShape, Shadow, Slice};
pub use slicing::{
    divergence_identity_check, g_gradient_dot, g_value, gradient_bound_check,
    gradient_bound_constant, gradient_integral, slice_profile, DivergenceOptions,
    DivergenceReport, FdSpec, GradientBoundReport, GradientIntegral,
};
pub use subspace::Subspace;
