//! Error type shared by all toolkit operations.

use thiserror::Error;

/// Errors produced by ambient-space, family, and verification operations.
///
/// Numeric payloads are reported in `f64` regardless of the working scalar
/// so error values stay printable and comparable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// Base point does not lie on the product manifold within tolerance.
    #[error("point is off the manifold: |x1^2+..+x4^2 - 1| = {deviation:e} exceeds {tolerance:e}")]
    OffManifold { deviation: f64, tolerance: f64 },

    /// A parameter violated its documented domain.
    #[error("parameter `{name}` = {value} outside [{min}, {max}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Stereographic projection was requested at (or too near) the pole.
    #[error("stereographic pole {pole} hit at sample ({x}, {y}): distance {distance:e} <= {tolerance:e}")]
    PoleCollision {
        pole: usize,
        x: f64,
        y: f64,
        distance: f64,
        tolerance: f64,
    },

    /// First partials are linearly dependent at the queried point.
    #[error("degenerate immersion at ({x}, {y}): Gram determinant {gram_det:e} <= {tolerance:e}")]
    DegenerateImmersion { x: f64, y: f64, gram_det: f64, tolerance: f64 },

    /// The tangential part of the parallel field vanishes (angle zero).
    #[error("normal-angle degenerate frame at ({x}, {y}): |dt_tangent| = {norm:e}; use the theta-zero pathway")]
    NormalAngleDegenerate { x: f64, y: f64, norm: f64 },

    /// Metric on a stencil or grid is not positive definite.
    #[error("degenerate metric at ({x}, {y}): det g = {det:e}")]
    DegenerateMetric { x: f64, y: f64, det: f64 },

    /// Frame field changed sign between neighbouring grid samples.
    #[error("frame sign flip between grid samples ({i0}, {j0}) and ({i1}, {j1})")]
    FrameAlignment { i0: usize, j0: usize, i1: usize, j1: usize },

    /// Jet and frame were taken at different parameter points.
    #[error("frame/jet point mismatch: jet at ({jx}, {jy}), frame at ({fx}, {fy})")]
    PointMismatch { jx: f64, jy: f64, fx: f64, fy: f64 },

    /// Shape data violates the constraint required by the inversion.
    #[error("inconsistent input: beta1^2 + beta2^2 - cos^2(theta) = {deviation:e} exceeds {tolerance:e}")]
    InconsistentInput { deviation: f64, tolerance: f64 },

    /// The two characteristic quartics disagree on their discriminant.
    #[error("discriminant mismatch: Delta1 = {delta1:e}, Delta2 = {delta2:e}, tolerance {tolerance:e}")]
    DiscriminantMismatch { delta1: f64, delta2: f64, tolerance: f64 },

    /// A grid specification that cannot support the requested stencils.
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, GeomError>;
