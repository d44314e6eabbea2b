//! Numerical differential geometry of minimal constant-angle surfaces in
//! the Riemannian product of the unit 3-sphere and the real line, viewed
//! inside Euclidean 5-space.
//!
//! The crate constructs the classified two-parameter family of such
//! surfaces together with its trivial-angle companions, and verifies the
//! frame identities, shape-operator structure, curvature properties, and
//! structure-equation residuals they satisfy, at machine precision or tight
//! numerical tolerance.
//!
//! All core math is generic over the floating-point scalar through
//! [`scalar::Real`]; the `*64` aliases below fix `f64`, which every default
//! tolerance is calibrated for.

pub mod ambient;
pub mod diffgeo;
pub mod error;
pub mod family;
pub mod residuals;
pub mod scalar;

pub use ambient::{ambient_curvature, sphere_projection, stereographic, Point5, Vec5};
pub use diffgeo::{
    adapted_frame, angle_function, best_scheme, frame_for, gaussian_curvature, jet,
    mean_curvature_vector, normal_connection_coeffs, shape_operators, tangent_connection_coeffs,
    theta_zero_frame, weingarten_shape_operator, FdConfig, FrameData, GridSpec, Immersion, Jet2,
    JetScheme, Mat2, SecondFundamentalData,
};
pub use error::{GeomError, Result};
pub use family::{
    analytic_shape_operators, derive_constants, invert_frequencies, trivial_surface,
    AnalyticFrame, DerivedConstants, FamilySurface, Frequencies, SurfaceParams, TrivialKind,
    TrivialSurface,
};
pub use residuals::{
    extract_field_grid, gauss_codazzi_ricci, pde_system, pmc_conditions, synthetic_field_grid,
    verify_surface, CheckResult, CheckStatus, FieldGrid, PdeResiduals, ResidualField,
    SurfaceInfo, SyntheticFields, Tolerances, VerificationReport, VerifyOptions,
};
pub use scalar::{Analytic, Dual2, Real};

/// Toolkit version, embedded in reports for reproducibility.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// Concrete `f64` aliases; the default verification tolerances assume these.
pub type Point5f64 = Point5<f64>;
pub type Vec5f64 = Vec5<f64>;
pub type SurfaceParamsf64 = SurfaceParams<f64>;
pub type DerivedConstantsf64 = DerivedConstants<f64>;
pub type FamilySurfacef64 = FamilySurface<f64>;
pub type Jet2f64 = Jet2<f64>;
pub type VerificationReportf64 = VerificationReport<f64>;

// Reduced-precision aliases for callers that only need mesh generation.
pub type Point5f32 = Point5<f32>;
pub type Vec5f32 = Vec5<f32>;
pub type SurfaceParamsf32 = SurfaceParams<f32>;
pub type FamilySurfacef32 = FamilySurface<f32>;
