//! Residual evaluation for every structure-equation system satisfied by
//! constant-angle surfaces, plus the aggregated verification report.
//!
//! Three groups of residuals are implemented: the Gauss/Ricci/Codazzi
//! relations of the shape fields, the parallel-mean-curvature conditions,
//! and the second-order linear system satisfied by the classified
//! immersions together with its fourth-order reductions. [`verify_surface`]
//! runs every applicable check over a grid and reduces each to a maximum
//! residual with the sample where it occurs.

use crate::ambient::Vec5;
use crate::diffgeo::{
    self, best_scheme, frame_for, gaussian_curvature, jet, FdConfig, GridSpec, Immersion,
    JetScheme, Mat2, SecondFundamentalData,
};
use crate::error::{GeomError, Result};
use crate::family::{
    derive_constants, invert_frequencies, FamilySurface, SurfaceParams, TrivialKind,
};
use crate::scalar::{lit, Real};
use serde::Serialize;

/// Verification tolerances. Defaults: 1e-9 for analytic-derivative checks,
/// 1e-6 for finite-difference checks; field-derivative residual tolerances
/// grow with the square of the grid spacing past the reference spacing.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances<S> {
    /// Checks fed by analytic or dual-forward derivatives.
    pub analytic: S,
    /// Checks fed by finite differences.
    pub fd: S,
    /// On-manifold membership residual.
    pub membership: S,
    /// Frame Gram-matrix deviation from the identity.
    pub frame: S,
    /// Angle constancy (standard deviation and mean offset).
    pub angle: S,
    /// Spread of the extracted shape constants over the grid.
    pub beta_spread: S,
    /// The shape-constant identity `beta1^2 + beta2^2 = cos^2 theta`.
    pub beta_identity: S,
    /// Intrinsic-curvature residual.
    pub curvature: S,
    /// Induced-metric deviation from the identity.
    pub metric: S,
    /// Second-order system and fourth-order reduction residuals.
    pub pde: S,
    /// Frequency round-trip relative error.
    pub roundtrip: S,
}

impl<S: Real> Default for Tolerances<S> {
    fn default() -> Self {
        Tolerances {
            analytic: lit(1e-9),
            fd: lit(1e-6),
            membership: lit(1e-10),
            frame: lit(1e-10),
            angle: lit(1e-10),
            beta_spread: lit(1e-8),
            beta_identity: lit(1e-9),
            curvature: lit(1e-6),
            metric: lit(1e-10),
            pde: lit(1e-10),
            roundtrip: lit(1e-9),
        }
    }
}

impl<S: Real> Tolerances<S> {
    /// Tolerance for residuals that differentiate gridded fields: scales with
    /// spacing squared above the reference spacing `2 pi / 32`.
    pub fn field(&self, spacing: S) -> S {
        let href = S::TAU() / lit::<S>(32.0);
        let ratio = spacing / href;
        self.fd * (ratio * ratio).max(S::one())
    }

    /// Widens an analytic-grade tolerance when derivatives come from finite
    /// differences.
    pub fn scheme_scaled(&self, base: S, scheme: JetScheme) -> S {
        match scheme {
            JetScheme::FiniteDifference => base.max(self.fd),
            _ => base,
        }
    }
}

/// Gridded shape fields extracted from (or synthesized for) a surface.
#[derive(Clone, Debug)]
pub struct FieldGrid<S> {
    pub spec: GridSpec<S>,
    pub data: Vec<SecondFundamentalData<S>>,
    pub eta: Vec<Vec5<S>>,
}

/// Synthetic per-sample field values for detector tests.
#[derive(Clone, Copy, Debug)]
pub struct SyntheticFields<S> {
    pub lambda: S,
    pub beta1: S,
    pub beta2: S,
    pub beta3: S,
    pub alpha: S,
}

/// Extracts the shape fields of an immersion over a grid.
///
/// The sign of `eta` (and with it `beta1, beta2, beta3`) is propagated
/// serially in row-major order so the field is smooth across the grid.
pub fn extract_field_grid<S: Real, F: Immersion<S> + ?Sized>(
    f: &F,
    spec: &GridSpec<S>,
    scheme: JetScheme,
    cfg: &FdConfig<S>,
) -> Result<FieldGrid<S>> {
    let mut data = Vec::with_capacity(spec.len());
    let mut eta = Vec::with_capacity(spec.len());
    for (i, j, x, y) in spec.samples() {
        let jt = jet(f, x, y, scheme, cfg)?;
        let fr = frame_for(&jt)?;
        let (_, _, mut d) = diffgeo::shape_operators(&jt, &fr)?;
        let mut e = fr.eta;
        let reference = if i > 0 {
            Some(spec.idx(i - 1, j))
        } else if j > 0 {
            Some(spec.idx(0, j - 1))
        } else {
            None
        };
        if let Some(r) = reference {
            if e.dot(&eta[r]) < S::zero() {
                e = e.scale(-S::one());
                d.beta1 = -d.beta1;
                d.beta2 = -d.beta2;
                d.beta3 = -d.beta3;
            }
        }
        data.push(d);
        eta.push(e);
    }
    Ok(FieldGrid { spec: *spec, data, eta })
}

/// Builds a field grid from closed-form field values (identity metric).
pub fn synthetic_field_grid<S: Real>(
    spec: &GridSpec<S>,
    gen: impl Fn(S, S) -> SyntheticFields<S>,
) -> FieldGrid<S> {
    let mut data = Vec::with_capacity(spec.len());
    let eta = vec![Vec5::zero(); spec.len()];
    for (_, _, x, y) in spec.samples() {
        let s = gen(x, y);
        data.push(SecondFundamentalData {
            lambda: s.lambda,
            beta1: s.beta1,
            beta2: s.beta2,
            beta3: s.beta3,
            theta_pt: S::zero(),
            metric: Mat2::new(S::one(), S::zero(), S::zero(), s.alpha * s.alpha),
            alpha: s.alpha,
        });
    }
    FieldGrid { spec: *spec, data, eta }
}

/// A named residual field over a grid.
#[derive(Clone, Debug)]
pub struct ResidualField<S> {
    pub name: &'static str,
    pub spec: GridSpec<S>,
    pub values: Vec<S>,
}

impl<S: Real> ResidualField<S> {
    fn max_over(&self, keep: impl Fn(usize, usize) -> bool) -> Option<(S, S, S)> {
        let mut best: Option<(S, S, S)> = None;
        for (i, j, x, y) in self.spec.samples() {
            if !keep(i, j) {
                continue;
            }
            let v = self.values[self.spec.idx(i, j)].abs();
            // strict comparison keeps the lowest sample index on ties
            if best.map_or(true, |(b, _, _)| v > b) {
                best = Some((v, x, y));
            }
        }
        best
    }

    /// Maximum absolute residual over interior samples.
    pub fn max_abs_interior(&self) -> Option<(S, S, S)> {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        self.max_over(|i, j| i > 0 && i < nx - 1 && j > 0 && j < ny - 1)
    }

    /// Maximum absolute residual over edge samples (one-sided stencils).
    pub fn max_abs_edge(&self) -> Option<(S, S, S)> {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        self.max_over(|i, j| i == 0 || i == nx - 1 || j == 0 || j == ny - 1)
    }

    /// Maximum absolute residual over the whole grid.
    pub fn max_abs(&self) -> Option<(S, S, S)> {
        self.max_over(|_, _| true)
    }
}

/// Second-order x-derivative of a gridded field: central in the interior,
/// one-sided at the edges.
fn field_dx<S: Real>(v: &[S], spec: &GridSpec<S>) -> Vec<S> {
    let h = spec.hx();
    let two = lit::<S>(2.0);
    let three = lit::<S>(3.0);
    let four = lit::<S>(4.0);
    let mut out = vec![S::zero(); v.len()];
    for j in 0..spec.ny {
        let at = |i: usize| v[spec.idx(i, j)];
        for i in 0..spec.nx {
            out[spec.idx(i, j)] = if i == 0 {
                (-three * at(0) + four * at(1) - at(2)) / (two * h)
            } else if i == spec.nx - 1 {
                (three * at(i) - four * at(i - 1) + at(i - 2)) / (two * h)
            } else {
                (at(i + 1) - at(i - 1)) / (two * h)
            };
        }
    }
    out
}

fn field_dy<S: Real>(v: &[S], spec: &GridSpec<S>) -> Vec<S> {
    let h = spec.hy();
    let two = lit::<S>(2.0);
    let three = lit::<S>(3.0);
    let four = lit::<S>(4.0);
    let mut out = vec![S::zero(); v.len()];
    for i in 0..spec.nx {
        let at = |j: usize| v[spec.idx(i, j)];
        for j in 0..spec.ny {
            out[spec.idx(i, j)] = if j == 0 {
                (-three * at(0) + four * at(1) - at(2)) / (two * h)
            } else if j == spec.ny - 1 {
                (three * at(j) - four * at(j - 1) + at(j - 2)) / (two * h)
            } else {
                (at(j + 1) - at(j - 1)) / (two * h)
            };
        }
    }
    out
}

fn check_alpha_positive<S: Real>(fg: &FieldGrid<S>) -> Result<()> {
    for (i, j, x, y) in fg.spec.samples() {
        if fg.data[fg.spec.idx(i, j)].alpha <= S::zero() {
            return Err(GeomError::DegenerateMetric {
                x: x.to_f64().unwrap_or(f64::NAN),
                y: y.to_f64().unwrap_or(f64::NAN),
                det: fg.data[fg.spec.idx(i, j)].alpha.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(())
}

/// Residuals of the Gauss, Ricci and Codazzi relations of the shape fields.
///
/// With `L = cot(theta)` the three relations are
/// `lambda^2 L^2 + lambda_x L + cos^2 theta + beta1 beta3 - beta2^2 = 0`,
/// `(beta2)_y / alpha + lambda L sec^2 theta beta1 - lambda L beta3 - (beta3)_x = 0`,
/// `(beta1)_y / alpha - 2 lambda L beta2 - (beta2)_x = 0`.
pub fn gauss_codazzi_ricci<S: Real>(
    fg: &FieldGrid<S>,
    theta: S,
) -> Result<[ResidualField<S>; 3]> {
    check_alpha_positive(fg)?;
    let spec = fg.spec;
    let cot = theta.cos() / theta.sin();
    let sec2 = S::one() / (theta.cos() * theta.cos());
    let c2t = theta.cos() * theta.cos();
    let two = lit::<S>(2.0);

    let lam: Vec<S> = fg.data.iter().map(|d| d.lambda).collect();
    let b1: Vec<S> = fg.data.iter().map(|d| d.beta1).collect();
    let b2: Vec<S> = fg.data.iter().map(|d| d.beta2).collect();
    let b3: Vec<S> = fg.data.iter().map(|d| d.beta3).collect();
    let lam_x = field_dx(&lam, &spec);
    let b2_y = field_dy(&b2, &spec);
    let b2_x = field_dx(&b2, &spec);
    let b3_x = field_dx(&b3, &spec);
    let b1_y = field_dy(&b1, &spec);

    let n = spec.len();
    let mut gauss = vec![S::zero(); n];
    let mut cod_a = vec![S::zero(); n];
    let mut cod_b = vec![S::zero(); n];
    for k in 0..n {
        let a = fg.data[k].alpha;
        gauss[k] =
            lam[k] * lam[k] * cot * cot + lam_x[k] * cot + c2t + b1[k] * b3[k] - b2[k] * b2[k];
        cod_a[k] = b2_y[k] / a + lam[k] * cot * sec2 * b1[k] - lam[k] * cot * b3[k] - b3_x[k];
        cod_b[k] = b1_y[k] / a - two * lam[k] * cot * b2[k] - b2_x[k];
    }
    Ok([
        ResidualField { name: "gauss_relation", spec, values: gauss },
        ResidualField { name: "codazzi_ricci_a", spec, values: cod_a },
        ResidualField { name: "codazzi_ricci_b", spec, values: cod_b },
    ])
}

/// Residuals of the parallel-mean-curvature conditions.
pub fn pmc_conditions<S: Real>(fg: &FieldGrid<S>, theta: S) -> Result<[ResidualField<S>; 4]> {
    check_alpha_positive(fg)?;
    let spec = fg.spec;
    let tan = theta.sin() / theta.cos();

    let lam: Vec<S> = fg.data.iter().map(|d| d.lambda).collect();
    let b1: Vec<S> = fg.data.iter().map(|d| d.beta1).collect();
    let b2: Vec<S> = fg.data.iter().map(|d| d.beta2).collect();
    let b3: Vec<S> = fg.data.iter().map(|d| d.beta3).collect();
    let lam_x = field_dx(&lam, &spec);
    let lam_y = field_dy(&lam, &spec);
    let b1_x = field_dx(&b1, &spec);
    let b3_x = field_dx(&b3, &spec);
    let b1_y = field_dy(&b1, &spec);
    let b3_y = field_dy(&b3, &spec);

    let n = spec.len();
    let mut lam_dx = vec![S::zero(); n];
    let mut trace_dx = vec![S::zero(); n];
    let mut lam_dy = vec![S::zero(); n];
    let mut trace_dy = vec![S::zero(); n];
    for k in 0..n {
        let a = fg.data[k].alpha;
        lam_dx[k] = lam_x[k] + (b1[k] + b3[k]) * b1[k] * tan;
        trace_dx[k] = b1_x[k] + b3_x[k] - lam[k] * b1[k] * tan;
        lam_dy[k] = lam_y[k] + a * (b1[k] + b3[k]) * b2[k] * tan;
        trace_dy[k] = b1_y[k] + b3_y[k] - a * lam[k] * b2[k] * tan;
    }
    Ok([
        ResidualField { name: "pmc_lambda_x", spec, values: lam_dx },
        ResidualField { name: "pmc_trace_x", spec, values: trace_dx },
        ResidualField { name: "pmc_lambda_y", spec, values: lam_dy },
        ResidualField { name: "pmc_trace_y", spec, values: trace_dy },
    ])
}

/// Residual fields of the second-order system of the classified family, its
/// fourth-order reductions, and the auxiliary coordinate identities.
#[derive(Clone, Debug)]
pub struct PdeResiduals<S> {
    pub fxx: ResidualField<S>,
    pub fxy: ResidualField<S>,
    pub fyy: ResidualField<S>,
    pub eta_x: ResidualField<S>,
    pub eta_y: ResidualField<S>,
    pub fourth_x: ResidualField<S>,
    pub fourth_y: ResidualField<S>,
    pub xi_relation: ResidualField<S>,
    pub fifth_coords: ResidualField<S>,
}

impl<S: Real> PdeResiduals<S> {
    pub fn fields(&self) -> [&ResidualField<S>; 9] {
        [
            &self.fxx,
            &self.fxy,
            &self.fyy,
            &self.eta_x,
            &self.eta_y,
            &self.fourth_x,
            &self.fourth_y,
            &self.xi_relation,
            &self.fifth_coords,
        ]
    }
}

/// Evaluates the linear system satisfied by the classified immersion with
/// analytic derivatives and the analytic normal frame.
pub fn pde_system<S: Real>(
    params: &SurfaceParams<S>,
    spec: &GridSpec<S>,
) -> Result<PdeResiduals<S>> {
    let surf = FamilySurface::new(*params)?;
    let k = surf.constants;
    let (b1, b2) = (k.beta1p, k.beta2p);
    let cos_t = params.theta.cos();
    let sin_t = params.theta.sin();
    let c2t = cos_t * cos_t;
    let tan_t = sin_t / cos_t;
    let bq1 = b1 * b1 / c2t + b2 * b2 + c2t;
    let cq1 = b2 * b2 * c2t;
    let bq2 = b2 * b2 / c2t + b1 * b1 + S::one();
    let cq2 = b2 * b2 / c2t;

    let n = spec.len();
    let mut out = PdeResiduals {
        fxx: ResidualField { name: "sys_fxx", spec: *spec, values: vec![S::zero(); n] },
        fxy: ResidualField { name: "sys_fxy", spec: *spec, values: vec![S::zero(); n] },
        fyy: ResidualField { name: "sys_fyy", spec: *spec, values: vec![S::zero(); n] },
        eta_x: ResidualField { name: "sys_eta_x", spec: *spec, values: vec![S::zero(); n] },
        eta_y: ResidualField { name: "sys_eta_y", spec: *spec, values: vec![S::zero(); n] },
        fourth_x: ResidualField { name: "sys_fourth_x", spec: *spec, values: vec![S::zero(); n] },
        fourth_y: ResidualField { name: "sys_fourth_y", spec: *spec, values: vec![S::zero(); n] },
        xi_relation: ResidualField { name: "sys_xi_tangent", spec: *spec, values: vec![S::zero(); n] },
        fifth_coords: ResidualField { name: "sys_fifth_coord", spec: *spec, values: vec![S::zero(); n] },
    };

    for (i, j, x, y) in spec.samples() {
        let jt = surf.analytic_jet(x, y).expect("family has analytic jets");
        let fr = surf.analytic_frame(x, y);
        let (eta_x, eta_y) = surf.eta_partials(x, y);
        let (f4x, f4y) = surf.fourth_partials(x, y);
        let idx = spec.idx(i, j);

        let mut m = [S::zero(); 9];
        for c in 0..4 {
            let f = jt.f.0[c];
            let e1 = (jt.fxx.0[c] - b1 * fr.eta.0[c] + c2t * f).abs();
            let e2 = (jt.fxy.0[c] - b2 * fr.eta.0[c]).abs();
            let e3 = (jt.fyy.0[c] + b1 * fr.eta.0[c] + f).abs();
            let e4 = (eta_x.0[c] + b1 / c2t * jt.fx.0[c] + b2 * jt.fy.0[c]).abs();
            let e5 = (eta_y.0[c] + b2 / c2t * jt.fx.0[c] - b1 * jt.fy.0[c]).abs();
            let e6 = (f4x.0[c] + bq1 * jt.fxx.0[c] + cq1 * f).abs();
            let e7 = (f4y.0[c] + bq2 * jt.fyy.0[c] + cq2 * f).abs();
            let ex = (fr.xi.0[c] + tan_t * jt.fx.0[c]).abs();
            for (slot, v) in [e1, e2, e3, e4, e5, e6, e7, ex].into_iter().enumerate() {
                if v > m[slot] {
                    m[slot] = v;
                }
            }
        }
        let fifth = (jt.f.0[4] - x * sin_t)
            .abs()
            .max((fr.xi.0[4] - cos_t).abs())
            .max(fr.eta.0[4].abs());
        m[8] = fifth;

        out.fxx.values[idx] = m[0];
        out.fxy.values[idx] = m[1];
        out.fyy.values[idx] = m[2];
        out.eta_x.values[idx] = m[3];
        out.eta_y.values[idx] = m[4];
        out.fourth_x.values[idx] = m[5];
        out.fourth_y.values[idx] = m[6];
        out.xi_relation.values[idx] = m[7];
        out.fifth_coords.values[idx] = m[8];
    }
    Ok(out)
}

/// What is known about the surface under verification.
#[derive(Clone, Copy, Debug)]
pub enum SurfaceInfo<S> {
    /// A member of the classified family with known parameters.
    Family(SurfaceParams<S>),
    /// A canonical trivial-angle surface.
    Trivial(TrivialKind<S>),
    /// An immersion with unknown provenance (e.g. re-imported mesh data).
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of one verification check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult<S> {
    pub name: &'static str,
    pub max_residual: Option<S>,
    pub location: Option<[S; 2]>,
    pub tolerance: Option<S>,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Aggregated verification outcome; `overall_pass` holds exactly when no
/// check failed.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport<S> {
    pub surface: String,
    pub scheme: &'static str,
    pub grid: GridSpec<S>,
    pub tolerances: Tolerances<S>,
    pub checks: Vec<CheckResult<S>>,
    pub overall_pass: bool,
}

impl<S: Real> VerificationReport<S> {
    pub fn check(&self, name: &str) -> Option<&CheckResult<S>> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Options for [`verify_surface`].
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions<S> {
    pub grid: GridSpec<S>,
    pub scheme: JetScheme,
    pub fd: FdConfig<S>,
    pub tolerances: Tolerances<S>,
    /// Step for the intrinsic-curvature stencil; `None` picks the default.
    pub curvature_step: Option<S>,
    /// Restrict curvature evaluation to samples at least this many grid
    /// cells away from the boundary (needed for grid-locked immersions).
    pub curvature_margin: usize,
}

impl<S: Real> VerifyOptions<S> {
    pub fn new(grid: GridSpec<S>) -> Self {
        VerifyOptions {
            grid,
            scheme: JetScheme::DualForward,
            fd: FdConfig::default(),
            tolerances: Tolerances::default(),
            curvature_step: None,
            curvature_margin: 0,
        }
    }
}

struct MaxTrack<S> {
    best: Option<(S, S, S)>,
}

impl<S: Real> MaxTrack<S> {
    fn new() -> Self {
        MaxTrack { best: None }
    }

    fn update(&mut self, v: S, x: S, y: S) {
        if self.best.map_or(true, |(b, _, _)| v > b) {
            self.best = Some((v, x, y));
        }
    }
}

struct ReportBuilder<S> {
    checks: Vec<CheckResult<S>>,
}

impl<S: Real> ReportBuilder<S> {
    fn new() -> Self {
        ReportBuilder { checks: Vec::new() }
    }

    fn push_value(&mut self, name: &'static str, value: (S, S, S), tol: S) {
        let (v, x, y) = value;
        self.checks.push(CheckResult {
            name,
            max_residual: Some(v),
            location: Some([x, y]),
            tolerance: Some(tol),
            status: if v <= tol { CheckStatus::Pass } else { CheckStatus::Fail },
            note: None,
        });
    }

    fn push_fail(&mut self, name: &'static str, note: String) {
        self.checks.push(CheckResult {
            name,
            max_residual: None,
            location: None,
            tolerance: None,
            status: CheckStatus::Fail,
            note: Some(note),
        });
    }

    fn push_skipped(&mut self, name: &'static str, note: &str) {
        self.checks.push(CheckResult {
            name,
            max_residual: None,
            location: None,
            tolerance: None,
            status: CheckStatus::Skipped,
            note: Some(note.to_string()),
        });
    }
}

const FIELD_CHECKS: [&str; 7] = [
    "gauss_relation",
    "codazzi_ricci_a",
    "codazzi_ricci_b",
    "pmc_lambda_x",
    "pmc_trace_x",
    "pmc_lambda_y",
    "pmc_trace_y",
];

const PDE_CHECKS: [&str; 9] = [
    "sys_fxx",
    "sys_fxy",
    "sys_fyy",
    "sys_eta_x",
    "sys_eta_y",
    "sys_fourth_x",
    "sys_fourth_y",
    "sys_xi_tangent",
    "sys_fifth_coord",
];

fn rel_dev<S: Real>(a: S, b: S) -> S {
    (a - b).abs() / S::one().max(a.abs()).max(b.abs())
}

fn interned_edge_name(base: &'static str) -> &'static str {
    match base {
        "gauss_relation" => "gauss_relation_edge",
        "codazzi_ricci_a" => "codazzi_ricci_a_edge",
        "codazzi_ricci_b" => "codazzi_ricci_b_edge",
        "pmc_lambda_x" => "pmc_lambda_x_edge",
        "pmc_trace_x" => "pmc_trace_x_edge",
        "pmc_lambda_y" => "pmc_lambda_y_edge",
        "pmc_trace_y" => "pmc_trace_y_edge",
        other => other,
    }
}

/// Runs every applicable check for the surface over the grid and assembles
/// the report. Upstream computation errors become failed checks, never
/// panics; checks that do not apply to the surface kind are reported as
/// skipped so the report shape is stable.
pub fn verify_surface<S: Real, F: Immersion<S> + ?Sized>(
    f: &F,
    info: &SurfaceInfo<S>,
    opts: &VerifyOptions<S>,
) -> VerificationReport<S> {
    let spec = opts.grid;
    let tol = opts.tolerances;
    let mut rb = ReportBuilder::new();

    let surface_desc = match info {
        SurfaceInfo::Family(p) => format!(
            "family theta={} nu1={}",
            p.theta.to_f64().unwrap_or(f64::NAN),
            p.nu1.to_f64().unwrap_or(f64::NAN)
        ),
        SurfaceInfo::Trivial(k) => format!("trivial {}", k.name()),
        SurfaceInfo::Unknown => "unknown".to_string(),
    };
    let trivial = matches!(info, SurfaceInfo::Trivial(_));

    // --- per-sample extraction ---------------------------------------
    struct Sample<S> {
        x: S,
        y: S,
        manifold: S,
        angle: S,
        gram: S,
        a_xi_max: S,
        metric_dev: S,
        h_norm: S,
        data: SecondFundamentalData<S>,
        eta: Vec5<S>,
    }
    let mut samples: Vec<Sample<S>> = Vec::with_capacity(spec.len());
    let mut extraction_error: Option<GeomError> = None;

    'outer: for (i, j, x, y) in spec.samples() {
        let step = || -> Result<Sample<S>> {
            let jt = jet(f, x, y, opts.scheme, &opts.fd)?;
            let fr = frame_for(&jt)?;
            let (a_xi, _a_eta, mut data) = diffgeo::shape_operators(&jt, &fr)?;
            let mut eta = fr.eta;
            let angle = fr.theta;
            let g = data.metric;
            let metric_dev = (g.m[0][0] - S::one())
                .abs()
                .max(g.m[0][1].abs())
                .max((g.m[1][1] - S::one()).abs());
            let h = diffgeo::mean_curvature_vector(&data, &fr);
            // sign continuity of eta along the row-major sweep
            let reference = if i > 0 {
                Some(spec.idx(i - 1, j))
            } else if j > 0 {
                Some(spec.idx(0, j - 1))
            } else {
                None
            };
            if let Some(r) = reference {
                if eta.dot(&samples[r].eta) < S::zero() {
                    eta = eta.scale(-S::one());
                    data.beta1 = -data.beta1;
                    data.beta2 = -data.beta2;
                    data.beta3 = -data.beta3;
                }
            }
            Ok(Sample {
                x,
                y,
                manifold: jt.f.manifold_residual(),
                angle,
                gram: fr.gram_identity_residual(),
                a_xi_max: a_xi.max_abs(),
                metric_dev,
                h_norm: h.norm(),
                data,
                eta,
            })
        };
        match step() {
            Ok(s) => samples.push(s),
            Err(e) => {
                extraction_error = Some(e);
                break 'outer;
            }
        }
    }

    if let Some(e) = extraction_error {
        let msg = format!("extraction failed: {e}");
        for name in [
            "on_manifold",
            "frame_orthonormality",
            "angle_constancy",
            "minimality",
            "shape_axi_zero",
            "beta_constancy",
            "beta_identity",
            "metric_identity",
            "flatness",
        ] {
            rb.push_fail(name, msg.clone());
        }
        for name in FIELD_CHECKS {
            rb.push_fail(name, msg.clone());
            rb.push_fail(interned_edge_name(name), msg.clone());
        }
        for name in PDE_CHECKS {
            rb.push_skipped(name, "skipped after extraction failure");
        }
        rb.push_skipped("frequency_roundtrip", "skipped after extraction failure");
        let overall = false;
        return VerificationReport {
            surface: surface_desc,
            scheme: opts.scheme.name(),
            grid: spec,
            tolerances: tol,
            checks: rb.checks,
            overall_pass: overall,
        };
    }

    // --- pointwise checks ---------------------------------------------
    let mut manifold = MaxTrack::new();
    let mut gram = MaxTrack::new();
    let mut a_xi = MaxTrack::new();
    let mut metric = MaxTrack::new();
    let mut minimality = MaxTrack::new();
    for s in &samples {
        manifold.update(s.manifold, s.x, s.y);
        gram.update(s.gram, s.x, s.y);
        a_xi.update(s.a_xi_max, s.x, s.y);
        metric.update(s.metric_dev, s.x, s.y);
        minimality.update(s.h_norm, s.x, s.y);
    }
    rb.push_value("on_manifold", manifold.best.unwrap(), tol.membership);
    rb.push_value(
        "frame_orthonormality",
        gram.best.unwrap(),
        tol.scheme_scaled(tol.frame, opts.scheme),
    );

    // angle constancy: standard deviation, plus mean offset when the target
    // angle is known
    let nf = lit::<S>(samples.len() as f64);
    let mean_angle = samples.iter().fold(S::zero(), |a, s| a + s.angle) / nf;
    let var = samples
        .iter()
        .fold(S::zero(), |a, s| a + (s.angle - mean_angle) * (s.angle - mean_angle))
        / nf;
    let std = var.max(S::zero()).sqrt();
    let target = match info {
        SurfaceInfo::Family(p) => Some(p.theta),
        SurfaceInfo::Trivial(k) => Some(k.expected_angle()),
        SurfaceInfo::Unknown => None,
    };
    let mut dev = MaxTrack::new();
    for s in &samples {
        dev.update((s.angle - mean_angle).abs(), s.x, s.y);
    }
    let (_, dx, dy) = dev.best.unwrap();
    let angle_residual = match target {
        Some(t) => std.max((mean_angle - t).abs()),
        None => std,
    };
    rb.checks.push(CheckResult {
        name: "angle_constancy",
        max_residual: Some(angle_residual),
        location: Some([dx, dy]),
        tolerance: Some(tol.scheme_scaled(tol.angle, opts.scheme)),
        status: if angle_residual <= tol.scheme_scaled(tol.angle, opts.scheme) {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        note: Some(format!(
            "mean angle {}",
            mean_angle.to_f64().unwrap_or(f64::NAN)
        )),
    });

    rb.push_value(
        "minimality",
        minimality.best.unwrap(),
        tol.scheme_scaled(tol.analytic, opts.scheme),
    );
    rb.push_value(
        "shape_axi_zero",
        a_xi.best.unwrap(),
        tol.scheme_scaled(tol.analytic, opts.scheme),
    );

    if trivial {
        rb.push_skipped("beta_constancy", "constant-angle family check, skipped for trivial surface");
        rb.push_skipped("beta_identity", "constant-angle family check, skipped for trivial surface");
        rb.push_skipped("metric_identity", "adapted-coordinate check, skipped for trivial surface");
    } else {
        let mean_b1 = samples.iter().fold(S::zero(), |a, s| a + s.data.beta1) / nf;
        let mean_b2 = samples.iter().fold(S::zero(), |a, s| a + s.data.beta2) / nf;
        let mut spread = MaxTrack::new();
        for s in &samples {
            spread.update(
                (s.data.beta1 - mean_b1).abs().max((s.data.beta2 - mean_b2).abs()),
                s.x,
                s.y,
            );
        }
        rb.push_value(
            "beta_constancy",
            spread.best.unwrap(),
            tol.scheme_scaled(tol.beta_spread, opts.scheme),
        );

        let theta_hat = match info {
            SurfaceInfo::Family(p) => p.theta,
            _ => mean_angle,
        };
        let c2t = theta_hat.cos() * theta_hat.cos();
        let mut ident = MaxTrack::new();
        for s in &samples {
            ident.update(
                (s.data.beta1 * s.data.beta1 + s.data.beta2 * s.data.beta2 - c2t).abs(),
                s.x,
                s.y,
            );
        }
        rb.push_value(
            "beta_identity",
            ident.best.unwrap(),
            tol.scheme_scaled(tol.beta_identity, opts.scheme),
        );
        rb.push_value(
            "metric_identity",
            metric.best.unwrap(),
            tol.scheme_scaled(tol.metric, opts.scheme),
        );
    }

    // --- intrinsic curvature -------------------------------------------
    let expected_k = match info {
        SurfaceInfo::Trivial(k) => k.expected_curvature(),
        _ => S::zero(),
    };
    let k_scheme = best_scheme(f, spec.x(spec.nx / 2), spec.y(spec.ny / 2));
    let k_step = opts.curvature_step.unwrap_or_else(diffgeo::default_curvature_step);
    let m = opts.curvature_margin;
    let mut k_res = MaxTrack::new();
    let mut k_err: Option<GeomError> = None;
    for (i, j, x, y) in spec.samples() {
        if i < m || j < m || i + m >= spec.nx || j + m >= spec.ny {
            continue;
        }
        match gaussian_curvature(f, x, y, k_step, k_scheme, &opts.fd) {
            Ok(k) => k_res.update((k - expected_k).abs(), x, y),
            Err(e) => {
                k_err = Some(e);
                break;
            }
        }
    }
    match (k_err, k_res.best) {
        (Some(e), _) => rb.push_fail("flatness", format!("curvature evaluation failed: {e}")),
        (None, Some(best)) => rb.push_value("flatness", best, tol.curvature),
        (None, None) => rb.push_fail("flatness", "no samples inside curvature margin".into()),
    }

    // --- structure-equation fields ---------------------------------------
    if trivial {
        for name in FIELD_CHECKS {
            rb.push_skipped(name, "constant-angle family check, skipped for trivial surface");
            rb.push_skipped(
                interned_edge_name(name),
                "constant-angle family check, skipped for trivial surface",
            );
        }
    } else {
        let theta_hat = match info {
            SurfaceInfo::Family(p) => p.theta,
            _ => mean_angle,
        };
        let fg = FieldGrid {
            spec,
            data: samples.iter().map(|s| s.data).collect(),
            eta: samples.iter().map(|s| s.eta).collect(),
        };
        let spacing = spec.hx().max(spec.hy());
        let ftol = tol.field(spacing);
        let fields: Result<Vec<ResidualField<S>>> = (|| {
            let g = gauss_codazzi_ricci(&fg, theta_hat)?;
            let p = pmc_conditions(&fg, theta_hat)?;
            Ok(g.into_iter().chain(p).collect())
        })();
        match fields {
            Ok(fields) => {
                for fld in &fields {
                    rb.push_value(fld.name, fld.max_abs_interior().unwrap(), ftol);
                    rb.push_value(interned_edge_name(fld.name), fld.max_abs_edge().unwrap(), ftol);
                }
            }
            Err(e) => {
                let msg = format!("field residuals failed: {e}");
                for name in FIELD_CHECKS {
                    rb.push_fail(name, msg.clone());
                    rb.push_fail(interned_edge_name(name), msg.clone());
                }
            }
        }
    }

    // --- family system and frequency round-trip -------------------------
    match info {
        SurfaceInfo::Family(p) => {
            match pde_system(p, &spec) {
                Ok(pde) => {
                    for fld in pde.fields() {
                        rb.push_value(fld.name, fld.max_abs().unwrap(), tol.pde);
                    }
                }
                Err(e) => {
                    let msg = format!("system residuals failed: {e}");
                    for name in PDE_CHECKS {
                        rb.push_fail(name, msg.clone());
                    }
                }
            }
            let mean_b1 = samples.iter().fold(S::zero(), |a, s| a + s.data.beta1) / nf;
            let mean_b2 = samples.iter().fold(S::zero(), |a, s| a + s.data.beta2) / nf;
            let rt = (|| -> Result<S> {
                let fq = invert_frequencies(mean_b1.abs(), mean_b2.abs(), p.theta)?;
                let k = derive_constants(p)?;
                let mut worst = rel_dev(fq.nu1, p.nu1);
                worst = worst.max(rel_dev(fq.nu2, k.nu2));
                worst = worst.max(rel_dev(fq.mu1, k.mu1));
                worst = worst.max(rel_dev(fq.mu2, k.mu2));
                worst = worst.max(rel_dev(mean_b1.abs(), k.beta1p));
                worst = worst.max(rel_dev(mean_b2.abs(), k.beta2p));
                Ok(worst)
            })();
            match rt {
                Ok(worst) => rb.push_value(
                    "frequency_roundtrip",
                    (worst, spec.x0, spec.y0),
                    tol.scheme_scaled(tol.roundtrip, opts.scheme),
                ),
                Err(e) => rb.push_fail("frequency_roundtrip", format!("round-trip failed: {e}")),
            }
        }
        SurfaceInfo::Trivial(_) => {
            for name in PDE_CHECKS {
                rb.push_skipped(name, "family system check, skipped for trivial surface");
            }
            rb.push_skipped("frequency_roundtrip", "family check, skipped for trivial surface");
        }
        SurfaceInfo::Unknown => {
            for name in PDE_CHECKS {
                rb.push_skipped(name, "system check needs known parameters");
            }
            let mean_b1 = samples.iter().fold(S::zero(), |a, s| a + s.data.beta1) / nf;
            let mean_b2 = samples.iter().fold(S::zero(), |a, s| a + s.data.beta2) / nf;
            let rt = (|| -> Result<(S, f64)> {
                let fq = invert_frequencies(mean_b1.abs(), mean_b2.abs(), mean_angle)?;
                // extraction noise can push the recovered frequency a hair
                // past an interval endpoint
                let hi = (S::one() + mean_angle.cos().powi(2)).sqrt();
                let nu1 = fq.nu1.max(S::one()).min(hi);
                let params = SurfaceParams::new(mean_angle, nu1)?;
                let k = derive_constants(&params)?;
                let worst = rel_dev(mean_b1.abs(), k.beta1p).max(rel_dev(mean_b2.abs(), k.beta2p));
                Ok((worst, fq.nu1.to_f64().unwrap_or(f64::NAN)))
            })();
            match rt {
                Ok((worst, nu1)) => {
                    let t = tol.scheme_scaled(tol.roundtrip, opts.scheme);
                    rb.checks.push(CheckResult {
                        name: "frequency_roundtrip",
                        max_residual: Some(worst),
                        location: Some([spec.x0, spec.y0]),
                        tolerance: Some(t),
                        status: if worst <= t { CheckStatus::Pass } else { CheckStatus::Fail },
                        note: Some(format!("reconstructed nu1 = {nu1}")),
                    });
                }
                Err(e) => {
                    rb.push_fail("frequency_roundtrip", format!("reconstruction failed: {e}"))
                }
            }
        }
    }

    let overall = rb.checks.iter().all(|c| c.status != CheckStatus::Fail);
    VerificationReport {
        surface: surface_desc,
        scheme: opts.scheme.name(),
        grid: spec,
        tolerances: tol,
        checks: rb.checks,
        overall_pass: overall,
    }
}
