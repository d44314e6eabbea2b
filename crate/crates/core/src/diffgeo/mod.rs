//! Numerical differential geometry for surfaces immersed in the product
//! manifold: jets, adapted frames, fundamental forms, shape operators, mean
//! curvature, the angle function, and intrinsic curvature.
//!
//! Everything here works for any evaluable immersion `(x, y) -> E^5` whose
//! image lies on the product manifold; closed-form surfaces additionally
//! expose analytic and dual-forward derivative channels.

pub mod fd;

use crate::ambient::{eps_membership, Point5, Vec5};
use crate::error::{GeomError, Result};
use crate::scalar::{lit, Real};
use serde::Serialize;

pub use fd::FdConfig;

/// Rank tolerance: the Gram determinant of the first partials must exceed it.
pub fn eps_rank<S: Real>() -> S {
    lit(1e-12)
}

/// Angle-degeneracy tolerance on the tangential part of the parallel field.
pub fn eps_angle<S: Real>() -> S {
    lit(1e-10)
}

/// Default step for the intrinsic-curvature stencil.
///
/// Chosen so the Richardson-extrapolated metric derivatives balance their
/// truncation term against the roundoff of machine-precision metric samples.
pub fn default_curvature_step<S: Real>() -> S {
    lit(5e-3)
}

/// How the derivatives in a [`Jet2`] were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JetScheme {
    /// Closed-form derivative formulas supplied by the immersion.
    Analytic,
    /// Forward-mode propagation of second-order jets through the closed form.
    DualForward,
    /// Central differences with one Richardson level on point evaluations.
    FiniteDifference,
}

impl JetScheme {
    pub fn name(&self) -> &'static str {
        match self {
            JetScheme::Analytic => "analytic",
            JetScheme::DualForward => "dual",
            JetScheme::FiniteDifference => "fd",
        }
    }
}

/// Value and partial derivatives of an immersion at one parameter point.
#[derive(Clone, Copy, Debug)]
pub struct Jet2<S> {
    pub x: S,
    pub y: S,
    pub f: Point5<S>,
    pub fx: Vec5<S>,
    pub fy: Vec5<S>,
    pub fxx: Vec5<S>,
    pub fxy: Vec5<S>,
    pub fyy: Vec5<S>,
    pub source: JetScheme,
}

impl<S: Real> Jet2<S> {
    /// Gram determinant of the first partials (rank-2 witness).
    pub fn gram_det(&self) -> S {
        let gxx = self.fx.dot(&self.fx);
        let gxy = self.fx.dot(&self.fy);
        let gyy = self.fy.dot(&self.fy);
        gxx * gyy - gxy * gxy
    }
}

/// An evaluable immersion of a parameter rectangle into the product manifold.
///
/// `eval` must be defined in a neighbourhood of every queried point. The
/// optional channels return `None` when the immersion has no closed form;
/// [`jet`] then falls back to finite differences.
pub trait Immersion<S: Real> {
    fn eval(&self, x: S, y: S) -> Point5<S>;

    fn analytic_jet(&self, _x: S, _y: S) -> Option<Jet2<S>> {
        None
    }

    fn dual_jet(&self, _x: S, _y: S) -> Option<Jet2<S>> {
        None
    }
}

/// Acquires a jet using the requested scheme, falling back towards finite
/// differences when a closed-form channel is absent, and checks that the
/// first partials have rank 2.
pub fn jet<S: Real, F: Immersion<S> + ?Sized>(
    f: &F,
    x: S,
    y: S,
    scheme: JetScheme,
    cfg: &FdConfig<S>,
) -> Result<Jet2<S>> {
    let j = match scheme {
        JetScheme::Analytic => f
            .analytic_jet(x, y)
            .or_else(|| f.dual_jet(x, y))
            .unwrap_or_else(|| fd_jet(f, x, y, cfg)),
        JetScheme::DualForward => f
            .dual_jet(x, y)
            .or_else(|| f.analytic_jet(x, y))
            .unwrap_or_else(|| fd_jet(f, x, y, cfg)),
        JetScheme::FiniteDifference => fd_jet(f, x, y, cfg),
    };
    let det = j.gram_det();
    if det <= eps_rank() {
        return Err(GeomError::DegenerateImmersion {
            x: x.to_f64().unwrap_or(f64::NAN),
            y: y.to_f64().unwrap_or(f64::NAN),
            gram_det: det.to_f64().unwrap_or(f64::NAN),
            tolerance: eps_rank::<S>().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(j)
}

fn fd_jet<S: Real, F: Immersion<S> + ?Sized>(f: &F, x: S, y: S, cfg: &FdConfig<S>) -> Jet2<S> {
    let eval = |a: S, b: S| f.eval(a, b);
    let (f0, fx, fy, fxx, fxy, fyy) = fd::fd_jet_parts(&eval, x, y, cfg);
    Jet2 {
        x,
        y,
        f: Point5(f0),
        fx: Vec5(fx),
        fy: Vec5(fy),
        fxx: Vec5(fxx),
        fxy: Vec5(fxy),
        fyy: Vec5(fyy),
        source: JetScheme::FiniteDifference,
    }
}

/// The scheme a given immersion supports best, probed at one point.
pub fn best_scheme<S: Real, F: Immersion<S> + ?Sized>(f: &F, x: S, y: S) -> JetScheme {
    if f.analytic_jet(x, y).is_some() {
        JetScheme::Analytic
    } else if f.dual_jet(x, y).is_some() {
        JetScheme::DualForward
    } else {
        JetScheme::FiniteDifference
    }
}

/// 2x2 matrix in the orthonormal tangent basis `(T, Q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<S> {
    pub m: [[S; 2]; 2],
}

impl<S: Real> Mat2<S> {
    pub fn zero() -> Self {
        Mat2 { m: [[S::zero(); 2]; 2] }
    }

    pub fn new(tt: S, tq: S, qt: S, qq: S) -> Self {
        Mat2 { m: [[tt, tq], [qt, qq]] }
    }

    pub fn trace(&self) -> S {
        self.m[0][0] + self.m[1][1]
    }

    pub fn max_abs(&self) -> S {
        let mut r = S::zero();
        for row in &self.m {
            for &e in row {
                if e.abs() > r {
                    r = e.abs();
                }
            }
        }
        r
    }

    /// Eigenvalues of a symmetric matrix, larger first.
    pub fn sym_eigenvalues(&self) -> (S, S) {
        let half = lit::<S>(0.5);
        let mean = (self.m[0][0] + self.m[1][1]) * half;
        let d = (self.m[0][0] - self.m[1][1]) * half;
        let r = (d * d + self.m[0][1] * self.m[1][0]).max(S::zero()).sqrt();
        (mean + r, mean - r)
    }
}

/// Adapted orthonormal frame at one point: `T, Q` tangent with `T` along the
/// tangential part of the parallel field, `xi, eta` normal to the surface
/// inside the product manifold, `n` the position normal of the product
/// manifold itself.
#[derive(Clone, Copy, Debug)]
pub struct FrameData<S> {
    pub x: S,
    pub y: S,
    pub point: Point5<S>,
    pub t: Vec5<S>,
    pub q: Vec5<S>,
    pub xi: Vec5<S>,
    pub eta: Vec5<S>,
    pub n: Vec5<S>,
    /// Norm of the tangential part of the parallel field.
    pub sin_theta: S,
    /// Norm of the normal part of the parallel field.
    pub cos_theta: S,
    pub theta: S,
}

impl<S: Real> FrameData<S> {
    /// Maximum deviation of the 5x5 Gram matrix from the identity.
    pub fn gram_identity_residual(&self) -> S {
        let vs = [&self.t, &self.q, &self.xi, &self.eta, &self.n];
        let mut r = S::zero();
        for i in 0..5 {
            for j in 0..5 {
                let g = vs[i].dot(vs[j]);
                let want = if i == j { S::one() } else { S::zero() };
                let d = (g - want).abs();
                if d > r {
                    r = d;
                }
            }
        }
        r
    }
}

fn det4<S: Real>(m: [[S; 4]; 4]) -> S {
    // cofactor expansion along the first row
    let det3 = |a: [[S; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let mut d = S::zero();
    let mut sign = S::one();
    for c in 0..4 {
        let mut sub = [[S::zero(); 3]; 3];
        for r in 1..4 {
            let mut cc = 0;
            for k in 0..4 {
                if k != c {
                    sub[r - 1][cc] = m[r][k];
                    cc += 1;
                }
            }
        }
        d = d + sign * m[0][c] * det3(sub);
        sign = -sign;
    }
    d
}

/// The vector `w` characterized by `<v, w> = det(v, a, b, c, d)`; for
/// orthonormal inputs it is the unit normal of their span.
fn hodge_complement<S: Real>(a: &Vec5<S>, b: &Vec5<S>, c: &Vec5<S>, d: &Vec5<S>) -> Vec5<S> {
    let rows = [a.0, b.0, c.0, d.0];
    let mut w = [S::zero(); 5];
    let mut sign = S::one();
    for i in 0..5 {
        let mut m = [[S::zero(); 4]; 4];
        for r in 0..4 {
            let mut cc = 0;
            for k in 0..5 {
                if k != i {
                    m[r][cc] = rows[r][k];
                    cc += 1;
                }
            }
        }
        w[i] = sign * det4(m);
        sign = -sign;
    }
    Vec5(w)
}

/// Completes `(t, q, xi, n)` with the unique unit normal `eta` for which the
/// frame determinant `det(t, q, xi, eta, n)` is positive.
fn complete_eta<S: Real>(t: &Vec5<S>, q: &Vec5<S>, xi: &Vec5<S>, n: &Vec5<S>) -> Vec5<S> {
    // <v, w> = det(v, t, q, xi, n); moving eta from row 4 to row 1 of
    // det(t, q, xi, eta, n) costs three transpositions, so the frame
    // determinant equals -<eta, w>. Take eta = -w.
    let w = hodge_complement(t, q, xi, n);
    w.normalize().scale(-S::one())
}

fn orthonormal_tangent_basis<S: Real>(j: &Jet2<S>) -> Result<(Vec5<S>, Vec5<S>)> {
    let det = j.gram_det();
    if det <= eps_rank() {
        return Err(GeomError::DegenerateImmersion {
            x: j.x.to_f64().unwrap_or(f64::NAN),
            y: j.y.to_f64().unwrap_or(f64::NAN),
            gram_det: det.to_f64().unwrap_or(f64::NAN),
            tolerance: eps_rank::<S>().to_f64().unwrap_or(f64::NAN),
        });
    }
    let e1 = j.fx.normalize();
    let e2 = j.fy.reject_unit(&e1).normalize();
    Ok((e1, e2))
}

/// Builds the adapted frame from a jet. Fails with a normal-angle-degenerate
/// error when the tangential part of the parallel field vanishes (the
/// angle-zero slices); those use [`theta_zero_frame`].
pub fn adapted_frame<S: Real>(j: &Jet2<S>) -> Result<FrameData<S>> {
    j.f.check_on_manifold(eps_membership())?;
    let (e1, e2) = orthonormal_tangent_basis(j)?;
    let dt = Vec5::partial_t();
    let a = dt.dot(&e1);
    let b = dt.dot(&e2);
    let s = (a * a + b * b).sqrt();
    if s <= eps_angle() {
        return Err(GeomError::NormalAngleDegenerate {
            x: j.x.to_f64().unwrap_or(f64::NAN),
            y: j.y.to_f64().unwrap_or(f64::NAN),
            norm: s.to_f64().unwrap_or(f64::NAN),
        });
    }
    let t = e1.scale(a / s).add(&e2.scale(b / s));
    // rotate by a quarter turn inside the tangent plane
    let q = e1.scale(-b / s).add(&e2.scale(a / s));
    let n = j.f.position_normal().normalize();
    let tangential = e1.scale(a).add(&e2.scale(b));
    let perp = dt.sub(&tangential);
    let c = perp.norm();
    let xi = if c > eps_angle() {
        perp.scale(S::one() / c)
    } else {
        // angle pi/2: the parallel field is tangent; pick a deterministic
        // unit normal inside the product manifold.
        deterministic_normal(&t, &q, &n)?
    };
    let eta = complete_eta(&t, &q, &xi, &n);
    Ok(FrameData {
        x: j.x,
        y: j.y,
        point: j.f,
        t,
        q,
        xi,
        eta,
        n,
        sin_theta: s,
        cos_theta: c,
        theta: s.atan2(c),
    })
}

/// Frame for angle-zero slices: the parallel field is normal, so `xi` is the
/// parallel field itself and `T, Q` are any orthonormal tangent pair.
pub fn theta_zero_frame<S: Real>(j: &Jet2<S>) -> Result<FrameData<S>> {
    j.f.check_on_manifold(eps_membership())?;
    let (t, q) = orthonormal_tangent_basis(j)?;
    let dt = Vec5::partial_t();
    let s = (dt.dot(&t).powi(2) + dt.dot(&q).powi(2)).sqrt();
    let xi = dt;
    let n = j.f.position_normal().normalize();
    let eta = complete_eta(&t, &q, &xi, &n);
    let c = dt.sub(&t.scale(dt.dot(&t))).sub(&q.scale(dt.dot(&q))).norm();
    Ok(FrameData {
        x: j.x,
        y: j.y,
        point: j.f,
        t,
        q,
        xi,
        eta,
        n,
        sin_theta: s,
        cos_theta: c,
        theta: s.atan2(c),
    })
}

/// Dispatches between [`adapted_frame`] and [`theta_zero_frame`] based on the
/// tangential part of the parallel field.
pub fn frame_for<S: Real>(j: &Jet2<S>) -> Result<FrameData<S>> {
    let (e1, e2) = orthonormal_tangent_basis(j)?;
    let dt = Vec5::partial_t();
    let s = (dt.dot(&e1).powi(2) + dt.dot(&e2).powi(2)).sqrt();
    if s > eps_angle() {
        adapted_frame(j)
    } else {
        theta_zero_frame(j)
    }
}

fn deterministic_normal<S: Real>(t: &Vec5<S>, q: &Vec5<S>, n: &Vec5<S>) -> Result<Vec5<S>> {
    let half = lit::<S>(0.5);
    for i in 0..5 {
        let mut e = [S::zero(); 5];
        e[i] = S::one();
        let e = Vec5(e);
        let p = e.reject_unit(t).reject_unit(q).reject_unit(n);
        if p.norm() > half {
            return Ok(p.normalize());
        }
    }
    // Unreachable for orthonormal t, q, n: the complement is 2-dimensional.
    Err(GeomError::InvalidGrid {
        reason: "no coordinate direction spans the normal plane".into(),
    })
}

/// Angle between the parallel field and the normal plane, in `[0, pi/2]`.
pub fn angle_function<S: Real>(j: &Jet2<S>) -> Result<S> {
    let (e1, e2) = orthonormal_tangent_basis(j)?;
    let dt = Vec5::partial_t();
    let a = dt.dot(&e1);
    let b = dt.dot(&e2);
    let s = (a * a + b * b).sqrt();
    let perp = dt.sub(&e1.scale(a)).sub(&e2.scale(b));
    Ok(s.atan2(perp.norm()))
}

/// Shape data in the constant-angle form: `A_xi = [[0,0],[0,lambda]]`,
/// `A_eta = [[beta1, beta2],[beta2, beta3]]`, together with the induced
/// metric of the parameter coordinates.
#[derive(Clone, Copy, Debug)]
pub struct SecondFundamentalData<S> {
    pub lambda: S,
    pub beta1: S,
    pub beta2: S,
    pub beta3: S,
    pub theta_pt: S,
    /// Induced metric in the `(x, y)` coordinate basis.
    pub metric: Mat2<S>,
    /// `sqrt(g22)`; equals the conformal factor when `g11 = 1, g12 = 0`.
    pub alpha: S,
}

/// Shape operators with respect to `xi` and `eta` in the `(T, Q)` basis,
/// plus the extracted scalar shape data.
pub fn shape_operators<S: Real>(
    j: &Jet2<S>,
    fr: &FrameData<S>,
) -> Result<(Mat2<S>, Mat2<S>, SecondFundamentalData<S>)> {
    if fr.x != j.x || fr.y != j.y {
        return Err(GeomError::PointMismatch {
            jx: j.x.to_f64().unwrap_or(f64::NAN),
            jy: j.y.to_f64().unwrap_or(f64::NAN),
            fx: fr.x.to_f64().unwrap_or(f64::NAN),
            fy: fr.y.to_f64().unwrap_or(f64::NAN),
        });
    }
    let gxx = j.fx.dot(&j.fx);
    let gxy = j.fx.dot(&j.fy);
    let gyy = j.fy.dot(&j.fy);
    let det = gxx * gyy - gxy * gxy;
    if det <= S::zero() || gxx <= S::zero() {
        return Err(GeomError::DegenerateMetric {
            x: j.x.to_f64().unwrap_or(f64::NAN),
            y: j.y.to_f64().unwrap_or(f64::NAN),
            det: det.to_f64().unwrap_or(f64::NAN),
        });
    }
    // coordinates of T and Q in the (fx, fy) basis: solve g * c = rhs
    let solve = |v: &Vec5<S>| {
        let r1 = v.dot(&j.fx);
        let r2 = v.dot(&j.fy);
        ((gyy * r1 - gxy * r2) / det, (gxx * r2 - gxy * r1) / det)
    };
    let (t1, t2) = solve(&fr.t);
    let (q1, q2) = solve(&fr.q);

    let second_form = |normal: &Vec5<S>| {
        let sxx = j.fxx.dot(normal);
        let sxy = j.fxy.dot(normal);
        let syy = j.fyy.dot(normal);
        let apply = |u1: S, u2: S, v1: S, v2: S| {
            u1 * v1 * sxx + (u1 * v2 + u2 * v1) * sxy + u2 * v2 * syy
        };
        Mat2::new(
            apply(t1, t2, t1, t2),
            apply(t1, t2, q1, q2),
            apply(t1, t2, q1, q2),
            apply(q1, q2, q1, q2),
        )
    };

    let a_xi = second_form(&fr.xi);
    let a_eta = second_form(&fr.eta);
    let data = SecondFundamentalData {
        lambda: a_xi.m[1][1],
        beta1: a_eta.m[0][0],
        beta2: a_eta.m[0][1],
        beta3: a_eta.m[1][1],
        theta_pt: fr.theta,
        metric: Mat2::new(gxx, gxy, gxy, gyy),
        alpha: gyy.sqrt(),
    };
    Ok((a_xi, a_eta, data))
}

/// Mean curvature vector `(lambda xi + (beta1 + beta3) eta) / 2` assembled
/// from the constant-angle shape data.
pub fn mean_curvature_vector<S: Real>(
    data: &SecondFundamentalData<S>,
    fr: &FrameData<S>,
) -> Vec5<S> {
    let half = lit::<S>(0.5);
    fr.xi
        .scale(data.lambda * half)
        .add(&fr.eta.scale((data.beta1 + data.beta3) * half))
}

fn det3<S: Real>(a: [[S; 3]; 3]) -> S {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Intrinsic (Gaussian) curvature from the induced metric via the Brioschi
/// formula, with metric derivatives taken by Richardson-extrapolated central
/// differences of step `h_step`.
pub fn gaussian_curvature<S: Real, F: Immersion<S> + ?Sized>(
    f: &F,
    x: S,
    y: S,
    h_step: S,
    scheme: JetScheme,
    cfg: &FdConfig<S>,
) -> Result<S> {
    // metric samples; failures inside the stencil propagate as errors
    let met = |a: S, b: S| -> Result<(S, S, S)> {
        let j = jet(f, a, b, scheme, cfg)?;
        let e = j.fx.dot(&j.fx);
        let ff = j.fx.dot(&j.fy);
        let g = j.fy.dot(&j.fy);
        if e <= S::zero() || e * g - ff * ff <= S::zero() {
            return Err(GeomError::DegenerateMetric {
                x: a.to_f64().unwrap_or(f64::NAN),
                y: b.to_f64().unwrap_or(f64::NAN),
                det: (e * g - ff * ff).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok((e, ff, g))
    };

    // cache the 5x5 stencil
    let mut cache = [[None; 5]; 5];
    for (ii, di) in (-2i32..=2).enumerate() {
        for (jj, dj) in (-2i32..=2).enumerate() {
            let a = x + h_step * lit::<S>(di as f64);
            let b = y + h_step * lit::<S>(dj as f64);
            cache[ii][jj] = Some(met(a, b)?);
        }
    }
    let at = |di: i32, dj: i32| cache[(di + 2) as usize][(dj + 2) as usize].unwrap();

    let c = |k: usize| move |di: i32, dj: i32| match k {
        0 => at(di, dj).0,
        1 => at(di, dj).1,
        _ => at(di, dj).2,
    };
    let (e_f, f_f, g_f) = (c(0), c(1), c(2));

    let h = h_step;
    let twelve = lit::<S>(12.0);
    let d1 = |v: &dyn Fn(i32) -> S| {
        (lit::<S>(8.0) * (v(1) - v(-1)) - (v(2) - v(-2))) / (twelve * h)
    };
    let d2p = |v: &dyn Fn(i32) -> S| {
        let base = |s: i32| {
            (v(s) - lit::<S>(2.0) * v(0) + v(-s)) / (h * h * lit::<S>((s * s) as f64))
        };
        (lit::<S>(4.0) * base(1) - base(2)) / lit::<S>(3.0)
    };
    let dmix = |v: &dyn Fn(i32, i32) -> S| {
        let base = |s: i32| {
            (v(s, s) - v(s, -s) - v(-s, s) + v(-s, -s))
                / (lit::<S>(4.0) * h * h * lit::<S>((s * s) as f64))
        };
        (lit::<S>(4.0) * base(1) - base(2)) / lit::<S>(3.0)
    };

    let e = e_f(0, 0);
    let ff = f_f(0, 0);
    let g = g_f(0, 0);
    let e_x = d1(&|i| e_f(i, 0));
    let e_y = d1(&|i| e_f(0, i));
    let g_x = d1(&|i| g_f(i, 0));
    let g_y = d1(&|i| g_f(0, i));
    let f_x = d1(&|i| f_f(i, 0));
    let f_y = d1(&|i| f_f(0, i));
    let e_yy = d2p(&|i| e_f(0, i));
    let g_xx = d2p(&|i| g_f(i, 0));
    let f_xy = dmix(&f_f);

    let half = lit::<S>(0.5);
    let m1 = [
        [-half * e_yy + f_xy - half * g_xx, half * e_x, f_x - half * e_y],
        [f_y - half * g_x, e, ff],
        [half * g_y, ff, g],
    ];
    let m2 = [
        [S::zero(), half * e_y, half * g_x],
        [half * e_y, e, ff],
        [half * g_x, ff, g],
    ];
    let denom = e * g - ff * ff;
    Ok((det3(m1) - det3(m2)) / (denom * denom))
}

/// Rectangular parameter grid, endpoints inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec<S> {
    pub nx: usize,
    pub ny: usize,
    pub x0: S,
    pub x1: S,
    pub y0: S,
    pub y1: S,
}

impl<S: Real> GridSpec<S> {
    pub fn new(nx: usize, ny: usize, x0: S, x1: S, y0: S, y1: S) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(GeomError::InvalidGrid {
                reason: format!("need at least 3 samples per axis, got {nx}x{ny}"),
            });
        }
        if !(x1 > x0) || !(y1 > y0) {
            return Err(GeomError::InvalidGrid {
                reason: "empty parameter range".into(),
            });
        }
        Ok(GridSpec { nx, ny, x0, x1, y0, y1 })
    }

    pub fn hx(&self) -> S {
        (self.x1 - self.x0) / lit::<S>((self.nx - 1) as f64)
    }

    pub fn hy(&self) -> S {
        (self.y1 - self.y0) / lit::<S>((self.ny - 1) as f64)
    }

    pub fn x(&self, i: usize) -> S {
        self.x0 + self.hx() * lit::<S>(i as f64)
    }

    pub fn y(&self, j: usize) -> S {
        self.y0 + self.hy() * lit::<S>(j as f64)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major flat index: `j * nx + i`.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Iterates `(i, j, x, y)` in row-major order (x fastest).
    pub fn samples(&self) -> impl Iterator<Item = (usize, usize, S, S)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (i, j, self.x(i), self.y(j))))
    }
}

/// Normal-connection coefficients at one grid sample:
/// `coef_t = <nabla^perp_T xi, eta>` and `coef_q = <nabla^perp_Q xi, eta>`.
#[derive(Clone, Copy, Debug)]
pub struct NormalConnectionSample<S> {
    pub x: S,
    pub y: S,
    pub coef_t: S,
    pub coef_q: S,
}

/// Tangential covariant derivatives at one grid sample, expressed in the
/// `(T, Q)` basis: rows are `nabla_T T, nabla_T Q, nabla_Q T, nabla_Q Q`.
#[derive(Clone, Copy, Debug)]
pub struct TangentConnectionSample<S> {
    pub x: S,
    pub y: S,
    pub coeffs: [[S; 2]; 4],
}

struct FrameDerivs<S> {
    frame: FrameData<S>,
    t1: S,
    t2: S,
    q1: S,
    q2: S,
    dt_dx: Vec5<S>,
    dt_dy: Vec5<S>,
    dq_dx: Vec5<S>,
    dq_dy: Vec5<S>,
    dxi_dx: Vec5<S>,
    dxi_dy: Vec5<S>,
}

/// Frames at a local cross stencil around `(x, y)`, sign-aligned to the
/// centre, differentiated by plain central differences of step `delta`.
fn frame_field_derivatives<S: Real, F: Immersion<S> + ?Sized>(
    f: &F,
    x: S,
    y: S,
    scheme: JetScheme,
    cfg: &FdConfig<S>,
    delta: S,
) -> Result<FrameDerivs<S>> {
    let fr = |a: S, b: S| -> Result<FrameData<S>> { frame_for(&jet(f, a, b, scheme, cfg)?) };
    let center = fr(x, y)?;
    let align = |mut g: FrameData<S>| {
        if g.eta.dot(&center.eta) < S::zero() {
            g.eta = g.eta.scale(-S::one());
        }
        if g.xi.dot(&center.xi) < S::zero() {
            g.xi = g.xi.scale(-S::one());
        }
        if g.q.dot(&center.q) < S::zero() {
            g.q = g.q.scale(-S::one());
        }
        g
    };
    let xp = align(fr(x + delta, y)?);
    let xm = align(fr(x - delta, y)?);
    let yp = align(fr(x, y + delta)?);
    let ym = align(fr(x, y - delta)?);
    let two = lit::<S>(2.0);
    let d = |p: &Vec5<S>, m: &Vec5<S>| p.sub(m).scale(S::one() / (two * delta));

    let j = jet(f, x, y, scheme, cfg)?;
    let gxx = j.fx.dot(&j.fx);
    let gxy = j.fx.dot(&j.fy);
    let gyy = j.fy.dot(&j.fy);
    let det = gxx * gyy - gxy * gxy;
    let solve = |v: &Vec5<S>| {
        let r1 = v.dot(&j.fx);
        let r2 = v.dot(&j.fy);
        ((gyy * r1 - gxy * r2) / det, (gxx * r2 - gxy * r1) / det)
    };
    let (t1, t2) = solve(&center.t);
    let (q1, q2) = solve(&center.q);

    Ok(FrameDerivs {
        t1,
        t2,
        q1,
        q2,
        dt_dx: d(&xp.t, &xm.t),
        dt_dy: d(&yp.t, &ym.t),
        dq_dx: d(&xp.q, &xm.q),
        dq_dy: d(&yp.q, &ym.q),
        dxi_dx: d(&xp.xi, &xm.xi),
        dxi_dy: d(&yp.xi, &ym.xi),
        frame: center,
    })
}

/// Default step for frame-field differencing.
pub fn default_frame_step<S: Real>() -> S {
    lit(1e-4)
}

/// Normal-connection coefficients over a grid.
///
/// Frames are computed serially in row-major order; a sign flip of `eta`
/// between neighbouring grid samples aborts with a frame-alignment error.
/// The derivative at each sample uses a local stencil of step `delta`,
/// sign-aligned to that sample.
pub fn normal_connection_coeffs<S: Real, F: Immersion<S> + ?Sized>(
    f: &F,
    spec: &GridSpec<S>,
    scheme: JetScheme,
    cfg: &FdConfig<S>,
    delta: S,
) -> Result<Vec<NormalConnectionSample<S>>> {
    let mut frames: Vec<FrameData<S>> = Vec::with_capacity(spec.len());
    for (i, j, x, y) in spec.samples() {
        let fr = frame_for(&jet(f, x, y, scheme, cfg)?)?;
        if i > 0 {
            let prev = &frames[spec.idx(i - 1, j)];
            if fr.eta.dot(&prev.eta) <= S::zero() {
                return Err(GeomError::FrameAlignment { i0: i - 1, j0: j, i1: i, j1: j });
            }
        } else if j > 0 {
            let prev = &frames[spec.idx(0, j - 1)];
            if fr.eta.dot(&prev.eta) <= S::zero() {
                return Err(GeomError::FrameAlignment { i0: 0, j0: j - 1, i1: 0, j1: j });
            }
        }
        frames.push(fr);
    }

    let mut out = Vec::with_capacity(spec.len());
    for (_, _, x, y) in spec.samples() {
        let fd = frame_field_derivatives(f, x, y, scheme, cfg, delta)?;
        let d_t = fd.dxi_dx.scale(fd.t1).add(&fd.dxi_dy.scale(fd.t2));
        let d_q = fd.dxi_dx.scale(fd.q1).add(&fd.dxi_dy.scale(fd.q2));
        out.push(NormalConnectionSample {
            x,
            y,
            coef_t: d_t.dot(&fd.frame.eta),
            coef_q: d_q.dot(&fd.frame.eta),
        });
    }
    Ok(out)
}

/// Tangential covariant derivatives of the frame field over a grid,
/// projected onto the `(T, Q)` basis.
pub fn tangent_connection_coeffs<S: Real, F: Immersion<S> + ?Sized>(
    f: &F,
    spec: &GridSpec<S>,
    scheme: JetScheme,
    cfg: &FdConfig<S>,
    delta: S,
) -> Result<Vec<TangentConnectionSample<S>>> {
    let mut out = Vec::with_capacity(spec.len());
    for (_, _, x, y) in spec.samples() {
        let fd = frame_field_derivatives(f, x, y, scheme, cfg, delta)?;
        let along = |dvx: &Vec5<S>, dvy: &Vec5<S>, u1: S, u2: S| {
            dvx.scale(u1).add(&dvy.scale(u2))
        };
        let proj = |v: &Vec5<S>| [v.dot(&fd.frame.t), v.dot(&fd.frame.q)];
        let coeffs = [
            proj(&along(&fd.dt_dx, &fd.dt_dy, fd.t1, fd.t2)),
            proj(&along(&fd.dq_dx, &fd.dq_dy, fd.t1, fd.t2)),
            proj(&along(&fd.dt_dx, &fd.dt_dy, fd.q1, fd.q2)),
            proj(&along(&fd.dq_dx, &fd.dq_dy, fd.q1, fd.q2)),
        ];
        out.push(TangentConnectionSample { x, y, coeffs });
    }
    Ok(out)
}

/// Shape-operator entry recomputed from first derivatives of the normal
/// field (the Weingarten route): `<A_xi U, V> = -<D_U xi, V>` for
/// `U, V` in `{T, Q}`. Returns the 2x2 matrix in the `(T, Q)` basis.
pub fn weingarten_shape_operator<S: Real, F: Immersion<S> + ?Sized>(
    f: &F,
    x: S,
    y: S,
    scheme: JetScheme,
    cfg: &FdConfig<S>,
    delta: S,
) -> Result<Mat2<S>> {
    let fd = frame_field_derivatives(f, x, y, scheme, cfg, delta)?;
    let d_t = fd.dxi_dx.scale(fd.t1).add(&fd.dxi_dy.scale(fd.t2));
    let d_q = fd.dxi_dx.scale(fd.q1).add(&fd.dxi_dy.scale(fd.q2));
    Ok(Mat2::new(
        -d_t.dot(&fd.frame.t),
        -d_t.dot(&fd.frame.q),
        -d_q.dot(&fd.frame.t),
        -d_q.dot(&fd.frame.q),
    ))
}


#[cfg(test)]
mod alignment_tests {
    use super::*;
    use crate::family::{FamilySurface, SurfaceParams};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn coarse_grid_frame_flip_detected() {
        // at the upper parameter endpoint the eta field reverses over half an
        // x-period, so a grid step near pi/mu1 must trip the alignment check
        let rho = (1.0 + FRAC_PI_4.cos().powi(2)).sqrt();
        let f = FamilySurface::new(SurfaceParams::new(FRAC_PI_4, rho).unwrap()).unwrap();
        let step = std::f64::consts::PI / f.constants.mu1;
        let spec = GridSpec::new(3, 3, 0.0, 2.0 * step, 0.0, 0.2).unwrap();
        let err = normal_connection_coeffs(
            &f,
            &spec,
            JetScheme::Analytic,
            &FdConfig::default(),
            default_frame_step(),
        )
        .unwrap_err();
        assert!(matches!(err, GeomError::FrameAlignment { .. }), "{err:?}");
    }

    #[test]
    fn curvature_near_rank_degeneracy_errors() {
        // a sphere-slice stencil straddling the coordinate pole has linearly
        // dependent first partials at some stencil point
        let sph = crate::family::TrivialSurface::new(crate::family::TrivialKind::GreatSphereSlice {
            level: 0.0,
        })
        .unwrap();
        let err = gaussian_curvature(
            &sph,
            std::f64::consts::FRAC_PI_2,
            0.3,
            5e-3,
            JetScheme::DualForward,
            &FdConfig::default(),
        )
        .unwrap_err();
        assert!(
            matches!(
                err,
                GeomError::DegenerateImmersion { .. } | GeomError::DegenerateMetric { .. }
            ),
            "{err:?}"
        );
    }
}
