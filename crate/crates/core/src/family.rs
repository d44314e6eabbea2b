//! The classified family of minimal constant-angle surfaces, its derived
//! constants, analytic frames and shape operators, the characteristic-equation
//! frequency inversion, and the canonical trivial-angle surfaces.
//!
//! A family member is selected by `(theta, nu1)` with `theta` in the open
//! interval `(0, pi/2)` and `nu1` in `[1, sqrt(1 + cos^2 theta)]`. The
//! endpoints are the two degenerate cases: `nu1 = 1` gives equal frequencies
//! in both sphere planes, `nu1 = sqrt(1 + cos^2 theta)` splits the immersion
//! into a pure-`x` and a pure-`y` oscillation.

use crate::ambient::{Point5, Vec5};
use crate::diffgeo::{Immersion, Jet2, JetScheme, Mat2};
use crate::error::{GeomError, Result};
use crate::scalar::{lit, Analytic, Dual2, Real};
use serde::Serialize;

/// Half-width of the snap window around the parameter-interval endpoints.
///
/// Inside the window the exact endpoint closed forms are used, which keeps
/// square roots of tiny negative round-off out of the general formulas.
pub fn eps_snap<S: Real>() -> S {
    lit(1e-12)
}

/// Parameters selecting a member of the classified family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfaceParams<S> {
    pub theta: S,
    pub nu1: S,
}

impl<S: Real> SurfaceParams<S> {
    /// Validates `theta` in `(0, pi/2)` and `nu1` in `[1, sqrt(1+cos^2 theta)]`
    /// (endpoints within the snap window accepted).
    pub fn new(theta: S, nu1: S) -> Result<Self> {
        let p = SurfaceParams { theta, nu1 };
        p.validate()?;
        Ok(p)
    }

    /// Upper endpoint of the `nu1` interval.
    pub fn nu1_max(&self) -> S {
        (S::one() + self.theta.cos().powi(2)).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let half_pi = S::FRAC_PI_2();
        if !(self.theta > S::zero() && self.theta < half_pi) || !self.theta.is_finite() {
            return Err(GeomError::ParameterOutOfRange {
                name: "theta",
                value: self.theta.to_f64().unwrap_or(f64::NAN),
                min: 0.0,
                max: std::f64::consts::FRAC_PI_2,
            });
        }
        let hi = self.nu1_max();
        let snap = eps_snap::<S>();
        if !(self.nu1 >= S::one() - snap && self.nu1 <= hi + snap) {
            return Err(GeomError::ParameterOutOfRange {
                name: "nu1",
                value: self.nu1.to_f64().unwrap_or(f64::NAN),
                min: 1.0,
                max: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

/// Constants of the classified immersion derived from `(theta, nu1)`.
///
/// `nu2, mu1, mu2, c1, c2` are the nonnegative roots of the closed-form
/// expressions; `beta1p, beta2p` are the analytic shape-operator entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedConstants<S> {
    pub nu2: S,
    pub mu1: S,
    pub mu2: S,
    pub c1: S,
    pub c2: S,
    pub beta1p: S,
    pub beta2p: S,
}

/// Computes all derived constants, snapping to the exact endpoint closed
/// forms inside the snap window.
pub fn derive_constants<S: Real>(p: &SurfaceParams<S>) -> Result<DerivedConstants<S>> {
    p.validate()?;
    let cos_t = p.theta.cos();
    let sin_t = p.theta.sin();
    let c2t = cos_t * cos_t;
    let rho = p.nu1_max();
    let snap = eps_snap::<S>();

    if (p.nu1 - S::one()).abs() < snap {
        // nu1 = 1
        let r = S::FRAC_1_SQRT_2();
        return Ok(DerivedConstants {
            nu2: S::one(),
            mu1: cos_t,
            mu2: cos_t,
            c1: r,
            c2: r,
            beta1p: S::zero(),
            beta2p: cos_t,
        });
    }
    if (p.nu1 - rho).abs() < snap {
        // nu1 = sqrt(1 + cos^2 theta)
        return Ok(DerivedConstants {
            nu2: S::zero(),
            mu1: rho,
            mu2: S::zero(),
            c1: cos_t / rho,
            c2: S::one() / rho,
            beta1p: cos_t,
            beta2p: S::zero(),
        });
    }

    let nu1sq = p.nu1 * p.nu1;
    let denom = S::one() - nu1sq * sin_t * sin_t;
    // summing the computed denom keeps c1^2 + c2^2 = 1 exact to ulps even
    // when denom itself is formed by cancellation near theta = pi/2
    let big = denom + c2t;
    let nu2 = ((S::one() + c2t - nu1sq) / denom).sqrt();
    let mu1 = (nu1sq * c2t * c2t / denom).sqrt();
    let mu2 = (S::one() + c2t - nu1sq).sqrt();
    let c1 = (denom / big).sqrt();
    let c2 = (c2t / big).sqrt();
    let beta1p = (nu1sq - S::one()) * cos_t / denom.sqrt();
    let beta2p = p.nu1 * cos_t * (S::one() + c2t - nu1sq).sqrt() / denom.sqrt();
    Ok(DerivedConstants { nu2, mu1, mu2, c1, c2, beta1p, beta2p })
}

/// The five analytic frame vectors of a family member at one point.
#[derive(Clone, Copy, Debug)]
pub struct AnalyticFrame<S> {
    pub fx: Vec5<S>,
    pub fy: Vec5<S>,
    pub xi: Vec5<S>,
    pub eta: Vec5<S>,
    pub n: Vec5<S>,
}

impl<S: Real> AnalyticFrame<S> {
    /// Maximum deviation of the Gram matrix of the five vectors from I5.
    pub fn gram_identity_residual(&self) -> S {
        let vs = [&self.fx, &self.fy, &self.xi, &self.eta, &self.n];
        let mut r = S::zero();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { S::one() } else { S::zero() };
                let d = (vs[i].dot(vs[j]) - want).abs();
                if d > r {
                    r = d;
                }
            }
        }
        r
    }
}

/// A member of the classified family, ready for evaluation.
#[derive(Clone, Copy, Debug)]
pub struct FamilySurface<S> {
    pub params: SurfaceParams<S>,
    pub constants: DerivedConstants<S>,
}

impl<S: Real> FamilySurface<S> {
    pub fn new(params: SurfaceParams<S>) -> Result<Self> {
        let constants = derive_constants(&params)?;
        Ok(FamilySurface { params, constants })
    }

    /// Evaluates the immersion over any scalar in the analytic family;
    /// instantiating with [`Dual2`] yields exact derivative propagation.
    pub fn immerse_in<T: Analytic<S>>(&self, x: T, y: T) -> [T; 5] {
        let k = &self.constants;
        let p1 = T::constant(k.mu1) * x + T::constant(k.nu2) * y;
        let p2 = T::constant(k.mu2) * x - T::constant(self.params.nu1) * y;
        let c1 = T::constant(k.c1);
        let c2 = T::constant(k.c2);
        [
            c1 * p1.cos(),
            c1 * p1.sin(),
            c2 * p2.cos(),
            c2 * p2.sin(),
            x * T::constant(self.params.theta.sin()),
        ]
    }

    /// The immersion value; the fifth coordinate is `x sin(theta)`.
    pub fn immerse(&self, x: S, y: S) -> Point5<S> {
        Point5(self.immerse_in::<S>(x, y))
    }

    fn phases(&self, x: S, y: S) -> (S, S) {
        let k = &self.constants;
        (k.mu1 * x + k.nu2 * y, k.mu2 * x - self.params.nu1 * y)
    }

    /// The analytic orthonormal frame `(F_x, F_y, xi, eta, N)`.
    pub fn analytic_frame(&self, x: S, y: S) -> AnalyticFrame<S> {
        let k = &self.constants;
        let (p1, p2) = self.phases(x, y);
        let (s1, c1v) = (p1.sin(), p1.cos());
        let (s2, c2v) = (p2.sin(), p2.cos());
        let (sin_t, cos_t) = (self.params.theta.sin(), self.params.theta.cos());
        let tan_t = sin_t / cos_t;
        let z = S::zero();
        AnalyticFrame {
            fx: Vec5([
                -k.mu1 * k.c1 * s1,
                k.mu1 * k.c1 * c1v,
                -k.mu2 * k.c2 * s2,
                k.mu2 * k.c2 * c2v,
                sin_t,
            ]),
            fy: Vec5([
                -k.nu2 * k.c1 * s1,
                k.nu2 * k.c1 * c1v,
                self.params.nu1 * k.c2 * s2,
                -self.params.nu1 * k.c2 * c2v,
                z,
            ]),
            xi: Vec5([
                k.mu1 * k.c1 * tan_t * s1,
                -k.mu1 * k.c1 * tan_t * c1v,
                k.mu2 * k.c2 * tan_t * s2,
                -k.mu2 * k.c2 * tan_t * c2v,
                cos_t,
            ]),
            eta: Vec5([-k.c2 * c1v, -k.c2 * s1, k.c1 * c2v, k.c1 * s2, z]),
            n: Vec5([k.c1 * c1v, k.c1 * s1, k.c2 * c2v, k.c2 * s2, z]),
        }
    }

    /// First partials of `eta`, needed by the first-order normal equations.
    pub fn eta_partials(&self, x: S, y: S) -> (Vec5<S>, Vec5<S>) {
        let k = &self.constants;
        let (p1, p2) = self.phases(x, y);
        let (s1, c1v) = (p1.sin(), p1.cos());
        let (s2, c2v) = (p2.sin(), p2.cos());
        let z = S::zero();
        let ex = Vec5([
            k.c2 * k.mu1 * s1,
            -k.c2 * k.mu1 * c1v,
            -k.c1 * k.mu2 * s2,
            k.c1 * k.mu2 * c2v,
            z,
        ]);
        let ey = Vec5([
            k.c2 * k.nu2 * s1,
            -k.c2 * k.nu2 * c1v,
            k.c1 * self.params.nu1 * s2,
            -k.c1 * self.params.nu1 * c2v,
            z,
        ]);
        (ex, ey)
    }

    /// Closed-form fourth pure derivatives `(d^4/dx^4, d^4/dy^4)`.
    pub fn fourth_partials(&self, x: S, y: S) -> (Vec5<S>, Vec5<S>) {
        let k = &self.constants;
        let (p1, p2) = self.phases(x, y);
        let (s1, c1v) = (p1.sin(), p1.cos());
        let (s2, c2v) = (p2.sin(), p2.cos());
        let z = S::zero();
        let m14 = k.mu1.powi(4);
        let m24 = k.mu2.powi(4);
        let n14 = self.params.nu1.powi(4);
        let n24 = k.nu2.powi(4);
        (
            Vec5([k.c1 * m14 * c1v, k.c1 * m14 * s1, k.c2 * m24 * c2v, k.c2 * m24 * s2, z]),
            Vec5([k.c1 * n24 * c1v, k.c1 * n24 * s1, k.c2 * n14 * c2v, k.c2 * n14 * s2, z]),
        )
    }

    fn closed_form_jet(&self, x: S, y: S) -> Jet2<S> {
        let k = &self.constants;
        let (p1, p2) = self.phases(x, y);
        let (s1, c1v) = (p1.sin(), p1.cos());
        let (s2, c2v) = (p2.sin(), p2.cos());
        let sin_t = self.params.theta.sin();
        let nu1 = self.params.nu1;
        let z = S::zero();
        Jet2 {
            x,
            y,
            f: Point5([k.c1 * c1v, k.c1 * s1, k.c2 * c2v, k.c2 * s2, x * sin_t]),
            fx: Vec5([
                -k.c1 * k.mu1 * s1,
                k.c1 * k.mu1 * c1v,
                -k.c2 * k.mu2 * s2,
                k.c2 * k.mu2 * c2v,
                sin_t,
            ]),
            fy: Vec5([
                -k.c1 * k.nu2 * s1,
                k.c1 * k.nu2 * c1v,
                k.c2 * nu1 * s2,
                -k.c2 * nu1 * c2v,
                z,
            ]),
            fxx: Vec5([
                -k.c1 * k.mu1 * k.mu1 * c1v,
                -k.c1 * k.mu1 * k.mu1 * s1,
                -k.c2 * k.mu2 * k.mu2 * c2v,
                -k.c2 * k.mu2 * k.mu2 * s2,
                z,
            ]),
            fxy: Vec5([
                -k.c1 * k.mu1 * k.nu2 * c1v,
                -k.c1 * k.mu1 * k.nu2 * s1,
                k.c2 * k.mu2 * nu1 * c2v,
                k.c2 * k.mu2 * nu1 * s2,
                z,
            ]),
            fyy: Vec5([
                -k.c1 * k.nu2 * k.nu2 * c1v,
                -k.c1 * k.nu2 * k.nu2 * s1,
                -k.c2 * nu1 * nu1 * c2v,
                -k.c2 * nu1 * nu1 * s2,
                z,
            ]),
            source: JetScheme::Analytic,
        }
    }
}

impl<S: Real> Immersion<S> for FamilySurface<S> {
    fn eval(&self, x: S, y: S) -> Point5<S> {
        self.immerse(x, y)
    }

    fn analytic_jet(&self, x: S, y: S) -> Option<Jet2<S>> {
        Some(self.closed_form_jet(x, y))
    }

    fn dual_jet(&self, x: S, y: S) -> Option<Jet2<S>> {
        Some(dual_jet_of(|a, b| self.immerse_in(a, b), x, y))
    }
}

/// Evaluates a closed form over [`Dual2`] variables and packs the result.
pub fn dual_jet_of<S: Real>(
    eval: impl Fn(Dual2<S>, Dual2<S>) -> [Dual2<S>; 5],
    x: S,
    y: S,
) -> Jet2<S> {
    let out = eval(Dual2::var_x(x), Dual2::var_y(y));
    let pick = |g: fn(&Dual2<S>) -> S| Vec5([g(&out[0]), g(&out[1]), g(&out[2]), g(&out[3]), g(&out[4])]);
    Jet2 {
        x,
        y,
        f: Point5([out[0].v, out[1].v, out[2].v, out[3].v, out[4].v]),
        fx: pick(|d| d.dx),
        fy: pick(|d| d.dy),
        fxx: pick(|d| d.dxx),
        fxy: pick(|d| d.dxy),
        fyy: pick(|d| d.dyy),
        source: JetScheme::DualForward,
    }
}

/// Analytic shape operators of a family member in the `(F_x, F_y)` basis:
/// the one with respect to `xi` vanishes, the one with respect to `eta` is
/// the symmetric trace-free matrix built from `beta1p, beta2p`.
///
/// Sign convention: `eta` is oriented so that both entries are nonnegative
/// on the whole parameter domain; numerical frames fixed by the
/// frame-determinant rule may see the simultaneous opposite sign.
pub fn analytic_shape_operators<S: Real>(p: &SurfaceParams<S>) -> Result<(Mat2<S>, Mat2<S>)> {
    let k = derive_constants(p)?;
    Ok((
        Mat2::zero(),
        Mat2::new(k.beta1p, k.beta2p, k.beta2p, -k.beta1p),
    ))
}

/// Frequencies recovered from shape data through the characteristic
/// equations, together with both quartic discriminants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frequencies<S> {
    pub mu1: S,
    pub mu2: S,
    pub nu1: S,
    pub nu2: S,
    pub delta1: S,
    pub delta2: S,
}

/// Tolerance on the shape-data constraint `beta1^2 + beta2^2 = cos^2 theta`.
pub fn eps_constraint<S: Real>() -> S {
    lit(1e-9)
}

/// Solves the two characteristic quartics for the oscillation frequencies.
///
/// The quartics are biquadratic with positive coefficient sums, so their
/// roots in `z^2` are `-mu^2` and `-nu^2`; the larger magnitudes are taken
/// by the `b + sqrt(Delta)` branch and the smaller ones through the product
/// of roots, which stays exact when `beta2 = 0`.
pub fn invert_frequencies<S: Real>(beta1: S, beta2: S, theta: S) -> Result<Frequencies<S>> {
    if !(theta > S::zero() && theta < S::FRAC_PI_2()) {
        return Err(GeomError::ParameterOutOfRange {
            name: "theta",
            value: theta.to_f64().unwrap_or(f64::NAN),
            min: 0.0,
            max: std::f64::consts::FRAC_PI_2,
        });
    }
    let c2t = theta.cos() * theta.cos();
    let dev = beta1 * beta1 + beta2 * beta2 - c2t;
    let eps = eps_constraint::<S>();
    if dev.abs() > eps {
        return Err(GeomError::InconsistentInput {
            deviation: dev.to_f64().unwrap_or(f64::NAN),
            tolerance: eps.to_f64().unwrap_or(f64::NAN),
        });
    }

    let half = lit::<S>(0.5);
    let two = lit::<S>(2.0);

    // Each discriminant b^2 - 4c expands into a sum of nonnegative terms;
    // evaluating that form avoids the cancellation that would otherwise
    // swamp the square root near the double-root endpoint.
    let u = beta1 * beta1;
    let v = beta2 * beta2;

    let p = u / c2t;
    let b1 = p + v + c2t;
    let c1 = v * c2t;
    let delta1 = (v - c2t) * (v - c2t) + p * (p + two * v + two * c2t);
    let mu1_sq = (b1 + delta1.sqrt()) * half;
    let mu2_sq = c1 / mu1_sq;

    let w = v / c2t;
    let b2 = w + u + S::one();
    let c2 = w;
    let delta2 = (w - S::one()) * (w - S::one()) + u * (u + two * w + two);
    let nu1_sq = (b2 + delta2.sqrt()) * half;
    let nu2_sq = c2 / nu1_sq;

    // The two quartics share their discriminant exactly on the constraint
    // surface. Two effects widen the comparison: the near-cancelling O(1)
    // expressions carry absolute roundoff on the scale of b^2, and an input
    // that satisfies the constraint only within `dev` legitimately moves
    // Delta1 - Delta2 by dev times the sensitivity bound below.
    let scale = (b1 * b1).max(b2 * b2).max(S::one());
    let sensitivity = lit::<S>(2.0) * (b1 + b2 + lit::<S>(2.0)) * (S::one() + S::one() / c2t);
    let tol_delta = lit::<S>(1e-12) * scale + dev.abs() * sensitivity;
    if (delta1 - delta2).abs() > tol_delta {
        return Err(GeomError::DiscriminantMismatch {
            delta1: delta1.to_f64().unwrap_or(f64::NAN),
            delta2: delta2.to_f64().unwrap_or(f64::NAN),
            tolerance: tol_delta.to_f64().unwrap_or(f64::NAN),
        });
    }

    Ok(Frequencies {
        mu1: mu1_sq.sqrt(),
        mu2: mu2_sq.sqrt(),
        nu1: nu1_sq.sqrt(),
        nu2: nu2_sq.sqrt(),
        delta1,
        delta2,
    })
}

/// The canonical trivial-angle surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TrivialKind<S> {
    /// A great 2-sphere inside a level slice (angle zero).
    GreatSphereSlice { level: S },
    /// The flat minimal torus inside a level slice (angle zero).
    CliffordTorusSlice { level: S },
    /// A great circle crossed with the line factor (angle pi/2).
    GreatCircleCylinder,
}

impl<S: Real> TrivialKind<S> {
    pub fn validate(&self) -> Result<()> {
        let level = match self {
            TrivialKind::GreatSphereSlice { level } | TrivialKind::CliffordTorusSlice { level } => {
                *level
            }
            TrivialKind::GreatCircleCylinder => S::zero(),
        };
        if !level.is_finite() {
            return Err(GeomError::ParameterOutOfRange {
                name: "level",
                value: level.to_f64().unwrap_or(f64::NAN),
                min: f64::NEG_INFINITY,
                max: f64::INFINITY,
            });
        }
        Ok(())
    }

    /// The constant angle this surface realizes.
    pub fn expected_angle(&self) -> S {
        match self {
            TrivialKind::GreatCircleCylinder => S::FRAC_PI_2(),
            _ => S::zero(),
        }
    }

    /// The intrinsic curvature this surface realizes.
    pub fn expected_curvature(&self) -> S {
        match self {
            TrivialKind::GreatSphereSlice { .. } => S::one(),
            _ => S::zero(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TrivialKind::GreatSphereSlice { .. } => "great-sphere",
            TrivialKind::CliffordTorusSlice { .. } => "clifford-torus",
            TrivialKind::GreatCircleCylinder => "great-circle-cylinder",
        }
    }
}

/// An evaluable trivial-angle surface.
#[derive(Clone, Copy, Debug)]
pub struct TrivialSurface<S> {
    pub kind: TrivialKind<S>,
}

impl<S: Real> TrivialSurface<S> {
    pub fn new(kind: TrivialKind<S>) -> Result<Self> {
        kind.validate()?;
        Ok(TrivialSurface { kind })
    }

    pub fn eval_in<T: Analytic<S>>(&self, x: T, y: T) -> [T; 5] {
        match self.kind {
            TrivialKind::GreatSphereSlice { level } => {
                let t0 = T::constant(level);
                [
                    x.cos() * y.cos(),
                    x.cos() * y.sin(),
                    x.sin(),
                    T::constant(S::zero()),
                    t0,
                ]
            }
            TrivialKind::CliffordTorusSlice { level } => {
                let r = T::constant(S::FRAC_1_SQRT_2());
                [
                    r * x.cos(),
                    r * x.sin(),
                    r * y.cos(),
                    r * y.sin(),
                    T::constant(level),
                ]
            }
            TrivialKind::GreatCircleCylinder => [
                x.cos(),
                x.sin(),
                T::constant(S::zero()),
                T::constant(S::zero()),
                y,
            ],
        }
    }
}

impl<S: Real> Immersion<S> for TrivialSurface<S> {
    fn eval(&self, x: S, y: S) -> Point5<S> {
        Point5(self.eval_in::<S>(x, y))
    }

    fn dual_jet(&self, x: S, y: S) -> Option<Jet2<S>> {
        Some(dual_jet_of(|a, b| self.eval_in(a, b), x, y))
    }
}

/// One point of a trivial-angle surface.
pub fn trivial_surface<S: Real>(kind: TrivialKind<S>, x: S, y: S) -> Result<Point5<S>> {
    Ok(TrivialSurface::new(kind)?.eval(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn params(theta: f64, nu1: f64) -> SurfaceParams<f64> {
        SurfaceParams::new(theta, nu1).unwrap()
    }

    // frozen oracle values for theta = pi/4, nu1 = 1.1
    const NU2_11: f64 = 0.85684141776052902;
    const MU1_11: f64 = 0.87511301259330305;
    const MU2_11: f64 = 0.5385164807134504;
    const C1_11: f64 = 0.66433484187035157;
    const C2_11: f64 = 0.74743509275193587;
    const B1P_11: f64 = 0.23626845919446502;
    const B2P_11: f64 = 0.66646621458996211;

    #[test]
    fn case2_constants() {
        let k = derive_constants(&params(FRAC_PI_4, 1.0)).unwrap();
        let c = FRAC_PI_4.cos();
        assert_eq!(k.nu2, 1.0);
        assert_eq!(k.mu1, c);
        assert_eq!(k.mu2, c);
        assert_eq!(k.c1, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(k.c2, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(k.beta1p, 0.0);
        assert_eq!(k.beta2p, c);
    }

    #[test]
    fn case1_constants() {
        let rho = 1.5f64.sqrt();
        let k = derive_constants(&params(FRAC_PI_4, rho)).unwrap();
        assert_eq!(k.nu2, 0.0);
        assert_eq!(k.mu2, 0.0);
        assert!((k.mu1 - rho).abs() < 1e-15);
        assert!((k.c1 - FRAC_PI_4.cos() / rho).abs() < 1e-15);
        assert!((k.c2 - 1.0 / rho).abs() < 1e-15);
        assert_eq!(k.beta2p, 0.0);
        assert!((k.beta1p - FRAC_PI_4.cos()).abs() < 1e-15);
    }

    #[test]
    fn interior_constants_match_oracle() {
        let k = derive_constants(&params(FRAC_PI_4, 1.1)).unwrap();
        assert!((k.nu2 - NU2_11).abs() < 1e-15);
        assert!((k.mu1 - MU1_11).abs() < 1e-15);
        assert!((k.mu2 - MU2_11).abs() < 1e-15);
        assert!((k.c1 - C1_11).abs() < 1e-15);
        assert!((k.c2 - C2_11).abs() < 1e-15);
        assert!((k.beta1p - B1P_11).abs() < 1e-15);
        assert!((k.beta2p - B2P_11).abs() < 1e-15);
    }

    #[test]
    fn constants_invariants() {
        for &(theta, nu1) in &[(FRAC_PI_4, 1.1), (0.3, 1.2), (1.2, 1.05), (FRAC_PI_4, 1.0)] {
            let p = params(theta, nu1);
            let k = derive_constants(&p).unwrap();
            let c2t = theta.cos().powi(2);
            assert!((k.c1.powi(2) + k.c2.powi(2) - 1.0).abs() < 1e-14);
            assert!((k.mu1.powi(2) + k.nu2.powi(2) - 1.0 - c2t).abs() < 1e-12);
            assert!((k.mu2.powi(2) + nu1.powi(2) - 1.0 - c2t).abs() < 1e-12);
            assert!((k.beta1p.powi(2) + k.beta2p.powi(2) - c2t).abs() < 1e-12);
        }
    }

    #[test]
    fn nu1_out_of_range_names_bound() {
        let err = SurfaceParams::new(FRAC_PI_4, 1.3).unwrap_err();
        match err {
            GeomError::ParameterOutOfRange { name, max, .. } => {
                assert_eq!(name, "nu1");
                assert!((max - 1.5f64.sqrt()).abs() < 1e-15);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn theta_out_of_range_rejected() {
        assert!(SurfaceParams::new(0.0, 1.0).is_err());
        assert!(SurfaceParams::new(FRAC_PI_2, 1.0).is_err());
        assert!(SurfaceParams::new(-0.4, 1.0).is_err());
    }

    #[test]
    fn case_boundary_continuity() {
        // approaching each endpoint from just outside the snap window matches
        // the snapped closed form; the constants vanishing at the upper
        // endpoint have a square-root cusp there, so their squares (which are
        // differentiable in nu1) carry the comparison.
        let delta = 1.5e-12;
        for theta in [0.4, FRAC_PI_4, 1.1] {
            let k_end = derive_constants(&params(theta, 1.0)).unwrap();
            let k_near = derive_constants(&params(theta, 1.0 + delta)).unwrap();
            for (a, b) in [
                (k_near.nu2, k_end.nu2),
                (k_near.mu1, k_end.mu1),
                (k_near.mu2, k_end.mu2),
                (k_near.c1, k_end.c1),
                (k_near.c2, k_end.c2),
                (k_near.beta1p, k_end.beta1p),
                (k_near.beta2p, k_end.beta2p),
            ] {
                assert!((a - b).abs() < 1e-10, "near 1: {a} vs {b}");
            }

            let rho = (1.0 + theta.cos().powi(2)).sqrt();
            let k_end = derive_constants(&params(theta, rho)).unwrap();
            let k_near = derive_constants(&params(theta, rho - delta)).unwrap();
            for (a, b) in [
                (k_near.mu1, k_end.mu1),
                (k_near.c1, k_end.c1),
                (k_near.c2, k_end.c2),
                (k_near.beta1p, k_end.beta1p),
            ] {
                assert!((a - b).abs() < 1e-10, "near rho: {a} vs {b}");
            }
            for (a, b) in [
                (k_near.nu2, k_end.nu2),
                (k_near.mu2, k_end.mu2),
                (k_near.beta2p, k_end.beta2p),
            ] {
                assert!((a * a - b * b).abs() < 1e-10, "near rho (squared): {a} vs {b}");
            }
        }
    }

    #[test]
    fn immerse_origin_is_c1_0_c2_0_0() {
        let f = FamilySurface::new(params(FRAC_PI_4, 1.1)).unwrap();
        let p = f.immerse(0.0, 0.0);
        assert_eq!(p.0, [f.constants.c1, 0.0, f.constants.c2, 0.0, 0.0]);
    }

    #[test]
    fn immerse_case2_origin() {
        let f = FamilySurface::new(params(FRAC_PI_4, 1.0)).unwrap();
        let p = f.immerse(0.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(p.0, [r, 0.0, r, 0.0, 0.0]);
    }

    #[test]
    fn immerse_fifth_coordinate() {
        let f = FamilySurface::new(params(FRAC_PI_4, 1.1)).unwrap();
        let p = f.immerse(1.0, 1.0);
        assert_eq!(p.0[4], FRAC_PI_4.sin());
        assert!(p.manifold_residual() < 1e-14);
    }

    #[test]
    fn immerse_stays_on_manifold() {
        for &(theta, nu1) in &[(0.2, 1.0), (FRAC_PI_4, 1.1), (1.3, 1.02)] {
            let f = FamilySurface::new(params(theta, nu1)).unwrap();
            for i in 0..7 {
                for j in 0..7 {
                    let (x, y) = (i as f64 * 0.9 - 3.0, j as f64 * 1.1 - 4.0);
                    assert!(f.immerse(x, y).manifold_residual() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn analytic_frame_orthonormal_and_adapted() {
        let f = FamilySurface::new(params(FRAC_PI_4, 1.1)).unwrap();
        let fr = f.analytic_frame(0.3, -0.7);
        assert!(fr.gram_identity_residual() < 1e-12);
        assert_eq!(fr.xi.0[4], FRAC_PI_4.cos());
        assert_eq!(fr.eta.0[4], 0.0);
        // dt = sin(theta) F_x + cos(theta) xi, componentwise
        let dt = fr
            .fx
            .scale(FRAC_PI_4.sin())
            .add(&fr.xi.scale(FRAC_PI_4.cos()));
        for i in 0..4 {
            assert!(dt.0[i].abs() < 1e-12);
        }
        assert!((dt.0[4] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_shape_operator_cases() {
        let (a_xi, a_eta) = analytic_shape_operators(&params(FRAC_PI_4, 1.0)).unwrap();
        assert_eq!(a_xi.max_abs(), 0.0);
        assert_eq!(a_eta.m[0][0], 0.0);
        assert_eq!(a_eta.m[0][1], FRAC_PI_4.cos());

        let (_, a_eta) = analytic_shape_operators(&params(FRAC_PI_4, 1.5f64.sqrt())).unwrap();
        assert_eq!(a_eta.m[0][1], 0.0);
        assert!((a_eta.m[0][0] - FRAC_PI_4.cos()).abs() < 1e-15);

        let (_, a_eta) = analytic_shape_operators(&params(FRAC_PI_4, 1.1)).unwrap();
        assert!((a_eta.m[0][0] - B1P_11).abs() < 1e-15);
        assert!((a_eta.m[0][1] - B2P_11).abs() < 1e-15);
        assert_eq!(a_eta.trace(), 0.0);
    }

    #[test]
    fn invert_case1_input() {
        let theta = FRAC_PI_4;
        let fq = invert_frequencies(theta.cos(), 0.0, theta).unwrap();
        let rho = (1.0 + theta.cos().powi(2)).sqrt();
        assert!((fq.nu1 - rho).abs() < 1e-15);
        assert_eq!(fq.nu2, 0.0);
        assert!((fq.mu1 - rho).abs() < 1e-15);
        assert_eq!(fq.mu2, 0.0);
    }

    #[test]
    fn invert_case2_input() {
        let theta = FRAC_PI_4;
        let fq = invert_frequencies(0.0, theta.cos(), theta).unwrap();
        assert!((fq.nu1 - 1.0).abs() < 1e-12);
        assert!((fq.nu2 - 1.0).abs() < 1e-12);
        assert!((fq.mu1 - theta.cos()).abs() < 1e-12);
        assert!((fq.mu2 - theta.cos()).abs() < 1e-12);
    }

    #[test]
    fn invert_interior_roundtrip() {
        let fq = invert_frequencies(B1P_11, B2P_11, FRAC_PI_4).unwrap();
        assert!((fq.nu1 - 1.1).abs() < 1e-12);
        assert!((fq.nu2 - NU2_11).abs() < 1e-12);
        assert!((fq.mu1 - MU1_11).abs() < 1e-12);
        assert!((fq.mu2 - MU2_11).abs() < 1e-12);
        // Vieta sum: mu1^2 + mu2^2 equals the quadratic coefficient
        assert!((fq.mu1.powi(2) + fq.mu2.powi(2) - 1.0558227848101266).abs() < 1e-12);
        // equal discriminants
        let rel = (fq.delta1 - fq.delta2).abs() / fq.delta1.max(fq.delta2);
        assert!(rel < 1e-12);
    }

    #[test]
    fn invert_rejects_inconsistent_input() {
        let err = invert_frequencies(0.5, 0.6, FRAC_PI_4).unwrap_err();
        assert!(matches!(err, GeomError::InconsistentInput { .. }));
    }

    #[test]
    fn periodicity_case2_and_case1() {
        // nu1 = 1: both phases advance by a multiple of 2 pi under y -> y + 2 pi
        let f = FamilySurface::new(params(FRAC_PI_4, 1.0)).unwrap();
        for i in 0..5 {
            let (x, y) = (0.3 * i as f64, -0.8 + 0.5 * i as f64);
            let a = f.immerse(x, y);
            let b = f.immerse(x, y + 2.0 * PI);
            for c in 0..5 {
                assert!((a.0[c] - b.0[c]).abs() < 1e-12);
            }
        }
        // case 1: period 2 pi / nu1 in y
        let rho = 1.5f64.sqrt();
        let f = FamilySurface::new(params(FRAC_PI_4, rho)).unwrap();
        for i in 0..5 {
            let (x, y) = (0.3 * i as f64, -0.8 + 0.5 * i as f64);
            let a = f.immerse(x, y);
            let b = f.immerse(x, y + 2.0 * PI / rho);
            for c in 0..5 {
                assert!((a.0[c] - b.0[c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trivial_cylinder_formula() {
        let p = trivial_surface(TrivialKind::GreatCircleCylinder, 0.0, 2.5).unwrap();
        assert_eq!(p.0, [1.0, 0.0, 0.0, 0.0, 2.5]);
    }

    #[test]
    fn trivial_clifford_formula() {
        let p = trivial_surface(TrivialKind::CliffordTorusSlice { level: 0.0 }, 0.0, 0.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(p.0, [r, 0.0, r, 0.0, 0.0]);
    }

    #[test]
    fn trivial_on_manifold() {
        for kind in [
            TrivialKind::GreatSphereSlice { level: 1.0 },
            TrivialKind::CliffordTorusSlice { level: -2.0 },
            TrivialKind::GreatCircleCylinder,
        ] {
            for i in 0..5 {
                for j in 0..5 {
                    let (x, y) = (0.7 * i as f64 - 1.0, 0.9 * j as f64 - 2.0);
                    let p = trivial_surface(kind, x, y).unwrap();
                    assert!(p.manifold_residual() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn trivial_rejects_nonfinite_level() {
        assert!(TrivialSurface::new(TrivialKind::GreatSphereSlice { level: f64::NAN }).is_err());
    }
}
