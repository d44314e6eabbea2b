//! The ambient space: the unit 3-sphere crossed with the real line, modelled
//! as a hypersurface of Euclidean 5-space.
//!
//! Coordinates are `(x1, x2, x3, x4, t)`: the first four carry the sphere
//! factor, the fifth is the line factor. The parallel unit field tangent to
//! the line factor is the constant vector `(0,0,0,0,1)`. The product metric
//! is the restriction of the Euclidean inner product.

use crate::error::{GeomError, Result};
use crate::scalar::{lit, Real};

/// Default tolerance for membership of the product manifold.
pub fn eps_membership<S: Real>() -> S {
    lit(1e-10)
}

/// Default exclusion radius around the stereographic pole.
pub fn eps_pole<S: Real>() -> S {
    lit(1e-8)
}

/// A point of Euclidean 5-space; points asserted to lie on the product
/// manifold satisfy `|x1^2 + x2^2 + x3^2 + x4^2 - 1| <= eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point5<S>(pub [S; 5]);

/// A tangent vector of Euclidean 5-space, in the same coordinate frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec5<S>(pub [S; 5]);

impl<S: Real> Point5<S> {
    pub fn new(c: [S; 5]) -> Self {
        Point5(c)
    }

    /// Squared Euclidean norm of the sphere part `(x1..x4)`.
    pub fn sphere_norm_sq(&self) -> S {
        let c = &self.0;
        c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]
    }

    /// `|x1^2+..+x4^2 - 1|`, the membership residual.
    pub fn manifold_residual(&self) -> S {
        (self.sphere_norm_sq() - S::one()).abs()
    }

    /// Errors unless the point lies on the manifold within `eps`.
    pub fn check_on_manifold(&self, eps: S) -> Result<()> {
        let dev = self.manifold_residual();
        if dev > eps {
            return Err(GeomError::OffManifold {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
                tolerance: eps.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// The outward unit normal of the product manifold in 5-space at this
    /// point: the sphere part with a zero line component.
    pub fn position_normal(&self) -> Vec5<S> {
        let c = &self.0;
        Vec5([c[0], c[1], c[2], c[3], S::zero()])
    }

    /// The line coordinate `t`.
    pub fn t(&self) -> S {
        self.0[4]
    }
}

impl<S: Real> Vec5<S> {
    pub fn new(c: [S; 5]) -> Self {
        Vec5(c)
    }

    pub fn zero() -> Self {
        Vec5([S::zero(); 5])
    }

    /// The parallel unit field tangent to the line factor, `(0,0,0,0,1)`.
    pub fn partial_t() -> Self {
        Vec5([S::zero(), S::zero(), S::zero(), S::zero(), S::one()])
    }

    pub fn dot(&self, r: &Self) -> S {
        let (a, b) = (&self.0, &r.0);
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4]
    }

    pub fn norm(&self) -> S {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: S) -> Self {
        let a = &self.0;
        Vec5([a[0] * s, a[1] * s, a[2] * s, a[3] * s, a[4] * s])
    }

    pub fn add(&self, r: &Self) -> Self {
        let (a, b) = (&self.0, &r.0);
        Vec5([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4]])
    }

    pub fn sub(&self, r: &Self) -> Self {
        let (a, b) = (&self.0, &r.0);
        Vec5([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4]])
    }

    /// `self - <self, u> u` for a unit vector `u`.
    pub fn reject_unit(&self, u: &Self) -> Self {
        self.sub(&u.scale(self.dot(u)))
    }

    pub fn normalize(&self) -> Self {
        self.scale(S::one() / self.norm())
    }

    pub fn max_abs_component(&self) -> S {
        self.0
            .iter()
            .fold(S::zero(), |m, &c| if c.abs() > m { c.abs() } else { m })
    }
}

/// Projects `x` onto the tangent space of the sphere factor at `base`:
/// removes the line component and then the radial component.
///
/// The line slot of the result is constructed as exactly zero.
pub fn sphere_projection<S: Real>(x: &Vec5<S>, base: &Point5<S>) -> Result<Vec5<S>> {
    base.check_on_manifold(eps_membership())?;
    let n = base.position_normal();
    let mut s = [x.0[0], x.0[1], x.0[2], x.0[3], S::zero()];
    let radial = x.0[0] * n.0[0] + x.0[1] * n.0[1] + x.0[2] * n.0[2] + x.0[3] * n.0[3];
    for i in 0..4 {
        s[i] = s[i] - radial * n.0[i];
    }
    Ok(Vec5(s))
}

/// Curvature tensor of the product manifold, evaluated as the scalar
/// `<R(X,Y)Z, W>`: the sphere factor carries unit sectional curvature and the
/// line factor is flat, so only the sphere projections of the arguments enter.
pub fn ambient_curvature<S: Real>(
    x: &Vec5<S>,
    y: &Vec5<S>,
    z: &Vec5<S>,
    w: &Vec5<S>,
    base: &Point5<S>,
) -> Result<S> {
    base.check_on_manifold(eps_membership())?;
    let xs = sphere_projection(x, base)?;
    let ys = sphere_projection(y, base)?;
    let zs = sphere_projection(z, base)?;
    let ws = sphere_projection(w, base)?;
    Ok(xs.dot(&ws) * ys.dot(&zs) - xs.dot(&zs) * ys.dot(&ws))
}

/// Stereographic image of the sphere part of `p` from the coordinate pole
/// `e_{pole_index}` (1-based, 1..=4), with the line coordinate passed through.
///
/// The remaining three sphere coordinates, in ascending index order, are each
/// divided by `1 - x_pole`.
pub fn stereographic<S: Real>(p: &Point5<S>, pole_index: usize) -> Result<([S; 3], S)> {
    if !(1..=4).contains(&pole_index) {
        return Err(GeomError::ParameterOutOfRange {
            name: "pole_index",
            value: pole_index as f64,
            min: 1.0,
            max: 4.0,
        });
    }
    p.check_on_manifold(eps_membership())?;
    let k = pole_index - 1;
    // |sphere - e_k|^2 = 2 (1 - x_k) on the unit sphere.
    let dist =
        ((S::one() - p.0[k]) * lit::<S>(2.0)).max(S::zero()).sqrt();
    let eps = eps_pole::<S>();
    if dist <= eps {
        return Err(GeomError::PoleCollision {
            pole: pole_index,
            x: f64::NAN,
            y: f64::NAN,
            distance: dist.to_f64().unwrap_or(f64::NAN),
            tolerance: eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    let denom = S::one() - p.0[k];
    let mut out = [S::zero(); 3];
    let mut j = 0;
    for i in 0..4 {
        if i != k {
            out[j] = p.0[i] / denom;
            j += 1;
        }
    }
    Ok((out, p.t()))
}
