//! Scalar abstraction: the toolkit is generic over the floating-point type.
//!
//! [`Real`] is the leaf scalar (`f32` or `f64`). [`Analytic`] is the wider
//! family of scalars a closed-form immersion can be evaluated over; besides
//! the reals themselves it is implemented by [`Dual2`], a two-variable
//! second-order jet scalar that propagates exact first and second partial
//! derivatives through arithmetic and trigonometry.

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// Converts an `f64` literal into the working scalar type.
#[inline]
pub(crate) fn lit<S: Real>(v: f64) -> S {
    S::from_f64(v).expect("literal representable in scalar type")
}

/// Scalar family over which closed-form immersions can be evaluated.
///
/// Implemented by the reals (identity lift) and by [`Dual2`] (forward-mode
/// derivative propagation). Only the operations the closed forms actually
/// use are required.
pub trait Analytic<S: Real>:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Lifts a real constant into the scalar family.
    fn constant(c: S) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
}

impl<S: Real> Analytic<S> for S {
    #[inline]
    fn constant(c: S) -> Self {
        c
    }
    #[inline]
    fn sin(self) -> Self {
        Float::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        Float::cos(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        Float::sqrt(self)
    }
}

/// Second-order forward-mode jet in two independent variables.
///
/// Carries a value together with its first partials `(dx, dy)` and second
/// partials `(dxx, dxy, dyy)`; arithmetic applies the chain rule so that
/// evaluating a closed-form map at [`Dual2::var_x`]/[`Dual2::var_y`] yields
/// machine-exact derivatives of the composite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual2<S> {
    pub v: S,
    pub dx: S,
    pub dy: S,
    pub dxx: S,
    pub dxy: S,
    pub dyy: S,
}

impl<S: Real> Dual2<S> {
    /// Constant jet: all derivative slots zero.
    pub fn constant(v: S) -> Self {
        Dual2 {
            v,
            dx: S::zero(),
            dy: S::zero(),
            dxx: S::zero(),
            dxy: S::zero(),
            dyy: S::zero(),
        }
    }

    /// The first independent variable seated at `x0`.
    pub fn var_x(x0: S) -> Self {
        Dual2 {
            v: x0,
            dx: S::one(),
            ..Self::constant(x0)
        }
    }

    /// The second independent variable seated at `y0`.
    pub fn var_y(y0: S) -> Self {
        Dual2 {
            v: y0,
            dy: S::one(),
            ..Self::constant(y0)
        }
    }

    fn chain(self, f: S, f1: S, f2: S) -> Self {
        // f(v): first and second derivatives of the outer function supplied.
        Dual2 {
            v: f,
            dx: f1 * self.dx,
            dy: f1 * self.dy,
            dxx: f2 * self.dx * self.dx + f1 * self.dxx,
            dxy: f2 * self.dx * self.dy + f1 * self.dxy,
            dyy: f2 * self.dy * self.dy + f1 * self.dyy,
        }
    }
}

impl<S: Real> Add for Dual2<S> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Dual2 {
            v: self.v + r.v,
            dx: self.dx + r.dx,
            dy: self.dy + r.dy,
            dxx: self.dxx + r.dxx,
            dxy: self.dxy + r.dxy,
            dyy: self.dyy + r.dyy,
        }
    }
}

impl<S: Real> Sub for Dual2<S> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Dual2 {
            v: self.v - r.v,
            dx: self.dx - r.dx,
            dy: self.dy - r.dy,
            dxx: self.dxx - r.dxx,
            dxy: self.dxy - r.dxy,
            dyy: self.dyy - r.dyy,
        }
    }
}

impl<S: Real> Mul for Dual2<S> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        let two = lit::<S>(2.0);
        Dual2 {
            v: self.v * r.v,
            dx: self.dx * r.v + self.v * r.dx,
            dy: self.dy * r.v + self.v * r.dy,
            dxx: self.dxx * r.v + two * self.dx * r.dx + self.v * r.dxx,
            dxy: self.dxy * r.v + self.dx * r.dy + self.dy * r.dx + self.v * r.dxy,
            dyy: self.dyy * r.v + two * self.dy * r.dy + self.v * r.dyy,
        }
    }
}

impl<S: Real> Div for Dual2<S> {
    type Output = Self;
    fn div(self, r: Self) -> Self {
        let inv = r.chain(
            S::one() / r.v,
            -S::one() / (r.v * r.v),
            lit::<S>(2.0) / (r.v * r.v * r.v),
        );
        self * inv
    }
}

impl<S: Real> Neg for Dual2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual2 {
            v: -self.v,
            dx: -self.dx,
            dy: -self.dy,
            dxx: -self.dxx,
            dxy: -self.dxy,
            dyy: -self.dyy,
        }
    }
}

impl<S: Real> Analytic<S> for Dual2<S> {
    fn constant(c: S) -> Self {
        Dual2::constant(c)
    }

    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }

    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }

    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        let half = lit::<S>(0.5);
        self.chain(r, half / r, -half * half / (r * r * r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dual_product_rule() {
        // g(x,y) = x^2 * y at (3, 2)
        let x = Dual2::var_x(3.0f64);
        let y = Dual2::var_y(2.0f64);
        let g = x * x * y;
        assert_eq!(g.v, 18.0);
        assert_eq!(g.dx, 12.0); // 2xy
        assert_eq!(g.dy, 9.0); // x^2
        assert_eq!(g.dxx, 4.0); // 2y
        assert_eq!(g.dxy, 6.0); // 2x
        assert_eq!(g.dyy, 0.0);
    }

    #[test]
    fn dual_trig_chain_rule() {
        // g(x,y) = sin(2x + 3y) at (0.4, -0.2)
        let (x0, y0) = (0.4f64, -0.2f64);
        let x = Dual2::var_x(x0);
        let y = Dual2::var_y(y0);
        let two = Dual2::constant(2.0);
        let three = Dual2::constant(3.0);
        let g = (two * x + three * y).sin();
        let p = 2.0 * x0 + 3.0 * y0;
        assert!(close(g.v, p.sin(), 1e-15));
        assert!(close(g.dx, 2.0 * p.cos(), 1e-15));
        assert!(close(g.dy, 3.0 * p.cos(), 1e-15));
        assert!(close(g.dxx, -4.0 * p.sin(), 1e-15));
        assert!(close(g.dxy, -6.0 * p.sin(), 1e-15));
        assert!(close(g.dyy, -9.0 * p.sin(), 1e-15));
    }

    #[test]
    fn dual_division_and_sqrt() {
        // g(x,y) = sqrt(x) / y at (4, 2)
        let x = Dual2::var_x(4.0f64);
        let y = Dual2::var_y(2.0f64);
        let g = x.sqrt() / y;
        assert!(close(g.v, 1.0, 1e-15));
        assert!(close(g.dx, 0.125, 1e-15)); // 1/(2 sqrt(x) y)
        assert!(close(g.dy, -0.5, 1e-15)); // -sqrt(x)/y^2
        assert!(close(g.dxx, -1.0 / 64.0, 1e-15));
        assert!(close(g.dxy, -1.0 / 16.0, 1e-15));
        assert!(close(g.dyy, 0.5, 1e-15));
    }
}
