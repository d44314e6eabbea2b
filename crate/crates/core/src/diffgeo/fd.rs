//! Central-difference stencils with one level of Richardson extrapolation.
//!
//! All rules combine the base step `h` with the doubled step `2h`, so a
//! grid-sampled immersion whose nodes are `h` apart can be differentiated
//! without ever evaluating off a node.

use crate::ambient::Point5;
use crate::scalar::{lit, Real};

/// Step sizes for finite-difference jets.
///
/// First and second derivatives carry separate steps: the second-derivative
/// stencil divides function noise by `h^2`, so its step must sit well above
/// the f64 noise floor to keep the absolute error below 1e-8 on unit-scale
/// trigonometric immersions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdConfig<S> {
    pub step_first: S,
    pub step_second: S,
}

impl<S: Real> Default for FdConfig<S> {
    fn default() -> Self {
        FdConfig {
            step_first: lit(1e-4),
            step_second: lit(5e-3),
        }
    }
}

impl<S: Real> FdConfig<S> {
    /// Configuration for grid-sampled immersions: every stencil offset is a
    /// whole multiple of the grid spacing.
    pub fn grid_locked(spacing: S) -> Self {
        FdConfig {
            step_first: spacing,
            step_second: spacing,
        }
    }
}

type C5<S> = [S; 5];

fn comb<S: Real>(terms: &[(S, &C5<S>)]) -> C5<S> {
    let mut out = [S::zero(); 5];
    for (w, v) in terms {
        for i in 0..5 {
            out[i] = out[i] + *w * v[i];
        }
    }
    out
}

/// Richardson-extrapolated first derivative along `x`:
/// `(8(f(+h)-f(-h)) - (f(+2h)-f(-2h))) / 12h`.
fn d1<S: Real>(fp: &C5<S>, fm: &C5<S>, fp2: &C5<S>, fm2: &C5<S>, h: S) -> C5<S> {
    let w1 = lit::<S>(8.0) / (lit::<S>(12.0) * h);
    let w2 = S::one() / (lit::<S>(12.0) * h);
    comb(&[(w1, fp), (-w1, fm), (-w2, fp2), (w2, fm2)])
}

/// Richardson-extrapolated pure second derivative:
/// `(4 D2(h) - D2(2h)) / 3` with `D2(h) = (f(+h) - 2f(0) + f(-h)) / h^2`.
fn d2<S: Real>(f0: &C5<S>, fp: &C5<S>, fm: &C5<S>, fp2: &C5<S>, fm2: &C5<S>, h: S) -> C5<S> {
    let three = lit::<S>(3.0);
    let four = lit::<S>(4.0);
    let hh = h * h;
    let a = four / (three * hh);
    let b = S::one() / (three * four * hh);
    let c = -(four / (three * hh)) * lit::<S>(2.0) + lit::<S>(2.0) * b;
    comb(&[(a, fp), (a, fm), (-b, fp2), (-b, fm2), (c, f0)])
}

/// Richardson-extrapolated mixed derivative from the four-point cross rule.
fn dxy<S: Real>(
    pp: &C5<S>,
    pm: &C5<S>,
    mp: &C5<S>,
    mm: &C5<S>,
    pp2: &C5<S>,
    pm2: &C5<S>,
    mp2: &C5<S>,
    mm2: &C5<S>,
    h: S,
) -> C5<S> {
    let three = lit::<S>(3.0);
    let four = lit::<S>(4.0);
    let m1 = four / (three * four * h * h);
    let m2 = S::one() / (three * lit::<S>(16.0) * h * h);
    comb(&[
        (m1, pp),
        (-m1, pm),
        (-m1, mp),
        (m1, mm),
        (-m2, pp2),
        (m2, pm2),
        (m2, mp2),
        (-m2, mm2),
    ])
}

/// All six jet slots of a black-box immersion by finite differences.
pub(crate) fn fd_jet_parts<S: Real>(
    eval: &dyn Fn(S, S) -> Point5<S>,
    x: S,
    y: S,
    cfg: &FdConfig<S>,
) -> (C5<S>, C5<S>, C5<S>, C5<S>, C5<S>, C5<S>) {
    let g = |dx: S, dy: S| eval(x + dx, y + dy).0;
    let h1 = cfg.step_first;
    let h2 = cfg.step_second;
    let two = lit::<S>(2.0);
    let z = S::zero();

    let f0 = g(z, z);

    let fx = d1(&g(h1, z), &g(-h1, z), &g(two * h1, z), &g(-two * h1, z), h1);
    let fy = d1(&g(z, h1), &g(z, -h1), &g(z, two * h1), &g(z, -two * h1), h1);

    let fxx = d2(&f0, &g(h2, z), &g(-h2, z), &g(two * h2, z), &g(-two * h2, z), h2);
    let fyy = d2(&f0, &g(z, h2), &g(z, -h2), &g(z, two * h2), &g(z, -two * h2), h2);

    let fxy = dxy(
        &g(h2, h2),
        &g(h2, -h2),
        &g(-h2, h2),
        &g(-h2, -h2),
        &g(two * h2, two * h2),
        &g(two * h2, -two * h2),
        &g(-two * h2, two * h2),
        &g(-two * h2, -two * h2),
        h2,
    );

    (f0, fx, fy, fxx, fxy, fyy)
}
