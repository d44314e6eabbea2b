//! A csv5 mesh re-imported as a grid-locked immersion: evaluation is only
//! defined on the stored nodes, so every derivative must come from
//! finite-difference stencils whose step equals the grid spacing.

use crate::csv5::Mesh;
use anyhow::{bail, Result};
use s3r_core::{Immersion, Point5};

#[derive(Clone, Debug)]
pub struct SampledImmersion {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<Point5<f64>>,
    hx: f64,
    hy: f64,
}

fn uniform_spacing(axis: &str, v: &[f64]) -> Result<f64> {
    if v.len() < 2 {
        bail!("mesh needs at least 2 samples along {axis}");
    }
    let h = v[1] - v[0];
    if h <= 0.0 {
        bail!("mesh {axis} samples must increase");
    }
    for w in v.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            bail!("mesh {axis} samples are not uniformly spaced");
        }
    }
    Ok(h)
}

impl SampledImmersion {
    pub fn new(mesh: Mesh) -> Result<Self> {
        let hx = uniform_spacing("x", &mesh.xs)?;
        let hy = uniform_spacing("y", &mesh.ys)?;
        Ok(SampledImmersion { xs: mesh.xs, ys: mesh.ys, values: mesh.values, hx, hy })
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn x(&self, i: usize) -> f64 {
        self.xs[i]
    }

    pub fn y(&self, j: usize) -> f64 {
        self.ys[j]
    }

    fn locate(&self, axis: &[f64], h: f64, v: f64) -> usize {
        let i = ((v - axis[0]) / h).round();
        let i = (i.max(0.0) as usize).min(axis.len() - 1);
        // queries come from stencils built on the node lattice; anything
        // farther than a quarter cell is a caller bug, not data noise
        assert!(
            (v - axis[i]).abs() <= 0.25 * h,
            "sampled immersion queried off-lattice at {v} (nearest node {})",
            axis[i]
        );
        i
    }
}

impl Immersion<f64> for SampledImmersion {
    fn eval(&self, x: f64, y: f64) -> Point5<f64> {
        let i = self.locate(&self.xs, self.hx, x);
        let j = self.locate(&self.ys, self.hy, y);
        self.values[j * self.xs.len() + i]
    }
}
