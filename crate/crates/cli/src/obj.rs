//! Wavefront export of the stereographic image of a mesh: `v` records for
//! the projected sphere part, the line coordinate kept as a comment before
//! each vertex, and two counter-clockwise triangles per grid cell.

use crate::csv5::{fmt_f64, Row};
use anyhow::{bail, Result};
use s3r_core::{stereographic, GeomError, Point5};
use std::io::Write;

pub fn write_obj<W: Write>(mut w: W, rows: &[Row], nx: usize, ny: usize, pole: usize) -> Result<()> {
    assert_eq!(rows.len(), nx * ny);
    writeln!(w, "# stereographic mesh, pole {pole}, grid {nx}x{ny}")?;
    for r in rows {
        let p = Point5(r.f);
        let (img, t) = stereographic(&p, pole).map_err(|e| match e {
            GeomError::PoleCollision { pole, distance, tolerance, .. } => {
                anyhow::anyhow!(GeomError::PoleCollision {
                    pole,
                    x: r.x,
                    y: r.y,
                    distance,
                    tolerance,
                })
            }
            other => anyhow::anyhow!(other),
        })?;
        writeln!(w, "# t {}", fmt_f64(t))?;
        writeln!(w, "v {} {} {}", fmt_f64(img[0]), fmt_f64(img[1]), fmt_f64(img[2]))?;
    }
    // 1-based vertex indices, x fastest
    let idx = |i: usize, j: usize| j * nx + i + 1;
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx - 1 {
            writeln!(w, "f {} {} {}", idx(i, j), idx(i + 1, j), idx(i + 1, j + 1))?;
            writeln!(w, "f {} {} {}", idx(i, j), idx(i + 1, j + 1), idx(i, j + 1))?;
        }
    }
    if ny < 2 || nx < 2 {
        bail!("obj export needs at least a 2x2 grid");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_vertices_faces_and_t_comments() {
        // four points on the equator opposite pole 1, t varying
        let rows: Vec<Row> = (0..4)
            .map(|k| {
                let (i, j) = (k % 2, k / 2);
                Row {
                    x: i as f64,
                    y: j as f64,
                    f: [-1.0, 0.0, 0.0, 0.0, k as f64],
                }
            })
            .collect();
        let mut buf = Vec::new();
        write_obj(&mut buf, &rows, 2, 2, 1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2);
        assert_eq!(text.lines().filter(|l| l.starts_with("# t ")).count(), 4);
        assert!(text.contains("v 0.0000000000000000e0 0.0000000000000000e0 0.0000000000000000e0"));
    }

    #[test]
    fn pole_collision_reports_sample() {
        let rows = vec![
            Row { x: 0.5, y: 0.25, f: [1.0, 0.0, 0.0, 0.0, 0.0] };
            4
        ];
        let err = write_obj(&mut Vec::new(), &rows, 2, 2, 1).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("pole 1"), "{msg}");
        assert!(msg.contains("0.5"), "{msg}");
    }
}
