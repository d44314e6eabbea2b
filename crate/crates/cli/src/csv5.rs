//! The csv5 mesh format: header `x,y,F1,F2,F3,F4,F5`, one row per sample,
//! every number printed with 17 significant digits so parsing reproduces the
//! original doubles bit-exactly.

use anyhow::{bail, Context, Result};
use s3r_core::Point5;
use std::io::Write;

/// 17 significant digits: enough to round-trip any finite f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const HEADER: &str = "x,y,F1,F2,F3,F4,F5";

/// One mesh sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub x: f64,
    pub y: f64,
    pub f: [f64; 5],
}

pub fn write_rows<W: Write>(mut w: W, rows: &[Row]) -> Result<()> {
    writeln!(w, "{HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.x),
            fmt_f64(r.y),
            fmt_f64(r.f[0]),
            fmt_f64(r.f[1]),
            fmt_f64(r.f[2]),
            fmt_f64(r.f[3]),
            fmt_f64(r.f[4]),
        )?;
    }
    Ok(())
}

pub fn parse(text: &str) -> Result<Vec<Row>> {
    let mut lines = text.lines();
    let header = lines.next().context("empty csv5 input")?;
    if header.trim() != HEADER {
        bail!("bad csv5 header `{header}` (expected `{HEADER}`)");
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut vals = [0.0f64; 7];
        let mut parts = line.split(',');
        for v in &mut vals {
            let p = parts
                .next()
                .with_context(|| format!("line {}: expected 7 columns", lineno + 2))?;
            *v = p
                .trim()
                .parse()
                .with_context(|| format!("line {}: bad number `{p}`", lineno + 2))?;
        }
        if parts.next().is_some() {
            bail!("line {}: expected 7 columns", lineno + 2);
        }
        rows.push(Row {
            x: vals[0],
            y: vals[1],
            f: [vals[2], vals[3], vals[4], vals[5], vals[6]],
        });
    }
    Ok(rows)
}

/// A rectangular mesh recovered from csv5 rows (y-major row order).
#[derive(Clone, Debug)]
pub struct Mesh {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// row-major: `values[j * nx + i]`
    pub values: Vec<Point5<f64>>,
}

impl Mesh {
    pub fn from_rows(rows: &[Row]) -> Result<Self> {
        if rows.is_empty() {
            bail!("csv5 mesh has no rows");
        }
        // the first scan line shares y and enumerates the x samples
        let y0 = rows[0].y;
        let nx = rows.iter().take_while(|r| r.y == y0).count();
        if nx == 0 || rows.len() % nx != 0 {
            bail!("csv5 rows do not form a rectangular grid");
        }
        let ny = rows.len() / nx;
        let xs: Vec<f64> = rows[..nx].iter().map(|r| r.x).collect();
        let mut ys = Vec::with_capacity(ny);
        let mut values = Vec::with_capacity(rows.len());
        for j in 0..ny {
            let band = &rows[j * nx..(j + 1) * nx];
            ys.push(band[0].y);
            for (i, r) in band.iter().enumerate() {
                if r.x != xs[i] || r.y != band[0].y {
                    bail!("csv5 rows are not in y-major rectangular order");
                }
                values.push(Point5(r.f));
            }
        }
        Ok(Mesh { xs, ys, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let rows = vec![
            Row { x: 0.1, y: -2.0 / 3.0, f: [1.0 / 7.0, f64::MIN_POSITIVE, -0.0, 1e300, 0.5] },
            Row { x: std::f64::consts::PI, y: 0.0, f: [0.1 + 0.2, -1e-300, 2.0, -3.5, 4.0] },
        ];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        let parsed = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(parsed.len(), rows.len());
        for (a, b) in rows.iter().zip(parsed.iter()) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
            for c in 0..5 {
                assert_eq!(a.f[c].to_bits(), b.f[c].to_bits());
            }
        }
    }

    #[test]
    fn rejects_bad_header_and_ragged_rows() {
        assert!(parse("a,b,c\n").is_err());
        let text = format!("{HEADER}\n1,2,3,4,5,6\n");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn mesh_reconstruction() {
        let mut rows = Vec::new();
        for j in 0..3 {
            for i in 0..4 {
                rows.push(Row {
                    x: i as f64 * 0.5,
                    y: j as f64 * 0.25,
                    f: [i as f64, j as f64, 0.0, 0.0, 0.0],
                });
            }
        }
        let mesh = Mesh::from_rows(&rows).unwrap();
        assert_eq!(mesh.xs.len(), 4);
        assert_eq!(mesh.ys.len(), 3);
        assert_eq!(mesh.values[4 + 2].0[0], 2.0);
    }
}
