use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64;

use crate::automorphic::TriangleEmbedding;
use crate::error::{Error, Result};
use crate::special::ComplexValue;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    /// Fraction of the viewport kept free around the triangle.
    pub margin: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 800.0,
            height: 600.0,
            margin: 0.12,
        }
    }
}

/// A hyperbolic geodesic segment in the upper half-plane.
#[derive(Debug, Clone, Copy)]
enum Side {
    Vertical { x: f64, y0: f64, y1: f64 },
    Arc { centre: f64, radius: f64, t0: f64, t1: f64 },
}

impl Side {
    fn through(a: ComplexValue, b: ComplexValue) -> Side {
        let scale = a.norm().max(b.norm());
        if (a.re - b.re).abs() <= 1e-12 * scale {
            return Side::Vertical {
                x: 0.5 * (a.re + b.re),
                y0: a.im,
                y1: b.im,
            };
        }
        let centre = (a.norm_sqr() - b.norm_sqr()) / (2.0 * (a.re - b.re));
        let radius = 0.5 * ((a - centre).norm() + (b - centre).norm());
        Side::Arc {
            centre,
            radius,
            t0: (a - centre).arg(),
            t1: (b - centre).arg(),
        }
    }

    fn at(&self, s: f64) -> ComplexValue {
        match *self {
            Side::Vertical { x, y0, y1 } => Complex64::new(x, y0 + s * (y1 - y0)),
            Side::Arc { centre, radius, t0, t1 } => centre + Complex64::from_polar(radius, t0 + s * (t1 - t0)),
        }
    }

    fn path(&self) -> String {
        let (p, q) = (self.at(0.0), self.at(1.0));
        match *self {
            Side::Vertical { .. } => format!("M {:.12} {:.12} L {:.12} {:.12}", p.re, p.im, q.re, q.im),
            Side::Arc { radius, t0, t1, .. } => format!(
                "M {:.12} {:.12} A {radius:.12} {radius:.12} 0 0 {} {:.12} {:.12}",
                p.re,
                p.im,
                u8::from(t1 > t0),
                q.re,
                q.im
            ),
        }
    }
}

/// The embedded fundamental triangle: three geodesic sides drawn in plot
/// (half-plane) coordinates under a y-flipping transform, and one label per
/// vertex.
pub fn render_svg(e: &TriangleEmbedding, opts: &SvgOptions) -> Result<String> {
    let v = e.vertices();
    if v.iter().any(|w| !w.is_finite() || w.im <= 0.0) {
        return Err(Error::NonFinite(format!("embedded vertices {v:?}")));
    }
    let sides = [Side::through(v[0], v[1]), Side::through(v[1], v[2]), Side::through(v[2], v[0])];

    let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for side in &sides {
        for k in 0..=64 {
            let z = side.at(k as f64 / 64.0);
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
    }
    let span = hi - lo;
    let usable = 1.0 - 2.0 * opts.margin;
    let s = (opts.width * usable / span.re.max(1e-300)).min(opts.height * usable / span.im.max(1e-300));
    let mid = 0.5 * (lo + hi);
    let (ox, oy) = (0.5 * opts.width - s * mid.re, 0.5 * opts.height + s * mid.im);
    let to_px = |z: ComplexValue| (ox + s * z.re, oy - s * z.im);

    let orders = e.params().signature().orders();
    let centroid = (v[0] + v[1] + v[2]) / 3.0;
    let mut doc = String::new();
    let _ = writeln!(doc, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        doc,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = opts.width,
        h = opts.height
    );
    let _ = writeln!(doc, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, opts.width, opts.height);
    let _ = writeln!(
        doc,
        r#"<g id="plot" transform="matrix({s:.12} 0 0 {:.12} {ox:.12} {oy:.12})" fill="none" stroke="black" stroke-width="1.5" vector-effect="non-scaling-stroke">"#,
        -s
    );
    for (k, side) in sides.iter().enumerate() {
        let _ = writeln!(doc, r#"<path id="side{k}" d="{}" vector-effect="non-scaling-stroke"/>"#, side.path());
    }
    let _ = writeln!(doc, "</g>");
    for (k, (&w, n)) in v.iter().zip(orders).enumerate() {
        let dir = w - centroid;
        let dir = if dir.norm() > 0.0 { dir / dir.norm() } else { Complex64::from_polar(1.0, PI / 2.0) };
        let (x, y) = to_px(w);
        let (x, y) = (x + 16.0 * dir.re, y - 16.0 * dir.im);
        let _ = writeln!(
            doc,
            r#"<text x="{x:.3}" y="{y:.3}" font-family="sans-serif" font-size="14" text-anchor="middle">w{} (n{}={n})</text>"#,
            k + 1,
            k + 1
        );
    }
    let _ = writeln!(doc, "</svg>");
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geodesic_through_points() {
        let (a, b) = (Complex64::new(-1.0, 1.0), Complex64::new(1.0, 1.0));
        match Side::through(a, b) {
            Side::Arc { centre, radius, .. } => {
                assert!(centre.abs() < 1e-15);
                assert!((radius - 2f64.sqrt()).abs() < 1e-15);
            }
            Side::Vertical { .. } => panic!("expected an arc"),
        }
        let side = Side::through(Complex64::new(0.0, 1.0), Complex64::new(0.0, 3.0));
        assert!(matches!(side, Side::Vertical { .. }));
        assert!((side.at(1.0) - Complex64::new(0.0, 3.0)).norm() < 1e-15);
    }
}
