//! Text output helpers: fixed-precision numbers, CSV rows and SVG drawings.

use std::fmt::Write as _;

use crate::dyadic::DyadicCube;
use crate::geom::Aabb;
use crate::geomset::PolySet;
use crate::scalar::{to_f64, Scalar};

/// Formats a float with 12 significant digits, shortest form.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{v:.11e}").parse().expect("round trip");
    if r.abs() < 1e-6 || r.abs() >= 1e15 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Joins already formatted fields with commas, quoting fields that need it.
pub fn csv_row(fields: &[String]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains(',') || f.contains('"') || f.contains('\n') {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    quoted.join(",")
}

/// Minimal deterministic SVG writer for planar pictures.
pub struct Svg {
    view: Aabb<f64>,
    px: f64,
    body: String,
}

impl Svg {
    pub fn new(view: Aabb<f64>, px: f64) -> Self {
        Svg { view, px, body: String::new() }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let w = self.view.hi[0] - self.view.lo[0];
        let h = self.view.hi[1] - self.view.lo[1];
        let s = self.px / w.max(h);
        ((x - self.view.lo[0]) * s, (self.view.hi[1] - y) * s)
    }

    pub fn cubes(&mut self, cubes: &[DyadicCube], fill: &str, stroke: &str) {
        for c in cubes {
            let b = c.aabb::<f64>();
            let (x0, y1) = self.map(b.lo[0], b.lo[1]);
            let (x1, y0) = self.map(b.hi[0], b.hi[1]);
            if c.dim() == 2 {
                let _ = writeln!(
                    self.body,
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"0.5\"/>",
                    fmt_num(x0),
                    fmt_num(y0),
                    fmt_num(x1 - x0),
                    fmt_num(y1 - y0)
                );
            } else {
                let _ = writeln!(
                    self.body,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"1\"/>",
                    fmt_num(x0),
                    fmt_num(y1),
                    fmt_num(x1),
                    fmt_num(y0)
                );
            }
        }
    }

    pub fn set<T: Scalar>(&mut self, set: &PolySet<T>, color: &str, width: f64) {
        for s in &set.simplices {
            let pts: Vec<(f64, f64)> = s.iter().map(|p| self.map(to_f64(p[0]), to_f64(p[1]))).collect();
            match pts.len() {
                1 => {
                    let _ = writeln!(
                        self.body,
                        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\"/>",
                        fmt_num(pts[0].0),
                        fmt_num(pts[0].1),
                        fmt_num(width)
                    );
                }
                2 => {
                    let _ = writeln!(
                        self.body,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"{}\"/>",
                        fmt_num(pts[0].0),
                        fmt_num(pts[0].1),
                        fmt_num(pts[1].0),
                        fmt_num(pts[1].1),
                        fmt_num(width)
                    );
                }
                _ => {
                    let p: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", fmt_num(*x), fmt_num(*y))).collect();
                    let _ = writeln!(self.body, "<polygon points=\"{}\" fill=\"{color}\"/>", p.join(" "));
                }
            }
        }
    }

    pub fn finish(self) -> String {
        let w = self.view.hi[0] - self.view.lo[0];
        let h = self.view.hi[1] - self.view.lo[1];
        let s = self.px / w.max(h);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n{}</svg>\n",
            fmt_num(w * s),
            fmt_num(h * s),
            self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(9.0 / 13.0), "0.692307692308");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-0.25), "-0.25");
        assert_eq!(fmt_num(1e-20 / 3.0), "3.33333333333e-21");
    }
}
