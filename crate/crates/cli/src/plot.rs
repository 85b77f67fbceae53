//! Static SVG figures of the real and elliptic arrangements.
//!
//! The elliptic figure uses fundamental-domain coordinates `x = s + tτ`.
//! For `d = 1` it is the `(s, t)` unit square; for `d = 2` it is the
//! projection to `(s₁, s₂)`, where each elliptic hyperplane becomes a family
//! of parallel segments.

use std::fmt::Write as _;

use htk_core::arrangement::{CombinedArrangement, FixedPoint};
use htk_core::elliptic::rat_f64;
use num_traits::ToPrimitive;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("plots need d ≤ 2, got d = {0}")]
    UnsupportedDimension(usize),
}

const SIZE: f64 = 400.0;
const PAD: f64 = 40.0;

pub struct PlotData {
    d: usize,
    /// Normal and level of each real hyperplane.
    real_lines: Vec<(Vec<f64>, f64)>,
    real_points: Vec<Vec<f64>>,
    /// Normal and `(s, t)` level of each elliptic hyperplane.
    ell_lines: Vec<(Vec<i64>, (f64, f64))>,
    /// `(s, t)` coordinates per component.
    ell_points: Vec<Vec<(f64, f64)>>,
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

impl PlotData {
    pub fn new(arr: &CombinedArrangement, points: &[FixedPoint]) -> Result<Self, PlotError> {
        let d = arr.d();
        if d == 0 || d > 2 {
            return Err(PlotError::UnsupportedDimension(d));
        }
        let real_lines = arr
            .real
            .iter()
            .map(|h| {
                (
                    h.normal
                        .iter()
                        .map(|x| x.to_f64().unwrap_or(f64::NAN))
                        .collect(),
                    rat_f64(&h.level),
                )
            })
            .collect();
        let ell_lines = arr
            .elliptic
            .iter()
            .map(|h| {
                let u = arr
                    .config
                    .vector(h.index)
                    .iter()
                    .map(|x| x.to_i64().expect("small entry"))
                    .collect();
                (u, (rat_f64(&h.level.s), rat_f64(&h.level.t)))
            })
            .collect();
        Ok(PlotData {
            d,
            real_lines,
            real_points: points
                .iter()
                .map(|p| p.point.real.iter().map(rat_f64).collect())
                .collect(),
            ell_lines,
            ell_points: points
                .iter()
                .map(|p| {
                    p.point
                        .elliptic
                        .iter()
                        .map(|e| (frac(rat_f64(&e.s)), frac(rat_f64(&e.t))))
                        .collect()
                })
                .collect(),
        })
    }

    pub fn real_svg(&self) -> String {
        let mut c = Canvas::new(self.real_window());
        if self.d == 1 {
            c.axes("a", "");
            for (u, a) in &self.real_lines {
                let x = a / u[0];
                c.segment((x, -0.5), (x, 0.5), "#1f5fa8");
            }
            for p in &self.real_points {
                c.marker((p[0], 0.0));
            }
        } else {
            c.axes("a₁", "a₂");
            for (u, a) in &self.real_lines {
                c.line(u[0], u[1], *a, "#1f5fa8");
            }
            for p in &self.real_points {
                c.marker((p[0], p[1]));
            }
        }
        c.finish()
    }

    fn real_window(&self) -> [f64; 4] {
        let mut w = [-1.0f64, 1.0, -1.0, 1.0];
        let mut grow = |x: f64, y: f64| {
            w = [
                w[0].min(x - 1.0),
                w[1].max(x + 1.0),
                w[2].min(y - 1.0),
                w[3].max(y + 1.0),
            ];
        };
        for p in &self.real_points {
            grow(p[0], p.get(1).copied().unwrap_or(0.0));
        }
        if self.d == 1 {
            for (u, a) in &self.real_lines {
                grow(a / u[0], 0.0);
            }
        }
        w
    }

    pub fn elliptic_svg(&self) -> String {
        let mut c = Canvas::new([0.0, 1.0, 0.0, 1.0]);
        if self.d == 1 {
            c.axes("s", "t");
            for (u, (s, t)) in &self.ell_lines {
                let m = u[0].unsigned_abs() as i64;
                // Solutions of u x = β are (β + a + bτ)/u for a, b in [0, |u|).
                for a in 0..m {
                    for b in 0..m {
                        let p = (
                            frac((s + a as f64) / u[0] as f64),
                            frac((t + b as f64) / u[0] as f64),
                        );
                        c.cross(p, "#1f5fa8");
                    }
                }
            }
            for p in &self.ell_points {
                c.marker(p[0]);
            }
        } else {
            c.axes("s₁", "s₂");
            for (u, (s, _)) in &self.ell_lines {
                let span = u[0].abs() + u[1].abs();
                for shift in -span..=span {
                    c.line(u[0] as f64, u[1] as f64, s + shift as f64, "#1f5fa8");
                }
            }
            for p in &self.ell_points {
                c.marker((p[0].0, p[1].0));
            }
        }
        c.finish()
    }
}

/// Maps a window `[x0, x1] × [y0, y1]` onto a square viewport.
struct Canvas {
    window: [f64; 4],
    body: String,
}

impl Canvas {
    fn new(window: [f64; 4]) -> Self {
        Canvas {
            window,
            body: String::new(),
        }
    }

    fn px(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.window;
        (
            PAD + (x - x0) / (x1 - x0) * SIZE,
            PAD + (y1 - y) / (y1 - y0) * SIZE,
        )
    }

    fn axes(&mut self, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            self.body,
            r##"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#000"/>"##
        );
        let [x0, x1, y0, y1] = self.window;
        if x0 < 0.0 && x1 > 0.0 {
            self.segment((0.0, y0), (0.0, y1), "#bbb");
        }
        if y0 < 0.0 && y1 > 0.0 {
            self.segment((x0, 0.0), (x1, 0.0), "#bbb");
        }
        let (lx, ly) = (PAD + SIZE / 2.0, PAD + SIZE + 28.0);
        let _ = writeln!(
            self.body,
            r#"<text x="{lx}" y="{ly}" text-anchor="middle">{xlabel}</text>"#
        );
        let (vx, vy) = (PAD - 24.0, PAD + SIZE / 2.0);
        let _ = writeln!(
            self.body,
            r#"<text x="{vx}" y="{vy}" text-anchor="middle">{ylabel}</text>"#
        );
        for (x, y, anchor, v) in [
            (PAD, PAD + SIZE + 14.0, "start", x0),
            (PAD + SIZE, PAD + SIZE + 14.0, "end", x1),
        ] {
            let _ = writeln!(
                self.body,
                r#"<text x="{x}" y="{y}" font-size="10" text-anchor="{anchor}">{v:.2}</text>"#
            );
        }
        for (y, v) in [(PAD + SIZE, y0), (PAD + 8.0, y1)] {
            let x = PAD - 4.0;
            let _ = writeln!(
                self.body,
                r#"<text x="{x}" y="{y}" font-size="10" text-anchor="end">{v:.2}</text>"#
            );
        }
    }

    fn segment(&mut self, a: (f64, f64), b: (f64, f64), color: &str) {
        let ((x1, y1), (x2, y2)) = (self.px(a), self.px(b));
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{color}" clip-path="url(#frame)"/>"#
        );
    }

    /// The line `a x + b y = c`, drawn across the whole window.
    fn line(&mut self, a: f64, b: f64, c: f64, color: &str) {
        let [x0, x1, y0, y1] = self.window;
        if b.abs() >= a.abs() {
            self.segment((x0, (c - a * x0) / b), (x1, (c - a * x1) / b), color);
        } else {
            self.segment(((c - b * y0) / a, y0), ((c - b * y1) / a, y1), color);
        }
    }

    fn cross(&mut self, p: (f64, f64), color: &str) {
        let (x, y) = self.px(p);
        let _ = writeln!(
            self.body,
            r#"<path d="M{:.2},{:.2}l8,8m0,-8l-8,8" stroke="{color}"/>"#,
            x - 4.0,
            y - 4.0
        );
    }

    fn marker(&mut self, p: (f64, f64)) {
        let (x, y) = self.px(p);
        let _ = writeln!(
            self.body,
            r##"<circle class="fixed" cx="{x:.2}" cy="{y:.2}" r="4" fill="#c0392b"/>"##
        );
    }

    fn finish(self) -> String {
        let full = SIZE + 2.0 * PAD;
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" viewBox="0 0 {full} {full}" font-family="sans-serif">"#,
                "\n",
                r#"<defs><clipPath id="frame"><rect x="{pad}" y="{pad}" width="{size}" height="{size}"/></clipPath></defs>"#,
                "\n{body}</svg>\n"
            ),
            full = full,
            pad = PAD,
            size = SIZE,
            body = self.body
        )
    }
}
