//! Minimal line charts written straight to SVG.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
}

/// Shaded region between `lo` and `hi` at each `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub points: Vec<(f64, f64, f64)>,
    pub color: &'static str,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
    pub bands: Vec<Band>,
    /// Free text placed in an XML comment at the top of the file.
    pub comment: Option<String>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
}

impl Frame {
    fn tx(&self, x: f64) -> f64 {
        let (x, x0, x1) = if self.log_x {
            (x.log10(), self.x0.log10(), self.x1.log10())
        } else {
            (x, self.x0, self.x1)
        };
        let span = if x1 > x0 { x1 - x0 } else { 1.0 };
        MARGIN_LEFT + (x - x0) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn ty(&self, y: f64) -> f64 {
        let span = if self.y1 > self.y0 { self.y1 - self.y0 } else { 1.0 };
        HEIGHT - MARGIN_BOTTOM - (y - self.y0) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Chart {
    fn usable(&self, x: f64) -> bool {
        x.is_finite() && (!self.log_x || x > 0.0)
    }

    fn frame(&self) -> Frame {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                if self.usable(x) && y.is_finite() {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }
        for b in &self.bands {
            for &(x, lo, hi) in &b.points {
                if self.usable(x) {
                    xs.push(x);
                    ys.extend([lo, hi]);
                }
            }
        }
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut x0, mut x1) = (min(&xs), max(&xs));
        if xs.is_empty() {
            (x0, x1) = (if self.log_x { 1.0 } else { 0.0 }, 1.0);
        }
        let (mut y0, mut y1) = (min(&ys).min(0.0), max(&ys));
        if ys.is_empty() || y1 <= y0 {
            (y0, y1) = (0.0, y0.max(0.0) + 1.0);
        }
        y1 += 0.05 * (y1 - y0);
        Frame {
            x0,
            x1,
            y0,
            y1,
            log_x: self.log_x,
        }
    }

    pub fn render(&self) -> String {
        let f = self.frame();
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        if let Some(c) = &self.comment {
            let _ = writeln!(out, "<!-- {} -->", c.replace("--", "- -"));
        }
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
            WIDTH / 2.0,
            escape(&self.title)
        );

        for b in &self.bands {
            let pts: Vec<_> = b.points.iter().filter(|p| self.usable(p.0)).collect();
            if pts.is_empty() {
                continue;
            }
            let mut d = String::new();
            for &&(x, _, hi) in &pts {
                let _ = write!(d, "{:.2},{:.2} ", f.tx(x), f.ty(hi));
            }
            for &&(x, lo, _) in pts.iter().rev() {
                let _ = write!(d, "{:.2},{:.2} ", f.tx(x), f.ty(lo));
            }
            let _ = writeln!(
                out,
                "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.25\" stroke=\"none\"/>",
                d.trim_end(),
                b.color
            );
        }

        let (left, right) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
        let (top, bottom) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
        let _ = writeln!(out, "<line x1=\"{left}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\" stroke=\"black\"/>");
        let _ = writeln!(out, "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{bottom}\" stroke=\"black\"/>");
        for i in 0..=4 {
            let t = i as f64 / 4.0;
            let xv = if f.log_x {
                10f64.powf(f.x0.log10() + t * (f.x1.log10() - f.x0.log10()))
            } else {
                f.x0 + t * (f.x1 - f.x0)
            };
            let yv = f.y0 + t * (f.y1 - f.y0);
            let (px, py) = (f.tx(xv), f.ty(yv));
            let _ = writeln!(
                out,
                "<line x1=\"{px:.2}\" y1=\"{bottom}\" x2=\"{px:.2}\" y2=\"{}\" stroke=\"black\"/><text x=\"{px:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
                bottom + 5.0,
                bottom + 18.0,
                tick(xv)
            );
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{py:.2}\" x2=\"{left}\" y2=\"{py:.2}\" stroke=\"black\"/><text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
                left - 5.0,
                left - 8.0,
                py + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            (left + right) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>",
            (top + bottom) / 2.0,
            (top + bottom) / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let pts: String = s
                .points
                .iter()
                .filter(|p| self.usable(p.0) && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", f.tx(x), f.ty(y)))
                .collect::<Vec<_>>()
                .join(" ");
            let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
            let _ = writeln!(
                out,
                "<polyline points=\"{pts}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>",
                s.color
            );
            let ly = top + 14.0 * i as f64 + 4.0;
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{}\"{dash}/><text x=\"{}\" y=\"{}\">{}</text>",
                right - 150.0,
                right - 130.0,
                s.color,
                right - 125.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
