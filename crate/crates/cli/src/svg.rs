//! Static figures on a 1000 x 1000 viewport. Sources are red, targets blue, dot
//! area proportional to mass; edge width grows like `theta^alpha`. Points of R^3
//! are drawn by dropping `z`.

use std::fmt::Write;

use ramify_core::{AtomicMeasure, TrafficPath};

pub const VIEWPORT: f64 = 1000.0;
const MARGIN: f64 = 60.0;
const MAX_STROKE: f64 = 14.0;
const MAX_DOT: f64 = 18.0;

struct Frame {
    lo: [f64; 2],
    scale: f64,
    offset: [f64; 2],
}

impl Frame {
    fn fit(points: &[[f64; 2]]) -> Frame {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 2];
            hi = [1.0; 2];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let scale = (VIEWPORT - 2.0 * MARGIN) / span;
        // center the shorter side
        let offset = [
            MARGIN + 0.5 * (span - (hi[0] - lo[0])) * scale,
            MARGIN + 0.5 * (span - (hi[1] - lo[1])) * scale,
        ];
        Frame { lo, scale, offset }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let x = self.offset[0] + (p[0] - self.lo[0]) * self.scale;
        let y = VIEWPORT - (self.offset[1] + (p[1] - self.lo[1]) * self.scale);
        (x, y)
    }
}

fn xy(p: &ramify_core::Point) -> [f64; 2] {
    [p.coords[0], p.coords[1]]
}

pub fn render(mu_minus: &AtomicMeasure, mu_plus: &AtomicMeasure, path: &TrafficPath, alpha: f64) -> String {
    let mut pts: Vec<[f64; 2]> = path.vertices.iter().map(xy).collect();
    pts.extend(mu_minus.atoms.iter().chain(mu_plus.atoms.iter()).map(|(p, _)| xy(p)));
    let frame = Frame::fit(&pts);
    let top = path.edges.iter().map(|e| e.theta.powf(alpha)).fold(0.0, f64::max).max(1e-300);
    let heaviest = mu_minus.atoms.iter().chain(mu_plus.atoms.iter()).map(|a| a.1.abs()).fold(0.0, f64::max).max(1e-300);

    let mut s = String::new();
    let v = VIEWPORT;
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{v}" height="{v}" viewBox="0 0 {v} {v}">"#);
    let _ = writeln!(s, r#"<rect width="{v}" height="{v}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g stroke="black" stroke-linecap="round">"#);
    for e in &path.edges {
        let (x1, y1) = frame.map(xy(&path.vertices[e.tail]));
        let (x2, y2) = frame.map(xy(&path.vertices[e.head]));
        let w = (MAX_STROKE * e.theta.powf(alpha) / top).max(0.5);
        let _ = writeln!(s, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke-width="{w:.3}"/>"#);
    }
    let _ = writeln!(s, "</g>");
    for (m, color) in [(mu_minus, "#c0392b"), (mu_plus, "#2e6fd8")] {
        for (p, w) in &m.atoms {
            let (x, y) = frame.map(xy(p));
            let r = (MAX_DOT * (w.abs() / heaviest).sqrt()).max(2.0);
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="{color}"/>"#);
        }
    }
    s.push_str("</svg>\n");
    s
}
