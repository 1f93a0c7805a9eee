//! Minimal SVG plots and marching-squares contours.
//!
//! Plot contents are drawn inside a group whose transform maps data
//! coordinates to the canvas, so coordinates in the file are data coordinates.

use std::fmt::Write as _;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;

pub const CLASS_COLORS: [&str; 2] = ["#1f77b4", "#d62728"];
pub const UNLABELED_COLOR: &str = "#b0b0b0";
pub const SERIES_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub type Segment = [(f64, f64); 2];

/// Bounding box of `points` padded by `pad` times its extent on each side
/// (by 1 when the extent is zero).
pub fn padded_bounds(points: impl IntoIterator<Item = (f64, f64)>, pad: f64) -> [(f64, f64); 2] {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return [(-1.0, 1.0), (-1.0, 1.0)];
    }
    let widen = |lo: f64, hi: f64| {
        let ext = hi - lo;
        if ext > 0.0 {
            (lo - pad * ext, hi + pad * ext)
        } else {
            (lo - 1.0, hi + 1.0)
        }
    };
    [widen(x0, x1), widen(y0, y1)]
}

/// Segments of the `level` contour of values sampled on a grid;
/// `values[j * xs.len() + i]` is the value at `(xs[i], ys[j])`.
/// Saddle cells are resolved by the cell-center average.
pub fn marching_squares(xs: &[f64], ys: &[f64], values: &[f64], level: f64) -> Vec<Segment> {
    assert_eq!(values.len(), xs.len() * ys.len());
    let nx = xs.len();
    let v = |i: usize, j: usize| values[j * nx + i] - level;
    let mut segs = Vec::new();
    for j in 0..ys.len().saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            // corners counter-clockwise from bottom-left
            let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let f: [f64; 4] = c.map(|(a, b)| v(a, b));
            let above = f.map(|x| x >= 0.0);
            let crossing = |e: usize| -> Option<(f64, f64)> {
                let (a, b) = (e, (e + 1) % 4);
                if above[a] == above[b] {
                    return None;
                }
                let t = f[a] / (f[a] - f[b]);
                let (pa, pb) = ((xs[c[a].0], ys[c[a].1]), (xs[c[b].0], ys[c[b].1]));
                Some((pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1)))
            };
            let pts: Vec<(usize, (f64, f64))> = (0..4).filter_map(|e| crossing(e).map(|p| (e, p))).collect();
            match pts.len() {
                2 => segs.push([pts[0].1, pts[1].1]),
                4 => {
                    let center_above = f.iter().sum::<f64>() / 4.0 >= 0.0;
                    // when the center joins corners 0 and 2, cut off corners 1 and 3
                    let pairs = if center_above == above[0] { [(0, 1), (2, 3)] } else { [(0, 3), (1, 2)] };
                    for (a, b) in pairs {
                        segs.push([pts[a].1, pts[b].1]);
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// An SVG canvas over a data window. With `equal_aspect` one data unit has
/// the same length on both axes.
pub struct Plot {
    xlim: (f64, f64),
    ylim: (f64, f64),
    sx: f64,
    sy: f64,
    body: String,
    overlay: String,
    legend: Vec<(String, String)>,
    title: String,
}

impl Plot {
    pub fn new(bounds: [(f64, f64); 2], equal_aspect: bool, title: &str) -> Plot {
        let (xlim, ylim) = (bounds[0], bounds[1]);
        let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
        let (mut sx, mut sy) = (w / (xlim.1 - xlim.0), h / (ylim.1 - ylim.0));
        if equal_aspect {
            let s = sx.min(sy);
            sx = s;
            sy = s;
        }
        Plot {
            xlim,
            ylim,
            sx,
            sy,
            body: String::new(),
            overlay: String::new(),
            legend: Vec::new(),
            title: title.to_string(),
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + (x - self.xlim.0) * self.sx, HEIGHT - MARGIN - (y - self.ylim.0) * self.sy)
    }

    /// Dots of `radius` pixels; only meaningful with equal aspect.
    pub fn points(&mut self, pts: &[(f64, f64)], color: &str, radius: f64, class: &str) {
        let r = radius / self.sx;
        let _ = write!(self.body, r#"<g class="{class}" fill="{color}">"#);
        for &(x, y) in pts {
            let _ = write!(self.body, r#"<circle cx="{x}" cy="{y}" r="{r}"/>"#);
        }
        self.body.push_str("</g>\n");
    }

    /// Ring markers (for highlighted points); only meaningful with equal aspect.
    pub fn rings(&mut self, pts: &[(f64, f64)], color: &str, radius: f64, class: &str) {
        let r = radius / self.sx;
        let _ = write!(
            self.body,
            r#"<g class="{class}" fill="none" stroke="{color}" stroke-width="2" vector-effect="non-scaling-stroke">"#
        );
        for &(x, y) in pts {
            let _ = write!(
                self.body,
                r#"<circle cx="{x}" cy="{y}" r="{r}" vector-effect="non-scaling-stroke"/>"#
            );
        }
        self.body.push_str("</g>\n");
    }

    pub fn segments(&mut self, segs: &[Segment], color: &str, class: &str) {
        let mut d = String::new();
        for [(x0, y0), (x1, y1)] in segs {
            let _ = write!(d, "M{x0} {y0}L{x1} {y1}");
        }
        let _ = writeln!(
            self.body,
            r#"<path class="{class}" d="{d}" fill="none" stroke="{color}" stroke-width="2" vector-effect="non-scaling-stroke"/>"#
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str, class: &str) {
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x},{y}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline class="{class}" points="{}" fill="none" stroke="{color}" stroke-width="2" vector-effect="non-scaling-stroke"/>"#,
            coords.join(" ")
        );
    }

    pub fn legend(&mut self, label: &str, color: &str) {
        self.legend.push((label.to_string(), color.to_string()));
    }

    /// Axis annotation in data coordinates, drawn unscaled.
    pub fn label(&mut self, x: f64, y: f64, text: &str) {
        let (px, py) = self.px(x, y);
        let _ = writeln!(
            self.overlay,
            r#"<text x="{px:.1}" y="{py:.1}" font-size="11" text-anchor="middle">{}</text>"#,
            esc(text)
        );
    }

    pub fn finish(self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let (x0, y0) = self.px(self.xlim.0, self.ylim.1);
        let (x1, y1) = self.px(self.xlim.1, self.ylim.0);
        let _ = writeln!(
            s,
            r##"<rect x="{x0:.1}" y="{y0:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
            x1 - x0,
            y1 - y0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            esc(&self.title)
        );
        let tx = MARGIN - self.xlim.0 * self.sx;
        let ty = HEIGHT - MARGIN + self.ylim.0 * self.sy;
        let _ = writeln!(
            s,
            r#"<g class="data" transform="matrix({} 0 0 {} {tx} {ty})">"#,
            self.sx, -self.sy
        );
        s.push_str(&self.body);
        s.push_str("</g>\n");
        s.push_str(&self.overlay);
        for (k, (label, color)) in self.legend.iter().enumerate() {
            let y = MARGIN + 14.0 + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{y:.1}" font-size="12">{}</text>"#,
                WIDTH - MARGIN - 150.0,
                y - 9.0,
                WIDTH - MARGIN - 135.0,
                esc(label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, f: impl Fn(f64, f64) -> f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let xs: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let ys = xs.clone();
        let mut v = Vec::new();
        for &y in &ys {
            for &x in &xs {
                v.push(f(x, y));
            }
        }
        (xs, ys, v)
    }

    #[test]
    fn linear_contour_is_exact() {
        let (xs, ys, v) = grid(21, |x, y| 0.3 * x - y + 0.1);
        let segs = marching_squares(&xs, &ys, &v, 0.0);
        assert!(!segs.is_empty());
        for s in &segs {
            for &(x, y) in s {
                assert!((0.3 * x - y + 0.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn circle_contour_is_close() {
        let (xs, ys, v) = grid(81, |x, y| x * x + y * y - 0.25);
        let segs = marching_squares(&xs, &ys, &v, 0.0);
        for s in &segs {
            for &(x, y) in s {
                assert!((x.hypot(y) - 0.5).abs() < 0.01);
            }
        }
        // closed curve: every endpoint is shared by two segments
        assert!(segs.len() > 40);
    }

    #[test]
    fn saddle_gives_two_segments() {
        let xs = [0.0, 1.0];
        let ys = [0.0, 1.0];
        let segs = marching_squares(&xs, &ys, &[1.0, -1.0, 1.0, -1.0][..], 0.0);
        assert_eq!(segs.len(), 1);
        let segs = marching_squares(&xs, &ys, &[1.0, -1.0, -1.0, 1.5], 0.0);
        assert_eq!(segs.len(), 2);
    }

    #[test]
    fn constant_field_has_no_contour() {
        let (xs, ys, v) = grid(5, |_, _| 1.0);
        assert!(marching_squares(&xs, &ys, &v, 0.0).is_empty());
    }

    #[test]
    fn padded() {
        let b = padded_bounds([(0.0, 0.0), (10.0, 0.0)], 0.1);
        assert_eq!(b, [(-1.0, 11.0), (-1.0, 1.0)]);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let mut p = Plot::new([(0.0, 1.0), (0.0, 1.0)], true, "a < b");
        p.points(&[(0.5, 0.5)], CLASS_COLORS[0], 3.0, "class-a");
        p.segments(&[[(0.0, 0.0), (1.0, 1.0)]], "black", "contour");
        p.legend("A", CLASS_COLORS[0]);
        let s = p.finish();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a &lt; b"));
        assert!(s.contains(r#"class="contour" d="M0 0L1 1""#));
    }
}
