use std::fmt::Write;

use logvoronoi::polytope::{face_lattice_of, AffineFrame, VPolytope};

pub const IN_COLOR: &str = "#2ca02c";
pub const OUT_COLOR: &str = "#e377c2";
pub const BOUNDARY_COLOR: &str = "#1f77b4";
pub const UNDETERMINED_COLOR: &str = "#7f7f7f";

enum Item {
    Polygon { pts: Vec<[f64; 2]>, stroke: String, fill: String },
    Line { a: [f64; 2], b: [f64; 2], stroke: String },
    Dot { p: [f64; 2], fill: String },
}

/// Collects shapes in figure coordinates and renders them scaled to a square canvas.
pub struct Figure {
    title: String,
    items: Vec<Item>,
}

impl Figure {
    pub fn new(title: &str) -> Self {
        Figure { title: title.to_string(), items: Vec::new() }
    }

    pub fn polygon(&mut self, pts: Vec<[f64; 2]>, stroke: &str, fill: &str) {
        self.items.push(Item::Polygon { pts, stroke: stroke.into(), fill: fill.into() });
    }

    pub fn line(&mut self, a: [f64; 2], b: [f64; 2], stroke: &str) {
        self.items.push(Item::Line { a, b, stroke: stroke.into() });
    }

    pub fn dot(&mut self, p: [f64; 2], fill: &str) {
        self.items.push(Item::Dot { p, fill: fill.into() });
    }

    fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut add = |p: &[f64; 2]| {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        };
        for item in &self.items {
            match item {
                Item::Polygon { pts, .. } => pts.iter().for_each(&mut add),
                Item::Line { a, b, .. } => {
                    add(a);
                    add(b);
                }
                Item::Dot { p, .. } => add(p),
            }
        }
        if !lo[0].is_finite() {
            return ([0.0, 0.0], [1.0, 1.0]);
        }
        (lo, hi)
    }

    pub fn render(&self) -> String {
        let size = 600.0;
        let margin = 30.0;
        let (lo, hi) = self.bounds();
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let scale = (size - 2.0 * margin) / span;
        let off = [
            margin + 0.5 * (size - 2.0 * margin - (hi[0] - lo[0]) * scale),
            margin + 0.5 * (size - 2.0 * margin - (hi[1] - lo[1]) * scale),
        ];
        let map = |p: &[f64; 2]| -> (f64, f64) {
            (off[0] + (p[0] - lo[0]) * scale, size - (off[1] + (p[1] - lo[1]) * scale))
        };
        let mut s = String::new();
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">"
        );
        let _ = writeln!(s, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        for item in &self.items {
            match item {
                Item::Polygon { pts, stroke, fill } => {
                    let coords: Vec<String> = pts
                        .iter()
                        .map(|p| {
                            let (x, y) = map(p);
                            format!("{x:.3},{y:.3}")
                        })
                        .collect();
                    let _ = writeln!(
                        s,
                        "<polygon points=\"{}\" stroke=\"{stroke}\" fill=\"{fill}\" fill-opacity=\"0.25\" stroke-width=\"1.2\"/>",
                        coords.join(" ")
                    );
                }
                Item::Line { a, b, stroke } => {
                    let (x1, y1) = map(a);
                    let (x2, y2) = map(b);
                    let _ = writeln!(
                        s,
                        "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" stroke=\"{stroke}\" stroke-width=\"1\"/>"
                    );
                }
                Item::Dot { p, fill } => {
                    let (x, y) = map(p);
                    let _ = writeln!(s, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"1.6\" fill=\"{fill}\"/>");
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Fixed isometric camera.
pub fn isometric(x: &[f64]) -> [f64; 2] {
    let c = 3f64.sqrt() / 2.0;
    [(x[0] - x[1]) * c, x[2] - 0.5 * (x[0] + x[1])]
}

fn pad2(y: &[f64]) -> [f64; 2] {
    [y.first().copied().unwrap_or(0.0), y.get(1).copied().unwrap_or(0.0)]
}

/// Draws a polytope of dimension at most 3 given a map from ambient points to
/// figure-space coordinates of the same dimension as the polytope's hull
/// (`to_local` for 1-D and 2-D, a 3-D coordinate map followed by [`isometric`] for 3-D).
pub fn draw_polytope<F>(fig: &mut Figure, v: &VPolytope<f64>, coords: F, stroke: &str, fill: &str)
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let dim = v.dim(1e-9);
    let pts: Vec<Vec<f64>> = v.vertices.iter().map(|x| coords(x)).collect();
    match dim {
        0 => {
            if let Some(p) = pts.first() {
                fig.dot(pad2(p), stroke);
            }
        }
        1 => {
            let (a, b) = extreme_pair(&pts);
            fig.line(pad2(&a), pad2(&b), stroke);
        }
        2 if pts.iter().all(|p| p.len() == 2) => fig.polygon(ordered_polygon(&pts), stroke, fill),
        _ => {
            let lattice = face_lattice_of(v, 1e-9);
            for edge in lattice.faces_of_dim(1) {
                let ends: Vec<&Vec<f64>> = edge.vertices.iter().map(|&k| &pts[k]).collect();
                if ends.len() == 2 {
                    fig.line(project(ends[0]), project(ends[1]), stroke);
                }
            }
        }
    }
}

fn project(p: &[f64]) -> [f64; 2] {
    if p.len() >= 3 {
        isometric(p)
    } else {
        pad2(p)
    }
}

fn extreme_pair(pts: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let mut best = (0, 0, -1.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (pts[best.0].clone(), pts[best.1].clone())
}

/// Vertices of a convex polygon in counter-clockwise order.
pub fn ordered_polygon(pts: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let mut out: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    out.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.partial_cmp(&tb).unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Local coordinates of the affine hull, padded to two entries.
pub fn frame_coords(frame: &AffineFrame<f64>) -> impl Fn(&[f64]) -> Vec<f64> + '_ {
    move |x| {
        let mut y = frame.to_local(x);
        y.resize(y.len().max(2), 0.0);
        y
    }
}
