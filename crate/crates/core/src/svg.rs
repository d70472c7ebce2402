//! Static SVG figures: triangle-group tilings and developed geodesic paths.

use std::fmt::Write;

use nalgebra::Matrix3;

use crate::model::{Chart, Vec3};
use crate::surface::{ConeSurface, GeodesicPath, TriangleGroupTiling};

const SIZE: f64 = 512.0;
const ARC_SAMPLES: usize = 24;

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="{lo} {lo} {w} {w}">"#,
        s = SIZE,
        lo = -SIZE / 2.0,
        w = SIZE
    );
    let _ = writeln!(out, "<title>{title}</title>");
}

fn polyline(out: &mut String, pts: &[(f64, f64)], attrs: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
    let _ = writeln!(out, r#"<polyline points="{}" {attrs}/>"#, coords.join(" "));
}

fn arc(chart: Chart, a: &Vec3, b: &Vec3) -> Vec<Vec3> {
    (0..=ARC_SAMPLES)
        .map(|k| chart.lerp(a, b, k as f64 / ARC_SAMPLES as f64))
        .collect()
}

/// Orthographic view of the tiling from above the base tile.
pub fn tiling_svg(t: &TriangleGroupTiling) -> String {
    let centre = (t.base[0] + t.base[1] + t.base[2]).normalize();
    let e1 = (t.base[0] - centre * centre.dot(&t.base[0])).normalize();
    let e2 = centre.cross(&e1);
    let r = SIZE * 0.45;
    let project = |p: &Vec3| (r * p.dot(&e1), -r * p.dot(&e2));
    let mut out = String::new();
    let [p, q, s] = t.multiplicities;
    header(&mut out, &format!("({p},{q},{s}) triangle group, {} tiles", t.len()));
    let _ = writeln!(out, r##"<circle cx="0" cy="0" r="{r:.3}" fill="none" stroke="#999"/>"##);
    for (g, m) in t.matrices.iter().enumerate() {
        let verts = t.base.map(|v| m * v);
        let mid = (verts[0] + verts[1] + verts[2]).normalize();
        if mid.dot(&centre) <= 0.0 {
            continue;
        }
        let mut pts = Vec::new();
        for i in 0..3 {
            pts.extend(arc(Chart::Sphere, &verts[i], &verts[(i + 1) % 3]).iter().map(project));
        }
        let fill = if t.odd[g] { "#d8d8d8" } else { "#ffffff" };
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="{fill}" stroke="#333" stroke-width="0.6"/>"##,
            coords.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Rigid motion x ↦ m·(x − from) + to between two triangle charts.
#[derive(Clone, Copy)]
struct Motion {
    m: Matrix3<f64>,
    from: Vec3,
    to: Vec3,
}

impl Motion {
    fn identity() -> Self {
        Motion {
            m: Matrix3::identity(),
            from: Vec3::zeros(),
            to: Vec3::zeros(),
        }
    }

    fn apply(&self, x: &Vec3) -> Vec3 {
        self.m * (x - self.from) + self.to
    }

    fn then(&self, inner: &Motion) -> Motion {
        // self ∘ inner
        Motion {
            m: self.m * inner.m,
            from: inner.from,
            to: self.apply(&inner.to),
        }
    }
}

fn frame(chart: Chart, a: &Vec3, b: &Vec3) -> Matrix3<f64> {
    match chart {
        Chart::Sphere => {
            let u = chart.direction(a, b);
            Matrix3::from_columns(&[*a, u, a.cross(&u)])
        }
        Chart::Plane => {
            let u = (b - a).normalize();
            Matrix3::from_columns(&[u, Vec3::z().cross(&u), Vec3::z()])
        }
    }
}

/// Motion carrying side (a_new → b_new) onto side (a_old → b_old).
fn glue_motion(chart: Chart, a_new: &Vec3, b_new: &Vec3, a_old: &Vec3, b_old: &Vec3) -> Motion {
    let m = frame(chart, a_old, b_old) * frame(chart, a_new, b_new).transpose();
    match chart {
        Chart::Sphere => Motion {
            m,
            ..Motion::identity()
        },
        Chart::Plane => Motion {
            m,
            from: *a_new,
            to: *a_old,
        },
    }
}

/// Develops the triangles along `path` into one chart and draws the path in it.
///
/// Spherical charts use the azimuthal equidistant projection centred at the start.
pub fn path_svg(s: &ConeSurface, path: &GeodesicPath) -> String {
    let chart = s.chart_kind();
    let mut out = String::new();
    header(&mut out, &format!("developed geodesic, length {:.6}", path.length));
    let Some(first) = path.segments.first() else {
        out.push_str("</svg>\n");
        return out;
    };
    let mut motions = vec![Motion::identity()];
    for c in &path.crossings {
        let prev = *motions.last().unwrap_or(&Motion::identity());
        let old_tri = path.segments[motions.len() - 1].triangle;
        let old = s.chart(old_tri).verts;
        let new = s.chart(c.into.triangle).verts;
        let (e_in, e_out) = (c.into.edge, c.exit_edge);
        let g = glue_motion(
            chart,
            &new[(e_in + 1) % 3],
            &new[(e_in + 2) % 3],
            &old[(e_out + 2) % 3],
            &old[(e_out + 1) % 3],
        );
        motions.push(prev.then(&g));
        if motions.len() >= path.segments.len() {
            break;
        }
    }

    let centre = first.entry;
    let proj: Box<dyn Fn(&Vec3) -> (f64, f64)> = match chart {
        Chart::Sphere => {
            let (e1, e2) = {
                let t = if centre.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
                let e1 = (t - centre * centre.dot(&t)).normalize();
                (e1, centre.cross(&e1))
            };
            let r = SIZE * 0.45 / std::f64::consts::PI;
            Box::new(move |p: &Vec3| {
                let t = p - centre * centre.dot(p);
                let ang = t.norm().atan2(centre.dot(p));
                let n = t.norm();
                if n < 1e-15 {
                    (0.0, 0.0)
                } else {
                    (r * ang * t.dot(&e1) / n, -r * ang * t.dot(&e2) / n)
                }
            })
        }
        Chart::Plane => {
            let all: Vec<Vec3> = path
                .segments
                .iter()
                .zip(&motions)
                .flat_map(|(seg, m)| s.chart(seg.triangle).verts.map(|v| m.apply(&v)))
                .collect();
            let extent = all.iter().map(|v| (v - centre).norm()).fold(1e-9, f64::max);
            let r = SIZE * 0.45 / extent;
            Box::new(move |p: &Vec3| (r * (p.x - centre.x), -r * (p.y - centre.y)))
        }
    };

    for (seg, m) in path.segments.iter().zip(&motions) {
        let v = s.chart(seg.triangle).verts.map(|x| m.apply(&x));
        let mut pts = Vec::new();
        for i in 0..3 {
            pts.extend(arc(chart, &v[i], &v[(i + 1) % 3]).iter().map(|p| proj(p)));
        }
        polyline(&mut out, &pts, r##"fill="none" stroke="#aaa" stroke-width="0.6""##);
    }
    for (seg, m) in path.segments.iter().zip(&motions) {
        let pts: Vec<(f64, f64)> = arc(chart, &m.apply(&seg.entry), &m.apply(&seg.exit))
            .iter()
            .map(|p| proj(p))
            .collect();
        polyline(&mut out, &pts, r##"fill="none" stroke="#c00" stroke-width="1.5""##);
    }
    let (x, y) = proj(&centre);
    let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="#c00"/>"##);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKappa;
    use crate::surface::{double_triangle, trace_geodesic, triangle_group_tiling, EdgeRef, TraceState};
    use crate::trig::TriangleShape;

    #[test]
    fn tiling_figure_has_front_tiles() {
        let t = triangle_group_tiling([2, 3, 4]).unwrap();
        let svg = tiling_svg(&t);
        assert!(svg.starts_with("<svg"));
        let n = svg.matches("<polygon").count();
        assert!(n > 10 && n < 48, "{n}");
    }

    #[test]
    fn developed_path_is_straight_in_the_plane() {
        let t = TriangleShape::new(ModelKappa::FLAT, [1.0, 1.0, 1.0]).unwrap();
        let s = double_triangle(&t);
        let start = TraceState::on_edge(&s, EdgeRef::new(0, 0), 0.3, 1.1);
        let path = trace_geodesic(&s, start, 4.0);
        let svg = path_svg(&s, &path);
        assert!(svg.contains("#c00"));
        // the developed segments join up: each exit is the next entry
        let chart = s.chart_kind();
        let mut m = Motion::identity();
        let mut last = m.apply(&path.segments[0].exit);
        for (k, c) in path.crossings.iter().enumerate().take(path.segments.len() - 1) {
            let old = s.chart(path.segments[k].triangle).verts;
            let new = s.chart(c.into.triangle).verts;
            let g = glue_motion(
                chart,
                &new[(c.into.edge + 1) % 3],
                &new[(c.into.edge + 2) % 3],
                &old[(c.exit_edge + 2) % 3],
                &old[(c.exit_edge + 1) % 3],
            );
            m = m.then(&g);
            let entry = m.apply(&path.segments[k + 1].entry);
            assert!((entry - last).norm() < 1e-9);
            last = m.apply(&path.segments[k + 1].exit);
        }
        let a = path.segments[0].entry;
        let d = (path.segments[0].exit - a).normalize();
        assert!(((last - a).normalize() - d).norm() < 1e-9);
    }
}
