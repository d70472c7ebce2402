//! Geodesic tracing by developing triangles one at a time.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Vec3;
use crate::trig::TOL;

use super::{ConeSurface, EdgeRef};

/// Position and unit direction in the chart of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceState {
    pub triangle: usize,
    pub point: Vec3,
    pub dir: Vec3,
}

impl TraceState {
    /// Validates that `point` lies in the triangle and `dir` is a unit tangent there.
    pub fn new(s: &ConeSurface, triangle: usize, point: Vec3, dir: Vec3) -> Result<Self> {
        if triangle >= s.triangles().len() {
            return Err(Error::InvalidInput(format!("no triangle {triangle}")));
        }
        let chart = s.chart_kind();
        let c = s.chart(triangle);
        if !c.contains(&point, 1e-12) {
            return Err(Error::InvalidInput("start point outside its triangle".into()));
        }
        if (dir.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput("direction is not a unit vector".into()));
        }
        Ok(TraceState {
            triangle,
            point: chart.renormalize(&point),
            dir: chart.retangent(&point, &dir),
        })
    }

    /// Starting on side `edge` of `triangle` at distance `param` from its start,
    /// heading inwards at `angle ∈ (0, π)` from the side's direction.
    pub fn on_edge(s: &ConeSurface, r: EdgeRef, param: f64, angle: f64) -> Self {
        let chart = s.chart_kind();
        let line = &s.chart(r.triangle).edges[r.edge];
        let scale = s.kappa().scale();
        let along = chart.direction(&line.start, &line.end);
        let point = chart.exp(&line.start, &along, param * scale).0;
        let dir = line.tangent(chart, &point) * angle.cos() + line.inward(chart, &point) * angle.sin();
        TraceState {
            triangle: r.triangle,
            point,
            dir,
        }
    }

    pub fn reversed(&self) -> Self {
        TraceState {
            dir: -self.dir,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub triangle: usize,
    #[serde(serialize_with = "ser_vec")]
    pub entry: Vec3,
    #[serde(serialize_with = "ser_vec")]
    pub exit: Vec3,
    pub length: f64,
}

fn ser_vec<S: serde::Serializer>(v: &Vec3, s: S) -> std::result::Result<S::Ok, S::Error> {
    [v.x, v.y, v.z].serialize(s)
}

/// Passage from one triangle into its neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    /// Side through which the path enters the new triangle.
    pub into: EdgeRef,
    /// Distance along `into` from its start vertex.
    pub param: f64,
    /// Angle between the path and `into`'s direction, in (0, π).
    pub angle: f64,
    /// Path length at the crossing.
    pub at_length: f64,
    /// Side through which the previous triangle was left.
    pub exit_edge: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Termination {
    Open,
    Closed,
    HitVertex { vertex: usize, triangle: usize, slot: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicPath {
    pub segments: Vec<Segment>,
    pub crossings: Vec<Crossing>,
    pub length: f64,
    pub status: Termination,
    #[serde(skip)]
    pub end: TraceState,
}

impl GeodesicPath {
    /// (triangle, exit side) for every completed step; used to compare nearby paths.
    pub fn itinerary(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.crossings.len() + 1);
        let mut tri = self.segments.first().map(|s| s.triangle).unwrap_or(0);
        for c in &self.crossings {
            out.push((tri, c.exit_edge));
            tri = c.into.triangle;
        }
        out
    }
}

/// Upper bound on the number of triangle traversals in one trace.
const MAX_STEPS: usize = 2_000_000;

pub(crate) struct TraceOptions {
    pub max_length: f64,
    pub detect_closure: bool,
}

/// Traces the geodesic from `start` until `max_length`, a vertex, or closure.
pub fn trace_geodesic(s: &ConeSurface, start: TraceState, max_length: f64) -> GeodesicPath {
    trace(
        s,
        start,
        &TraceOptions {
            max_length,
            detect_closure: true,
        },
    )
}

pub(crate) fn trace(s: &ConeSurface, start: TraceState, opts: &TraceOptions) -> GeodesicPath {
    let chart = s.chart_kind();
    let scale = s.kappa().scale();
    let vertex_tol = TOL * scale;
    let close_tol = 1e-7;
    let mut segments = Vec::new();
    let mut crossings = Vec::new();
    let mut state = start;
    let mut length = 0.0;
    let mut status = Termination::Open;

    for step in 0..MAX_STEPS {
        let tc = s.chart(state.triangle);
        let (p, d) = (state.point, state.dir);
        let mut exit_edge = 0;
        let mut exit_t = f64::INFINITY;
        for (e, line) in tc.edges.iter().enumerate() {
            let t = line.exit_time(chart, &p, &d);
            if t < exit_t {
                exit_t = t;
                exit_edge = e;
            }
        }
        let remaining = (opts.max_length - length) * scale;

        // closure: does this segment pass through the start point with the start direction?
        if opts.detect_closure && step > 0 && state.triangle == start.triangle {
            let tau = match chart {
                crate::model::Chart::Sphere => start.point.dot(&d).atan2(start.point.dot(&p)),
                crate::model::Chart::Plane => (start.point - p).dot(&d),
            };
            let reach = exit_t.min(remaining);
            if tau >= -close_tol * scale && tau <= reach + close_tol * scale {
                let (q, dq) = chart.exp(&p, &d, tau);
                if chart.dist(&q, &start.point) < close_tol * scale
                    && (dq - start.dir).norm() < close_tol
                {
                    segments.push(Segment {
                        triangle: state.triangle,
                        entry: p,
                        exit: q,
                        length: tau / scale,
                    });
                    length += tau / scale;
                    state = TraceState {
                        triangle: state.triangle,
                        point: q,
                        dir: dq,
                    };
                    status = Termination::Closed;
                    break;
                }
            }
        }

        if exit_t >= remaining {
            let (q, dq) = chart.exp(&p, &d, remaining.max(0.0));
            segments.push(Segment {
                triangle: state.triangle,
                entry: p,
                exit: q,
                length: remaining.max(0.0) / scale,
            });
            length = opts.max_length;
            state = TraceState {
                triangle: state.triangle,
                point: q,
                dir: dq,
            };
            break;
        }

        let (q, dq) = chart.exp(&p, &d, exit_t);
        segments.push(Segment {
            triangle: state.triangle,
            entry: p,
            exit: q,
            length: exit_t / scale,
        });
        length += exit_t / scale;

        let line = &tc.edges[exit_edge];
        let edge_len = chart.dist(&line.start, &line.end);
        let u = chart.dist(&line.start, &q);
        let hit = if u < vertex_tol {
            Some((exit_edge + 1) % 3)
        } else if edge_len - u < vertex_tol {
            Some((exit_edge + 2) % 3)
        } else {
            None
        };
        if let Some(slot) = hit {
            status = Termination::HitVertex {
                vertex: s.vertex_of(state.triangle, slot),
                triangle: state.triangle,
                slot,
            };
            state = TraceState {
                triangle: state.triangle,
                point: q,
                dir: dq,
            };
            break;
        }

        // cross: direction = c·tangent + s·inward on this side, (-c, -s) on the other
        let cos_phi = dq.dot(&line.tangent(chart, &q));
        let sin_phi = dq.dot(&line.inward(chart, &q));
        let here = EdgeRef::new(state.triangle, exit_edge);
        let there = s.partner(here);
        let nline = &s.chart(there.triangle).edges[there.edge];
        let u_new = (edge_len - u).clamp(0.0, edge_len);
        let along = chart.direction(&nline.start, &nline.end);
        let np = chart.renormalize(&chart.exp(&nline.start, &along, u_new).0);
        let nd = nline.tangent(chart, &np) * (-cos_phi) + nline.inward(chart, &np) * (-sin_phi);
        let nd = chart.retangent(&np, &nd);
        crossings.push(Crossing {
            into: there,
            param: u_new / scale,
            angle: (-sin_phi).atan2(-cos_phi),
            at_length: length,
            exit_edge,
        });
        state = TraceState {
            triangle: there.triangle,
            point: np,
            dir: nd,
        };
    }

    GeodesicPath {
        segments,
        crossings,
        length,
        status,
        end: state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKappa;
    use crate::surface::{double_triangle, round_sphere, ConeSurface};
    use crate::trig::TriangleShape;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn flat_torus() -> ConeSurface {
        // unit square split along its diagonal; triangle 0 = (0,0),(1,0),(1,1), triangle 1 = (0,0),(1,1),(0,1)
        let d = 2f64.sqrt();
        let t0 = TriangleShape::new(ModelKappa::FLAT, [1.0, d, 1.0]).unwrap();
        let t1 = TriangleShape::new(ModelKappa::FLAT, [1.0, 1.0, d]).unwrap();
        ConeSurface::build(
            ModelKappa::FLAT,
            vec![t0, t1],
            &[[[0, 1], [1, 2]], [[0, 0], [1, 1]], [[0, 2], [1, 0]]],
        )
        .unwrap()
    }

    #[test]
    fn flat_torus_closes_at_unit_length() {
        let s = flat_torus();
        assert_eq!(s.euler_characteristic(), 0);
        assert!(s.cone_points().is_empty());
        let p = s.point_in(0, [0.2, 0.5, 0.3]);
        // triangle 0 has vertex 0 at the origin and vertex 1 along +x
        let dir = crate::model::Vec3::new(1.0, 0.0, 0.0);
        let path = trace_geodesic(&s, TraceState::new(&s, 0, p, dir).unwrap(), 10.0);
        assert_eq!(path.status, Termination::Closed);
        assert_abs_diff_eq!(path.length, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn great_circles_close_at_pi() {
        let s = round_sphere();
        for (t, w, a) in [(0, [0.3, 0.3, 0.4], 0.3), (3, [0.1, 0.7, 0.2], 2.0), (5, [0.5, 0.25, 0.25], 4.0)] {
            let p = s.point_in(t, w);
            let d = s.direction_at(t, &p, a);
            let path = trace_geodesic(&s, TraceState::new(&s, t, p, d).unwrap(), 10.0);
            assert_eq!(path.status, Termination::Closed);
            assert_abs_diff_eq!(path.length, PI, epsilon = 1e-7);
        }
    }

    #[test]
    fn perpendicular_from_edge_midpoint_hits_opposite_vertex() {
        let t = TriangleShape::from_angles(ModelKappa::FOUR, [FRAC_PI_2; 3]).unwrap();
        let s = double_triangle(&t);
        let start = TraceState::on_edge(&s, EdgeRef::new(0, 0), PI / 8.0, FRAC_PI_2);
        let fwd = trace_geodesic(&s, start, 10.0);
        let back = trace_geodesic(&s, start.reversed(), 10.0);
        let (Termination::HitVertex { vertex: a, .. }, Termination::HitVertex { vertex: b, .. }) =
            (fwd.status, back.status)
        else {
            panic!("expected both ends to hit a vertex");
        };
        assert_eq!(a, b);
        assert_eq!(a, s.vertex_of(0, 0));
        assert_abs_diff_eq!(fwd.length + back.length, FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn retracing_returns_to_start() {
        let t = TriangleShape::from_angles(ModelKappa::FOUR, [2.0 * PI / 3.0; 3]).unwrap();
        let s = double_triangle(&t);
        let p = s.point_in(0, [0.3, 0.3, 0.4]);
        let d = s.direction_at(0, &p, 0.77);
        let start = TraceState::new(&s, 0, p, d).unwrap();
        let fwd = trace(&s, start, &TraceOptions { max_length: 2.3, detect_closure: false });
        assert_eq!(fwd.status, Termination::Open);
        let back = trace(&s, fwd.end.reversed(), &TraceOptions { max_length: 2.3, detect_closure: false });
        assert_eq!(back.end.triangle, 0);
        assert!((back.end.point - p).norm() < 1e-7);
        assert!((back.end.dir + d).norm() < 1e-7);
    }
}
