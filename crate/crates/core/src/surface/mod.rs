//! Closed cone surfaces glued from model triangles.
//!
//! Gluings are orientation preserving: when side `e` of triangle `t` is glued
//! to side `e'` of `t'`, the start of one side is identified with the end of
//! the other.

mod certify;
mod cover;
mod covering;
mod geodesic;
mod search;

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::{PI, TAU};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use crate::model::{Chart, ModelKappa, Vec3};
use crate::trig::{TriangleChart, TriangleShape, TOL};

pub use certify::{global_cat_verdict, grompi4_certify};
pub use cover::{triangle_group_cover, triangle_group_tiling, TriangleGroupTiling};
pub use covering::{covering_radius, CoveringRadius};
pub use geodesic::{trace_geodesic, Crossing, GeodesicPath, Segment, Termination, TraceState};
pub use search::{find_closed_geodesics, ClosedGeodesic, GeodesicKind, GeodesicSearch, SearchGrid};

/// Tolerance for glued edge lengths.
pub const EDGE_TOL: f64 = 1e-9;

/// One side of one triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub triangle: usize,
    pub edge: usize,
}

impl EdgeRef {
    pub fn new(triangle: usize, edge: usize) -> Self {
        EdgeRef { triangle, edge }
    }
}

/// A corner of a triangle: triangle index and vertex slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Corner {
    pub triangle: usize,
    pub slot: usize,
}

/// A vertex class of the surface with its corners in counterclockwise order.
#[derive(Debug, Clone, Serialize)]
pub struct Vertex {
    pub angle: f64,
    pub corners: Vec<Corner>,
    /// Angle at which each corner starts, measured counterclockwise from the first.
    pub offsets: Vec<f64>,
}

impl Vertex {
    pub fn valence(&self) -> usize {
        self.corners.len()
    }

    pub fn is_smooth(&self) -> bool {
        (self.angle - TAU).abs() <= TOL
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangleSpec {
    pub sides: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConePointSpec {
    pub vertex: usize,
    pub angle: f64,
}

/// On-disk description of a cone surface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceDescription {
    pub kappa: f64,
    pub triangles: Vec<TriangleSpec>,
    pub gluing: Vec<[[usize; 2]; 2]>,
    /// Optional annotation written for quotient spheres; checked on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_points: Option<Vec<ConePointSpec>>,
}

impl SurfaceDescription {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A closed surface glued from triangles of one model surface M²_κ.
#[derive(Debug, Clone)]
pub struct ConeSurface {
    kappa: ModelKappa,
    triangles: Vec<TriangleShape>,
    angles: Vec<[f64; 3]>,
    charts: Vec<TriangleChart>,
    partner: Vec<[EdgeRef; 3]>,
    corner_vertex: Vec<[usize; 3]>,
    vertices: Vec<Vertex>,
    /// One representative per glued edge pair (the smaller reference).
    edge_classes: Vec<EdgeRef>,
    area: f64,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl ConeSurface {
    pub fn from_description(desc: &SurfaceDescription) -> Result<Self> {
        let kappa = ModelKappa::new(desc.kappa)?;
        let triangles = desc
            .triangles
            .iter()
            .map(|t| TriangleShape::new(kappa, t.sides))
            .collect::<Result<Vec<_>>>()?;
        let surface = Self::build(kappa, triangles, &desc.gluing)?;
        if let Some(points) = &desc.cone_points {
            surface.check_cone_annotation(points)?;
        }
        Ok(surface)
    }

    /// Validates the gluing and derives vertices, cone angles and area.
    pub fn build(
        kappa: ModelKappa,
        triangles: Vec<TriangleShape>,
        gluing: &[[[usize; 2]; 2]],
    ) -> Result<Self> {
        let n = triangles.len();
        if n == 0 {
            return Err(Error::InvalidInput("surface has no triangles".into()));
        }
        if triangles.iter().any(|t| t.kappa() != kappa) {
            return Err(Error::InvalidInput("triangles have mixed curvature".into()));
        }
        let mut partner: Vec<[Option<EdgeRef>; 3]> = vec![[None; 3]; n];
        for pair in gluing {
            let [a, b] = pair.map(|[t, e]| EdgeRef::new(t, e));
            for r in [a, b] {
                if r.triangle >= n || r.edge >= 3 {
                    return Err(Error::InvalidInput(format!(
                        "gluing refers to missing edge ({}, {})",
                        r.triangle, r.edge
                    )));
                }
            }
            if a == b {
                return Err(Error::NonManifoldGluing(format!(
                    "edge ({}, {}) glued to itself",
                    a.triangle, a.edge
                )));
            }
            for r in [a, b] {
                if partner[r.triangle][r.edge].is_some() {
                    return Err(Error::NonManifoldGluing(format!(
                        "edge ({}, {}) glued more than once",
                        r.triangle, r.edge
                    )));
                }
            }
            let la = triangles[a.triangle].sides()[a.edge];
            let lb = triangles[b.triangle].sides()[b.edge];
            if (la - lb).abs() > EDGE_TOL {
                return Err(Error::EdgeLengthMismatch {
                    t0: a.triangle,
                    e0: a.edge,
                    t1: b.triangle,
                    e1: b.edge,
                    l0: la,
                    l1: lb,
                });
            }
            partner[a.triangle][a.edge] = Some(b);
            partner[b.triangle][b.edge] = Some(a);
        }
        let mut full = Vec::with_capacity(n);
        for (t, row) in partner.iter().enumerate() {
            let mut out = [EdgeRef::new(0, 0); 3];
            for e in 0..3 {
                out[e] = row[e].ok_or(Error::UnmatchedEdge(t, e))?;
            }
            full.push(out);
        }
        let partner = full;

        // vertex classes: side e runs from slot e+1 to slot e+2
        let mut parent: Vec<usize> = (0..3 * n).collect();
        for t in 0..n {
            for e in 0..3 {
                let o = partner[t][e];
                let pairs = [
                    (3 * t + (e + 1) % 3, 3 * o.triangle + (o.edge + 2) % 3),
                    (3 * t + (e + 2) % 3, 3 * o.triangle + (o.edge + 1) % 3),
                ];
                for (x, y) in pairs {
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                    if rx != ry {
                        parent[rx.max(ry)] = rx.min(ry);
                    }
                }
            }
        }
        let angles: Vec<[f64; 3]> = triangles.iter().map(|t| t.angles()).collect();
        let mut corner_vertex = vec![[usize::MAX; 3]; n];
        let mut vertices: Vec<Vertex> = Vec::new();
        for t in 0..n {
            for c in 0..3 {
                if corner_vertex[t][c] != usize::MAX {
                    continue;
                }
                let root = find(&mut parent, 3 * t + c);
                let class_size = (0..3 * n).filter(|&i| find(&mut parent, i) == root).count();
                // walk the fan counterclockwise: leave corner c across side c+1
                let id = vertices.len();
                let mut corners = Vec::new();
                let mut offsets = Vec::new();
                let mut total = 0.0;
                let (mut ct, mut cc) = (t, c);
                loop {
                    if corner_vertex[ct][cc] != usize::MAX {
                        return Err(Error::NonManifoldGluing(format!(
                            "corner ({ct}, {cc}) visited twice while walking a vertex link"
                        )));
                    }
                    corner_vertex[ct][cc] = id;
                    corners.push(Corner { triangle: ct, slot: cc });
                    offsets.push(total);
                    total += angles[ct][cc];
                    let o = partner[ct][(cc + 1) % 3];
                    ct = o.triangle;
                    cc = (o.edge + 1) % 3;
                    if (ct, cc) == (t, c) {
                        break;
                    }
                }
                if corners.len() != class_size {
                    return Err(Error::NonManifoldGluing(format!(
                        "vertex link at corner ({t}, {c}) is not a single circle"
                    )));
                }
                vertices.push(Vertex {
                    angle: total,
                    corners,
                    offsets,
                });
            }
        }
        let mut edge_classes = Vec::new();
        for t in 0..n {
            for e in 0..3 {
                let here = EdgeRef::new(t, e);
                if here < partner[t][e] {
                    edge_classes.push(here);
                }
            }
        }
        let charts = triangles.iter().map(|t| t.layout()).collect();
        let area = triangles.iter().map(|t| t.area()).sum();
        Ok(ConeSurface {
            kappa,
            triangles,
            angles,
            charts,
            partner,
            corner_vertex,
            vertices,
            edge_classes,
            area,
        })
    }

    fn check_cone_annotation(&self, points: &[ConePointSpec]) -> Result<()> {
        let actual: Vec<(usize, f64)> = self.cone_points();
        if actual.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "annotation lists {} cone points, surface has {}",
                points.len(),
                actual.len()
            )));
        }
        for p in points {
            match actual.iter().find(|(v, _)| *v == p.vertex) {
                Some((_, angle)) if (angle - p.angle).abs() <= 1e-7 => {}
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "annotated cone point {} with angle {} does not match the surface",
                        p.vertex, p.angle
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn description(&self) -> SurfaceDescription {
        let mut gluing = Vec::new();
        for &r in &self.edge_classes {
            let o = self.partner(r);
            gluing.push([[r.triangle, r.edge], [o.triangle, o.edge]]);
        }
        SurfaceDescription {
            kappa: self.kappa.value(),
            triangles: self
                .triangles
                .iter()
                .map(|t| TriangleSpec { sides: t.sides() })
                .collect(),
            gluing,
            cone_points: None,
        }
    }

    /// Stable identifier of the triangle data and gluing.
    pub fn fingerprint(&self) -> String {
        let mut h = DefaultHasher::new();
        self.kappa.value().to_bits().hash(&mut h);
        for t in &self.triangles {
            for s in t.sides() {
                s.to_bits().hash(&mut h);
            }
        }
        for r in &self.edge_classes {
            (r, self.partner(*r)).hash(&mut h);
        }
        format!("{:016x}", h.finish())
    }

    pub fn kappa(&self) -> ModelKappa {
        self.kappa
    }

    pub fn chart_kind(&self) -> Chart {
        self.kappa.chart()
    }

    pub fn triangles(&self) -> &[TriangleShape] {
        &self.triangles
    }

    pub fn triangle_angles(&self, t: usize) -> [f64; 3] {
        self.angles[t]
    }

    pub fn chart(&self, t: usize) -> &TriangleChart {
        &self.charts[t]
    }

    pub fn partner(&self, r: EdgeRef) -> EdgeRef {
        self.partner[r.triangle][r.edge]
    }

    pub fn edge_classes(&self) -> &[EdgeRef] {
        &self.edge_classes
    }

    /// Index of the edge class containing `r`.
    pub fn edge_class_of(&self, r: EdgeRef) -> usize {
        let rep = r.min(self.partner(r));
        self.edge_classes
            .binary_search(&rep)
            .expect("edge classes are sorted and complete")
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_of(&self, t: usize, slot: usize) -> usize {
        self.corner_vertex[t][slot]
    }

    /// Endpoints (vertex ids) of side `e` of triangle `t`.
    pub fn edge_vertices(&self, r: EdgeRef) -> (usize, usize) {
        (
            self.corner_vertex[r.triangle][(r.edge + 1) % 3],
            self.corner_vertex[r.triangle][(r.edge + 2) % 3],
        )
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_classes.len() as i64 + self.triangles.len() as i64
    }

    /// Vertices whose cone angle differs from 2π, with their angles.
    pub fn cone_points(&self) -> Vec<(usize, f64)> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_smooth())
            .map(|(i, v)| (i, v.angle))
            .collect()
    }

    /// κ·Area + Σ(2π − θ_v) − 2πχ; zero up to rounding on every valid surface.
    pub fn gauss_bonnet_defect(&self) -> f64 {
        let defects: f64 = self.vertices.iter().map(|v| TAU - v.angle).sum();
        self.kappa.value() * self.area + defects - TAU * self.euler_characteristic() as f64
    }

    /// Point of triangle `t` with the given weights on its vertices.
    pub fn point_in(&self, t: usize, weights: [f64; 3]) -> Vec3 {
        self.charts[t].blend(weights)
    }

    /// Unit tangent at `p` in triangle `t`, rotated by `angle` from the direction towards vertex 1.
    pub fn direction_at(&self, t: usize, p: &Vec3, angle: f64) -> Vec3 {
        let chart = self.chart_kind();
        let c = &self.charts[t];
        let target = if chart.dist(p, &c.verts[1]) > 1e-12 {
            c.verts[1]
        } else {
            c.verts[2]
        };
        let d = chart.direction(p, &target);
        chart.rotate(p, &d, angle)
    }
}

/// Two copies of `t` glued along their boundaries.
pub fn double_triangle(t: &TriangleShape) -> ConeSurface {
    let [a, b, c] = t.sides();
    let mirror = TriangleShape::new(t.kappa(), [a, c, b]).expect("mirror of a valid triangle");
    ConeSurface::build(
        t.kappa(),
        vec![*t, mirror],
        &[[[0, 0], [1, 0]], [[0, 1], [1, 2]], [[0, 2], [1, 1]]],
    )
    .expect("double of a valid triangle")
}

/// Octahedron of κ = 4 octant triangles: the smooth round sphere.
pub fn round_sphere() -> ConeSurface {
    let octant = TriangleShape::new(ModelKappa::FOUR, [PI / 4.0; 3]).expect("octant");
    triangle_group_cover(&octant, [2, 2, 2]).expect("octahedral tiling")
}

/// Locally CAT(κ) iff every cone angle is at least 2π.
pub fn local_cat_check(s: &ConeSurface) -> Certificate {
    let worst = s
        .vertices()
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.angle.total_cmp(&b.1.angle));
    let subject = s.fingerprint();
    match worst {
        Some((v, vert)) if vert.angle < TAU - TOL => Certificate::not_cat(
            "vertex links of length at least 2π",
            Witness::SmallConeAngle {
                vertex: v,
                angle: vert.angle,
            },
        )
        .margin("min_cone_angle_minus_2pi", vert.angle - TAU)
        .with_subject(subject),
        Some((_, vert)) => Certificate::confirmed("vertex links of length at least 2π")
            .margin("min_cone_angle_minus_2pi", vert.angle - TAU)
            .note("local condition only")
            .with_subject(subject),
        None => Certificate::confirmed("vertex links of length at least 2π").with_subject(subject),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn k4() -> ModelKappa {
        ModelKappa::FOUR
    }

    #[test]
    fn octahedron_is_round_sphere() {
        let s = round_sphere();
        assert_eq!(s.euler_characteristic(), 2);
        assert_abs_diff_eq!(s.area(), PI, epsilon = 1e-12);
        assert!(s.cone_points().is_empty());
        assert_abs_diff_eq!(s.gauss_bonnet_defect(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn double_of_equilateral_link() {
        let t = TriangleShape::from_angles(k4(), [2.0 * PI / 3.0; 3]).unwrap();
        let s = double_triangle(&t);
        let cones = s.cone_points();
        assert_eq!(cones.len(), 3);
        for (_, a) in cones {
            assert_abs_diff_eq!(a, 4.0 * PI / 3.0, epsilon = 1e-12);
        }
        assert_eq!(s.euler_characteristic(), 2);
        assert_abs_diff_eq!(s.gauss_bonnet_defect(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn doubles_of_paper_link_triangles() {
        let t = TriangleShape::from_angles(k4(), [FRAC_PI_2; 3]).unwrap();
        let mut angles: Vec<f64> = double_triangle(&t).cone_points().iter().map(|c| c.1).collect();
        angles.sort_by(f64::total_cmp);
        for a in angles {
            assert_abs_diff_eq!(a, PI, epsilon = 1e-12);
        }
        let t = TriangleShape::from_angles(k4(), [2.0 * PI / 3.0, 2.0 * PI / 3.0, FRAC_PI_2]).unwrap();
        let mut angles: Vec<f64> = double_triangle(&t).cone_points().iter().map(|c| c.1).collect();
        angles.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(angles[0], PI, epsilon = 1e-12);
        assert_abs_diff_eq!(angles[1], 4.0 * PI / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(angles[2], 4.0 * PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_double_is_rejected_at_construction() {
        assert!(TriangleShape::new(k4(), [0.2, 0.3, 0.5]).is_err());
    }

    #[test]
    fn gluing_errors() {
        let t = TriangleShape::new(k4(), [0.5, 0.5, 0.5]).unwrap();
        let u = TriangleShape::new(k4(), [0.6, 0.5, 0.5]).unwrap();
        let err = ConeSurface::build(
            k4(),
            vec![t, u],
            &[[[0, 0], [1, 0]], [[0, 1], [1, 2]], [[0, 2], [1, 1]]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::EdgeLengthMismatch { .. }));

        let err = ConeSurface::build(k4(), vec![t, t], &[[[0, 0], [1, 0]], [[0, 1], [1, 2]]])
            .unwrap_err();
        assert!(matches!(err, Error::UnmatchedEdge(..)));

        let err = ConeSurface::build(
            k4(),
            vec![t, t],
            &[[[0, 0], [1, 0]], [[0, 0], [1, 1]], [[0, 2], [1, 2]]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonManifoldGluing(_)));
    }

    #[test]
    fn local_checks() {
        assert!(local_cat_check(&round_sphere()).is_confirmed());
        let t = TriangleShape::from_angles(k4(), [FRAC_PI_2; 3]).unwrap();
        let c = local_cat_check(&double_triangle(&t));
        assert_eq!(c.verdict, crate::certificate::Verdict::NotCat);
        match &c.witnesses[0] {
            Witness::SmallConeAngle { angle, .. } => assert_abs_diff_eq!(*angle, PI, epsilon = 1e-12),
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn description_round_trip() {
        let s = round_sphere();
        let text = serde_json::to_string(&s.description()).unwrap();
        let back = ConeSurface::from_description(&SurfaceDescription::from_json(&text).unwrap()).unwrap();
        assert_eq!(back.fingerprint(), s.fingerprint());
    }

    #[test]
    fn cone_annotation_is_checked() {
        let t = TriangleShape::from_angles(k4(), [FRAC_PI_2; 3]).unwrap();
        let mut desc = double_triangle(&t).description();
        desc.cone_points = Some(vec![ConePointSpec { vertex: 0, angle: 1.0 }]);
        assert!(ConeSurface::from_description(&desc).is_err());
    }
}
