//! Triangle solving and comparison geometry in the model surfaces M²_κ.
//!
//! Side `i` of a [`TriangleShape`] is opposite vertex `i` and runs from vertex
//! `i+1` to vertex `i+2` (indices mod 3); vertices are laid out
//! counterclockwise, so the triangle lies to the left of each side.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Chart, EdgeLine, ModelKappa, ModelPoint, Vec3};

/// Absolute tolerance for angle and length comparisons.
pub const TOL: f64 = 1e-9;

/// A geodesic triangle of M²_κ stored by its side lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleShape {
    kappa: ModelKappa,
    sides: [f64; 3],
}

impl TriangleShape {
    pub fn new(kappa: ModelKappa, sides: [f64; 3]) -> Result<Self> {
        if sides.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::DegenerateTriangle(format!(
                "sides must be positive, got {sides:?}"
            )));
        }
        let perimeter: f64 = sides.iter().sum();
        for i in 0..3 {
            if perimeter - 2.0 * sides[i] <= TOL {
                return Err(Error::DegenerateTriangle(format!(
                    "triangle inequality fails for sides {sides:?}"
                )));
            }
        }
        let limit = kappa.great_circle();
        if perimeter >= limit - TOL {
            return Err(Error::PerimeterTooLarge { perimeter, limit });
        }
        Ok(TriangleShape { kappa, sides })
    }

    /// Spherical triangle (κ > 0) with prescribed angles, via the dual law of cosines.
    pub fn from_angles(kappa: ModelKappa, angles: [f64; 3]) -> Result<Self> {
        if !kappa.is_spherical() {
            return Err(Error::InvalidInput(
                "angles determine a triangle only for positive curvature".into(),
            ));
        }
        let sum: f64 = angles.iter().sum();
        if angles.iter().any(|a| *a <= 0.0 || *a >= PI) || sum <= PI + TOL {
            return Err(Error::DegenerateTriangle(format!(
                "angles {angles:?} do not form a spherical triangle"
            )));
        }
        for i in 0..3 {
            // polar triangle inequality
            if angles[(i + 1) % 3] + angles[(i + 2) % 3] - angles[i] >= PI - TOL {
                return Err(Error::DegenerateTriangle(format!(
                    "angles {angles:?} do not form a spherical triangle"
                )));
            }
        }
        let mut sides = [0.0; 3];
        for i in 0..3 {
            let (a, b, c) = (angles[i], angles[(i + 1) % 3], angles[(i + 2) % 3]);
            let cos_side = (a.cos() + b.cos() * c.cos()) / (b.sin() * c.sin());
            sides[i] = cos_side.clamp(-1.0, 1.0).acos() / kappa.scale();
        }
        TriangleShape::new(kappa, sides)
    }

    pub fn kappa(&self) -> ModelKappa {
        self.kappa
    }

    pub fn sides(&self) -> [f64; 3] {
        self.sides
    }

    pub fn perimeter(&self) -> f64 {
        self.sides.iter().sum()
    }

    /// Side lengths in the normalised chart.
    pub fn chart_sides(&self) -> [f64; 3] {
        let s = self.kappa.scale();
        self.sides.map(|x| x * s)
    }

    /// Same side lengths read in another model surface.
    pub fn with_kappa(&self, kappa: ModelKappa) -> Result<Self> {
        TriangleShape::new(kappa, self.sides)
    }

    /// Interior angles at vertices 0, 1, 2 (half-angle formulas).
    pub fn angles(&self) -> [f64; 3] {
        let [a, b, c] = self.chart_sides();
        let s = 0.5 * (a + b + c);
        let sides = [a, b, c];
        let mut out = [0.0; 3];
        for i in 0..3 {
            let (x, y, z) = (sides[i], sides[(i + 1) % 3], sides[(i + 2) % 3]);
            out[i] = if self.kappa.is_spherical() {
                2.0 * ((s - y).sin() * (s - z).sin())
                    .sqrt()
                    .atan2((s.sin() * (s - x).sin()).sqrt())
            } else {
                2.0 * ((s - y) * (s - z)).sqrt().atan2((s * (s - x)).sqrt())
            };
        }
        out
    }

    pub fn area(&self) -> f64 {
        if self.kappa.is_spherical() {
            let excess: f64 = self.angles().iter().sum::<f64>() - PI;
            excess / self.kappa.value()
        } else {
            let [a, b, c] = self.sides;
            let s = 0.5 * (a + b + c);
            (s * (s - a) * (s - b) * (s - c)).sqrt()
        }
    }

    /// Counterclockwise layout of the triangle in the normalised chart.
    pub fn layout(&self) -> TriangleChart {
        TriangleChart::new(self)
    }
}

/// Angles (A, B, C) of a valid triangle; validation happens in [`TriangleShape::new`].
pub fn solve_angles(t: &TriangleShape) -> [f64; 3] {
    t.angles()
}

/// The triangle with the same side lengths in M²_κ₂.
pub fn comparison_triangle(t: &TriangleShape, kappa2: ModelKappa) -> Result<TriangleShape> {
    t.with_kappa(kappa2)
}

/// Length of a complete circle of geodesic curvature `k_geo` in M²_κ.
pub fn circle_length(kappa: ModelKappa, k_geo: f64) -> f64 {
    let q = kappa.value() + k_geo * k_geo;
    if q <= 0.0 {
        f64::INFINITY
    } else {
        TAU / q.sqrt()
    }
}

/// Vertex positions and oriented side lines of a laid-out triangle.
#[derive(Debug, Clone, Copy)]
pub struct TriangleChart {
    pub chart: Chart,
    pub verts: [Vec3; 3],
    /// `edges[i]` runs from vertex `i+1` to vertex `i+2`.
    pub edges: [EdgeLine; 3],
}

impl TriangleChart {
    fn new(t: &TriangleShape) -> Self {
        let chart = t.kappa.chart();
        let [_, b, c] = t.chart_sides();
        let angle0 = t.angles()[0];
        let v0 = chart.origin();
        let (u1, u2) = chart.origin_frame();
        let v1 = chart.exp(&v0, &u1, c).0;
        let d2 = u1 * angle0.cos() + u2 * angle0.sin();
        let v2 = chart.exp(&v0, &d2, b).0;
        let verts = [v0, v1, v2];
        let edges = [0, 1, 2].map(|i| EdgeLine::new(chart, verts[(i + 1) % 3], verts[(i + 2) % 3]));
        TriangleChart { chart, verts, edges }
    }

    /// Chart distance from vertex `i` to the opposite side (as a segment).
    pub fn altitude(&self, i: usize) -> f64 {
        let p = self.verts[i];
        let a = self.verts[(i + 1) % 3];
        let b = self.verts[(i + 2) % 3];
        segment_distance(self.chart, &p, &a, &b)
    }

    /// Point with barycentric-like weights, projected to the chart.
    pub fn blend(&self, w: [f64; 3]) -> Vec3 {
        let p = self.verts[0] * w[0] + self.verts[1] * w[1] + self.verts[2] * w[2];
        self.chart.renormalize(&p)
    }

    /// True when `x` lies in the closed triangle up to `tol` (chart units).
    pub fn contains(&self, x: &Vec3, tol: f64) -> bool {
        self.edges.iter().all(|e| e.signed(self.chart, x) >= -tol)
    }
}

/// Chart distance from `p` to the geodesic segment `[a, b]`.
pub fn segment_distance(chart: Chart, p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = chart.dist(a, b);
    let foot = match chart {
        Chart::Sphere => {
            let n = a.cross(b).normalize();
            let f = p - n * n.dot(p);
            if f.norm() < 1e-15 {
                None
            } else {
                Some(f.normalize())
            }
        }
        Chart::Plane => {
            let t = (b - a).normalize();
            Some(a + t * (p - a).dot(&t))
        }
    };
    if let Some(f) = foot {
        if (chart.dist(a, &f) + chart.dist(&f, b) - ab).abs() < 1e-12 {
            return chart.dist(p, &f);
        }
    }
    chart.dist(p, a).min(chart.dist(p, b))
}

/// Outcome of the largeness test for κ = 4 triangles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Largeness {
    pub large: bool,
    pub altitudes: [f64; 3],
    pub min_altitude: f64,
    /// `min_altitude - π/4`; largeness admits margins down to `-TOL`.
    pub margin: f64,
}

/// A κ = 4 triangle is large when every vertex is at distance ≥ π/4 from the opposite side.
pub fn is_large(t: &TriangleShape) -> Result<Largeness> {
    if t.kappa() != ModelKappa::FOUR {
        return Err(Error::InvalidInput(format!(
            "largeness is defined for curvature 4, got {}",
            t.kappa().value()
        )));
    }
    let chart = t.layout();
    let scale = t.kappa().scale();
    let altitudes = [0, 1, 2].map(|i| chart.altitude(i) / scale);
    let min_altitude = altitudes.iter().cloned().fold(f64::INFINITY, f64::min);
    let margin = min_altitude - FRAC_PI_4;
    Ok(Largeness {
        large: margin >= -TOL,
        altitudes,
        min_altitude,
        margin,
    })
}

/// A geodesic metric space in which triangles can be sampled.
pub trait GeodesicSpace {
    type Point: Clone;
    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;
    /// Point at fraction `t ∈ [0,1]` of a geodesic from `p` to `q`.
    fn geodesic_point(&self, p: &Self::Point, q: &Self::Point, t: f64) -> Self::Point;
}

/// The model surface M²_κ as a [`GeodesicSpace`].
#[derive(Debug, Clone, Copy)]
pub struct ModelSpace {
    pub kappa: ModelKappa,
}

impl GeodesicSpace for ModelSpace {
    type Point = ModelPoint;

    fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> f64 {
        self.kappa.chart().dist(&p.0, &q.0) / self.kappa.scale()
    }

    fn geodesic_point(&self, p: &ModelPoint, q: &ModelPoint, t: f64) -> ModelPoint {
        ModelPoint(self.kappa.chart().lerp(&p.0, &q.0, t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatSample {
    pub pass: bool,
    /// Largest `d(x,y) - d(x̃,ỹ)` over sampled pairs; positive values violate.
    pub worst_margin: f64,
    pub pairs: usize,
    pub degenerate: bool,
}

/// Samples the CAT(κ) inequality on the geodesic triangle with vertices `verts`.
pub fn cat_sample_test<S: GeodesicSpace>(
    space: &S,
    verts: [S::Point; 3],
    kappa: ModelKappa,
    samples: usize,
) -> Result<CatSample> {
    // side i opposite vertex i
    let sides = [0, 1, 2].map(|i| space.distance(&verts[(i + 1) % 3], &verts[(i + 2) % 3]));
    let perimeter: f64 = sides.iter().sum();
    if perimeter >= kappa.great_circle() {
        return Err(Error::PerimeterTooLarge {
            perimeter,
            limit: kappa.great_circle(),
        });
    }
    let model = match TriangleShape::new(kappa, sides) {
        Ok(t) => t.layout(),
        Err(_) => {
            return Ok(CatSample {
                pass: true,
                worst_margin: 0.0,
                pairs: 0,
                degenerate: true,
            })
        }
    };
    let m = samples.max(2);
    let mut actual = Vec::with_capacity(3 * m);
    let mut compared = Vec::with_capacity(3 * m);
    for i in 0..3 {
        let (a, b) = ((i + 1) % 3, (i + 2) % 3);
        for j in 0..m {
            let t = j as f64 / (m - 1) as f64;
            actual.push(space.geodesic_point(&verts[a], &verts[b], t));
            compared.push(model.chart.lerp(&model.verts[a], &model.verts[b], t));
        }
    }
    let scale = kappa.scale();
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0;
    for i in 0..actual.len() {
        for j in (i + 1)..actual.len() {
            let d = space.distance(&actual[i], &actual[j]);
            let d_model = model.chart.dist(&compared[i], &compared[j]) / scale;
            worst = worst.max(d - d_model);
            pairs += 1;
        }
    }
    Ok(CatSample {
        pass: worst <= TOL,
        worst_margin: worst,
        pairs,
        degenerate: false,
    })
}
