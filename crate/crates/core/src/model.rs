//! Coordinate charts for the constant-curvature model surfaces.
//!
//! Every computation happens in a *normalised* chart: the unit sphere for
//! κ > 0 and the plane z = 0 of R³ for κ = 0. Lengths in the normalised chart
//! are `√κ · length` (κ > 0) or the length itself (κ = 0); [`ModelKappa`]
//! converts between the two.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Curvature of a model surface M²_κ. Only κ ≥ 0 is supported.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ModelKappa(f64);

impl ModelKappa {
    pub const FLAT: ModelKappa = ModelKappa(0.0);
    pub const FOUR: ModelKappa = ModelKappa(4.0);

    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(Error::InvalidInput(format!(
                "curvature must be finite and non-negative, got {kappa}"
            )));
        }
        Ok(ModelKappa(kappa))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_spherical(self) -> bool {
        self.0 > 0.0
    }

    /// Factor from model lengths to normalised-chart lengths.
    pub fn scale(self) -> f64 {
        if self.0 > 0.0 {
            self.0.sqrt()
        } else {
            1.0
        }
    }

    /// 2π/√κ, or infinity for the flat model.
    pub fn great_circle(self) -> f64 {
        if self.0 > 0.0 {
            std::f64::consts::TAU / self.0.sqrt()
        } else {
            f64::INFINITY
        }
    }

    pub fn chart(self) -> Chart {
        if self.is_spherical() {
            Chart::Sphere
        } else {
            Chart::Plane
        }
    }
}

impl TryFrom<f64> for ModelKappa {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        ModelKappa::new(v)
    }
}

impl From<ModelKappa> for f64 {
    fn from(k: ModelKappa) -> f64 {
        k.0
    }
}

/// A point of a model surface in its normalised chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint(pub Vec3);

impl ModelPoint {
    /// A point on the sphere of radius 1/√κ, given in ambient coordinates.
    pub fn on_sphere(kappa: ModelKappa, ambient: Vec3) -> Result<Self> {
        if !kappa.is_spherical() {
            return Err(Error::InvalidInput("flat model has no sphere points".into()));
        }
        let expected = 1.0 / kappa.scale();
        if (ambient.norm() - expected).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "point norm {} differs from 1/sqrt(kappa) = {expected}",
                ambient.norm()
            )));
        }
        Ok(ModelPoint(ambient * kappa.scale()))
    }

    pub fn planar(x: f64, y: f64) -> Self {
        ModelPoint(Vec3::new(x, y, 0.0))
    }

    /// Ambient coordinates on the radius-1/√κ sphere (or the plane).
    pub fn ambient(&self, kappa: ModelKappa) -> Vec3 {
        self.0 / kappa.scale()
    }
}

/// Normalised chart: unit sphere or plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Sphere,
    Plane,
}

impl Chart {
    /// Base point used when laying out a triangle's first vertex.
    pub fn origin(self) -> Vec3 {
        match self {
            Chart::Sphere => Vec3::x(),
            Chart::Plane => Vec3::zeros(),
        }
    }

    /// Oriented orthonormal tangent frame at [`Chart::origin`].
    pub fn origin_frame(self) -> (Vec3, Vec3) {
        match self {
            Chart::Sphere => (Vec3::y(), Vec3::z()),
            Chart::Plane => (Vec3::x(), Vec3::y()),
        }
    }

    /// Follows the geodesic through `p` with unit tangent `d` for length `t`.
    pub fn exp(self, p: &Vec3, d: &Vec3, t: f64) -> (Vec3, Vec3) {
        match self {
            Chart::Sphere => {
                let (s, c) = t.sin_cos();
                (p * c + d * s, d * c - p * s)
            }
            Chart::Plane => (p + d * t, *d),
        }
    }

    pub fn dist(self, p: &Vec3, q: &Vec3) -> f64 {
        match self {
            Chart::Sphere => p.cross(q).norm().atan2(p.dot(q)),
            Chart::Plane => (q - p).norm(),
        }
    }

    /// Unit tangent at `p` pointing along the geodesic towards `q`.
    pub fn direction(self, p: &Vec3, q: &Vec3) -> Vec3 {
        match self {
            Chart::Sphere => (q - p * p.dot(q)).normalize(),
            Chart::Plane => (q - p).normalize(),
        }
    }

    /// Rotates the tangent vector `v` at `p` by `angle` counterclockwise.
    pub fn rotate(self, p: &Vec3, v: &Vec3, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        v * c + self.perp(p, v) * s
    }

    /// Tangent vector at `p` obtained from `v` by a quarter turn counterclockwise.
    pub fn perp(self, p: &Vec3, v: &Vec3) -> Vec3 {
        match self {
            Chart::Sphere => p.cross(v),
            Chart::Plane => Vec3::new(-v.y, v.x, 0.0),
        }
    }

    /// Signed angle from tangent `from` to tangent `to` at `p`, in (-π, π].
    pub fn signed_angle(self, p: &Vec3, from: &Vec3, to: &Vec3) -> f64 {
        let perp = self.perp(p, from);
        to.dot(&perp).atan2(to.dot(from))
    }

    /// Point at fraction `lambda` of the geodesic from `p` to `q`.
    pub fn lerp(self, p: &Vec3, q: &Vec3, lambda: f64) -> Vec3 {
        let d = self.dist(p, q);
        if d == 0.0 {
            return *p;
        }
        let dir = self.direction(p, q);
        self.exp(p, &dir, lambda * d).0
    }

    /// Projects a vector back onto the chart (unit sphere / plane z = 0).
    pub fn renormalize(self, p: &Vec3) -> Vec3 {
        match self {
            Chart::Sphere => p.normalize(),
            Chart::Plane => Vec3::new(p.x, p.y, 0.0),
        }
    }

    /// Removes the normal component of a tangent vector at `p` and normalises it.
    pub fn retangent(self, p: &Vec3, v: &Vec3) -> Vec3 {
        match self {
            Chart::Sphere => (v - p * p.dot(v)).normalize(),
            Chart::Plane => Vec3::new(v.x, v.y, 0.0).normalize(),
        }
    }
}

/// An oriented geodesic segment A→B bounding a counterclockwise triangle on its left.
#[derive(Debug, Clone, Copy)]
pub struct EdgeLine {
    pub start: Vec3,
    pub end: Vec3,
    /// Sphere: unit normal of the great circle (A×B). Plane: left unit normal.
    normal: Vec3,
}

impl EdgeLine {
    pub fn new(chart: Chart, start: Vec3, end: Vec3) -> Self {
        let normal = match chart {
            Chart::Sphere => start.cross(&end).normalize(),
            Chart::Plane => {
                let t = (end - start).normalize();
                Vec3::new(-t.y, t.x, 0.0)
            }
        };
        EdgeLine { start, end, normal }
    }

    /// Positive on the triangle side. Sphere: sine of the distance to the great circle.
    pub fn signed(&self, chart: Chart, x: &Vec3) -> f64 {
        match chart {
            Chart::Sphere => self.normal.dot(x),
            Chart::Plane => self.normal.dot(&(x - self.start)),
        }
    }

    /// Inward unit normal at a point of the edge.
    pub fn inward(&self, _chart: Chart, _at: &Vec3) -> Vec3 {
        self.normal
    }

    /// Unit tangent at a point of the edge, pointing from start to end.
    pub fn tangent(&self, chart: Chart, at: &Vec3) -> Vec3 {
        match chart {
            Chart::Sphere => self.normal.cross(at),
            Chart::Plane => (self.end - self.start).normalize(),
        }
    }

    /// Length parameter at which the geodesic (p, d) crosses the edge line outwards.
    pub fn exit_time(&self, chart: Chart, p: &Vec3, d: &Vec3) -> f64 {
        let f0 = self.signed(chart, p).max(0.0);
        let g = self.normal.dot(d);
        match chart {
            Chart::Sphere => f0.atan2(-g),
            Chart::Plane => {
                if g < 0.0 {
                    f0 / -g
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn sphere_exp_and_distance_agree() {
        let c = Chart::Sphere;
        let p = Vec3::x();
        let d = Vec3::y();
        let (q, dq) = c.exp(&p, &d, 1.2);
        assert_abs_diff_eq!(c.dist(&p, &q), 1.2, epsilon = 1e-14);
        assert_abs_diff_eq!(dq.dot(&q), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((c.direction(&p, &q) - d).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn exit_time_of_equator() {
        let c = Chart::Sphere;
        // edge along the equator from x to y, triangle above (z > 0)
        let e = EdgeLine::new(c, Vec3::x(), Vec3::y());
        let p = Vec3::new(1.0, 1.0, 1.0).normalize();
        let d = c.direction(&p, &Vec3::new(1.0, 1.0, 0.0).normalize());
        let t = e.exit_time(c, &p, &d);
        assert_abs_diff_eq!(t, (1.0f64 / 3.0f64.sqrt()).asin(), epsilon = 1e-14);
        // moving away from the edge, the crossing is more than a quarter turn away
        assert!(e.exit_time(c, &p, &(-d)) > FRAC_PI_2);
        assert!(e.exit_time(c, &p, &(-d)) < PI);
    }

    #[test]
    fn kappa_rejects_negative() {
        assert!(ModelKappa::new(-1.0).is_err());
        assert_eq!(ModelKappa::new(4.0).unwrap().scale(), 2.0);
    }

    #[test]
    fn sphere_point_norm_is_checked() {
        let k = ModelKappa::FOUR;
        assert!(ModelPoint::on_sphere(k, Vec3::new(0.5, 0.0, 0.0)).is_ok());
        assert!(ModelPoint::on_sphere(k, Vec3::new(1.0, 0.0, 0.0)).is_err());
    }
}
