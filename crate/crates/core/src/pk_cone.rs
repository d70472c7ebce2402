//! Regular spherical polyhedral Kähler cones through their S¹-quotient spheres.
//!
//! Throughout, the cone angle of the quotient sphere at a point is read as the
//! conical angle of the cone along the corresponding singular line.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use crate::model::{ModelKappa, ModelPoint, Vec3};
use crate::surface::ConeSurface;
use crate::trig::{circle_length, TOL};

pub const DICTIONARY_NOTE: &str =
    "quotient cone angle at a point is taken as the conical angle along the corresponding singular line";

/// Tolerance of the non-CAT angle test, so that decimal inputs such as 3.14159265 count as π.
pub const NONCAT_TOL: f64 = 1e-7;

/// A curvature-4 sphere with cone points, read as the quotient of a PK cone's unit sphere.
#[derive(Debug, Clone)]
pub struct QuotientSphere {
    surface: ConeSurface,
    cone_points: Vec<(usize, f64)>,
}

impl QuotientSphere {
    pub fn new(surface: ConeSurface) -> Result<Self> {
        if surface.kappa() != ModelKappa::FOUR {
            return Err(Error::InvalidInput(format!(
                "quotient spheres have curvature 4, got {}",
                surface.kappa().value()
            )));
        }
        if surface.euler_characteristic() != 2 {
            return Err(Error::InvalidInput(format!(
                "quotient must be a sphere, Euler characteristic is {}",
                surface.euler_characteristic()
            )));
        }
        let cone_points = surface.cone_points();
        Ok(QuotientSphere { surface, cone_points })
    }

    pub fn surface(&self) -> &ConeSurface {
        &self.surface
    }

    pub fn cone_points(&self) -> &[(usize, f64)] {
        &self.cone_points
    }

    pub fn area(&self) -> f64 {
        self.surface.area()
    }
}

/// Length of the S¹ fiber: twice the area of the quotient.
pub fn fiber_length(q: &QuotientSphere) -> f64 {
    2.0 * q.area()
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= FRAC_PI_2 + 1e-15) {
        return Err(Error::InvalidInput(format!(
            "angle to the fibration must lie in (0, π/2], got {theta}"
        )));
    }
    Ok(())
}

/// Length of a geodesic making angle θ with the fibers, from the length of its projection.
pub fn lift_length(projected_length: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(projected_length / theta.sin())
}

/// Geodesic curvature 2·cot θ of the projection of a geodesic at angle θ to the fibers.
pub fn projection_curvature(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(2.0 * theta.cos() / theta.sin())
}

/// Lower bound for a geodesic whose projection is a loop: the projection is at
/// least a complete circle of curvature 2·cot θ on a CAT(4) quotient.
pub fn loop_lift_lower_bound(theta: f64) -> Result<f64> {
    let k = projection_curvature(theta)?;
    lift_length(circle_length(ModelKappa::FOUR, k), theta)
}

/// Disk Ω bounded by a projected geodesic loop.
#[derive(Debug, Clone, Serialize)]
pub struct DiskRegion {
    pub area: f64,
    /// Cone angles of cone points inside Ω.
    pub interior_cone_points: Vec<f64>,
    /// (inside, outside) sector angles at cone points on the boundary.
    pub boundary_cone_points: Vec<(f64, f64)>,
}

impl DiskRegion {
    pub fn empty() -> Self {
        DiskRegion {
            area: 0.0,
            interior_cone_points: Vec::new(),
            boundary_cone_points: Vec::new(),
        }
    }

    /// ∫_Ω K dS, counting π(1 − α_in) at boundary cone points.
    pub fn curvature_integral(&self) -> f64 {
        let interior: f64 = self.interior_cone_points.iter().map(|t| TAU - t).sum();
        let boundary: f64 = self.boundary_cone_points.iter().map(|(inside, _)| PI - inside).sum();
        4.0 * self.area + interior + boundary
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyReport {
    /// ∫_γ ω₀ = ½(2π − ∫_Ω K dS).
    pub integral: f64,
    /// (∫ω₀ + 2·Area(Ω)) mod l(S¹).
    pub residue: f64,
    pub fiber_length: f64,
    /// True when the residue vanishes, the necessary condition for an embedded projection.
    pub congruence_holds: bool,
}

fn check_region(q: &QuotientSphere, region: &DiskRegion) -> Result<()> {
    if !(region.area >= 0.0) || region.area > q.area() + 1e-9 {
        return Err(Error::InconsistentRegion(format!(
            "area {} outside [0, {}]",
            region.area,
            q.area()
        )));
    }
    let mut available: Vec<f64> = q.cone_points().iter().map(|c| c.1).collect();
    let mut take = |angle: f64, what: &str| -> Result<()> {
        match available.iter().position(|a| (a - angle).abs() <= 1e-7) {
            Some(i) => {
                available.swap_remove(i);
                Ok(())
            }
            None => Err(Error::InconsistentRegion(format!(
                "{what} angle {angle} is not an unused cone angle of the sphere"
            ))),
        }
    };
    for &a in &region.interior_cone_points {
        take(a, "interior")?;
    }
    for &(inside, outside) in &region.boundary_cone_points {
        if inside < PI - 1e-9 || outside < PI - 1e-9 {
            return Err(Error::InconsistentRegion(format!(
                "boundary sectors ({inside}, {outside}) below π: the boundary is not geodesic"
            )));
        }
        take(inside + outside, "boundary")?;
    }
    Ok(())
}

/// Holonomy of the fibration along the boundary of Ω and the embeddedness congruence.
pub fn holonomy(q: &QuotientSphere, region: &DiskRegion) -> Result<HolonomyReport> {
    check_region(q, region)?;
    let l = fiber_length(q);
    let integral = 0.5 * (TAU - region.curvature_integral());
    let residue = (integral + 2.0 * region.area).rem_euclid(l);
    let congruence_holds = residue.min(l - residue) < 1e-7 * l;
    Ok(HolonomyReport {
        integral,
        residue,
        fiber_length: l,
        congruence_holds,
    })
}

/// Every closed geodesic of the cone's unit sphere projects with a self-intersection.
///
/// With all cone angles ≥ 2π, π + ∫_Ω(2 − K/2) ranges over [π, l(S¹) − π] for
/// every disk Ω, so it is never ≡ 0 mod l(S¹). The margins record the distance
/// of both ends of that range from 0 and l(S¹).
pub fn embedded_projection_obstruction(q: &QuotientSphere) -> Result<Certificate> {
    if let Some((v, a)) = q.cone_points().iter().find(|(_, a)| *a < TAU - TOL) {
        return Err(Error::NotApplicable(format!(
            "cone point {v} has angle {a} < 2π"
        )));
    }
    let l = fiber_length(q);
    // 2 − K/2 vanishes on the smooth part; each cone point contributes (θ − 2π)/2 ≥ 0
    let excess: f64 = q.cone_points().iter().map(|(_, a)| 0.5 * (a - TAU)).sum();
    let lowest = PI;
    let highest = PI + excess;
    Ok(Certificate::confirmed("closed geodesics project with self-intersections")
        .with_subject(q.surface().fingerprint())
        .margin("lower", lowest)
        .margin("upper", l - highest)
        .margin("fiber_length", l))
}

/// CAT(0) verdict for the 4-dimensional cone over the PK sphere with quotient `q`.
pub fn cone_cat0_verdict(q: &QuotientSphere, cat4: &Certificate) -> Certificate {
    let criterion = "quotient CAT(4) and conical angles at least 2π";
    let fingerprint = q.surface().fingerprint();
    let mut c = if let Some((v, a)) = q
        .cone_points()
        .iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .filter(|(_, a)| *a < TAU - TOL)
    {
        Certificate::not_cat(criterion, Witness::SmallConeAngle { vertex: *v, angle: *a })
            .margin("min_cone_angle_minus_2pi", a - TAU)
    } else if cat4.subject.as_deref().is_some_and(|s| s != fingerprint) {
        Certificate::undetermined(criterion).note("CAT(4) certificate refers to another surface")
    } else if cat4.is_confirmed() {
        Certificate::confirmed(criterion)
    } else {
        Certificate::undetermined(criterion).note("quotient not certified CAT(4)")
    };
    c = c.with_subject(fingerprint).note(DICTIONARY_NOTE);
    c.children.push(cat4.clone());
    c
}

/// Fires when α_min·⌊n/2⌋ ≥ π: the n-fold cover is not locally CAT(0).
pub fn noncat_test(alpha_min: f64, n: u64) -> bool {
    alpha_min * (n / 2) as f64 >= PI - NONCAT_TOL
}

pub fn noncat_certificate(alpha_min: f64, n: u64) -> Certificate {
    let criterion = "α_min·⌊n/2⌋ ≥ π";
    let value = alpha_min * (n / 2) as f64;
    let c = if noncat_test(alpha_min, n) {
        Certificate::not_cat(criterion, Witness::NonCatCover { alpha_min, n })
    } else {
        Certificate::undetermined(criterion).note("test silent")
    };
    c.margin("alpha_min_times_half_n_minus_pi", value - PI)
        .note("assumes the cone is not a product of two 2-dimensional cones")
        .note(DICTIONARY_NOTE)
}

/// True when the points lie in no open hemisphere.
///
/// Points lie in an open hemisphere iff the origin is outside their convex hull;
/// the nearest point of the hull to the origin is sought among the faces spanned
/// by at most three points.
pub fn hemisphere_test(points: &[ModelPoint]) -> Result<bool> {
    let unit: Vec<Vec3> = points.iter().map(|p| p.0.normalize()).collect();
    for i in 0..unit.len() {
        for j in (i + 1)..unit.len() {
            if (unit[i] - unit[j]).norm() < 1e-12 {
                return Err(Error::InvalidInput(format!("points {i} and {j} coincide")));
            }
        }
    }
    if unit.is_empty() {
        return Ok(false);
    }
    let eps = 1e-12;
    let separates = |v: &Vec3| {
        let n2 = v.norm_squared();
        n2 > eps && unit.iter().all(|p| p.dot(v) >= n2 - 1e-12)
    };
    let n = unit.len();
    for i in 0..n {
        if separates(&unit[i]) {
            return Ok(false);
        }
        for j in (i + 1)..n {
            if let Some(v) = nearest_on_segment(&unit[i], &unit[j]) {
                if separates(&v) {
                    return Ok(false);
                }
            }
            for k in (j + 1)..n {
                if let Some(v) = nearest_on_triangle(&unit[i], &unit[j], &unit[k]) {
                    if separates(&v) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn nearest_on_segment(a: &Vec3, b: &Vec3) -> Option<Vec3> {
    let d = b - a;
    let t = -a.dot(&d) / d.norm_squared();
    (0.0..=1.0).contains(&t).then(|| a + d * t)
}

fn nearest_on_triangle(a: &Vec3, b: &Vec3, c: &Vec3) -> Option<Vec3> {
    let (u, v) = (b - a, c - a);
    let m = nalgebra::Matrix2::new(u.dot(&u), u.dot(&v), u.dot(&v), v.dot(&v));
    let rhs = nalgebra::Vector2::new(-a.dot(&u), -a.dot(&v));
    let x = m.try_inverse()? * rhs;
    (x.x >= 0.0 && x.y >= 0.0 && x.x + x.y <= 1.0).then(|| a + u * x.x + v * x.y)
}
