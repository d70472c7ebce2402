//! Comparison families S²_κ′: the same gluing with every triangle replaced by
//! its curvature-κ′ comparison triangle.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Chart, ModelKappa, Vec3};
use crate::surface::ConeSurface;
use crate::trig::{TriangleChart, TriangleShape};

/// Default grid for the bi-Lipschitz estimate (boundary positions × radial steps).
pub const DEFAULT_SAMPLING: usize = 64;

#[derive(Debug, Clone)]
pub struct ComparisonFamily {
    base: ConeSurface,
}

impl ComparisonFamily {
    pub fn new(base: ConeSurface) -> Result<Self> {
        if base.kappa() != ModelKappa::FOUR {
            return Err(Error::InvalidInput(format!(
                "comparison families start from curvature 4, got {}",
                base.kappa().value()
            )));
        }
        Ok(ComparisonFamily { base })
    }

    pub fn base(&self) -> &ConeSurface {
        &self.base
    }

    pub fn member(&self, kappa2: f64) -> Result<ConeSurface> {
        comparison_member(&self.base, ModelKappa::new(kappa2)?)
    }
}

/// The member of the comparison family at curvature `kappa2 ∈ [0, 4]`.
pub fn comparison_member(base: &ConeSurface, kappa2: ModelKappa) -> Result<ConeSurface> {
    if base.kappa() != ModelKappa::FOUR {
        return Err(Error::InvalidInput("base surface must have curvature 4".into()));
    }
    if kappa2.value() > 4.0 {
        return Err(Error::InvalidInput(format!(
            "member curvature must lie in [0, 4], got {}",
            kappa2.value()
        )));
    }
    let triangles = base
        .triangles()
        .iter()
        .map(|t| t.with_kappa(kappa2))
        .collect::<Result<Vec<_>>>()?;
    ConeSurface::build(kappa2, triangles, &base.description().gluing)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Constant,
    NonDecreasing,
    NonIncreasing,
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub vertex: usize,
    /// (κ′, cone angle) in grid order.
    pub rows: Vec<(f64, f64)>,
    /// Observed direction as κ′ increases.
    pub trend: Trend,
}

/// Cone angle at `vertex` along a grid of κ′ values, with the observed trend.
pub fn angle_monotonicity_report(
    family: &ComparisonFamily,
    vertex: usize,
    grid: &[f64],
) -> Result<MonotonicityReport> {
    if vertex >= family.base.vertices().len() {
        return Err(Error::InvalidInput(format!("no vertex {vertex}")));
    }
    let mut kappas = grid.to_vec();
    kappas.sort_by(f64::total_cmp);
    let rows = kappas
        .iter()
        .map(|&k| Ok((k, family.member(k)?.vertices()[vertex].angle)))
        .collect::<Result<Vec<_>>>()?;
    let tol = 1e-12;
    let up = rows.windows(2).any(|w| w[1].1 > w[0].1 + tol);
    let down = rows.windows(2).any(|w| w[1].1 < w[0].1 - tol);
    let trend = match (up, down) {
        (false, false) => Trend::Constant,
        (true, false) => Trend::NonDecreasing,
        (false, true) => Trend::NonIncreasing,
        (true, true) => Trend::Mixed,
    };
    Ok(MonotonicityReport { vertex, rows, trend })
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzEstimate {
    /// Largest distortion of the incenter-radial map in either direction; ≥ 1.
    pub constant: f64,
    pub triangle: Option<usize>,
    pub kappa2: f64,
    pub sampling: usize,
}

/// Intersection of the internal bisectors at vertices 0 and 1.
fn incenter(c: &TriangleChart, angles: [f64; 3]) -> Vec3 {
    let chart = c.chart;
    let [v0, v1, v2] = c.verts;
    let d0 = chart.rotate(&v0, &chart.direction(&v0, &v1), angles[0] / 2.0);
    let d1 = chart.rotate(&v1, &chart.direction(&v1, &v2), angles[1] / 2.0);
    match chart {
        Chart::Sphere => {
            let x = v0.cross(&d0).cross(&v1.cross(&d1)).normalize();
            let centroid = v0 + v1 + v2;
            if x.dot(&centroid) < 0.0 {
                -x
            } else {
                x
            }
        }
        Chart::Plane => {
            // v0 + s·d0 = v1 + t·d1
            let det = d0.x * (-d1.y) - d0.y * (-d1.x);
            let r = v1 - v0;
            let s = (r.x * (-d1.y) - r.y * (-d1.x)) / det;
            v0 + d0 * s
        }
    }
}

/// Samples of the incenter-radial parametrisation: `n` boundary positions by arc
/// length and `n` radial fractions.
fn radial_samples(t: &TriangleShape, n: usize) -> Vec<Vec<Vec3>> {
    let c = t.layout();
    let chart = c.chart;
    let o = incenter(&c, t.angles());
    let sides = t.sides();
    // boundary V0 → V1 → V2 → V0 uses sides 2, 0, 1
    let legs = [(0, 1, sides[2]), (1, 2, sides[0]), (2, 0, sides[1])];
    let perimeter = t.perimeter();
    (0..n)
        .map(|i| {
            let mut s = perimeter * i as f64 / n as f64;
            let mut b = c.verts[0];
            for &(p, q, len) in &legs {
                if s <= len {
                    b = chart.lerp(&c.verts[p], &c.verts[q], s / len);
                    break;
                }
                s -= len;
            }
            (1..=n)
                .map(|j| chart.lerp(&o, &b, j as f64 / n as f64))
                .collect()
        })
        .collect()
}

/// Bi-Lipschitz constant of the incenter-radial map from `t` to its κ₂ comparison triangle.
///
/// The map sends the incenter to the incenter, is an isometry on the boundary and
/// linear along radial geodesics. Distortion ratios are taken over neighbouring
/// samples of an `sampling × sampling` grid.
pub fn incenter_bilipschitz(t: &TriangleShape, kappa2: ModelKappa, sampling: usize) -> Result<LipschitzEstimate> {
    if sampling < 2 || sampling > 1024 {
        return Err(Error::InvalidInput(format!("sampling must be in 2..=1024, got {sampling}")));
    }
    let t2 = t.with_kappa(kappa2)?;
    let n = sampling;
    let a = radial_samples(t, n);
    let b = radial_samples(&t2, n);
    let (ca, cb) = (t.kappa().chart(), kappa2.chart());
    let (sa, sb) = (t.kappa().scale(), kappa2.scale());
    let mut c: f64 = 1.0;
    for i in 0..n {
        let i2 = (i + 1) % n;
        for j in 0..n {
            let mut pairs = vec![(i2, j)];
            if j + 1 < n {
                pairs.push((i, j + 1));
                pairs.push((i2, j + 1));
            }
            for (k, l) in pairs {
                let d1 = ca.dist(&a[i][j], &a[k][l]) / sa;
                let d2 = cb.dist(&b[i][j], &b[k][l]) / sb;
                if d1 > 1e-12 && d2 > 1e-12 {
                    c = c.max(d1 / d2).max(d2 / d1);
                }
            }
        }
    }
    Ok(LipschitzEstimate {
        constant: c,
        triangle: None,
        kappa2: kappa2.value(),
        sampling,
    })
}

/// Largest incenter-map constant over the triangles of a family's base.
pub fn family_bilipschitz(family: &ComparisonFamily, kappa2: ModelKappa, sampling: usize) -> Result<LipschitzEstimate> {
    let estimates = family
        .base
        .triangles()
        .par_iter()
        .map(|t| incenter_bilipschitz(t, kappa2, sampling))
        .collect::<Result<Vec<_>>>()?;
    let (i, best) = estimates
        .into_iter()
        .enumerate()
        .max_by(|a, b| a.1.constant.total_cmp(&b.1.constant))
        .ok_or_else(|| Error::InvalidInput("empty family".into()))?;
    Ok(LipschitzEstimate {
        triangle: Some(i),
        ..best
    })
}

/// Isoperimetric constant C = c⁴/(4π) for loops on the κ′ = 0 member's universal cover.
pub fn isoperimetric_constant(c_max: f64) -> Result<f64> {
    if !c_max.is_finite() || c_max < 1.0 - 1e-12 {
        return Err(Error::InvalidInput(format!(
            "distortion constants are at least 1, got {c_max}"
        )));
    }
    Ok(c_max.max(1.0).powi(4) / (4.0 * PI))
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoperimetricEstimate {
    pub c_max: f64,
    pub triangle: Option<usize>,
    pub constant: f64,
    /// Whether the flat member is locally CAT(0) as given (the caller must pass to a cover otherwise).
    pub flat_member_locally_cat0: bool,
    pub note: String,
}

/// Isoperimetric constant of a family, from the worst triangle at κ′ = 0.
pub fn family_isoperimetric(family: &ComparisonFamily, sampling: usize) -> Result<IsoperimetricEstimate> {
    let est = family_bilipschitz(family, ModelKappa::FLAT, sampling)?;
    let flat = comparison_member(&family.base, ModelKappa::FLAT)?;
    let locally = flat.vertices().iter().all(|v| v.angle >= 2.0 * PI - crate::trig::TOL);
    Ok(IsoperimetricEstimate {
        c_max: est.constant,
        triangle: est.triangle,
        constant: isoperimetric_constant(est.constant)?,
        flat_member_locally_cat0: locally,
        note: "valid on the universal cover of a locally CAT(0) orbifold cover of the flat member".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{double_triangle, triangle_group_cover};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

    fn octant() -> TriangleShape {
        TriangleShape::new(ModelKappa::FOUR, [FRAC_PI_4; 3]).unwrap()
    }

    #[test]
    fn flat_member_of_octant_double() {
        let base = double_triangle(&octant());
        let flat = comparison_member(&base, ModelKappa::FLAT).unwrap();
        for v in flat.vertices() {
            assert_abs_diff_eq!(v.angle, 2.0 * PI / 3.0, epsilon = 1e-12);
        }
        let same = comparison_member(&base, ModelKappa::FOUR).unwrap();
        assert_eq!(same.fingerprint(), base.fingerprint());
        let mid = comparison_member(&base, ModelKappa::new(2.0).unwrap()).unwrap();
        for v in mid.vertices() {
            assert!(v.angle > 2.0 * PI / 3.0 && v.angle < PI);
        }
        for (a, b) in flat.triangles().iter().zip(base.triangles()) {
            assert_eq!(a.sides(), b.sides());
        }
    }

    #[test]
    fn monotonicity_reports() {
        let family = ComparisonFamily::new(double_triangle(&octant())).unwrap();
        let grid: Vec<f64> = (0..=8).map(|i| i as f64 * 0.5).collect();
        let r = angle_monotonicity_report(&family, 0, &grid).unwrap();
        assert_eq!(r.trend, Trend::NonDecreasing);
        assert_abs_diff_eq!(r.rows[0].1, 2.0 * PI / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rows[8].1, PI, epsilon = 1e-12);
        let single = angle_monotonicity_report(&family, 0, &[4.0]).unwrap();
        assert_eq!(single.rows.len(), 1);
        assert_eq!(single.trend, Trend::Constant);

        let t = TriangleShape::from_angles(ModelKappa::FOUR, [FRAC_PI_2; 3]).unwrap();
        let cover = ComparisonFamily::new(triangle_group_cover(&t, [2, 2, 2]).unwrap()).unwrap();
        let smooth = angle_monotonicity_report(&cover, 0, &[0.0, 2.0, 4.0]).unwrap();
        assert_abs_diff_eq!(smooth.rows[2].1, TAU, epsilon = 1e-12);
        assert!(smooth.rows[0].1 < TAU && smooth.rows[1].1 < TAU);
    }

    #[test]
    fn incenter_of_equilateral_is_centroid() {
        let t = octant();
        let c = t.layout();
        let o = incenter(&c, t.angles());
        let d = [0, 1, 2].map(|i| c.chart.dist(&o, &c.verts[i]));
        assert_abs_diff_eq!(d[0], d[1], epsilon = 1e-12);
        assert_abs_diff_eq!(d[1], d[2], epsilon = 1e-12);
        let flat = t.with_kappa(ModelKappa::FLAT).unwrap();
        let cf = flat.layout();
        let of = incenter(&cf, flat.angles());
        assert_abs_diff_eq!(of, (cf.verts[0] + cf.verts[1] + cf.verts[2]) / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn lipschitz_constants() {
        let t = octant();
        let same = incenter_bilipschitz(&t, ModelKappa::FOUR, 32).unwrap();
        assert_abs_diff_eq!(same.constant, 1.0, epsilon = 1e-9);
        let flat = incenter_bilipschitz(&t, ModelKappa::FLAT, DEFAULT_SAMPLING).unwrap();
        // oracle: near the incenter the map stretches the direction towards a
        // vertex by (R₄·dθ₄/ds)/(R₀·dθ₀/ds) = 0.827328/0.5, a lower bound for c
        let near_center = 1.654656919906525;
        assert!(flat.constant >= near_center, "{}", flat.constant);
        assert_abs_diff_eq!(flat.constant, 1.6875132366386771, epsilon = 1e-9);
        let mut prev = f64::INFINITY;
        for k in [0.0, 1.0, 2.0, 3.0, 4.0] {
            let c = incenter_bilipschitz(&t, ModelKappa::new(k).unwrap(), 32).unwrap().constant;
            assert!(c <= prev + 1e-9);
            prev = c;
        }
    }

    #[test]
    fn isoperimetric_formula() {
        assert_abs_diff_eq!(isoperimetric_constant(1.0).unwrap(), 1.0 / (4.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(isoperimetric_constant(1.2).unwrap(), 0.165, epsilon = 1e-3);
        assert!(isoperimetric_constant(0.9).is_err());
    }
}
