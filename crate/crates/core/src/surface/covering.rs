//! Distance from surface points to the nearest cone point.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::{FRAC_PI_4, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelKappa;

use super::ConeSurface;

#[derive(Debug, Clone, Serialize)]
pub struct CoveringRadius {
    /// Largest sampled distance to the nearest cone point.
    pub max_distance: f64,
    pub worst_triangle: usize,
    pub worst_weights: [f64; 3],
    /// `π/4 − max_distance`.
    pub margin: f64,
    pub within_pi_over_4: bool,
    pub density: usize,
}

fn grid_points(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            out.push([i, j, n - i - j]);
        }
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Estimates sup over the surface of the distance to the nearest cone point.
///
/// Samples a barycentric grid of `density` subdivisions per triangle; distances
/// are exact model distances inside each triangle and shortest paths through
/// shared edge samples across triangles.
pub fn covering_radius(s: &ConeSurface, density: usize) -> Result<CoveringRadius> {
    if s.kappa() != ModelKappa::FOUR {
        return Err(Error::NotApplicable("covering radius is defined for curvature 4".into()));
    }
    let cones = s.cone_points();
    if cones.len() < 3 {
        return Err(Error::NotApplicable(format!(
            "needs at least three cone points, surface has {}",
            cones.len()
        )));
    }
    if let Some((v, a)) = cones.iter().find(|(_, a)| *a >= TAU) {
        return Err(Error::NotApplicable(format!(
            "cone point {v} has angle {a} ≥ 2π"
        )));
    }
    if density == 0 || density > 256 {
        return Err(Error::InvalidInput(format!("density must be in 1..=256, got {density}")));
    }
    let n = density;
    let local = grid_points(n);
    let per = local.len();
    let nt = s.triangles().len();
    let index: HashMap<[usize; 3], usize> = local.iter().enumerate().map(|(i, w)| (*w, i)).collect();

    // identify samples on glued sides
    let mut parent: Vec<usize> = (0..nt * per).collect();
    for t in 0..nt {
        for e in 0..3 {
            let o = s.partner(super::EdgeRef::new(t, e));
            for (i, w) in local.iter().enumerate() {
                if w[e] != 0 {
                    continue;
                }
                let mut w2 = [0usize; 3];
                w2[(o.edge + 1) % 3] = w[(e + 2) % 3];
                w2[(o.edge + 2) % 3] = w[(e + 1) % 3];
                let j = index[&w2];
                let (a, b) = (find(&mut parent, t * per + i), find(&mut parent, o.triangle * per + j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let node: Vec<usize> = (0..nt * per).map(|x| find(&mut parent, x)).collect();

    let chart = s.chart_kind();
    let scale = s.kappa().scale();
    let points: Vec<Vec<_>> = (0..nt)
        .map(|t| {
            local
                .iter()
                .map(|w| s.point_in(t, w.map(|x| x as f64 / n as f64)))
                .collect()
        })
        .collect();

    let mut dist = vec![f64::INFINITY; nt * per];
    let mut heap = BinaryHeap::new();
    for &(v, _) in &cones {
        let c = s.vertices()[v].corners[0];
        let mut w = [0usize; 3];
        w[c.slot] = n;
        let id = node[c.triangle * per + index[&w]];
        dist[id] = 0.0;
        heap.push(Reverse((0u64, id)));
    }
    // members of each node class, to reach every triangle containing it
    let mut members: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for t in 0..nt {
        for i in 0..per {
            members.entry(node[t * per + i]).or_default().push((t, i));
        }
    }
    while let Some(Reverse((bits, id))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[id] {
            continue;
        }
        for &(t, i) in &members[&id] {
            let p = &points[t][i];
            for (j, q) in points[t].iter().enumerate() {
                let other = node[t * per + j];
                let nd = d + chart.dist(p, q) / scale;
                if nd < dist[other] {
                    dist[other] = nd;
                    heap.push(Reverse((nd.to_bits(), other)));
                }
            }
        }
    }
    let mut worst = (0.0, 0usize, [0.0; 3]);
    for t in 0..nt {
        for (i, w) in local.iter().enumerate() {
            let d = dist[node[t * per + i]];
            if d > worst.0 {
                worst = (d, t, w.map(|x| x as f64 / n as f64));
            }
        }
    }
    Ok(CoveringRadius {
        max_distance: worst.0,
        worst_triangle: worst.1,
        worst_weights: worst.2,
        margin: FRAC_PI_4 - worst.0,
        within_pi_over_4: worst.0 < FRAC_PI_4,
        density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{double_triangle, round_sphere};
    use crate::trig::TriangleShape;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn octant_double_circumradius() {
        let t = TriangleShape::from_angles(ModelKappa::FOUR, [FRAC_PI_2; 3]).unwrap();
        let r = covering_radius(&double_triangle(&t), 12).unwrap();
        let oracle = (1.0 / 3f64.sqrt()).acos() / 2.0;
        assert_abs_diff_eq!(r.max_distance, oracle, epsilon = 1e-9);
        assert!(r.within_pi_over_4);
    }

    #[test]
    fn equilateral_double_is_covered() {
        let t = TriangleShape::from_angles(ModelKappa::FOUR, [2.0 * PI / 3.0; 3]).unwrap();
        let r = covering_radius(&double_triangle(&t), 12).unwrap();
        assert!(r.within_pi_over_4, "{r:?}");
    }

    #[test]
    fn smooth_sphere_not_applicable() {
        assert!(matches!(covering_radius(&round_sphere(), 6), Err(Error::NotApplicable(_))));
    }
}
