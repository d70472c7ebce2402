//! Spherical triangle-group tilings and the covers they induce.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::trig::TriangleShape;

use super::ConeSurface;

/// Tiles of the reflection group with angles π/p, π/q, π/r at vertices 0, 1, 2.
///
/// Tile `g` meets tile `neighbors[g][i]` across its side `i` (the side opposite vertex `i`).
#[derive(Debug, Clone, Serialize)]
pub struct TriangleGroupTiling {
    pub multiplicities: [u32; 3],
    pub neighbors: Vec<[usize; 3]>,
    /// True for tiles reached by an odd number of reflections.
    pub odd: Vec<bool>,
    /// Shortest reflection word of each tile, letters `0..3`.
    pub words: Vec<Vec<u8>>,
    #[serde(skip)]
    pub matrices: Vec<Matrix3<f64>>,
    /// Vertices of the base tile on the unit sphere.
    #[serde(skip)]
    pub base: [Vector3<f64>; 3],
}

impl TriangleGroupTiling {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// 4·(1/p + 1/q + 1/r − 1)⁻¹, the order of the full reflection group.
    pub fn expected_tiles(m: [u32; 3]) -> f64 {
        let s: f64 = m.iter().map(|&x| 1.0 / x as f64).sum();
        4.0 / (s - 1.0)
    }
}

fn key(m: &Matrix3<f64>) -> [i64; 9] {
    let mut k = [0i64; 9];
    for (i, x) in m.iter().enumerate() {
        k[i] = (x * 1e6).round() as i64;
    }
    k
}

/// Enumerates the tiles breadth-first over reflection words.
pub fn triangle_group_tiling(m: [u32; 3]) -> Result<TriangleGroupTiling> {
    let [p, q, r] = m;
    if m.iter().any(|&x| x < 2) || !spherical(m) {
        return Err(Error::NotSpherical(p, q, r));
    }
    // unit normals of the sides; sides i and j meet at vertex k with angle π/m_k
    let c = |x: u32| -(PI / x as f64).cos();
    let gram = Matrix3::new(1.0, c(r), c(q), c(r), 1.0, c(p), c(q), c(p), 1.0);
    let chol = gram
        .cholesky()
        .ok_or(Error::NotSpherical(p, q, r))?;
    let l = chol.l();
    let normals: [Vector3<f64>; 3] = [0, 1, 2].map(|i| l.row(i).transpose());
    let reflections = normals.map(|n| Matrix3::identity() - n * n.transpose() * 2.0);
    // vertex i lies on sides i+1 and i+2, on the inner side of side i
    let base = [0, 1, 2].map(|i| {
        let v = normals[(i + 1) % 3].cross(&normals[(i + 2) % 3]).normalize();
        if v.dot(&normals[i]) < 0.0 {
            -v
        } else {
            v
        }
    });

    let mut matrices = vec![Matrix3::identity()];
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    let mut index: HashMap<[i64; 9], usize> = HashMap::new();
    index.insert(key(&matrices[0]), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut neighbors: Vec<[usize; 3]> = vec![[usize::MAX; 3]];
    let limit = 8 * TriangleGroupTiling::expected_tiles(m).round() as usize + 8;
    while let Some(g) = queue.pop_front() {
        for i in 0..3 {
            let h = matrices[g] * reflections[i];
            let k = key(&h);
            let id = match index.get(&k) {
                Some(&id) => id,
                None => {
                    let id = matrices.len();
                    if id > limit {
                        return Err(Error::NotSpherical(p, q, r));
                    }
                    index.insert(k, id);
                    matrices.push(h);
                    let mut w = words[g].clone();
                    w.push(i as u8);
                    words.push(w);
                    neighbors.push([usize::MAX; 3]);
                    queue.push_back(id);
                    id
                }
            };
            neighbors[g][i] = id;
        }
    }
    let odd = words.iter().map(|w| w.len() % 2 == 1).collect();
    Ok(TriangleGroupTiling {
        multiplicities: m,
        neighbors,
        odd,
        words,
        matrices,
        base,
    })
}

fn spherical(m: [u32; 3]) -> bool {
    // exact test of 1/p + 1/q + 1/r > 1
    let [p, q, r] = m.map(u64::from);
    q * r + p * r + p * q > p * q * r
}

/// Slot of original side/vertex `i` in a mirrored copy (sides stored as a, c, b).
fn mirrored(i: usize) -> usize {
    [0, 2, 1][i]
}

/// Glues one copy of `t` per tile of the (p, q, r) tiling.
///
/// Vertex `i` of `t` becomes a vertex of valence 2·m_i and cone angle 2·m_i·A_i.
pub fn triangle_group_cover(t: &TriangleShape, m: [u32; 3]) -> Result<ConeSurface> {
    let tiling = triangle_group_tiling(m)?;
    let [a, b, c] = t.sides();
    let mirror = TriangleShape::new(t.kappa(), [a, c, b])?;
    let slot = |g: usize, i: usize| if tiling.odd[g] { mirrored(i) } else { i };
    let triangles = tiling
        .odd
        .iter()
        .map(|&o| if o { mirror } else { *t })
        .collect();
    let mut gluing = Vec::new();
    for g in 0..tiling.len() {
        for i in 0..3 {
            let h = tiling.neighbors[g][i];
            if g < h {
                gluing.push([[g, slot(g, i)], [h, slot(h, i)]]);
            }
        }
    }
    ConeSurface::build(t.kappa(), triangles, &gluing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKappa;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, TAU};

    /// Independent count: orbit of a generic point under the group generated by the reflections.
    fn orbit_size(m: [u32; 3]) -> usize {
        let t = triangle_group_tiling(m).unwrap();
        let x = (t.base[0] + t.base[1] * 2.0 + t.base[2] * 3.0).normalize();
        let mut pts: Vec<Vector3<f64>> = Vec::new();
        for g in &t.matrices {
            let y = g * x;
            if !pts.iter().any(|p| (p - y).norm() < 1e-8) {
                pts.push(y);
            }
        }
        pts.len()
    }

    #[test]
    fn tile_counts() {
        for (m, n) in [([2, 2, 2], 8), ([2, 3, 3], 24), ([2, 3, 4], 48), ([2, 3, 5], 120), ([2, 2, 5], 20)] {
            let t = triangle_group_tiling(m).unwrap();
            assert_eq!(t.len(), n, "{m:?}");
            assert_eq!(orbit_size(m), n);
            assert_abs_diff_eq!(TriangleGroupTiling::expected_tiles(m), n as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn euclidean_and_hyperbolic_rejected() {
        assert!(matches!(triangle_group_tiling([3, 3, 3]), Err(Error::NotSpherical(3, 3, 3))));
        assert!(triangle_group_tiling([2, 3, 7]).is_err());
        assert!(triangle_group_tiling([1, 2, 2]).is_err());
    }

    #[test]
    fn octahedral_cover_is_smooth() {
        let t = TriangleShape::from_angles(ModelKappa::FOUR, [FRAC_PI_2; 3]).unwrap();
        let s = triangle_group_cover(&t, [2, 2, 2]).unwrap();
        assert_eq!(s.triangles().len(), 8);
        assert_eq!(s.vertices().len(), 6);
        for v in s.vertices() {
            assert_eq!(v.valence(), 4);
            assert_abs_diff_eq!(v.angle, TAU, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s.area(), 8.0 * t.area(), epsilon = 1e-12);
    }

    #[test]
    fn cover_cone_angles_follow_multiplicities() {
        let t = TriangleShape::from_angles(ModelKappa::FOUR, [2.0 * PI / 3.0, 2.0 * PI / 3.0, FRAC_PI_2]).unwrap();
        let s = triangle_group_cover(&t, [2, 3, 3]).unwrap();
        assert_eq!(s.triangles().len(), 24);
        assert_abs_diff_eq!(s.gauss_bonnet_defect(), 0.0, epsilon = 1e-7);
        let angles = t.angles();
        for (i, v) in s.vertices().iter().enumerate() {
            let c = v.corners[0];
            let orig = if s.triangles()[c.triangle] == t { c.slot } else { mirrored(c.slot) };
            let mult = [2, 3, 3][orig] as f64;
            assert_eq!(v.valence(), 2 * mult as usize, "vertex {i}");
            assert_abs_diff_eq!(v.angle, 2.0 * mult * angles[orig], epsilon = 1e-9);
        }
    }
}
