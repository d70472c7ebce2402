//! Shooting search for short closed geodesics and geodesic loops at cone points.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::geodesic::{trace, GeodesicPath, Termination, TraceOptions, TraceState};
use super::{ConeSurface, EdgeRef};

/// Position and direction closure tolerance.
const CLOSE_TOL: f64 = 1e-7;
/// Perturbation applied when a ray runs into a vertex.
const RETRY_SHIFT: f64 = 1e-6;
/// Bisection budget per cone point when chasing loops between grid directions.
const BISECTION_BUDGET: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchGrid {
    /// Start positions per edge.
    pub edge_positions: usize,
    /// Start angles per position, spread over (0, π).
    pub edge_angles: usize,
    /// Directions per cone point, spread over its total angle.
    pub vertex_directions: usize,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            edge_positions: 8,
            edge_angles: 48,
            vertex_directions: 96,
        }
    }
}

impl SearchGrid {
    pub const MAX_DENSITY: usize = 4096;

    pub fn validate(&self) -> crate::error::Result<()> {
        for (name, v) in [
            ("edge positions", self.edge_positions),
            ("edge angles", self.edge_angles),
            ("vertex directions", self.vertex_directions),
        ] {
            if v == 0 || v > Self::MAX_DENSITY {
                return Err(crate::error::Error::InvalidInput(format!(
                    "{name} must be in 1..={}, got {v}",
                    Self::MAX_DENSITY
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GeodesicKind {
    /// Avoids all vertices.
    Smooth,
    /// Leaves and returns to a cone point; a local geodesic there only if both sectors are ≥ π.
    ConeLoop {
        vertex: usize,
        sectors: [f64; 2],
        local_geodesic: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedGeodesic {
    pub length: f64,
    pub kind: GeodesicKind,
    /// Edge classes crossed along one period.
    pub itinerary: Vec<usize>,
    pub start_edge: Option<EdgeRef>,
    pub start_param: f64,
    pub start_angle: f64,
}

impl ClosedGeodesic {
    /// Smooth closed geodesics and loops that are local geodesics at their cone point.
    pub fn is_geodesic(&self) -> bool {
        match self.kind {
            GeodesicKind::Smooth => true,
            GeodesicKind::ConeLoop { local_geodesic, .. } => local_geodesic,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicSearch {
    pub length_bound: f64,
    /// Length up to which rays were followed.
    pub horizon: f64,
    pub grid: SearchGrid,
    pub rays: usize,
    /// Everything found up to the horizon, sorted by length.
    pub geodesics: Vec<ClosedGeodesic>,
    /// Shortest closed geodesic found (an upper bound for the systole).
    pub systole_estimate: Option<f64>,
    /// Shortest loop at a cone point, geodesic or not.
    pub shortest_loop: Option<f64>,
}

impl GeodesicSearch {
    pub fn below_bound(&self) -> Vec<&ClosedGeodesic> {
        self.geodesics
            .iter()
            .filter(|g| g.length < self.length_bound)
            .collect()
    }
}

fn canonical_cycle(seq: &[usize]) -> Vec<usize> {
    if seq.is_empty() {
        return Vec::new();
    }
    let n = seq.len();
    let mut best: Option<Vec<usize>> = None;
    let rev: Vec<usize> = seq.iter().rev().cloned().collect();
    for s in [seq, &rev[..]] {
        for r in 0..n {
            let cand: Vec<usize> = s[r..].iter().chain(s[..r].iter()).cloned().collect();
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

fn length_key(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

struct EdgeRay {
    edge: EdgeRef,
    param: f64,
    angle: f64,
}

enum RayOutcome {
    Closed(ClosedGeodesic),
    Candidate {
        mismatch: f64,
        return_index: usize,
        key: Vec<usize>,
        ray: EdgeRay,
    },
    Nothing,
}

fn returns(path: &GeodesicPath, edge: EdgeRef) -> impl Iterator<Item = (usize, usize)> + '_ {
    path.crossings
        .iter()
        .enumerate()
        .filter(move |(_, c)| c.into == edge)
        .enumerate()
        .map(|(k, (i, _))| (k, i))
}

fn itinerary(s: &ConeSurface, path: &GeodesicPath, upto: usize) -> Vec<usize> {
    path.crossings[..=upto]
        .iter()
        .map(|c| s.edge_class_of(c.into))
        .collect()
}

fn shoot(s: &ConeSurface, ray: &EdgeRay, horizon: f64) -> GeodesicPath {
    let start = TraceState::on_edge(s, ray.edge, ray.param, ray.angle);
    trace(
        s,
        start,
        &TraceOptions {
            max_length: horizon,
            detect_closure: false,
        },
    )
}

fn examine_ray(s: &ConeSurface, ray: EdgeRay, horizon: f64, coarse: f64) -> RayOutcome {
    let scale = s.kappa().scale();
    let mut ray = ray;
    let mut path = shoot(s, &ray, horizon);
    for _ in 0..2 {
        let early_hit = matches!(path.status, Termination::HitVertex { .. })
            && !returns(&path, ray.edge).any(|(_, i)| {
                let c = &path.crossings[i];
                (c.param - ray.param).abs() < CLOSE_TOL && (c.angle - ray.angle).abs() < CLOSE_TOL
            });
        if !early_hit {
            break;
        }
        ray.angle += RETRY_SHIFT;
        path = shoot(s, &ray, horizon);
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for (k, i) in returns(&path, ray.edge) {
        let c = &path.crossings[i];
        let du = c.param - ray.param;
        let da = c.angle - ray.angle;
        if du.abs() < CLOSE_TOL && da.abs() < CLOSE_TOL {
            return RayOutcome::Closed(ClosedGeodesic {
                length: c.at_length,
                kind: GeodesicKind::Smooth,
                itinerary: itinerary(s, &path, i),
                start_edge: Some(ray.edge),
                start_param: ray.param,
                start_angle: ray.angle,
            });
        }
        let mismatch = du.abs() * scale + da.abs();
        if mismatch < coarse && best.map_or(true, |b| mismatch < b.0) {
            best = Some((mismatch, k, i));
        }
    }
    match best {
        Some((mismatch, k, i)) => RayOutcome::Candidate {
            mismatch,
            return_index: k,
            key: canonical_cycle(&itinerary(s, &path, i)),
            ray,
        },
        None => RayOutcome::Nothing,
    }
}

/// Newton iteration on the return map (param, angle) ↦ (param', angle') at a fixed return.
fn refine(s: &ConeSurface, ray: &EdgeRay, k: usize, horizon: f64) -> Option<ClosedGeodesic> {
    let edge_len = s.triangles()[ray.edge.triangle].sides()[ray.edge.edge];
    let eval = |u: f64, a: f64| -> Option<(f64, f64, f64, usize, GeodesicPath)> {
        if u <= 0.0 || u >= edge_len || a <= 0.0 || a >= PI {
            return None;
        }
        let r = EdgeRay {
            edge: ray.edge,
            param: u,
            angle: a,
        };
        let path = shoot(s, &r, horizon);
        let (_, i) = returns(&path, ray.edge).nth(k)?;
        let c = path.crossings[i];
        Some((c.param - u, c.angle - a, c.at_length, i, path))
    };
    let (mut u, mut a) = (ray.param, ray.angle);
    let h = 1e-6;
    for _ in 0..30 {
        let (fu, fa, len, i, path) = eval(u, a)?;
        if fu.abs() < CLOSE_TOL * 1e-2 && fa.abs() < CLOSE_TOL * 1e-2 {
            return Some(ClosedGeodesic {
                length: len,
                kind: GeodesicKind::Smooth,
                itinerary: itinerary(s, &path, i),
                start_edge: Some(ray.edge),
                start_param: u,
                start_angle: a,
            });
        }
        let (fu1, fa1, ..) = eval(u + h, a)?;
        let (fu0, fa0, ..) = eval(u - h, a)?;
        let (fu3, fa3, ..) = eval(u, a + h)?;
        let (fu2, fa2, ..) = eval(u, a - h)?;
        let j = [
            [(fu1 - fu0) / (2.0 * h), (fu3 - fu2) / (2.0 * h)],
            [(fa1 - fa0) / (2.0 * h), (fa3 - fa2) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-12 {
            return None;
        }
        let du = (j[1][1] * fu - j[0][1] * fa) / det;
        let da = (-j[1][0] * fu + j[0][0] * fa) / det;
        let damp = (0.05 / (du.abs() + da.abs())).min(1.0);
        u -= du * damp;
        a -= da * damp;
    }
    None
}

struct LoopScan<'a> {
    s: &'a ConeSurface,
    vertex: usize,
    horizon: f64,
    budget: usize,
    found: Vec<ClosedGeodesic>,
}

impl LoopScan<'_> {
    fn ray(&self, corner: usize, psi: f64) -> GeodesicPath {
        let s = self.s;
        let c = s.vertices()[self.vertex].corners[corner];
        let tc = s.chart(c.triangle);
        let chart = s.chart_kind();
        let p = tc.verts[c.slot];
        let e1 = chart.direction(&p, &tc.verts[(c.slot + 1) % 3]);
        let d = chart.rotate(&p, &e1, psi);
        trace(
            s,
            TraceState {
                triangle: c.triangle,
                point: p,
                dir: d,
            },
            &TraceOptions {
                max_length: self.horizon,
                detect_closure: false,
            },
        )
    }

    fn record(&mut self, corner: usize, psi: f64, path: &GeodesicPath) {
        let Termination::HitVertex { vertex, triangle, slot } = path.status else {
            return;
        };
        if vertex != self.vertex {
            return;
        }
        let s = self.s;
        let v = &s.vertices()[vertex];
        let out_angle = v.offsets[corner] + psi;
        let Some(j) = v
            .corners
            .iter()
            .position(|c| c.triangle == triangle && c.slot == slot)
        else {
            return;
        };
        let chart = s.chart_kind();
        let tc = s.chart(triangle);
        let p = tc.verts[slot];
        let e1 = chart.direction(&p, &tc.verts[(slot + 1) % 3]);
        let back = chart.retangent(&p, &(-path.end.dir));
        let corner_angle = s.triangle_angles(triangle)[slot];
        let within = chart.signed_angle(&p, &e1, &back).clamp(0.0, corner_angle);
        let in_angle = v.offsets[j] + within;
        let first = (in_angle - out_angle).rem_euclid(v.angle);
        let sectors = [first, v.angle - first];
        let local_geodesic = sectors.iter().all(|x| *x >= PI - CLOSE_TOL);
        self.found.push(ClosedGeodesic {
            length: path.length,
            kind: GeodesicKind::ConeLoop {
                vertex,
                sectors,
                local_geodesic,
            },
            itinerary: path.crossings.iter().map(|c| s.edge_class_of(c.into)).collect(),
            start_edge: None,
            start_param: 0.0,
            start_angle: out_angle,
        });
    }

    /// Locates vertex hits between two directions of one corner whose paths diverge.
    fn between(&mut self, corner: usize, lo: f64, hi: f64, depth: usize) {
        if depth > 8 || self.budget == 0 || hi - lo < 1e-12 {
            return;
        }
        let (pl, ph) = (self.ray(corner, lo), self.ray(corner, hi));
        let (il, ih) = (pl.itinerary(), ph.itinerary());
        let k = il.iter().zip(&ih).take_while(|(a, b)| a == b).count();
        if k == il.len().min(ih.len()) {
            // one path stopped early: either at a vertex (already recorded) or at the horizon
            return;
        }
        self.budget -= 1;
        let reference = il[k];
        let (mut a, mut b) = (lo, hi);
        for _ in 0..64 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let it = self.ray(corner, mid).itinerary();
            if it.len() > k && it[..k] == il[..k] && it[k] == reference {
                a = mid;
            } else {
                b = mid;
            }
        }
        let psi = 0.5 * (a + b);
        let path = self.ray(corner, psi);
        self.record(corner, psi, &path);
        self.between(corner, lo, a - 1e-10, depth + 1);
        self.between(corner, b + 1e-10, hi, depth + 1);
    }
}

fn scan_cone_point(s: &ConeSurface, vertex: usize, horizon: f64, grid: &SearchGrid) -> (usize, Vec<ClosedGeodesic>) {
    let v = &s.vertices()[vertex];
    let mut scan = LoopScan {
        s,
        vertex,
        horizon,
        budget: BISECTION_BUDGET,
        found: Vec::new(),
    };
    let mut rays = 0;
    for (ci, c) in v.corners.iter().enumerate() {
        let corner_angle = s.triangle_angles(c.triangle)[c.slot];
        let m = ((grid.vertex_directions as f64 * corner_angle / v.angle).ceil() as usize).max(4);
        let dirs: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64 * corner_angle).collect();
        let paths: Vec<GeodesicPath> = dirs.iter().map(|&psi| scan.ray(ci, psi)).collect();
        rays += m;
        for (psi, path) in dirs.iter().zip(&paths) {
            scan.record(ci, *psi, path);
        }
        for w in 0..m.saturating_sub(1) {
            let (il, ih) = (paths[w].itinerary(), paths[w + 1].itinerary());
            let k = il.iter().zip(&ih).take_while(|(a, b)| a == b).count();
            let diverged = k < il.len().min(ih.len());
            if diverged {
                scan.between(ci, dirs[w], dirs[w + 1], 0);
            }
        }
    }
    (rays, scan.found)
}

/// Shoots geodesics from a grid of edge points and from every cone point.
///
/// Rays are followed up to `max(length_bound, 2π/√κ)` plus 5%. Closed geodesics
/// are detected when a ray re-enters its starting edge at the same point and
/// angle (within 1e-7); near misses are refined by Newton iteration on the
/// return map. Loops at cone points are found by direct hits and by bisecting
/// between directions whose paths split at the cone point.
pub fn find_closed_geodesics(s: &ConeSurface, length_bound: f64, grid: &SearchGrid) -> GeodesicSearch {
    let base = if s.kappa().is_spherical() {
        length_bound.max(s.kappa().great_circle())
    } else {
        length_bound
    };
    let horizon = base * 1.05;
    let scale = s.kappa().scale();

    let mut rays = Vec::new();
    for &edge in s.edge_classes() {
        let len = s.triangles()[edge.triangle].sides()[edge.edge];
        for i in 0..grid.edge_positions {
            let param = (i as f64 + 0.5) / grid.edge_positions as f64 * len;
            for j in 0..grid.edge_angles {
                let angle = (j as f64 + 0.5) / grid.edge_angles as f64 * PI;
                rays.push((edge, param, angle, len));
            }
        }
    }
    let ray_count = rays.len();
    let outcomes: Vec<RayOutcome> = rays
        .into_par_iter()
        .map(|(edge, param, angle, len)| {
            let coarse = 2.0 * (len * scale / grid.edge_positions as f64 + PI / grid.edge_angles as f64);
            examine_ray(s, EdgeRay { edge, param, angle }, horizon, coarse)
        })
        .collect();

    let mut found: Vec<ClosedGeodesic> = Vec::new();
    let mut seen: HashSet<(i64, Vec<usize>)> = HashSet::new();
    let mut candidates: BTreeMap<Vec<usize>, (f64, usize, EdgeRay)> = BTreeMap::new();
    for o in outcomes {
        match o {
            RayOutcome::Closed(g) => {
                let key = (length_key(g.length), canonical_cycle(&g.itinerary));
                if seen.insert(key) {
                    found.push(g);
                }
            }
            RayOutcome::Candidate {
                mismatch,
                return_index,
                key,
                ray,
            } => {
                let better = candidates.get(&key).map_or(true, |c| mismatch < c.0);
                if better {
                    candidates.insert(key, (mismatch, return_index, ray));
                }
            }
            RayOutcome::Nothing => {}
        }
    }
    let known: HashSet<Vec<usize>> = found.iter().map(|g| canonical_cycle(&g.itinerary)).collect();
    let refined: Vec<ClosedGeodesic> = candidates
        .into_iter()
        .filter(|(key, _)| !known.contains(key))
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|(_, (_, k, ray))| refine(s, &ray, k, horizon))
        .collect();
    for g in refined {
        let key = (length_key(g.length), canonical_cycle(&g.itinerary));
        if seen.insert(key) {
            found.push(g);
        }
    }

    let cone_vertices: Vec<usize> = s.cone_points().iter().map(|(v, _)| *v).collect();
    let loops: Vec<(usize, Vec<ClosedGeodesic>)> = cone_vertices
        .par_iter()
        .map(|&v| scan_cone_point(s, v, horizon, grid))
        .collect();
    let mut total_rays = ray_count;
    let mut loop_seen: HashSet<(usize, i64)> = HashSet::new();
    for (n, ls) in loops {
        total_rays += n;
        for g in ls {
            if let GeodesicKind::ConeLoop { vertex, .. } = g.kind {
                if loop_seen.insert((vertex, length_key(g.length))) {
                    found.push(g);
                }
            }
        }
    }

    found.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then_with(|| a.itinerary.cmp(&b.itinerary))
    });
    let systole_estimate = found
        .iter()
        .filter(|g| g.is_geodesic())
        .map(|g| g.length)
        .reduce(f64::min);
    let shortest_loop = found
        .iter()
        .filter(|g| matches!(g.kind, GeodesicKind::ConeLoop { .. }))
        .map(|g| g.length)
        .reduce(f64::min);
    GeodesicSearch {
        length_bound,
        horizon,
        grid: *grid,
        rays: total_rays,
        geodesics: found,
        systole_estimate,
        shortest_loop,
    }
}
