//! Global CAT(κ) verdicts for cone surfaces.

use std::collections::{BTreeMap, BTreeSet};

use crate::certificate::{Certificate, Verdict, Witness};
use crate::model::ModelKappa;
use crate::trig::is_large;

use super::search::{find_closed_geodesics, SearchGrid};
use super::{local_cat_check, ConeSurface};

const GROMOV: &str = "large triangles, valence at least four, simple 1-skeleton, 3-cycles bound faces";

/// Combinatorial CAT(4) certificate for a triangulation by large triangles.
///
/// Conditions: (a) every triangle is large; (b) every vertex has valence ≥ 4;
/// (c) the 1-skeleton has no loops or multiple edges; (d) every 3-cycle of the
/// 1-skeleton bounds a face. A failed condition leaves the verdict undetermined.
pub fn grompi4_certify(s: &ConeSurface) -> Certificate {
    let subject = s.fingerprint();
    if s.kappa() != ModelKappa::FOUR {
        return Certificate::undetermined(GROMOV)
            .with_subject(subject)
            .note(format!("requires curvature 4, surface has {}", s.kappa().value()));
    }
    let mut failures: Vec<Witness> = Vec::new();

    // (a)
    let mut min_margin = f64::INFINITY;
    for (i, t) in s.triangles().iter().enumerate() {
        match is_large(t) {
            Ok(l) => {
                min_margin = min_margin.min(l.margin);
                if !l.large {
                    failures.push(Witness::NonLargeTriangle {
                        triangle: i,
                        min_altitude: l.min_altitude,
                    });
                }
            }
            Err(e) => failures.push(Witness::FailedCondition {
                condition: "large triangles".into(),
                detail: e.to_string(),
            }),
        }
    }

    // (b)
    let min_valence = s.vertices().iter().map(|v| v.valence()).min().unwrap_or(0);
    if let Some((v, vert)) = s.vertices().iter().enumerate().find(|(_, v)| v.valence() < 4) {
        failures.push(Witness::FailedCondition {
            condition: "valence at least four".into(),
            detail: format!("vertex {v} has valence {}", vert.valence()),
        });
    }

    // (c)
    let mut multiplicity: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &r in s.edge_classes() {
        let (a, b) = s.edge_vertices(r);
        *multiplicity.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    if let Some(((a, b), n)) = multiplicity.iter().find(|((a, b), n)| a == b || **n > 1) {
        failures.push(Witness::FailedCondition {
            condition: "simple 1-skeleton".into(),
            detail: if a == b {
                format!("edge from vertex {a} to itself")
            } else {
                format!("vertices {a} and {b} joined by {n} edges")
            },
        });
    }

    // (d)
    let faces: BTreeSet<[usize; 3]> = (0..s.triangles().len())
        .map(|t| {
            let mut f = [0, 1, 2].map(|i| s.vertex_of(t, i));
            f.sort_unstable();
            f
        })
        .collect();
    let mut adjacency: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(a, b) in multiplicity.keys() {
        if a != b {
            adjacency.entry(a).or_default().insert(b);
            adjacency.entry(b).or_default().insert(a);
        }
    }
    let mut empty_cycle = None;
    'outer: for (&a, na) in &adjacency {
        for &b in na.range(a + 1..) {
            for &c in adjacency[&b].range(b + 1..) {
                if na.contains(&c) && !faces.contains(&[a, b, c]) {
                    empty_cycle = Some([a, b, c]);
                    break 'outer;
                }
            }
        }
    }
    if let Some([a, b, c]) = empty_cycle {
        failures.push(Witness::FailedCondition {
            condition: "3-cycles bound faces".into(),
            detail: format!("cycle {a}-{b}-{c} bounds no face"),
        });
    }

    let mut cert = if failures.is_empty() {
        Certificate::confirmed(GROMOV)
    } else {
        let mut c = Certificate::undetermined(GROMOV);
        c.witnesses = failures;
        c
    };
    cert = cert
        .with_subject(subject)
        .margin("min_altitude_minus_pi_over_4", min_margin)
        .margin("min_valence", min_valence as f64);
    cert
}

/// CAT(κ) verdict from the local link condition and the systole criterion.
///
/// Confirmation needs an argument beyond the numerical search: the
/// combinatorial certificate for κ = 4, or a smooth sphere, which is the round
/// sphere of curvature κ.
pub fn global_cat_verdict(s: &ConeSurface, length_bound: Option<f64>, grid: &SearchGrid) -> Certificate {
    let criterion = "locally CAT(κ) with no closed geodesic shorter than 2π/√κ";
    let subject = s.fingerprint();
    let local = local_cat_check(s);
    if local.verdict == Verdict::NotCat {
        let mut c = Certificate::new(Verdict::NotCat, criterion).with_subject(subject);
        c.witnesses = local.witnesses.clone();
        c.margins = local.margins.clone();
        c.children.push(local);
        return c;
    }
    if !s.kappa().is_spherical() {
        return Certificate::not_cat(
            criterion,
            Witness::Topology {
                detail: format!(
                    "closed surface with Euler characteristic {} is not contractible",
                    s.euler_characteristic()
                ),
            },
        )
        .with_subject(subject)
        .child(local);
    }
    let bound = length_bound.unwrap_or_else(|| s.kappa().great_circle());
    let search = find_closed_geodesics(s, bound, grid);
    let short = search
        .below_bound()
        .into_iter()
        .filter(|g| g.is_geodesic() && g.length < bound - 1e-6)
        .min_by(|a, b| a.length.total_cmp(&b.length));
    if let Some(g) = short {
        return Certificate::not_cat(
            criterion,
            Witness::ClosedGeodesic {
                length: g.length,
                description: format!("crosses edge classes {:?}", g.itinerary),
            },
        )
        .with_subject(subject)
        .margin("length_bound", bound)
        .margin("systole_estimate_minus_bound", g.length - bound)
        .child(local);
    }
    let mut c = if s.kappa() == ModelKappa::FOUR {
        let g = grompi4_certify(s);
        let ok = g.is_confirmed();
        let c = if ok {
            Certificate::confirmed(criterion).note("confirmed by the large-triangle certificate")
        } else {
            Certificate::undetermined(criterion)
        };
        c.child(g)
    } else {
        Certificate::undetermined(criterion)
    };
    let smooth_sphere = s.cone_points().is_empty() && s.euler_characteristic() == 2;
    if c.verdict == Verdict::Undetermined && smooth_sphere {
        c.verdict = Verdict::CatConfirmed;
        c = c.note("smooth sphere of constant curvature κ: the round sphere");
    }
    if c.verdict == Verdict::Undetermined {
        c = c.note("no short closed geodesic found; the search is evidence, not proof");
    }
    let mut c = c
        .with_subject(subject)
        .margin("length_bound", bound)
        .margin("rays", search.rays as f64)
        .child(local);
    if let Some(sys) = search.systole_estimate {
        c = c.margin("systole_estimate_minus_bound", sys - bound);
    }
    if let Some(l) = search.shortest_loop {
        c = c.margin("shortest_cone_loop", l);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{double_triangle, round_sphere, triangle_group_cover, ConeSurface};
    use crate::trig::TriangleShape;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn k4() -> ModelKappa {
        ModelKappa::FOUR
    }

    fn fast() -> SearchGrid {
        SearchGrid {
            edge_positions: 3,
            edge_angles: 12,
            vertex_directions: 24,
        }
    }

    #[test]
    fn octahedral_cover_passes_all_conditions() {
        let t = TriangleShape::from_angles(k4(), [FRAC_PI_2; 3]).unwrap();
        let s = triangle_group_cover(&t, [2, 2, 2]).unwrap();
        let c = grompi4_certify(&s);
        assert!(c.is_confirmed(), "{c:?}");
        assert!(c.margins["min_altitude_minus_pi_over_4"].abs() < 1e-9);
    }

    #[test]
    fn double_fails_on_valence() {
        let t = TriangleShape::from_angles(k4(), [FRAC_PI_2; 3]).unwrap();
        let c = grompi4_certify(&double_triangle(&t));
        assert_eq!(c.verdict, Verdict::Undetermined);
        assert!(c.witnesses.iter().any(|w| matches!(w,
            Witness::FailedCondition { condition, .. } if condition == "valence at least four")));
    }

    #[test]
    fn tetrahedron_fails_on_valence() {
        // four equilateral triangles with angles 2π/3: a regular tetrahedron
        let t = TriangleShape::from_angles(k4(), [2.0 * PI / 3.0; 3]).unwrap();
        let s = ConeSurface::build(
            k4(),
            vec![t; 4],
            &[
                [[0, 0], [1, 0]],
                [[0, 1], [2, 0]],
                [[0, 2], [3, 0]],
                [[1, 1], [3, 2]],
                [[1, 2], [2, 1]],
                [[2, 2], [3, 1]],
            ],
        )
        .unwrap();
        assert_eq!(s.vertices().len(), 4);
        let c = grompi4_certify(&s);
        assert_eq!(c.verdict, Verdict::Undetermined);
        assert!(format!("{:?}", c.witnesses).contains("valence"));
    }

    #[test]
    fn verdicts() {
        assert!(global_cat_verdict(&round_sphere(), None, &fast()).is_confirmed());
        let t = TriangleShape::from_angles(k4(), [FRAC_PI_2; 3]).unwrap();
        let c = global_cat_verdict(&double_triangle(&t), None, &fast());
        assert_eq!(c.verdict, Verdict::NotCat);
        assert!(matches!(c.witnesses[0], Witness::SmallConeAngle { .. }));
        let cover = triangle_group_cover(&t, [2, 2, 2]).unwrap();
        assert!(global_cat_verdict(&cover, None, &fast()).is_confirmed());
    }
}
