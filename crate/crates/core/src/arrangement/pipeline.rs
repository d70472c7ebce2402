//! CAT(0) certification of orbifold structures and Kummer-cover thresholds.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num::{BigRational, BigUint, One, Signed, ToPrimitive};
use serde::Serialize;

use super::cyclo::{rat, rational_string};
use super::orbifold::{orbifold_admissible, OrbifoldStructure};
use super::{incidence, Arrangement, NAMED};
use crate::certificate::{Certificate, Verdict, Witness};
use crate::error::{Error, Result};
use crate::model::ModelKappa;
use crate::pk_cone::{noncat_test, DICTIONARY_NOTE};
use crate::surface::{double_triangle, grompi4_certify, triangle_group_cover};
use crate::trig::{is_large, TriangleShape};

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Certificate for one kind of triple point: quotient sphere = double of the
/// triangle with angles πβ, covered along the (b_i, b_j, b_k) triangle group.
fn triple_point_certificate(pairs: &[(BigRational, u32); 3]) -> Certificate {
    let subject = format!(
        "triple point with beta {} and b {:?}",
        pairs.iter().map(|p| p.0.to_string()).collect::<Vec<_>>().join(", "),
        pairs.iter().map(|p| p.1).collect::<Vec<_>>()
    );
    let criterion = "orbifold cover of the quotient sphere triangulated by large triangles";
    let angles = [0, 1, 2].map(|i| PI * to_f64(&pairs[i].0));
    let t = match TriangleShape::from_angles(ModelKappa::FOUR, angles) {
        Ok(t) => t,
        Err(e) => {
            return Certificate::undetermined(criterion)
                .with_subject(subject)
                .note(format!("no link triangle: {e}"))
        }
    };
    let quotient = double_triangle(&t);
    let large = match is_large(&t) {
        Ok(l) => l,
        Err(e) => return Certificate::undetermined(criterion).with_subject(subject).note(e.to_string()),
    };
    let cover = match triangle_group_cover(&t, [pairs[0].1, pairs[1].1, pairs[2].1]) {
        Ok(c) => c,
        Err(e) => return Certificate::undetermined(criterion).with_subject(subject).note(e.to_string()),
    };
    let g = grompi4_certify(&cover);
    let mut c = if g.is_confirmed() && large.large {
        Certificate::confirmed(criterion)
    } else {
        Certificate::undetermined(criterion)
    };
    c.witnesses = g.witnesses.clone();
    let mut quotient_angles: Vec<f64> = quotient.vertices().iter().map(|v| v.angle).collect();
    quotient_angles.sort_by(f64::total_cmp);
    let mut c = c
        .with_subject(subject)
        .margin("min_altitude_minus_pi_over_4", large.margin)
        .margin("cover_triangles", cover.triangles().len() as f64)
        .margin(
            "cover_min_cone_angle_minus_2pi",
            cover.vertices().iter().map(|v| v.angle).fold(f64::INFINITY, f64::min) - TAU,
        )
        .note(format!("quotient cone angles {quotient_angles:?}"));
    c.children.push(g);
    c
}

/// CAT(0) certificate for an orbifold structure on one of the named arrangements.
pub fn cporbi_certify(o: &OrbifoldStructure) -> Result<Certificate> {
    let a = o.arrangement();
    match a.name() {
        Some(n) if NAMED.contains(&n) => {}
        _ => return Err(Error::NotNamedArrangement),
    }
    let adm = orbifold_admissible(o)?;
    if !adm.is_confirmed() {
        return Err(Error::NotAdmissible(format!("{:?}", adm.witnesses)));
    }
    let criterion = "orbifold metric locally CAT(0)";
    let beta = a.beta();
    let b = o.b();

    // lines: orbifold cone angle b·2πβ ≥ 2π
    let line_margin = (0..a.len())
        .map(|i| to_f64(&(&beta[i] * rat(b[i] as i64, 1))) - 1.0)
        .fold(f64::INFINITY, f64::min);
    let lines_ok = (0..a.len()).all(|i| &beta[i] * rat(b[i] as i64, 1) >= BigRational::one());

    let points = incidence(a)?;
    let doubles = points.iter().filter(|p| p.multiplicity() == 2).count();
    let mut kinds: BTreeMap<[(BigRational, u32); 3], usize> = BTreeMap::new();
    for p in points.iter().filter(|p| p.multiplicity() == 3) {
        let mut key = [0, 1, 2].map(|i| (beta[p.lines[i]].clone(), b[p.lines[i]]));
        key.sort();
        *kinds.entry(key).or_default() += 1;
    }
    let children: Vec<Certificate> = kinds
        .iter()
        .map(|(k, n)| {
            let mut c = triple_point_certificate(k);
            c.notes.push(format!("{n} triple points of this kind"));
            c
        })
        .collect();
    let all = lines_ok && children.iter().all(|c| c.is_confirmed());
    let mut c = if all {
        Certificate::confirmed(criterion)
    } else if !lines_ok {
        Certificate::not_cat(
            criterion,
            Witness::FailedCondition {
                condition: "orbifold cone angle at least 2π along every line".into(),
                detail: format!("min b·β − 1 = {line_margin}"),
            },
        )
    } else {
        Certificate::undetermined(criterion)
    };
    c = c
        .with_subject(a.name().unwrap_or_default().to_string())
        .margin("min_b_beta_minus_1", line_margin)
        .note(format!("{doubles} double points: products of two 2-cones, locally CAT(0) given the line angles"))
        .note(DICTIONARY_NOTE);
    if a.name() == Some("A3_0_3") {
        c = c.note("Ceva arrangement taken with factors x−ω^a y, y−ω^a z, z−ω^a x");
    }
    c.children = children;
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KummerVerdict {
    SafeThresholdMet,
    BelowThreshold,
    NotCat,
}

#[derive(Debug, Clone, Serialize)]
pub struct KummerLine {
    pub line: usize,
    #[serde(with = "rational_string")]
    pub beta: BigRational,
    /// Conical angle 2π·n·β upstairs.
    pub cover_angle: f64,
    pub exceeds_2pi: bool,
    pub at_threshold: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KummerPoint {
    pub lines: Vec<usize>,
    pub local_degree: u64,
    pub base_fiber_length: f64,
    pub cover_fiber_length: f64,
    pub fiber_threshold: f64,
    pub fiber_condition: bool,
    pub alpha_min: f64,
    pub noncat_fires: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KummerReport {
    pub n: u64,
    pub lines: usize,
    /// n^(k−1), as a decimal string.
    pub degree: String,
    pub isoperimetric_constant: f64,
    /// max_j 1/β_j: line angles exceed 2π once n is larger.
    #[serde(with = "rational_string")]
    pub angle_threshold: BigRational,
    /// Smallest n meeting the fiber condition at every triple point.
    pub fiber_threshold_n: Option<u64>,
    pub line_rows: Vec<KummerLine>,
    pub point_rows: Vec<KummerPoint>,
    pub verdict: KummerVerdict,
    pub notes: Vec<String>,
}

fn quotient_fiber_length(betas: &[BigRational]) -> f64 {
    // double of the curvature-4 triangle with angles πβ: area 2·(Σπβ − π)/4
    let excess: f64 = betas.iter().map(|b| PI * to_f64(b)).sum::<f64>() - PI;
    2.0 * (2.0 * excess / 4.0)
}

/// Degree, angle and fiber-length thresholds for the Kummer cover of order `n`.
pub fn kummer_report(a: &Arrangement, n: u64, c: f64) -> Result<KummerReport> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("cover order must be at least 2, got {n}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidInput(format!("isoperimetric constant must be positive, got {c}")));
    }
    let k = a.len();
    let degree = BigUint::from(n).pow(k.saturating_sub(1) as u32);
    let nr = rat(n as i64, 1);
    let beta = a.beta();
    let line_rows: Vec<KummerLine> = (0..k)
        .map(|i| {
            let nb = &beta[i] * &nr;
            KummerLine {
                line: i,
                beta: beta[i].clone(),
                cover_angle: TAU * to_f64(&nb),
                exceeds_2pi: nb > BigRational::one(),
                at_threshold: nb == BigRational::one(),
            }
        })
        .collect();
    let angle_threshold = beta
        .iter()
        .map(|b| b.recip())
        .max()
        .unwrap_or_else(BigRational::one);

    let threshold = TAU + 8.0 * PI * PI * c;
    let points = incidence(a)?;
    let mut point_rows = Vec::new();
    let mut fiber_n: Option<u64> = Some(2);
    for p in points.iter().filter(|p| p.multiplicity() == 3) {
        let betas: Vec<BigRational> = p.lines.iter().map(|&i| beta[i].clone()).collect();
        let base = quotient_fiber_length(&betas);
        let local_degree = n * n;
        let cover = local_degree as f64 * base;
        let alpha_min = betas.iter().map(|b| TAU * to_f64(b)).fold(f64::INFINITY, f64::min);
        // smallest m with m²·base > threshold
        let need = if base > 0.0 {
            let mut m = ((threshold / base).sqrt().floor() as u64).max(2);
            while (m * m) as f64 * base <= threshold {
                m += 1;
            }
            Some(m)
        } else {
            None
        };
        fiber_n = match (fiber_n, need) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        };
        point_rows.push(KummerPoint {
            lines: p.lines.clone(),
            local_degree,
            base_fiber_length: base,
            cover_fiber_length: cover,
            fiber_threshold: threshold,
            fiber_condition: cover > threshold,
            alpha_min,
            noncat_fires: noncat_test(alpha_min, n),
        });
    }
    let verdict = if point_rows.iter().any(|p| p.noncat_fires) {
        KummerVerdict::NotCat
    } else if line_rows.iter().all(|l| l.exceeds_2pi) && point_rows.iter().all(|p| p.fiber_condition) {
        KummerVerdict::SafeThresholdMet
    } else {
        KummerVerdict::BelowThreshold
    };
    let mut notes = vec![DICTIONARY_NOTE.to_string()];
    if nr == angle_threshold {
        notes.push(format!("n = {n} equals the angle threshold max 1/β: some line angles are exactly 2π"));
    }
    if verdict == KummerVerdict::NotCat {
        notes.push("non-CAT test assumes the cone is not a product of two 2-dimensional cones".into());
    }
    Ok(KummerReport {
        n,
        lines: k,
        degree: degree.to_string(),
        isoperimetric_constant: c,
        angle_threshold,
        fiber_threshold_n: fiber_n,
        line_rows,
        point_rows,
        verdict,
        notes,
    })
}

impl KummerReport {
    pub fn certificate_verdict(&self) -> Verdict {
        match self.verdict {
            KummerVerdict::SafeThresholdMet => Verdict::CatConfirmed,
            KummerVerdict::BelowThreshold => Verdict::Undetermined,
            KummerVerdict::NotCat => Verdict::NotCat,
        }
    }

    pub fn any_negative_beta(&self) -> bool {
        self.line_rows.iter().any(|l| l.beta.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::super::named_arrangement;
    use super::*;

    #[test]
    fn named_arrangements_certify_with_b2() {
        for name in NAMED {
            let o = OrbifoldStructure::uniform(named_arrangement(name).unwrap(), 2).unwrap();
            let c = cporbi_certify(&o).unwrap();
            assert!(c.is_confirmed(), "{name}: {c:#?}");
        }
    }

    #[test]
    fn cporbi_rejects_inadmissible_and_unnamed() {
        let o = OrbifoldStructure::new(named_arrangement("A1_6").unwrap(), vec![7, 7, 2, 7, 2, 2]).unwrap();
        assert!(matches!(cporbi_certify(&o), Err(Error::NotAdmissible(_))));
        let a = named_arrangement("A1_6").unwrap();
        let plain = Arrangement::new(a.lines().to_vec(), a.beta().to_vec()).unwrap();
        let o = OrbifoldStructure::uniform(plain, 2).unwrap();
        assert!(matches!(cporbi_certify(&o), Err(Error::NotNamedArrangement)));
    }

    #[test]
    fn kummer_quadrilateral_n2() {
        let r = kummer_report(&named_arrangement("A1_6").unwrap(), 2, 0.1).unwrap();
        assert_eq!(r.degree, "32");
        assert_eq!(r.angle_threshold, rat(2, 1));
        assert!(r.line_rows.iter().all(|l| l.at_threshold && !l.exceeds_2pi));
        assert!(r.point_rows.iter().all(|p| p.noncat_fires));
        assert_eq!(r.verdict, KummerVerdict::NotCat);
    }

    #[test]
    fn kummer_degree_for_three_lines() {
        let a = named_arrangement("A1_6").unwrap();
        let three = Arrangement::new(a.lines()[..3].to_vec(), a.beta()[..3].to_vec()).unwrap();
        assert_eq!(kummer_report(&three, 2, 0.1).unwrap().degree, "4");
    }
}
