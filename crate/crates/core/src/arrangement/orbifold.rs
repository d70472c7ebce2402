//! Orbifold structures (ℂP², arrangement, b) and their Chern numbers.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use super::cyclo::{rat, rational_string};
use super::{incidence, Arrangement, MultiplePoint};
use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OrbifoldStructure {
    arrangement: Arrangement,
    b: Vec<u32>,
}

impl OrbifoldStructure {
    pub fn new(arrangement: Arrangement, b: Vec<u32>) -> Result<Self> {
        if b.len() != arrangement.len() {
            return Err(Error::InvalidInput(format!(
                "{} multiplicities for {} lines",
                b.len(),
                arrangement.len()
            )));
        }
        if let Some(x) = b.iter().find(|&&x| x < 2) {
            return Err(Error::InvalidInput(format!("multiplicity {x} is below 2")));
        }
        Ok(OrbifoldStructure { arrangement, b })
    }

    /// Every line with multiplicity `b`.
    pub fn uniform(arrangement: Arrangement, b: u32) -> Result<Self> {
        let n = arrangement.len();
        Self::new(arrangement, vec![b; n])
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }
}

fn recip_sum(b: [u32; 3]) -> BigRational {
    b.iter().map(|&x| rat(1, x as i64)).sum()
}

fn point_label(p: &MultiplePoint) -> String {
    format!("point on lines {:?}", p.lines)
}

/// Admissible iff all multiple points are at most triple and 1/bⱼ + 1/bₖ + 1/bₗ > 1 at triples.
pub fn orbifold_admissible(o: &OrbifoldStructure) -> Result<Certificate> {
    let criterion = "multiple points at most triple with 1/b_j + 1/b_k + 1/b_l > 1";
    let points = incidence(&o.arrangement)?;
    let mut worst = f64::INFINITY;
    for p in &points {
        if p.multiplicity() > 3 {
            return Ok(Certificate::not_cat(
                criterion,
                Witness::FailedCondition {
                    condition: "at most triple".into(),
                    detail: format!("{} has multiplicity {}", point_label(p), p.multiplicity()),
                },
            )
            .note("NOT_CAT here means the orbifold structure is not admissible"));
        }
        if p.multiplicity() == 3 {
            let b = [0, 1, 2].map(|i| o.b[p.lines[i]]);
            let s = recip_sum(b);
            worst = worst.min(num::ToPrimitive::to_f64(&(&s - BigRational::one())).unwrap_or(0.0));
            if s <= BigRational::one() {
                return Ok(Certificate::not_cat(
                    criterion,
                    Witness::FailedCondition {
                        condition: "spherical triple".into(),
                        detail: format!("{} has multiplicities {b:?}, reciprocal sum {s}", point_label(p)),
                    },
                )
                .note("NOT_CAT here means the orbifold structure is not admissible"));
            }
        }
    }
    let mut c = Certificate::confirmed(criterion).note("CAT_CONFIRMED here means admissible");
    if worst.is_finite() {
        c = c.margin("min_reciprocal_sum_minus_1", worst);
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupOrder {
    #[serde(with = "rational_string")]
    pub order: BigRational,
    pub label: Option<String>,
}

/// Order 4(1/bⱼ + 1/bₖ + 1/bₗ − 1)⁻² of the local group at a triple point.
pub fn local_group_order(bj: u32, bk: u32, bl: u32) -> Result<GroupOrder> {
    let mut m = [bj, bk, bl];
    if m.iter().any(|&x| x < 2) {
        return Err(Error::NotSpherical(bj, bk, bl));
    }
    let excess = recip_sum(m) - BigRational::one();
    if excess <= BigRational::zero() {
        return Err(Error::NotSpherical(bj, bk, bl));
    }
    let order = rat(4, 1) / (&excess * &excess);
    m.sort_unstable();
    let label = match m {
        [2, 2, s] => Some(format!("G({},2,2)", 2 * s)),
        [2, 3, 3] => Some("ST7".to_string()),
        [2, 3, 4] => Some("ST11".to_string()),
        [2, 3, 5] => Some("ST19".to_string()),
        _ => None,
    };
    Ok(GroupOrder { order, label })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MiyaokaYau {
    BallQuotientEquality,
    StrictInequality,
    Violation,
}

impl fmt::Display for MiyaokaYau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MiyaokaYau::BallQuotientEquality => "BALL_QUOTIENT_EQUALITY",
            MiyaokaYau::StrictInequality => "STRICT_INEQUALITY",
            MiyaokaYau::Violation => "VIOLATION",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChernReport {
    #[serde(with = "rational_string")]
    pub c1_sq: BigRational,
    #[serde(with = "rational_string")]
    pub euler_e: BigRational,
    #[serde(with = "rational_string")]
    pub three_e: BigRational,
    pub verdict: MiyaokaYau,
}

impl ChernReport {
    pub fn from_values(c1_sq: BigRational, euler_e: BigRational) -> Self {
        let three_e = &euler_e * rat(3, 1);
        let mut r = ChernReport {
            c1_sq,
            euler_e,
            three_e,
            verdict: MiyaokaYau::StrictInequality,
        };
        r.verdict = miyaoka_yau_verdict(&r);
        r
    }
}

/// Orbifold c₁² and e for an admissible structure on ℂP² along lines.
///
/// c₁² = (−3 + Σ(1 − 1/bᵢ))², e = 3 − Σ(1 − 1/bᵢ)(2 − #points on line i) − Σₚ(1 − 1/β(p)),
/// with β(p) the local group order at triples and bᵢbⱼ at double points.
pub fn chern_numbers(o: &OrbifoldStructure) -> Result<ChernReport> {
    let adm = orbifold_admissible(o)?;
    if !adm.is_confirmed() {
        let detail = adm
            .witnesses
            .first()
            .map(|w| format!("{w:?}"))
            .unwrap_or_default();
        return Err(Error::NotAdmissible(detail));
    }
    let points = incidence(&o.arrangement)?;
    let one = BigRational::one();
    let weight = |i: usize| &one - rat(1, o.b[i] as i64);
    let sum_w: BigRational = (0..o.b.len()).map(weight).sum();
    let base = rat(-3, 1) + sum_w;
    let c1_sq = &base * &base;

    let mut e = rat(3, 1);
    for i in 0..o.b.len() {
        let on_line = points.iter().filter(|p| p.lines.contains(&i)).count() as i64;
        e -= weight(i) * rat(2 - on_line, 1);
    }
    for p in &points {
        let beta_p = match p.lines[..] {
            [i, j] => BigRational::from_integer(BigInt::from(o.b[i] as u64 * o.b[j] as u64)),
            [i, j, k] => local_group_order(o.b[i], o.b[j], o.b[k])?.order,
            _ => unreachable!("admissibility excludes higher multiplicities"),
        };
        e -= &one - one.clone() / beta_p;
    }
    Ok(ChernReport::from_values(c1_sq, e))
}

/// Exact comparison of c₁² with 3e.
pub fn miyaoka_yau_verdict(r: &ChernReport) -> MiyaokaYau {
    match r.c1_sq.cmp(&r.three_e) {
        Ordering::Equal => MiyaokaYau::BallQuotientEquality,
        Ordering::Less => MiyaokaYau::StrictInequality,
        Ordering::Greater => MiyaokaYau::Violation,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{named_arrangement, Arrangement, CycloRational};
    use super::*;
    use crate::certificate::Verdict;

    #[test]
    fn ceva_ball_quotient() {
        let o = OrbifoldStructure::uniform(named_arrangement("A3_0_3").unwrap(), 2).unwrap();
        assert!(orbifold_admissible(&o).unwrap().is_confirmed());
        let r = chern_numbers(&o).unwrap();
        assert_eq!(r.c1_sq, rat(9, 4));
        assert_eq!(r.euler_e, rat(3, 4));
        assert_eq!(r.three_e, rat(9, 4));
        assert_eq!(r.verdict, MiyaokaYau::BallQuotientEquality);
    }

    #[test]
    fn ceva_with_b3_is_not_admissible() {
        let o = OrbifoldStructure::uniform(named_arrangement("A3_0_3").unwrap(), 3).unwrap();
        assert_eq!(orbifold_admissible(&o).unwrap().verdict, Verdict::NotCat);
        assert!(matches!(chern_numbers(&o), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn group_orders() {
        assert_eq!(local_group_order(2, 2, 2).unwrap().order, rat(16, 1));
        let g = local_group_order(2, 3, 3).unwrap();
        assert_eq!(g.order, rat(144, 1));
        assert_eq!(g.label.as_deref(), Some("ST7"));
        assert_eq!(local_group_order(3, 2, 4).unwrap().order, rat(576, 1));
        assert_eq!(local_group_order(5, 3, 2).unwrap().order, rat(3600, 1));
        for s in 2..10u32 {
            let g = local_group_order(s, 2, 2).unwrap();
            assert_eq!(g.order, rat(4 * (s * s) as i64, 1));
        }
        assert_eq!(local_group_order(7, 2, 2).unwrap().label.as_deref(), Some("G(14,2,2)"));
        assert!(matches!(local_group_order(3, 3, 3), Err(Error::NotSpherical(3, 3, 3))));
    }

    #[test]
    fn admissibility_failures() {
        let o = OrbifoldStructure::new(named_arrangement("A1_6").unwrap(), vec![7, 7, 2, 7, 2, 2]).unwrap();
        // lines 0, 1, 3 (z=0, y=0, y=z) meet at (1:0:0)
        let c = orbifold_admissible(&o).unwrap();
        assert_eq!(c.verdict, Verdict::NotCat);
        let line = |c: [i64; 3]| c.map(CycloRational::int);
        let quad = Arrangement::new(
            vec![line([1, 0, 0]), line([0, 1, 0]), line([1, 1, 0]), line([1, -1, 0])],
            vec![rat(1, 2); 4],
        )
        .unwrap();
        let c = orbifold_admissible(&OrbifoldStructure::uniform(quad, 2).unwrap()).unwrap();
        assert_eq!(c.verdict, Verdict::NotCat);
        assert!(format!("{:?}", c.witnesses).contains("multiplicity 4"));
    }

    #[test]
    fn single_line() {
        // oracle: direct evaluation, c₁² = (−3 + ½)², e = 3 − ½·2
        let a = Arrangement::new(vec![[0, 0, 1].map(CycloRational::int)], vec![rat(1, 2)]).unwrap();
        let r = chern_numbers(&OrbifoldStructure::uniform(a, 2).unwrap()).unwrap();
        assert_eq!(r.c1_sq, rat(25, 4));
        assert_eq!(r.euler_e, rat(2, 1));
    }

    #[test]
    fn verdict_from_values() {
        let r = ChernReport::from_values(rat(1, 1), rat(2, 3));
        assert_eq!(r.verdict, MiyaokaYau::StrictInequality);
        let r = ChernReport::from_values(rat(3, 1), rat(2, 3));
        assert_eq!(r.verdict, MiyaokaYau::Violation);
    }
}
