//! Line arrangements in ℂP² with exact coordinates in ℚ(ω).

mod cyclo;
mod orbifold;
mod pipeline;

use std::collections::BTreeMap;

use num::{BigRational, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cyclo::{rat, rational_pair, rational_string, CycloRational};
pub use orbifold::{
    chern_numbers, local_group_order, miyaoka_yau_verdict, orbifold_admissible, ChernReport, GroupOrder,
    MiyaokaYau, OrbifoldStructure,
};
pub use pipeline::{cporbi_certify, kummer_report, KummerLine, KummerPoint, KummerReport, KummerVerdict};

pub type Coords = [CycloRational; 3];

/// Scales a nonzero triple so its first nonzero entry is 1.
pub fn normalize(v: &Coords) -> Option<Coords> {
    let lead = v.iter().find(|x| !x.is_zero())?;
    let inv = lead.inv()?;
    Some([&v[0] * &inv, &v[1] * &inv, &v[2] * &inv])
}

fn dot(u: &Coords, v: &Coords) -> CycloRational {
    &(&(&u[0] * &v[0]) + &(&u[1] * &v[1])) + &(&u[2] * &v[2])
}

fn cross(u: &Coords, v: &Coords) -> Coords {
    [
        &(&u[1] * &v[2]) - &(&u[2] * &v[1]),
        &(&u[2] * &v[0]) - &(&u[0] * &v[2]),
        &(&u[0] * &v[1]) - &(&u[1] * &v[0]),
    ]
}

/// Lines `c₀x + c₁y + c₂z = 0` with PK angle fractions β (conical angle 2πβ).
#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    name: Option<String>,
    lines: Vec<Coords>,
    beta: Vec<BigRational>,
}

/// A point where at least two lines meet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplePoint {
    pub coords: Coords,
    /// Indices of the lines through the point, increasing.
    pub lines: Vec<usize>,
}

impl MultiplePoint {
    pub fn multiplicity(&self) -> usize {
        self.lines.len()
    }
}

impl Arrangement {
    pub fn new(lines: Vec<Coords>, beta: Vec<BigRational>) -> Result<Self> {
        if lines.len() != beta.len() {
            return Err(Error::InvalidInput(format!(
                "{} lines but {} angle fractions",
                lines.len(),
                beta.len()
            )));
        }
        if let Some(b) = beta.iter().find(|b| !b.is_positive()) {
            return Err(Error::InvalidInput(format!("angle fraction {b} is not positive")));
        }
        let lines = lines
            .iter()
            .enumerate()
            .map(|(i, l)| normalize(l).ok_or_else(|| Error::InvalidInput(format!("line {i} is zero"))))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                if lines[i] == lines[j] {
                    return Err(Error::DuplicateLines(i, j));
                }
            }
        }
        Ok(Arrangement {
            name: None,
            lines,
            beta,
        })
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn lines(&self) -> &[Coords] {
        &self.lines
    }

    pub fn beta(&self) -> &[BigRational] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Applies the projective transformation with matrix `m` to every line (lines transform by m⁻ᵀ).
    pub fn transform(&self, m: &[Coords; 3]) -> Result<Self> {
        let inv_t = inverse_transpose(m).ok_or_else(|| Error::InvalidInput("singular matrix".into()))?;
        let lines = self
            .lines
            .iter()
            .map(|l| {
                [0, 1, 2].map(|r| dot(&inv_t[r], l))
            })
            .collect();
        let mut out = Arrangement::new(lines, self.beta.clone())?;
        out.name = self.name.clone();
        Ok(out)
    }
}

fn inverse_transpose(m: &[Coords; 3]) -> Option<[Coords; 3]> {
    // rows of (m⁻¹)ᵀ are the cofactor rows divided by the determinant
    let c0 = cross(&m[1], &m[2]);
    let c1 = cross(&m[2], &m[0]);
    let c2 = cross(&m[0], &m[1]);
    let det = dot(&m[0], &c0);
    let inv = det.inv()?;
    let scale = |c: Coords| c.map(|x| &x * &inv);
    Some([scale(c0), scale(c1), scale(c2)])
}

/// All multiple points, by exact pairwise intersection.
pub fn incidence(a: &Arrangement) -> Result<Vec<MultiplePoint>> {
    let lines = &a.lines;
    let mut points: BTreeMap<Coords, Vec<usize>> = BTreeMap::new();
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            let p = normalize(&cross(&lines[i], &lines[j])).ok_or(Error::DuplicateLines(i, j))?;
            points.entry(p).or_default();
        }
    }
    let mut out: Vec<MultiplePoint> = points
        .into_keys()
        .map(|p| {
            let members = (0..lines.len()).filter(|&k| dot(&lines[k], &p).is_zero()).collect();
            MultiplePoint { coords: p, lines: members }
        })
        .collect();
    out.sort_by(|x, y| x.lines.cmp(&y.lines));
    // each pair of lines meets exactly once
    let k = lines.len();
    for i in 0..k {
        let through: usize = out
            .iter()
            .filter(|p| p.lines.contains(&i))
            .map(|p| p.multiplicity() - 1)
            .sum();
        if through != k - 1 {
            return Err(Error::InvalidInput(format!(
                "line {i} meets {through} other lines, expected {}",
                k - 1
            )));
        }
    }
    Ok(out)
}

/// Counts of multiple points by multiplicity.
pub fn multiplicity_profile(points: &[MultiplePoint]) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for p in points {
        *m.entry(p.multiplicity()).or_default() += 1;
    }
    m
}

pub const NAMED: [&str; 3] = ["A1_6", "A1_7", "A3_0_3"];

fn line(c: [i64; 3]) -> Coords {
    c.map(CycloRational::int)
}

/// The complete quadrilateral, A₁(7) and the Ceva-type arrangement of nine lines.
pub fn named_arrangement(name: &str) -> Result<Arrangement> {
    let half = rat(1, 2);
    let two_thirds = rat(2, 3);
    let a = match name {
        "A1_6" => {
            // lines through pairs of (1:0:0), (0:1:0), (0:0:1), (1:1:1)
            let lines = vec![
                line([0, 0, 1]),
                line([0, 1, 0]),
                line([1, 0, 0]),
                line([0, 1, -1]),
                line([1, 0, -1]),
                line([1, -1, 0]),
            ];
            Arrangement::new(lines, vec![half; 6])?
        }
        "A1_7" => {
            let lines = vec![
                line([1, 0, -1]),
                line([1, 0, 1]),
                line([0, 1, -1]),
                line([0, 1, 1]),
                line([1, -1, 0]),
                line([1, 1, 0]),
                line([0, 0, 1]),
            ];
            let beta = vec![half.clone(), half.clone(), half.clone(), half, two_thirds.clone(), two_thirds.clone(), two_thirds];
            Arrangement::new(lines, beta)?
        }
        "A3_0_3" => {
            let mut lines = Vec::new();
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                for k in 0..3 {
                    let mut l = [CycloRational::zero(), CycloRational::zero(), CycloRational::zero()];
                    l[i] = CycloRational::one();
                    l[j] = -CycloRational::omega_pow(k);
                    lines.push(l);
                }
            }
            let a = Arrangement::new(lines, vec![two_thirds; 9])?;
            let pts = incidence(&a)?;
            let profile = multiplicity_profile(&pts);
            let four_each = (0..9).all(|i| pts.iter().filter(|p| p.lines.contains(&i)).count() == 4);
            if profile.get(&3) != Some(&12) || profile.len() != 1 || !four_each {
                return Err(Error::InvalidInput(format!(
                    "Ceva arrangement has profile {profile:?}, expected 12 triple points only"
                )));
            }
            a
        }
        _ => return Err(Error::NotNamedArrangement),
    };
    Ok(a.named(name))
}

/// On-disk arrangement: lines as coefficient triples, β as `[p, q]`, optional b.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrangementFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub lines: Vec<Coords>,
    #[serde(with = "beta_list")]
    pub beta: Vec<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<u32>>,
}

mod beta_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "rational_pair")] BigRational);

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let w: Vec<W> = v.iter().cloned().map(W).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        Ok(Vec::<W>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

impl ArrangementFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn arrangement(&self) -> Result<Arrangement> {
        let a = Arrangement::new(self.lines.clone(), self.beta.clone())?;
        match self.name.as_deref() {
            Some(n) if NAMED.contains(&n) => {
                // a named file must carry the named lines and angles, in any order
                let reference = named_arrangement(n)?;
                let key = |x: &Arrangement| {
                    let mut v: Vec<(Coords, BigRational)> =
                        x.lines.iter().cloned().zip(x.beta.iter().cloned()).collect();
                    v.sort();
                    v
                };
                if key(&a) != key(&reference) {
                    return Err(Error::InvalidInput(format!(
                        "file is labelled {n} but its lines or angles differ from {n}"
                    )));
                }
                Ok(a.named(n))
            }
            Some(n) => Ok(a.named(n)),
            None => Ok(a),
        }
    }

    pub fn of(a: &Arrangement, b: Option<Vec<u32>>) -> Self {
        ArrangementFile {
            name: a.name.clone(),
            lines: a.lines.clone(),
            beta: a.beta.clone(),
            b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_quadrilateral() {
        let a = named_arrangement("A1_6").unwrap();
        assert_eq!(a.len(), 6);
        let p = incidence(&a).unwrap();
        let profile = multiplicity_profile(&p);
        assert_eq!(profile[&3], 4);
        assert_eq!(profile[&2], 3);
    }

    #[test]
    fn ceva_arrangement() {
        let a = named_arrangement("A3_0_3").unwrap();
        assert_eq!(a.len(), 9);
        let p = incidence(&a).unwrap();
        assert_eq!(p.len(), 12);
        assert!(p.iter().all(|x| x.multiplicity() == 3));
        for i in 0..9 {
            assert_eq!(p.iter().filter(|x| x.lines.contains(&i)).count(), 4);
        }
    }

    #[test]
    fn a17_profile() {
        let a = named_arrangement("A1_7").unwrap();
        assert_eq!(a.len(), 7);
        let profile = multiplicity_profile(&incidence(&a).unwrap());
        // oracle: exhaustive check of all 35 triples of the seven equations by hand
        assert_eq!(profile.get(&3), Some(&6));
        assert_eq!(profile.get(&2), Some(&3));
        assert_eq!(profile.get(&4), None);
    }

    #[test]
    fn two_lines_one_point() {
        let a = Arrangement::new(vec![line([1, 0, 0]), line([0, 1, 0])], vec![rat(1, 2); 2]).unwrap();
        let p = incidence(&a).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].lines, vec![0, 1]);
    }

    #[test]
    fn duplicate_lines_rejected() {
        let err = Arrangement::new(vec![line([1, 2, 3]), line([2, 4, 6])], vec![rat(1, 2); 2]).unwrap_err();
        assert!(matches!(err, Error::DuplicateLines(0, 1)));
        assert!(matches!(named_arrangement("A9"), Err(Error::NotNamedArrangement)));
    }

    #[test]
    fn file_round_trip() {
        let a = named_arrangement("A3_0_3").unwrap();
        let f = ArrangementFile::of(&a, Some(vec![2; 9]));
        let text = serde_json::to_string(&f).unwrap();
        let back = ArrangementFile::from_json(&text).unwrap();
        assert_eq!(back.arrangement().unwrap(), a);
        assert_eq!(back.b, Some(vec![2; 9]));
        let mut forged = f.clone();
        forged.lines.swap_remove(0);
        forged.beta.swap_remove(0);
        assert!(forged.arrangement().is_err());
    }
}
