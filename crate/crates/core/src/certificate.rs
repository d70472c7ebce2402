//! Machine-checkable verdicts.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CatConfirmed,
    NotCat,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CatConfirmed => "CAT_CONFIRMED",
            Verdict::NotCat => "NOT_CAT",
            Verdict::Undetermined => "UNDETERMINED",
        })
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    SmallConeAngle { vertex: usize, angle: f64 },
    ClosedGeodesic { length: f64, description: String },
    FailedCondition { condition: String, detail: String },
    NonLargeTriangle { triangle: usize, min_altitude: f64 },
    Topology { detail: String },
    NonCatCover { alpha_min: f64, n: u64 },
    Note { detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub criterion: String,
    #[serde(default)]
    pub subject: Option<String>,
    #[serde(default)]
    pub margins: BTreeMap<String, f64>,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Certificate>,
}

impl Certificate {
    pub fn new(verdict: Verdict, criterion: impl Into<String>) -> Self {
        Certificate {
            verdict,
            criterion: criterion.into(),
            subject: None,
            margins: BTreeMap::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn confirmed(criterion: impl Into<String>) -> Self {
        Self::new(Verdict::CatConfirmed, criterion)
    }

    /// A NOT_CAT verdict always carries at least one witness.
    pub fn not_cat(criterion: impl Into<String>, witness: Witness) -> Self {
        let mut c = Self::new(Verdict::NotCat, criterion);
        c.witnesses.push(witness);
        c
    }

    pub fn undetermined(criterion: impl Into<String>) -> Self {
        Self::new(Verdict::Undetermined, criterion)
    }

    pub fn with_subject(mut self, subject: impl Into<String>) -> Self {
        self.subject = Some(subject.into());
        self
    }

    pub fn margin(mut self, name: &str, value: f64) -> Self {
        self.margins.insert(name.to_string(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn child(mut self, child: Certificate) -> Self {
        self.children.push(child);
        self
    }

    pub fn is_confirmed(&self) -> bool {
        self.verdict == Verdict::CatConfirmed
    }
}
