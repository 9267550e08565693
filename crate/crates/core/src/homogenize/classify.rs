use serde::{Deserialize, Serialize};

use crate::tower::DegreeProfile;
use crate::{Error, Result};

/// A degree value that may be the infinite marker `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Degree {
    Finite(u64),
    Marker(InfMarker),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfMarker {
    #[serde(rename = "inf")]
    Inf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedEntry {
    pub i: u32,
    pub j: u32,
    pub small: Degree,
    pub large: Degree,
}

/// Degree profile JSON that also admits infinite degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedProfile {
    pub height: u32,
    pub entries: Vec<MarkedEntry>,
}

impl MarkedProfile {
    pub fn has_infinite(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e.small, Degree::Marker(_)) || matches!(e.large, Degree::Marker(_)))
    }

    pub fn finite(&self) -> Result<DegreeProfile> {
        let json = serde_json::to_value(self)?;
        Ok(serde_json::from_value(json)?)
    }
}

impl From<&DegreeProfile> for MarkedProfile {
    fn from(p: &DegreeProfile) -> Self {
        MarkedProfile {
            height: p.height(),
            entries: p
                .entries()
                .into_iter()
                .map(|e| MarkedEntry {
                    i: e.i,
                    j: e.j,
                    small: Degree::Finite(e.small),
                    large: Degree::Finite(e.large),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Equivalent { reason: String, witness: String },
    NotEquivalent { reason: String },
    OutOfScope { reason: String },
}

fn trivial(p: &DegreeProfile) -> bool {
    p.entries().iter().all(|e| e.large == 1)
}

/// Homogeneous profiles with finite degrees fall in one class (countable
/// sharp entropy) unless they are all ones, which describes a bounded germ.
pub fn classify(p1: &MarkedProfile, p2: &MarkedProfile) -> Result<Verdict> {
    if p1.has_infinite() || p2.has_infinite() {
        return Ok(Verdict::OutOfScope {
            reason: "infinite degrees put the sharp entropy at an uncountable cardinal, which is not modelled".into(),
        });
    }
    let (f1, f2) = (p1.finite()?, p2.finite()?);
    for (name, p) in [("first", &f1), ("second", &f2)] {
        if !p.is_homogeneous() {
            return Err(Error::Hypothesis(format!("{name} profile is not homogeneous")));
        }
    }
    Ok(match (trivial(&f1), trivial(&f2)) {
        (true, true) => Verdict::Equivalent {
            reason: "both profiles are chains: single-point germs".into(),
            witness: "any map between the one-point bases".into(),
        },
        (false, false) => Verdict::Equivalent {
            reason: "homogeneous with finite degrees: both sharp entropies are aleph_0".into(),
            witness: "run `equiv` on each side and compose the first with the inverse of the second".into(),
        },
        _ => Verdict::NotEquivalent {
            reason: "a chain profile is bounded while the other grows".into(),
        },
    })
}
