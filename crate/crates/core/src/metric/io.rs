//! Space serialization: JSON `{points, dist}` and CSV distance matrices.

use serde::{Deserialize, Serialize};

use super::{FiniteUltraSpace, SizeCaps};
use crate::rational::{parse_dist, Dist};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceJson {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub points: Vec<String>,
    pub dist: Vec<Vec<DistCell>>,
}

/// A matrix cell: written as a `"p/q"` string, read from a string or integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistCell(#[serde(with = "crate::rational::dist_str")] pub Dist);

impl SpaceJson {
    pub fn from_space(space: &FiniteUltraSpace) -> Self {
        SpaceJson {
            name: space.name().to_string(),
            points: space.ids().to_vec(),
            dist: space
                .matrix()
                .into_iter()
                .map(|row| row.into_iter().map(DistCell).collect())
                .collect(),
        }
    }

    pub fn into_space(self, caps: &SizeCaps) -> Result<FiniteUltraSpace> {
        let matrix: Vec<Vec<Dist>> = self
            .dist
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.0).collect())
            .collect();
        Ok(FiniteUltraSpace::from_matrix(self.points, &matrix, caps)?.with_name(self.name))
    }
}

pub fn space_to_json(space: &FiniteUltraSpace) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SpaceJson::from_space(space))?)
}

pub fn space_from_json(text: &str, caps: &SizeCaps) -> Result<FiniteUltraSpace> {
    let parsed: SpaceJson = serde_json::from_str(text)?;
    parsed.into_space(caps)
}

/// Reads a square matrix whose header row lists the point ids.
pub fn space_from_csv(text: &str, caps: &SizeCaps) -> Result<FiniteUltraSpace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let ids: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut matrix = Vec::with_capacity(ids.len());
    for record in reader.records() {
        let record = record?;
        let row = record.iter().map(parse_dist).collect::<Result<Vec<_>>>()?;
        matrix.push(row);
    }
    if matrix.len() != ids.len() {
        return Err(Error::Parse(format!(
            "expected {} matrix rows, found {}",
            ids.len(),
            matrix.len()
        )));
    }
    FiniteUltraSpace::from_matrix(ids, &matrix, caps)
}

pub fn space_to_csv(space: &FiniteUltraSpace) -> String {
    let mut out = space.ids().join(",");
    out.push('\n');
    for row in space.matrix() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{word_space, WordSpaceSpec};
    use crate::rational::int;

    #[test]
    fn json_round_trip() {
        let caps = SizeCaps::default();
        let w = word_space(&WordSpaceSpec::new(3, 2), &caps).unwrap();
        let text = space_to_json(&w).unwrap();
        let back = space_from_json(&text, &caps).unwrap();
        assert!(back.same_as(&w));
        assert_eq!(back.name(), w.name());
    }

    #[test]
    fn json_accepts_integers_and_fractions() {
        let text = r#"{"points":["a","b"],"dist":[[0,"1/2"],["1/2",0]]}"#;
        let s = space_from_json(text, &SizeCaps::default()).unwrap();
        assert_eq!(s.dist(0, 1), Dist::new(1, 2));
    }

    #[test]
    fn csv_parses_and_rejects_asymmetry() {
        let caps = SizeCaps::default();
        let s = space_from_csv("a,b,c\n0,1,2\n1,0,2\n2,2,0\n", &caps).unwrap();
        assert_eq!(s.dist_by_id("a", "c").unwrap(), int(2));
        assert!(matches!(
            space_from_csv("a,b\n0,1\n2,0\n", &caps),
            Err(Error::NotAMetric(_))
        ));
        assert!(space_from_csv("a,b\n0,x\nx,0\n", &caps).is_err());
        assert!(space_from_csv("a,b\n0,1\n", &caps).is_err());
        let w = word_space(&WordSpaceSpec::new(2, 2), &caps).unwrap();
        assert!(space_from_csv(&space_to_csv(&w), &caps).unwrap().same_as(&w));
    }
}
