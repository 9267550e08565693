use crate::Result;

use super::tower::{RawTower, Tower};

pub fn tower_to_json(tower: &Tower) -> Result<String> {
    Ok(serde_json::to_string_pretty(&tower.to_raw())?)
}

pub fn tower_from_json(text: &str) -> Result<Tower> {
    let raw: RawTower = serde_json::from_str(text)?;
    Tower::new(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::SizeCaps;
    use crate::tower::regular_tower;

    #[test]
    fn round_trip() {
        let t = regular_tower(&[2, 3], 3, &SizeCaps::default()).unwrap();
        let text = tower_to_json(&t).unwrap();
        let back = tower_from_json(&text).unwrap();
        assert_eq!(back.to_raw(), t.to_raw());
        assert!(tower_from_json(r#"{"height":2,"nodes":[{"id":"a","level":1,"parent":null}]}"#).is_err());
    }
}
