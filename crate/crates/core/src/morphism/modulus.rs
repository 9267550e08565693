use serde::{Deserialize, Serialize};

use crate::rational::{dist_str, Dist};

use super::multimap::MultiMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusEntry {
    #[serde(with = "dist_str")]
    pub eps: Dist,
    #[serde(with = "dist_str")]
    pub delta: Dist,
}

/// `δ(ε)`: the largest image distance over pairs at source distance `≤ ε`,
/// tabulated at every realized source distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionModulus {
    pub table: Vec<ModulusEntry>,
    /// Always true on finite spaces; kept so tables read the same as the
    /// bornology they witness.
    pub finite: bool,
}

impl DistortionModulus {
    /// Step lookup: `δ` at the largest tabulated `ε <= r`, zero below the
    /// table.
    pub fn eval(&self, r: &Dist) -> Dist {
        let k = self.table.partition_point(|e| e.eps <= *r);
        if k == 0 {
            Dist::from_integer(0)
        } else {
            self.table[k - 1].delta
        }
    }

    pub fn max_delta(&self) -> Dist {
        self.table.last().map(|e| e.delta).unwrap_or_default()
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().all(|e| e.eps == e.delta)
    }
}

/// One pass over pairs of pairs, bucketed by source rank, then a prefix max.
pub fn distortion_modulus(phi: &MultiMap) -> DistortionModulus {
    let (src, tgt) = (phi.source(), phi.target());
    let pairs = phi.pairs();
    let mut best = vec![0u32; src.scale().len()];
    for (p, &(x, y)) in pairs.iter().enumerate() {
        for &(x2, y2) in &pairs[p + 1..] {
            let s = src.rank(x, x2) as usize;
            let t = tgt.rank(y, y2);
            if t > best[s] {
                best[s] = t;
            }
        }
    }
    let mut run = 0;
    let table = src
        .scale()
        .iter()
        .zip(best)
        .map(|(eps, t)| {
            run = run.max(t);
            ModulusEntry {
                eps: *eps,
                delta: tgt.scale()[run as usize],
            }
        })
        .collect();
    DistortionModulus { table, finite: true }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::metric::{FiniteUltraSpace, SizeCaps};
    use crate::rational::int;

    fn line(n: usize) -> Arc<FiniteUltraSpace> {
        let ids = (0..n).map(|i| i.to_string()).collect();
        Arc::new(FiniteUltraSpace::from_fn(ids, &SizeCaps::default(), |i, j| int((j - i) as i64)).unwrap())
    }

    #[test]
    fn identity_and_constant() {
        let x = line(4);
        let m = distortion_modulus(&MultiMap::identity(x.clone()));
        assert!(m.is_identity());
        assert_eq!(m.table.len(), 4);
        let c = MultiMap::from_fn(x.clone(), line(1), &[0; 4]).unwrap();
        assert!(distortion_modulus(&c).table.iter().all(|e| e.delta == int(0)));
    }

    #[test]
    fn fibres_count_at_zero_and_eval_steps() {
        let x = line(1);
        let y = line(3);
        let m = distortion_modulus(&MultiMap::new(x, y, vec![(0, 0), (0, 2)]).unwrap());
        assert_eq!(m.table, vec![ModulusEntry { eps: int(0), delta: int(2) }]);
        assert_eq!(m.eval(&int(7)), int(2));
        assert_eq!(m.eval(&int(-1)), int(0));
    }
}
