use serde::{Deserialize, Serialize};

use crate::report::ValidationReport;
use crate::{Error, Result};

use super::tower::Tower;

/// `deg_i^j` and `Deg_i^j` for all `1 <= i <= j <= H`: the least and largest
/// number of level-`i` predecessors of a level-`j` node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    height: u32,
    // Row-major H x H, entry (i-1, j-1); only i <= j is meaningful.
    small: Vec<u64>,
    large: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeEntry {
    pub i: u32,
    pub j: u32,
    pub small: u64,
    pub large: u64,
}

#[derive(Serialize, Deserialize)]
struct DegreeProfileJson {
    height: u32,
    entries: Vec<DegreeEntry>,
}

impl Serialize for DegreeProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DegreeProfileJson {
            height: self.height,
            entries: self.entries(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DegreeProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DegreeProfileJson::deserialize(d)?;
        let mut p = DegreeProfile::ones(raw.height);
        for e in raw.entries {
            if e.i == 0 || e.i >= e.j || e.j > raw.height {
                return Err(serde::de::Error::custom(format!("bad entry ({}, {})", e.i, e.j)));
            }
            let k = p.at(e.i, e.j);
            p.small[k] = e.small;
            p.large[k] = e.large;
        }
        Ok(p)
    }
}

impl DegreeProfile {
    fn ones(height: u32) -> Self {
        let n = (height as usize).pow(2);
        DegreeProfile {
            height,
            small: vec![1; n],
            large: vec![1; n],
        }
    }

    fn at(&self, i: u32, j: u32) -> usize {
        (i as usize - 1) * self.height as usize + (j as usize - 1)
    }

    fn check(&self, i: u32, j: u32) -> Result<()> {
        if i == 0 || i > j || j > self.height {
            return Err(Error::OutOfRange(format!(
                "degree index ({i}, {j}) outside 1 <= i <= j <= {}",
                self.height
            )));
        }
        Ok(())
    }

    /// Profile of the group tower with level degrees `k` (`k[n-1]` children
    /// per level-`(n+1)` node).
    pub fn regular(k: &[u64]) -> Result<Self> {
        let h = k.len() as u32 + 1;
        let mut p = Self::ones(h);
        for i in 1..=h {
            let mut acc: u64 = 1;
            for j in i + 1..=h {
                acc = acc.checked_mul(k[j as usize - 2]).ok_or_else(|| {
                    Error::OutOfRange(format!("degree product k_{i}..k_{} overflows u64", j - 1))
                })?;
                let x = p.at(i, j);
                p.small[x] = acc;
                p.large[x] = acc;
            }
        }
        Ok(p)
    }

    /// Builds from explicit per-pair values: `f(i, j) = (small, large)`.
    pub fn from_fn(height: u32, mut f: impl FnMut(u32, u32) -> (u64, u64)) -> Self {
        let mut p = Self::ones(height);
        for i in 1..=height {
            for j in i + 1..=height {
                let (s, l) = f(i, j);
                let x = p.at(i, j);
                p.small[x] = s;
                p.large[x] = l;
            }
        }
        p
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// `deg_i^j`; 1 on the diagonal.
    pub fn deg(&self, i: u32, j: u32) -> Result<u64> {
        self.check(i, j)?;
        Ok(self.small[self.at(i, j)])
    }

    /// `Deg_i^j`; 1 on the diagonal.
    pub fn big_deg(&self, i: u32, j: u32) -> Result<u64> {
        self.check(i, j)?;
        Ok(self.large[self.at(i, j)])
    }

    /// `deg_n = deg_n^{n+1}` for `1 <= n < H`.
    pub fn deg_n(&self, n: u32) -> Result<u64> {
        self.deg(n, n + 1)
    }

    pub fn big_deg_n(&self, n: u32) -> Result<u64> {
        self.big_deg(n, n + 1)
    }

    /// `(Deg_{i+1}^{j+1}, deg_{i+1}^{j+1})`, the entropy pair of the base at
    /// scales `(2i, 2j)` under closed nets.
    pub fn entropy(&self, i: u32, j: u32) -> Result<(u64, u64)> {
        if i > j || j >= self.height {
            return Err(Error::OutOfRange(format!(
                "entropy index ({i}, {j}) outside 0 <= i <= j < {}",
                self.height
            )));
        }
        Ok((self.big_deg(i + 1, j + 1)?, self.deg(i + 1, j + 1)?))
    }

    /// The profile seen through the level selection `n` (a level subtower).
    pub fn regroup(&self, levels: &[u32]) -> Result<Self> {
        if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("levels must be nonempty and strictly increasing".into()));
        }
        if levels[0] == 0 || *levels.last().expect("nonempty") > self.height {
            return Err(Error::OutOfRange(format!("levels must lie in 1..={}", self.height)));
        }
        Ok(Self::from_fn(levels.len() as u32, |a, b| {
            let x = self.at(levels[a as usize - 1], levels[b as usize - 1]);
            (self.small[x], self.large[x])
        }))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.small == self.large
    }

    /// All off-diagonal entries, ordered by `(i, j)`.
    pub fn entries(&self) -> Vec<DegreeEntry> {
        let mut out = Vec::new();
        for i in 1..=self.height {
            for j in i + 1..=self.height {
                let x = self.at(i, j);
                out.push(DegreeEntry {
                    i,
                    j,
                    small: self.small[x],
                    large: self.large[x],
                });
            }
        }
        out
    }

    /// Checks `deg <= Deg`, `Deg_i^j <= Deg_i^k Deg_k^j` and
    /// `deg_i^j >= deg_i^k deg_k^j`.
    pub fn check_bounds(&self) -> ValidationReport {
        let mut report = ValidationReport::new("degree profile");
        let h = self.height;
        for i in 1..=h {
            for j in i + 1..=h {
                let ij = self.at(i, j);
                report.checked += 1;
                if self.small[ij] > self.large[ij] {
                    report.push("small<=large", vec![i.to_string(), j.to_string()], "deg exceeds Deg");
                }
                for k in i + 1..j {
                    let (ik, kj) = (self.at(i, k), self.at(k, j));
                    report.checked += 1;
                    let up = (self.large[ik] as u128) * (self.large[kj] as u128);
                    if self.large[ij] as u128 > up {
                        report.push(
                            "Deg-submultiplicative",
                            vec![i.to_string(), k.to_string(), j.to_string()],
                            format!("{} > {up}", self.large[ij]),
                        );
                    }
                    let lo = (self.small[ik] as u128) * (self.small[kj] as u128);
                    if (self.small[ij] as u128) < lo {
                        report.push(
                            "deg-supermultiplicative",
                            vec![i.to_string(), k.to_string(), j.to_string()],
                            format!("{} < {lo}", self.small[ij]),
                        );
                    }
                }
            }
        }
        report
    }
}

/// Exact min/max of `|pred_i(x)|` over level-`j` nodes.
pub fn degree_profile(tower: &Tower) -> DegreeProfile {
    let h = tower.height() as usize;
    // counts[x][i-1] = |pred_i(x)| for i <= level(x). Children precede
    // parents in index order, so one forward pass fills the table.
    let mut counts: Vec<Vec<u64>> = Vec::with_capacity(tower.len());
    for x in 0..tower.len() {
        let l = tower.level(x) as usize;
        let mut c = vec![0u64; l];
        c[l - 1] = 1;
        for &y in tower.children(x) {
            for (i, v) in counts[y].iter().enumerate() {
                c[i] += v;
            }
        }
        counts.push(c);
    }
    let mut small = vec![u64::MAX; h * h];
    let mut large = vec![0u64; h * h];
    for (x, c) in counts.iter().enumerate() {
        let j = tower.level(x) as usize;
        for (i, &v) in c.iter().enumerate() {
            let k = i * h + (j - 1);
            small[k] = small[k].min(v);
            large[k] = large[k].max(v);
        }
    }
    for k in 0..h * h {
        if small[k] == u64::MAX {
            small[k] = 1;
            large[k] = 1;
        }
    }
    DegreeProfile {
        height: h as u32,
        small,
        large,
    }
}

/// `(Ent, ent)` of the base at scales `(2i, 2j)`, read off the degrees.
pub fn entropy_from_degrees(tower: &Tower, i: u32, j: u32) -> Result<(u64, u64)> {
    degree_profile(tower).entropy(i, j)
}
