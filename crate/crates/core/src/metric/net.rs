//! Balls, minimum nets and entropy profiles.

use serde::{Deserialize, Serialize};

use super::{FiniteUltraSpace, SizeCaps};
use crate::rational::Dist;
use crate::{Error, Result};

/// Whether a net point covers points at distance `< ε` or `<= ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetConvention {
    Strict,
    Closed,
}

impl std::str::FromStr for NetConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(NetConvention::Strict),
            "closed" => Ok(NetConvention::Closed),
            other => Err(Error::Parse(format!("unknown net convention `{other}`"))),
        }
    }
}

impl std::fmt::Display for NetConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NetConvention::Strict => "strict",
            NetConvention::Closed => "closed",
        })
    }
}

/// Rank threshold `t` such that "covered" means `rank <= t`; `None` when
/// nothing, not even the point itself, is covered.
fn cover_threshold(space: &FiniteUltraSpace, eps: &Dist, conv: NetConvention) -> Option<u32> {
    match conv {
        NetConvention::Closed => space.rank_at_most(eps),
        NetConvention::Strict => space.rank_below(eps),
    }
}

/// Closed ball `{y : d(center, y) <= r}` in index order.
pub fn ball(space: &FiniteUltraSpace, center: usize, r: &Dist) -> Result<Vec<usize>> {
    if center >= space.len() {
        return Err(Error::UnknownPoint(format!("#{center}")));
    }
    let Some(t) = space.rank_at_most(r) else {
        return Err(Error::Invalid(format!("negative radius {r}")));
    };
    Ok((0..space.len())
        .filter(|&y| space.rank(center, y) <= t)
        .collect())
}

pub fn ball_by_id(space: &FiniteUltraSpace, center: &str, r: &Dist) -> Result<Vec<usize>> {
    ball(space, space.index_of(center)?, r)
}

/// Labels every point with the least index of its class under `rank <= t`.
/// Only meaningful on ultrametric spaces, where the relation is transitive.
pub(crate) fn class_labels(space: &FiniteUltraSpace, t: u32) -> Vec<usize> {
    let n = space.len();
    let mut label = vec![usize::MAX; n];
    for i in 0..n {
        if label[i] != usize::MAX {
            continue;
        }
        label[i] = i;
        for j in i + 1..n {
            if label[j] == usize::MAX && space.rank(i, j) <= t {
                label[j] = i;
            }
        }
    }
    label
}

/// A minimum-cardinality ε-net of `subset`, drawn from `subset`.
///
/// On ultrametric spaces the covering relation is an equivalence and the net
/// is the least point of each class met by `subset`. Plain metrics fall back
/// to an exact search bounded by `caps.max_exact_net`.
pub fn min_net(
    space: &FiniteUltraSpace,
    subset: &[usize],
    eps: &Dist,
    conv: NetConvention,
    caps: &SizeCaps,
) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::Empty("subset"));
    }
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    if let Some(&bad) = subset.iter().find(|&&i| i >= space.len()) {
        return Err(Error::UnknownPoint(format!("#{bad}")));
    }
    let Some(t) = cover_threshold(space, eps, conv) else {
        return Err(Error::Invalid(format!(
            "no {conv} {eps}-net exists: points do not cover themselves"
        )));
    };
    if space.is_ultrametric() {
        let mut net: Vec<usize> = Vec::new();
        for &x in &subset {
            if !net.iter().any(|&y| space.rank(x, y) <= t) {
                net.push(x);
            }
        }
        Ok(net)
    } else {
        exact_net(space, &subset, t, caps)
    }
}

fn exact_net(
    space: &FiniteUltraSpace,
    subset: &[usize],
    t: u32,
    caps: &SizeCaps,
) -> Result<Vec<usize>> {
    let m = subset.len();
    if m > caps.max_exact_net || m > 63 {
        return Err(Error::SizeCap {
            what: "exact net search",
            needed: m as u128,
            cap: caps.max_exact_net.min(63) as u128,
        });
    }
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let cover: Vec<u64> = (0..m)
        .map(|a| {
            (0..m)
                .filter(|&b| space.rank(subset[a], subset[b]) <= t)
                .fold(0u64, |acc, b| acc | (1 << b))
        })
        .collect();

    fn search(cover: &[u64], full: u64, start: usize, left: usize, acc: u64, pick: &mut Vec<usize>) -> bool {
        if acc == full {
            return true;
        }
        if left == 0 {
            return false;
        }
        // The least uncovered point must be covered by some later pick.
        let first = (!acc & full).trailing_zeros() as usize;
        for c in start..cover.len() {
            if cover[c] & (1 << first) == 0 {
                continue;
            }
            pick.push(c);
            if search(cover, full, 0, left - 1, acc | cover[c], pick) {
                return true;
            }
            pick.pop();
        }
        false
    }

    for k in 1..=m {
        let mut pick = Vec::new();
        if search(&cover, full, 0, k, 0, &mut pick) {
            let mut net: Vec<usize> = pick.into_iter().map(|c| subset[c]).collect();
            net.sort_unstable();
            return Ok(net);
        }
    }
    unreachable!("the whole subset is a net")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyEntry {
    #[serde(with = "crate::rational::dist_str")]
    pub eps: Dist,
    #[serde(with = "crate::rational::dist_str")]
    pub delta: Dist,
    /// Largest ε-entropy of a δ-ball.
    pub large: u64,
    /// Smallest ε-entropy of a δ-ball.
    pub small: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub net_convention: NetConvention,
    /// Sorted by `(eps, delta)`.
    pub entries: Vec<EntropyEntry>,
}

impl EntropyProfile {
    pub fn get(&self, eps: &Dist, delta: &Dist) -> Option<&EntropyEntry> {
        self.entries
            .binary_search_by(|e| (&e.eps, &e.delta).cmp(&(eps, delta)))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// CSV with header `eps,delta,large,small`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,delta,large,small\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{},{}\n", e.eps, e.delta, e.large, e.small));
        }
        out
    }
}

/// Large and small entropies for every `(ε, δ)` in the grid.
pub fn entropy_profile(
    space: &FiniteUltraSpace,
    eps_list: &[Dist],
    delta_list: &[Dist],
    conv: NetConvention,
    caps: &SizeCaps,
) -> Result<EntropyProfile> {
    if eps_list.is_empty() || delta_list.is_empty() {
        return Err(Error::Empty("entropy grid"));
    }
    let mut eps_list = eps_list.to_vec();
    eps_list.sort();
    eps_list.dedup();
    let mut delta_list = delta_list.to_vec();
    delta_list.sort();
    delta_list.dedup();
    let n = space.len();
    let mut entries = Vec::with_capacity(eps_list.len() * delta_list.len());
    let ultra = space.is_ultrametric();
    for eps in &eps_list {
        let Some(t) = cover_threshold(space, eps, conv) else {
            return Err(Error::Invalid(format!(
                "no {conv} {eps}-net exists: points do not cover themselves"
            )));
        };
        let eps_labels = if ultra { Some(class_labels(space, t)) } else { None };
        for delta in &delta_list {
            let Some(bt) = space.rank_at_most(delta) else {
                return Err(Error::Invalid(format!("negative radius {delta}")));
            };
            let (mut large, mut small) = (0u64, u64::MAX);
            if let Some(eps_labels) = &eps_labels {
                // Each δ-ball is a class of `rank <= bt`; its entropy is the
                // number of ε-classes it meets.
                let ball_labels = class_labels(space, bt);
                let mut count = vec![0u64; n];
                let mut seen = std::collections::HashSet::new();
                for y in 0..n {
                    if seen.insert((ball_labels[y], eps_labels[y])) {
                        count[ball_labels[y]] += 1;
                    }
                }
                for x in 0..n {
                    if ball_labels[x] == x {
                        large = large.max(count[x]);
                        small = small.min(count[x]);
                    }
                }
            } else {
                for x in 0..n {
                    let b = ball(space, x, delta)?;
                    let k = min_net(space, &b, eps, conv, caps)?.len() as u64;
                    large = large.max(k);
                    small = small.min(k);
                }
            }
            entries.push(EntropyEntry {
                eps: *eps,
                delta: *delta,
                large,
                small,
            });
        }
    }
    Ok(EntropyProfile {
        net_convention: conv,
        entries,
    })
}
