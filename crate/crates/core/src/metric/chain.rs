//! Chain components and the chain ultrametric.

use super::{FiniteUltraSpace, SizeCaps};
use crate::rational::Dist;
use crate::{Error, Result};

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Class label (least member index) of every point under `r`-chains.
fn chain_labels(space: &FiniteUltraSpace, r: &Dist) -> Vec<usize> {
    let n = space.len();
    let mut parent: Vec<usize> = (0..n).collect();
    if let Some(t) = space.rank_at_most(r) {
        for i in 0..n {
            for j in i + 1..n {
                if space.rank(i, j) <= t {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Connected components of the graph joining points at distance `<= r`,
/// each sorted, ordered by least member.
pub fn chain_components(space: &FiniteUltraSpace, r: &Dist) -> Vec<Vec<usize>> {
    let labels = chain_labels(space, r);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; space.len()];
    for (i, &l) in labels.iter().enumerate() {
        if slot[l] == usize::MAX {
            slot[l] = classes.len();
            classes.push(Vec::new());
        }
        classes[slot[l]].push(i);
    }
    classes
}

/// Chain ultrametric over the scales `r_1 < .. < r_k`: two distinct points
/// are at distance `2m`, where `m` is the first scale index whose chains
/// join them.
pub fn ultrametrize(space: &FiniteUltraSpace, scales: &[Dist], caps: &SizeCaps) -> Result<FiniteUltraSpace> {
    if scales.is_empty() {
        return Err(Error::Empty("scale list"));
    }
    if scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("scales must be strictly increasing".into()));
    }
    let labels: Vec<Vec<usize>> = scales.iter().map(|r| chain_labels(space, r)).collect();
    let top = labels.last().expect("nonempty");
    let classes = top.iter().enumerate().filter(|(i, l)| *i == **l).count();
    if classes > 1 {
        return Err(Error::ScalesDoNotMerge { classes });
    }
    let ids = space.ids().to_vec();
    Ok(FiniteUltraSpace::from_fn(ids, caps, |i, j| {
        let m = labels
            .iter()
            .position(|l| l[i] == l[j])
            .expect("top scale merges everything");
        Dist::from_integer(2 * (m as i64 + 1))
    })?
    .with_name(format!("rho({})", space.name())))
}
