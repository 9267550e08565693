use crate::metric::{class_labels, FiniteUltraSpace, SizeCaps};
use crate::rational::Dist;
use crate::{Error, Result};

use super::tower::{Node, RawNode, RawTower, Tower};

fn digit_width(k: &[u64]) -> usize {
    let max = k.iter().copied().max().unwrap_or(1).saturating_sub(1);
    max.to_string().len()
}

/// Id of a regular-tower node at `level` reached by `path` (top-down digits).
pub fn regular_node_id(level: u32, path: &[u64], width: usize) -> String {
    if path.is_empty() {
        return format!("{level}:top");
    }
    let digits: Vec<String> = path.iter().map(|d| format!("{d:0width$}")).collect();
    let sep = if width > 1 { "." } else { "" };
    format!("{level}:{}", digits.join(sep))
}

/// The group tower `T_k`: every level-`(n+1)` node has `k[n-1]` children.
pub fn regular_tower(k: &[u64], height: u32, caps: &SizeCaps) -> Result<Tower> {
    if height == 0 {
        return Err(Error::Invalid("height must be at least 1".into()));
    }
    let need = height as usize - 1;
    if k.len() < need {
        return Err(Error::Invalid(format!(
            "degree sequence has {} entries, height {height} needs {need}",
            k.len()
        )));
    }
    let k = &k[..need];
    if let Some(pos) = k.iter().position(|&d| d == 0) {
        return Err(Error::Invalid(format!("degree k_{} is zero", pos + 1)));
    }
    let leaves = k
        .iter()
        .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
        .unwrap_or(u128::MAX);
    if leaves > caps.max_points as u128 {
        return Err(Error::SizeCap {
            what: "regular tower leaves",
            needed: leaves,
            cap: caps.max_points as u128,
        });
    }
    let width = digit_width(k);
    // Build top-down, then emit bottom-up so indices follow (level, id).
    let mut layers: Vec<Vec<(Vec<u64>, Option<usize>)>> = vec![vec![(Vec::new(), None)]];
    for l in (1..height).rev() {
        let d = k[l as usize - 1];
        let above = layers.last().expect("nonempty");
        let mut layer = Vec::with_capacity(above.len() * d as usize);
        for (pi, (path, _)) in above.iter().enumerate() {
            for digit in 0..d {
                let mut p = path.clone();
                p.push(digit);
                layer.push((p, Some(pi)));
            }
        }
        layers.push(layer);
    }
    layers.reverse();
    let mut offsets = Vec::with_capacity(layers.len());
    let mut total = 0;
    for layer in &layers {
        offsets.push(total);
        total += layer.len();
    }
    let mut nodes = Vec::with_capacity(total);
    for (li, layer) in layers.iter().enumerate() {
        let level = li as u32 + 1;
        for (path, parent) in layer {
            nodes.push(Node {
                id: regular_node_id(level, path, width),
                level,
                parent: parent.map(|p| offsets[li + 1] + p),
            });
        }
    }
    Ok(Tower::from_sorted(height, nodes))
}

/// A ball tower together with the projection of each point onto its base.
#[derive(Clone, Debug)]
pub struct BallTower {
    pub tower: Tower,
    pub radii: Vec<Dist>,
    /// `point_to_base[x]` is the position in `tower.base()` of the smallest
    /// ball containing point `x`.
    pub point_to_base: Vec<usize>,
}

/// Nodes are the pairs `(B_{r_n}(x), n)`, named `"{n}:{least point id}"`.
pub fn ball_tower(space: &FiniteUltraSpace, radii: &[Dist]) -> Result<BallTower> {
    if space.is_empty() {
        return Err(Error::Empty("space"));
    }
    if radii.is_empty() {
        return Err(Error::Empty("radius list"));
    }
    if radii.iter().any(|r| *r < Dist::from_integer(0)) {
        return Err(Error::Invalid("radii must be nonnegative".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("radii must be strictly increasing".into()));
    }
    if !space.is_ultrametric() {
        return Err(Error::Invalid(format!("space `{}` is not an ultrametric", space.name())));
    }
    let last = radii.last().expect("nonempty");
    let diameter = space.diameter();
    if *last < diameter {
        return Err(Error::RadiiBelowDiameter {
            last: last.to_string(),
            diameter: diameter.to_string(),
        });
    }
    let labels: Vec<Vec<usize>> = radii
        .iter()
        .map(|r| class_labels(space, space.rank_at_most(r).expect("radius is nonnegative")))
        .collect();
    let height = radii.len() as u32;
    let name = |n: usize, rep: usize| format!("{}:{}", n + 1, space.id(rep));
    let mut nodes = Vec::new();
    for (n, lab) in labels.iter().enumerate() {
        for x in 0..space.len() {
            if lab[x] == x {
                nodes.push(RawNode {
                    id: name(n, x),
                    level: n as u32 + 1,
                    parent: labels.get(n + 1).map(|up| name(n + 1, up[x])),
                });
            }
        }
    }
    let tower = Tower::new(RawTower { height, nodes })?;
    let base = tower.base();
    let mut pos_of_rep = std::collections::HashMap::with_capacity(base.len());
    for (p, &b) in base.iter().enumerate() {
        pos_of_rep.insert(tower.id(b).to_string(), p);
    }
    let point_to_base = labels[0].iter().map(|&rep| pos_of_rep[&name(0, rep)]).collect();
    Ok(BallTower {
        tower,
        radii: radii.to_vec(),
        point_to_base,
    })
}

/// A level subtower with its `next` map on bases.
#[derive(Clone, Debug)]
pub struct LevelSubtower {
    pub tower: Tower,
    /// Selected levels of the original tower, increasing.
    pub levels: Vec<u32>,
    /// `next_map[p]` is the position in `tower.base()` of the smallest
    /// selected ancestor of the original base point at position `p`.
    pub next_map: Vec<usize>,
}

/// Keeps the nodes on the selected levels, relabeled `1..=levels.len()`.
/// Original node ids are preserved. The top level must be selected so the
/// result is still a single germ.
pub fn level_subtower(tower: &Tower, levels: &[u32]) -> Result<LevelSubtower> {
    if levels.is_empty() {
        return Err(Error::Empty("level selection"));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("levels must be strictly increasing".into()));
    }
    let h = tower.height();
    if levels[0] == 0 || *levels.last().expect("nonempty") > h {
        return Err(Error::OutOfRange(format!("levels must lie in 1..={h}")));
    }
    if *levels.last().expect("nonempty") != h {
        return Err(Error::Invalid(format!(
            "selection must end at the top level {h} to keep a single germ"
        )));
    }
    let mut new_index = vec![usize::MAX; tower.len()];
    let mut nodes = Vec::new();
    // Original index order is (level, id), which stays sorted after relabeling.
    for (li, &l) in levels.iter().enumerate() {
        for &x in tower.level_nodes(l) {
            new_index[x] = nodes.len();
            nodes.push((x, li as u32 + 1));
        }
    }
    let nodes: Vec<Node> = nodes
        .into_iter()
        .map(|(x, new_level)| Node {
            id: tower.id(x).to_string(),
            level: new_level,
            parent: levels
                .get(new_level as usize)
                .map(|&up| new_index[tower.ancestor_at(x, up).expect("below top")]),
        })
        .collect();
    let sub = Tower::from_sorted(levels.len() as u32, nodes);
    let base_pos: std::collections::HashMap<usize, usize> = sub
        .base()
        .iter()
        .enumerate()
        .map(|(p, &s)| (s, p))
        .collect();
    let next_map = tower
        .base()
        .iter()
        .map(|&b| base_pos[&new_index[tower.ancestor_at(b, levels[0]).expect("within height")]])
        .collect();
    Ok(LevelSubtower {
        tower: sub,
        levels: levels.to_vec(),
        next_map,
    })
}
