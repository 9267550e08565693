use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::metric::{FiniteUltraSpace, SizeCaps};
use crate::rational::Dist;
use crate::report::ValidationReport;
use crate::{Error, Result};

/// Unvalidated tower description, also the JSON wire format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTower {
    pub height: u32,
    pub nodes: Vec<RawNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawNode {
    pub id: String,
    pub level: u32,
    pub parent: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub level: u32,
    pub parent: Option<usize>,
}

/// A finite tower: the lower cone of a single top node.
///
/// Nodes are stored sorted by `(level, id)`, so index order doubles as the
/// least-id order used for every deterministic choice. Levels start at 1
/// (the base) and end at `height` (the top).
#[derive(Clone, Debug)]
pub struct Tower {
    height: u32,
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    children: Vec<Vec<usize>>,
    levels: Vec<Vec<usize>>,
}

/// Checks the tower axioms on a finite description: parents sit exactly one
/// level up and exist below the top (chains from the base have uniform
/// length), every node above the base has a predecessor (levels are
/// `1 + rank`), parent links are unique (linear upper cones, least upper
/// bounds), and a single top node bounds everything.
pub fn validate_tower(raw: &RawTower) -> ValidationReport {
    let mut report = ValidationReport::new("tower");
    let h = raw.height;
    if h == 0 {
        report.push("height", vec![], "height must be at least 1");
        return report;
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, n) in raw.nodes.iter().enumerate() {
        report.checked += 1;
        if index.insert(n.id.as_str(), i).is_some() {
            report.push("unique-id", vec![n.id.clone()], "duplicate node id");
        }
        if n.level == 0 || n.level > h {
            report.push(
                "level-range",
                vec![n.id.clone()],
                format!("level {} outside 1..={h}", n.level),
            );
        }
    }
    let mut has_child = vec![false; raw.nodes.len()];
    for n in &raw.nodes {
        report.checked += 1;
        match (&n.parent, n.level < h) {
            (None, true) => report.push(
                "level",
                vec![n.id.clone()],
                format!("node at level {} below the top has no parent", n.level),
            ),
            (Some(p), false) => report.push(
                "level",
                vec![n.id.clone(), p.clone()],
                format!("top-level node has parent `{p}`"),
            ),
            (Some(p), true) => match index.get(p.as_str()) {
                None => report.push("parent-exists", vec![n.id.clone(), p.clone()], "unknown parent id"),
                Some(&pi) => {
                    has_child[pi] = true;
                    let pl = raw.nodes[pi].level;
                    if pl != n.level + 1 {
                        report.push(
                            "level",
                            vec![n.id.clone(), p.clone()],
                            format!("parent at level {pl}, expected {}", n.level + 1),
                        );
                    }
                }
            },
            (None, false) => {}
        }
    }
    for (i, n) in raw.nodes.iter().enumerate() {
        if n.level > 1 && n.level <= h && !has_child[i] {
            report.push(
                "rank",
                vec![n.id.clone()],
                format!("node at level {} has no predecessor, so it would be minimal", n.level),
            );
        }
    }
    let tops: Vec<&RawNode> = raw.nodes.iter().filter(|n| n.level == h).collect();
    report.checked += 1;
    if tops.len() != 1 {
        report.push(
            "single-germ",
            tops.iter().map(|n| n.id.clone()).collect(),
            format!("expected exactly one node at level {h}, found {}", tops.len()),
        );
    }
    report
}

impl Tower {
    pub fn new(raw: RawTower) -> Result<Tower> {
        let report = validate_tower(&raw);
        if let Some(v) = report.violations.first() {
            return Err(Error::Invalid(format!(
                "not a tower ({} violation(s)); first: {} {:?}: {}",
                report.violations.len(),
                v.rule,
                v.witness,
                v.detail
            )));
        }
        let mut raw_nodes = raw.nodes;
        raw_nodes.sort_by(|a, b| (a.level, &a.id).cmp(&(b.level, &b.id)));
        let index: HashMap<String, usize> = raw_nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();
        let nodes: Vec<Node> = raw_nodes
            .into_iter()
            .map(|n| Node {
                parent: n.parent.as_ref().map(|p| index[p]),
                id: n.id,
                level: n.level,
            })
            .collect();
        Ok(Self::assemble(raw.height, nodes, index))
    }

    /// Builds from nodes already sorted by `(level, id)` with valid links.
    pub(crate) fn from_sorted(height: u32, nodes: Vec<Node>) -> Tower {
        debug_assert!(nodes
            .windows(2)
            .all(|w| (w[0].level, &w[0].id) < (w[1].level, &w[1].id)));
        let index = nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
        Self::assemble(height, nodes, index)
    }

    fn assemble(height: u32, nodes: Vec<Node>, index: HashMap<String, usize>) -> Tower {
        let mut children = vec![Vec::new(); nodes.len()];
        let mut levels = vec![Vec::new(); height as usize];
        for (i, n) in nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                children[p].push(i);
            }
            levels[n.level as usize - 1].push(i);
        }
        Tower {
            height,
            nodes,
            index,
            children,
            levels,
        }
    }

    pub fn to_raw(&self) -> RawTower {
        RawTower {
            height: self.height,
            nodes: self
                .nodes
                .iter()
                .map(|n| RawNode {
                    id: n.id.clone(),
                    level: n.level,
                    parent: n.parent.map(|p| self.nodes[p].id.clone()),
                })
                .collect(),
        }
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn id(&self, x: usize) -> &str {
        &self.nodes[x].id
    }

    pub fn level(&self, x: usize) -> u32 {
        self.nodes[x].level
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.nodes[x].parent
    }

    /// Immediate predecessors, in index order.
    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.children[x].len()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Nodes at level `l` (1-based), in index order.
    pub fn level_nodes(&self, l: u32) -> &[usize] {
        if l == 0 || l > self.height {
            return &[];
        }
        &self.levels[l as usize - 1]
    }

    /// The base `[T]`: level-1 nodes.
    pub fn base(&self) -> &[usize] {
        self.level_nodes(1)
    }

    pub fn top(&self) -> usize {
        self.levels[self.height as usize - 1][0]
    }

    /// The ancestor of `x` at level `l >= level(x)`.
    pub fn ancestor_at(&self, mut x: usize, l: u32) -> Option<usize> {
        if l < self.level(x) || l > self.height {
            return None;
        }
        while self.level(x) < l {
            x = self.parent(x)?;
        }
        Some(x)
    }

    /// `x <= y` in the tower order.
    pub fn le(&self, x: usize, y: usize) -> bool {
        self.ancestor_at(x, self.level(y)) == Some(y)
    }

    /// Least upper bound; always exists in a single-germ tower.
    pub fn sup(&self, x: usize, y: usize) -> usize {
        let l = self.level(x).max(self.level(y));
        let (mut a, mut b) = (
            self.ancestor_at(x, l).expect("within height"),
            self.ancestor_at(y, l).expect("within height"),
        );
        while a != b {
            a = self.parent(a).expect("single germ");
            b = self.parent(b).expect("single germ");
        }
        a
    }

    /// `d_T(x, y) = 2 lev(sup(x, y)) - lev(x) - lev(y)`.
    pub fn path_metric(&self, x: usize, y: usize) -> u64 {
        let s = self.sup(x, y);
        (2 * self.level(s) - self.level(x) - self.level(y)) as u64
    }

    pub fn path_metric_by_id(&self, x: &str, y: &str) -> Result<u64> {
        Ok(self.path_metric(self.index_of(x)?, self.index_of(y)?))
    }

    /// The lower cone `↓x`, in index order.
    pub fn lower_cone(&self, x: usize) -> Vec<usize> {
        let mut out = vec![x];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Level-`l` predecessors of `x`, `pred_l(x)`.
    pub fn pred_at(&self, x: usize, l: u32) -> Vec<usize> {
        let mut frontier = vec![x];
        for _ in l..self.level(x) {
            frontier = frontier
                .iter()
                .flat_map(|&y| self.children[y].iter().copied())
                .collect();
        }
        frontier.sort_unstable();
        frontier
    }

    /// Base points with the path metric.
    pub fn base_space(&self, caps: &SizeCaps) -> Result<FiniteUltraSpace> {
        self.leaf_space(self.base(), caps)
    }

    /// Level-1 nodes below any of `roots`, in index order.
    pub fn cone_base(&self, roots: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = roots.iter().flat_map(|&r| self.pred_at(r, 1)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The given level-1 nodes with the path metric, in the given order.
    pub fn leaf_space(&self, leaves: &[usize], caps: &SizeCaps) -> Result<FiniteUltraSpace> {
        if let Some(&x) = leaves.iter().find(|&&x| self.level(x) != 1) {
            return Err(Error::Invalid(format!("node `{}` is not a base point", self.id(x))));
        }
        let ids = leaves.iter().map(|&x| self.id(x).to_string()).collect();
        // anc[l][b] is the level-(l+1) ancestor of leaves[b].
        let mut anc: Vec<Vec<usize>> = vec![leaves.to_vec()];
        for l in 1..self.height as usize {
            let next = anc[l - 1]
                .iter()
                .map(|&x| self.parent(x).expect("below top"))
                .collect();
            anc.push(next);
        }
        Ok(FiniteUltraSpace::from_fn(ids, caps, |i, j| {
            let l = (1..anc.len()).find(|&l| anc[l][i] == anc[l][j]).expect("single germ");
            Dist::from_integer(2 * l as i64)
        })?
        .with_name("base"))
    }
}
