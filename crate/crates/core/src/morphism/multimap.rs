use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::metric::FiniteUltraSpace;
use crate::{Error, Result};

/// A relation `Φ ⊆ X × Y` between two finite spaces, stored as sorted
/// index pairs.
#[derive(Clone, Debug)]
pub struct MultiMap {
    source: Arc<FiniteUltraSpace>,
    target: Arc<FiniteUltraSpace>,
    pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiMapJson {
    pub source_ref: String,
    pub target_ref: String,
    pub pairs: Vec<[String; 2]>,
}

fn same_space(a: &Arc<FiniteUltraSpace>, b: &Arc<FiniteUltraSpace>) -> bool {
    Arc::ptr_eq(a, b) || a.same_as(b)
}

impl MultiMap {
    pub fn new(
        source: Arc<FiniteUltraSpace>,
        target: Arc<FiniteUltraSpace>,
        mut pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x >= source.len() || y >= target.len()) {
            return Err(Error::OutOfRange(format!("pair ({x}, {y}) outside source x target")));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(MultiMap { source, target, pairs })
    }

    /// The graph of a function given as `f[x]`.
    pub fn from_fn(source: Arc<FiniteUltraSpace>, target: Arc<FiniteUltraSpace>, f: &[usize]) -> Result<Self> {
        if f.len() != source.len() {
            return Err(Error::SpaceMismatch(format!(
                "function has {} values, source has {} points",
                f.len(),
                source.len()
            )));
        }
        Self::new(source, target, f.iter().copied().enumerate().collect())
    }

    pub fn identity(space: Arc<FiniteUltraSpace>) -> Self {
        let pairs = (0..space.len()).map(|i| (i, i)).collect();
        MultiMap {
            source: space.clone(),
            target: space,
            pairs,
        }
    }

    pub fn from_id_pairs(
        source: Arc<FiniteUltraSpace>,
        target: Arc<FiniteUltraSpace>,
        pairs: &[[String; 2]],
    ) -> Result<Self> {
        let idx = pairs
            .iter()
            .map(|[x, y]| Ok((source.index_of(x)?, target.index_of(y)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, idx)
    }

    pub fn source(&self) -> &Arc<FiniteUltraSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteUltraSpace> {
        &self.target
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn inverse(&self) -> MultiMap {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(x, y)| (y, x)).collect();
        pairs.sort_unstable();
        MultiMap {
            source: self.target.clone(),
            target: self.source.clone(),
            pairs,
        }
    }

    /// `Φ(x)` for every source point, each list sorted by index.
    pub fn forward_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.source.len()];
        for &(x, y) in &self.pairs {
            out[x].push(y);
        }
        out
    }

    /// `Φ(A)`, sorted.
    pub fn image(&self, subset: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.source.len()];
        for &x in subset {
            member[x] = true;
        }
        let mut out: Vec<usize> = self.pairs.iter().filter(|p| member[p.0]).map(|p| p.1).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `Φ(X) = Y`.
    pub fn is_surjective(&self) -> bool {
        self.missing_target().is_none()
    }

    /// `Φ⁻¹(Y) = X`, i.e. every source point has an image.
    pub fn is_total(&self) -> bool {
        self.missing_source().is_none()
    }

    pub fn is_function(&self) -> bool {
        self.is_total() && self.pairs.windows(2).all(|w| w[0].0 != w[1].0)
    }

    pub fn is_bijective(&self) -> bool {
        self.is_function() && self.inverse().is_function()
    }

    /// The first target point outside the image.
    pub fn missing_target(&self) -> Option<usize> {
        let mut hit = vec![false; self.target.len()];
        for &(_, y) in &self.pairs {
            hit[y] = true;
        }
        hit.iter().position(|h| !h)
    }

    /// The first source point without an image.
    pub fn missing_source(&self) -> Option<usize> {
        let mut hit = vec![false; self.source.len()];
        for &(x, _) in &self.pairs {
            hit[x] = true;
        }
        hit.iter().position(|h| !h)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &MultiMap) -> Result<MultiMap> {
        compose(self, then)
    }

    pub fn to_json(&self) -> MultiMapJson {
        MultiMapJson {
            source_ref: self.source.name().to_string(),
            target_ref: self.target.name().to_string(),
            pairs: self
                .pairs
                .iter()
                .map(|&(x, y)| [self.source.id(x).to_string(), self.target.id(y).to_string()])
                .collect(),
        }
    }

    /// Parses the JSON form against the given spaces; the references must
    /// match the space names.
    pub fn from_json(json: &MultiMapJson, source: Arc<FiniteUltraSpace>, target: Arc<FiniteUltraSpace>) -> Result<Self> {
        if json.source_ref != source.name() || json.target_ref != target.name() {
            return Err(Error::SpaceMismatch(format!(
                "map refers to `{}` -> `{}`, got `{}` -> `{}`",
                json.source_ref,
                json.target_ref,
                source.name(),
                target.name()
            )));
        }
        Self::from_id_pairs(source, target, &json.pairs)
    }
}

/// `Ψ ∘ Φ`: pairs `(x, z)` with some `y` such that `(x, y) ∈ Φ` and
/// `(y, z) ∈ Ψ`.
pub fn compose(phi: &MultiMap, psi: &MultiMap) -> Result<MultiMap> {
    if !same_space(&phi.target, &psi.source) {
        return Err(Error::SpaceMismatch(format!(
            "cannot compose: `{}` is not `{}`",
            phi.target.name(),
            psi.source.name()
        )));
    }
    let next = psi.forward_lists();
    let mut pairs = Vec::new();
    for &(x, y) in &phi.pairs {
        pairs.extend(next[y].iter().map(|&z| (x, z)));
    }
    pairs.sort_unstable();
    pairs.dedup();
    Ok(MultiMap {
        source: phi.source.clone(),
        target: psi.target.clone(),
        pairs,
    })
}
