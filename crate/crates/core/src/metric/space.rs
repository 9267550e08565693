use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;

use crate::rational::Dist;
use crate::{Error, Result};

/// Resource limits for constructions and exhaustive scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeCaps {
    pub max_points: usize,
    pub max_pair_evals: u128,
    /// Largest subset handled by the exact net search on plain metrics.
    pub max_exact_net: usize,
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps {
            max_points: 20_000,
            max_pair_evals: 200_000_000,
            max_exact_net: 24,
        }
    }
}

impl SizeCaps {
    pub fn check_points(&self, what: &'static str, n: u128) -> Result<()> {
        if n > self.max_points as u128 {
            return Err(Error::SizeCap {
                what,
                needed: n,
                cap: self.max_points as u128,
            });
        }
        let pairs = n * n.saturating_sub(1) / 2;
        if pairs > self.max_pair_evals {
            return Err(Error::SizeCap {
                what,
                needed: pairs,
                cap: self.max_pair_evals,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Ranks {
    U16(Vec<u16>),
    U32(Vec<u32>),
}

#[derive(Clone, Debug)]
enum Store {
    /// Upper triangle (i < j) of distance ranks, row-major.
    Dense(Ranks),
    /// Words over `alphabet` of `length` letters; point `i` spells the
    /// base-`alphabet` digits of `i`, least significant position first.
    Word { alphabet: u32, length: u32 },
}

/// A finite metric space with exact rational distances.
///
/// Distances are stored as ranks into the sorted table of realized values
/// (`scale()[0] == 0`), so comparisons between distances are integer
/// comparisons. The strong triangle inequality is not enforced on
/// construction: plain metrics are admitted as inputs to ultrametrization and
/// reported by [`validate_ultrametric`](super::validate_ultrametric).
#[derive(Clone)]
pub struct FiniteUltraSpace {
    name: String,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    scale: Vec<Dist>,
    store: Store,
    ultrametric: OnceLock<bool>,
}

impl fmt::Debug for FiniteUltraSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteUltraSpace")
            .field("name", &self.name)
            .field("points", &self.ids.len())
            .field("scale", &self.scale)
            .finish()
    }
}

#[inline]
fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn build_index(ids: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::Invalid(format!("duplicate point id `{id}`")));
        }
    }
    Ok(index)
}

impl FiniteUltraSpace {
    /// Builds a space from a distance function evaluated on pairs `i < j`.
    pub fn from_fn<F>(ids: Vec<String>, caps: &SizeCaps, mut dist: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Dist,
    {
        let n = ids.len();
        if n == 0 {
            return Err(Error::Empty("point set"));
        }
        caps.check_points("space", n as u128)?;
        let index = build_index(&ids)?;
        let mut raw = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        let mut values = BTreeSet::new();
        values.insert(Dist::zero());
        for i in 0..n {
            for j in i + 1..n {
                let d = dist(i, j);
                if d <= Dist::zero() {
                    return Err(Error::NotAMetric(format!(
                        "d({}, {}) = {d} must be positive",
                        ids[i], ids[j]
                    )));
                }
                values.insert(d);
                raw.push(d);
            }
        }
        let scale: Vec<Dist> = values.into_iter().collect();
        let rank_of = |d: &Dist| scale.binary_search(d).expect("value present") as u32;
        let ranks = if scale.len() <= u16::MAX as usize {
            Ranks::U16(raw.iter().map(|d| rank_of(d) as u16).collect())
        } else {
            Ranks::U32(raw.iter().map(rank_of).collect())
        };
        Ok(FiniteUltraSpace {
            name: String::new(),
            ids,
            index,
            scale,
            store: Store::Dense(ranks),
            ultrametric: OnceLock::new(),
        })
    }

    /// Builds a space from a full matrix, checking symmetry and the diagonal.
    pub fn from_matrix(ids: Vec<String>, matrix: &[Vec<Dist>], caps: &SizeCaps) -> Result<Self> {
        let n = ids.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid(format!(
                "distance matrix must be {n}x{n} to match the point list"
            )));
        }
        for i in 0..n {
            if !matrix[i][i].is_zero() {
                return Err(Error::NotAMetric(format!(
                    "d({0}, {0}) = {1} must be 0",
                    ids[i], matrix[i][i]
                )));
            }
            for j in i + 1..n {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::NotAMetric(format!(
                        "d({}, {}) = {} but d({}, {}) = {}",
                        ids[i], ids[j], matrix[i][j], ids[j], ids[i], matrix[j][i]
                    )));
                }
            }
        }
        Self::from_fn(ids, caps, |i, j| matrix[i][j])
    }

    pub(crate) fn word_store(alphabet: u32, length: u32, ids: Vec<String>) -> Result<Self> {
        let index = build_index(&ids)?;
        let mut scale = vec![Dist::zero()];
        scale.extend((0..length).map(|p| Dist::from_integer(1i64 << p)));
        Ok(FiniteUltraSpace {
            name: String::new(),
            ids,
            index,
            scale,
            store: Store::Word { alphabet, length },
            ultrametric: OnceLock::new(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// Sorted realized distance values, starting with 0.
    pub fn scale(&self) -> &[Dist] {
        &self.scale
    }

    #[inline]
    pub fn rank(&self, i: usize, j: usize) -> u32 {
        if i == j {
            return 0;
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        match &self.store {
            Store::Dense(Ranks::U16(v)) => v[tri_index(self.ids.len(), i, j)] as u32,
            Store::Dense(Ranks::U32(v)) => v[tri_index(self.ids.len(), i, j)],
            Store::Word { alphabet, length } => {
                let a = *alphabet as usize;
                let (mut x, mut y) = (i, j);
                let mut top = 0;
                for p in 0..*length {
                    if x % a != y % a {
                        top = p + 1;
                    }
                    x /= a;
                    y /= a;
                }
                top
            }
        }
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> Dist {
        self.scale[self.rank(i, j) as usize]
    }

    pub fn dist_by_id(&self, x: &str, y: &str) -> Result<Dist> {
        Ok(self.dist(self.index_of(x)?, self.index_of(y)?))
    }

    pub fn diameter(&self) -> Dist {
        if self.len() < 2 {
            return Dist::zero();
        }
        // Word stores realise every scale value; dense stores only keep
        // realised values.
        *self.scale.last().expect("scale has 0")
    }

    /// Largest rank `r` with `scale[r] <= d`.
    pub fn rank_at_most(&self, d: &Dist) -> Option<u32> {
        match self.scale.binary_search(d) {
            Ok(r) => Some(r as u32),
            Err(0) => None,
            Err(r) => Some(r as u32 - 1),
        }
    }

    /// Largest rank `r` with `scale[r] < d`.
    pub fn rank_below(&self, d: &Dist) -> Option<u32> {
        match self.scale.binary_search(d) {
            Ok(0) | Err(0) => None,
            Ok(r) | Err(r) => Some(r as u32 - 1),
        }
    }

    /// Cached answer of the O(n²) bottleneck test (see
    /// [`validate_ultrametric`](super::validate_ultrametric)).
    pub fn is_ultrametric(&self) -> bool {
        *self
            .ultrametric
            .get_or_init(|| super::validate::bottleneck_violation(self).is_none())
    }

    /// Full distance matrix, mainly for serialization.
    pub fn matrix(&self) -> Vec<Vec<Dist>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.dist(i, j)).collect())
            .collect()
    }

    /// Restriction to the given points (in the given order).
    pub fn subspace(&self, points: &[usize], caps: &SizeCaps) -> Result<Self> {
        let ids = points.iter().map(|&i| self.ids[i].clone()).collect();
        Self::from_fn(ids, caps, |a, b| self.dist(points[a], points[b]))
    }

    /// Exact equality of point lists and all distances.
    pub fn same_as(&self, other: &FiniteUltraSpace) -> bool {
        if self.ids != other.ids {
            return false;
        }
        let n = self.len();
        (0..n).all(|i| (i + 1..n).all(|j| self.dist(i, j) == other.dist(i, j)))
    }
}
