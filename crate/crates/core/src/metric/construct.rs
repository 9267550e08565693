//! Products and hyperspaces.

use num_traits::Zero;

use super::{FiniteUltraSpace, SizeCaps};
use crate::rational::Dist;
use crate::{Error, Result};

/// `X × Y` with the max metric.
pub fn product(x: &FiniteUltraSpace, y: &FiniteUltraSpace, caps: &SizeCaps) -> Result<FiniteUltraSpace> {
    let n = x.len() as u128 * y.len() as u128;
    caps.check_points("product", n)?;
    let m = y.len();
    let ids = (0..x.len())
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| format!("({},{})", x.id(i), y.id(j)))
        .collect();
    Ok(FiniteUltraSpace::from_fn(ids, caps, |p, q| {
        let (xi, yi) = (p / m, p % m);
        let (xj, yj) = (q / m, q % m);
        x.dist(xi, xj).max(y.dist(yi, yj))
    })?
    .with_name(format!("{}x{}", x.name(), y.name())))
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Hausdorff distance between two point sets of `space`.
pub fn hausdorff(space: &FiniteUltraSpace, a: &[usize], b: &[usize]) -> Dist {
    let one_sided = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&p| to.iter().map(|&q| space.dist(p, q)).min().unwrap_or_else(Dist::zero))
            .max()
            .unwrap_or_else(Dist::zero)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Nonempty subsets of size at most `n`, with the Hausdorff metric.
/// Points are ordered by size, then lexicographically by member index.
pub fn hyperspace(x: &FiniteUltraSpace, n: usize, caps: &SizeCaps) -> Result<FiniteUltraSpace> {
    if n == 0 {
        return Err(Error::Invalid("hyperspace order must be at least 1".into()));
    }
    let size: u128 = (1..=n.min(x.len()) as u128)
        .map(|k| binomial(x.len() as u128, k))
        .fold(0u128, |a, b| a.saturating_add(b));
    caps.check_points("hyperspace", size)?;
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(size as usize);
    for k in 1..=n.min(x.len()) {
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            sets.push(comb.clone());
            // Next combination in lexicographic order.
            let mut i = k;
            while i > 0 && comb[i - 1] == x.len() - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..k {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    let ids = sets
        .iter()
        .map(|s| {
            let names: Vec<&str> = s.iter().map(|&i| x.id(i)).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect();
    Ok(FiniteUltraSpace::from_fn(ids, caps, |i, j| hausdorff(x, &sets[i], &sets[j]))?
        .with_name(format!("exp{}({})", n, x.name())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{validate_ultrametric, word_space, WordSpaceSpec};
    use crate::rational::int;

    fn caps() -> SizeCaps {
        SizeCaps::default()
    }

    fn point() -> FiniteUltraSpace {
        FiniteUltraSpace::from_fn(vec!["*".into()], &caps(), |_, _| int(0)).unwrap()
    }

    fn two(d: i64) -> FiniteUltraSpace {
        FiniteUltraSpace::from_fn(vec!["p".into(), "q".into()], &caps(), |_, _| int(d)).unwrap()
    }

    #[test]
    fn product_with_a_point_is_isometric() {
        let x = word_space(&WordSpaceSpec::new(2, 3), &caps()).unwrap();
        let p = product(&x, &point(), &caps()).unwrap();
        assert_eq!(p.len(), x.len());
        for i in 0..x.len() {
            for j in 0..x.len() {
                assert_eq!(p.dist(i, j), x.dist(i, j));
            }
        }
    }

    #[test]
    fn product_takes_the_max() {
        let p = product(&two(1), &two(4), &caps()).unwrap();
        assert_eq!(p.dist_by_id("(p,p)", "(q,q)").unwrap(), int(4));
        assert_eq!(p.dist_by_id("(p,p)", "(q,p)").unwrap(), int(1));
        let w = word_space(&WordSpaceSpec::new(3, 2), &caps()).unwrap();
        assert!(validate_ultrametric(&product(&w, &two(3), &caps()).unwrap()).is_valid());
    }

    #[test]
    fn hyperspace_examples() {
        let x = two(1);
        let h = hyperspace(&x, 2, &caps()).unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(h.dist_by_id("{p}", "{p,q}").unwrap(), int(1));
        assert_eq!(h.dist_by_id("{p}", "{q}").unwrap(), int(1));
        let w = word_space(&WordSpaceSpec::new(2, 3), &caps()).unwrap();
        let h1 = hyperspace(&w, 1, &caps()).unwrap();
        for i in 0..w.len() {
            for j in 0..w.len() {
                assert_eq!(h1.dist(i, j), w.dist(i, j));
            }
        }
        assert!(validate_ultrametric(&hyperspace(&w, 3, &caps()).unwrap()).is_valid());
        assert!(hyperspace(&w, 0, &caps()).is_err());
    }

    #[test]
    fn hyperspace_cap() {
        let w = word_space(&WordSpaceSpec::new(2, 6), &caps()).unwrap();
        let tight = SizeCaps {
            max_points: 1000,
            ..caps()
        };
        assert!(matches!(hyperspace(&w, 3, &tight), Err(Error::SizeCap { .. })));
    }
}
