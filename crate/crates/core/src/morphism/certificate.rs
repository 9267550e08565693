use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::metric::{FiniteUltraSpace, SizeCaps};
use crate::rational::{dist_str, Dist};
use crate::report::ValidationReport;
use crate::{Error, Result};

use super::modulus::{distortion_modulus, DistortionModulus};
use super::multimap::MultiMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismKind {
    Asymorphism,
    Embedding,
    Admissible,
    Isometry,
    /// Neither direction total: a bare relation.
    Relation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub axiom: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(axiom: &str, pass: bool, witness: Vec<String>, detail: impl Into<String>) -> Self {
        Check {
            axiom: axiom.to_string(),
            pass,
            witness,
            detail: detail.into(),
        }
    }

    /// One check per report: passes iff the report is clean, witness taken
    /// from the first violation.
    pub fn from_report(axiom: &str, report: &ValidationReport) -> Self {
        match report.violations.first() {
            None => Check::new(axiom, true, vec![], format!("{} checks", report.checked)),
            Some(v) => Check::new(
                axiom,
                false,
                v.witness.clone(),
                format!("{} violation(s); first {}: {}", report.violations.len(), v.rule, v.detail),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismCertificate {
    pub kind: MorphismKind,
    pub source: String,
    pub target: String,
    pub source_points: usize,
    pub target_points: usize,
    /// `Φ(X) = Y`.
    pub surjective: bool,
    /// `Φ⁻¹(Y) = X`.
    pub inverse_surjective: bool,
    pub forward_modulus: DistortionModulus,
    pub backward_modulus: DistortionModulus,
    pub checks: Vec<Check>,
    #[serde(default, with = "opt_dist", skip_serializing_if = "Option::is_none")]
    pub closeness_bound: Option<Dist>,
}

mod opt_dist {
    use crate::rational::Dist;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Option<Dist>, s: S) -> Result<S::Ok, S::Error> {
        match d {
            Some(d) => s.serialize_str(&d.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Dist>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| crate::rational::parse_dist(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl MorphismCertificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn is_asymorphism(&self) -> bool {
        self.surjective && self.inverse_surjective && self.forward_modulus.finite && self.backward_modulus.finite
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Surjectivity of `Φ` and `Φ⁻¹` plus both distortion moduli.
pub fn verify_asymorphism(phi: &MultiMap) -> MorphismCertificate {
    let src = phi.source();
    let tgt = phi.target();
    let missing_t = phi.missing_target();
    let missing_s = phi.missing_source();
    let forward = distortion_modulus(phi);
    let backward = distortion_modulus(&phi.inverse());
    let kind = match (missing_t.is_none(), missing_s.is_none()) {
        (true, true) => MorphismKind::Asymorphism,
        (false, true) => MorphismKind::Embedding,
        _ => MorphismKind::Relation,
    };
    let checks = vec![
        Check::new(
            "surjective",
            missing_t.is_none(),
            missing_t.map(|y| vec![tgt.id(y).to_string()]).unwrap_or_default(),
            if missing_t.is_some() { "target point outside the image" } else { "" },
        ),
        Check::new(
            "inverse-surjective",
            missing_s.is_none(),
            missing_s.map(|x| vec![src.id(x).to_string()]).unwrap_or_default(),
            if missing_s.is_some() { "source point without an image" } else { "" },
        ),
        Check::new("bornologous", forward.finite, vec![], format!("max delta {}", forward.max_delta())),
        Check::new(
            "inverse-bornologous",
            backward.finite,
            vec![],
            format!("max delta {}", backward.max_delta()),
        ),
    ];
    MorphismCertificate {
        kind,
        source: src.name().to_string(),
        target: tgt.name().to_string(),
        source_points: src.len(),
        target_points: tgt.len(),
        surjective: missing_t.is_none(),
        inverse_surjective: missing_s.is_none(),
        forward_modulus: forward,
        backward_modulus: backward,
        checks,
        closeness_bound: None,
    }
}

/// Maps `f ∈ Φ`, `g ∈ Φ⁻¹` chosen by least id, with their closeness data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionPair {
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    /// `max_x d(g f x, x)`.
    #[serde(with = "dist_str")]
    pub source_closeness: Dist,
    /// `max_y d(f g y, y)`.
    #[serde(with = "dist_str")]
    pub target_closeness: Dist,
    #[serde(with = "dist_str")]
    pub closeness: Dist,
    /// Largest diameter of a fibre `Φ⁻¹Φ(x)`.
    #[serde(with = "dist_str")]
    pub source_fiber_bound: Dist,
    /// Largest diameter of a fibre `ΦΦ⁻¹(y)`.
    #[serde(with = "dist_str")]
    pub target_fiber_bound: Dist,
}

fn least_id(space: &FiniteUltraSpace, pts: &[usize]) -> usize {
    *pts.iter().min_by(|&&a, &&b| space.id(a).cmp(space.id(b))).expect("nonempty")
}

fn diameter_of(space: &FiniteUltraSpace, pts: &[usize]) -> u32 {
    let mut best = 0;
    for (k, &a) in pts.iter().enumerate() {
        for &b in &pts[k + 1..] {
            best = best.max(space.rank(a, b));
        }
    }
    best
}

/// `max_x diam Φ⁻¹Φ(x)`, with fibres cached by `Φ(x)`.
fn fiber_bound(phi: &MultiMap) -> Dist {
    let fwd = phi.forward_lists();
    let back = phi.inverse().forward_lists();
    let mut seen: HashMap<&[usize], ()> = HashMap::new();
    let mut best = 0;
    for ys in &fwd {
        if seen.insert(ys.as_slice(), ()).is_some() {
            continue;
        }
        let mut fibre: Vec<usize> = ys.iter().flat_map(|&y| back[y].iter().copied()).collect();
        fibre.sort_unstable();
        fibre.dedup();
        best = best.max(diameter_of(phi.source(), &fibre));
    }
    phi.source().scale()[best as usize]
}

pub fn selection_pair(phi: &MultiMap) -> Result<SelectionPair> {
    if !(phi.is_surjective() && phi.is_total()) {
        return Err(Error::NotAsymorphism(format!(
            "`{}` -> `{}` is not surjective in both directions",
            phi.source().name(),
            phi.target().name()
        )));
    }
    let (x, y) = (phi.source(), phi.target());
    let f: Vec<usize> = phi.forward_lists().iter().map(|ys| least_id(y, ys)).collect();
    let g: Vec<usize> = phi.inverse().forward_lists().iter().map(|xs| least_id(x, xs)).collect();
    let sc = (0..x.len()).map(|i| x.rank(i, g[f[i]])).max().unwrap_or(0);
    let tc = (0..y.len()).map(|j| y.rank(j, f[g[j]])).max().unwrap_or(0);
    let source_closeness = x.scale()[sc as usize];
    let target_closeness = y.scale()[tc as usize];
    Ok(SelectionPair {
        source_fiber_bound: fiber_bound(phi),
        target_fiber_bound: fiber_bound(&phi.inverse()),
        closeness: source_closeness.max(target_closeness),
        source_closeness,
        target_closeness,
        f,
        g,
    })
}

/// `max_x dist(x, L)`: the subset is large with `O_r(L) = X` for every
/// `r` above this value.
pub fn is_large(space: &FiniteUltraSpace, subset: &[usize]) -> Result<Dist> {
    if subset.is_empty() {
        return Err(Error::Empty("subset"));
    }
    let worst = (0..space.len())
        .map(|x| subset.iter().map(|&l| space.rank(x, l)).min().expect("nonempty"))
        .max()
        .unwrap_or(0);
    Ok(space.scale()[worst as usize])
}

/// A bijection `h: X' → Y'` between large subsets extracted from a pair of
/// mutually close maps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalForm {
    /// `h(x_prime[k]) = y_prime[k]`.
    pub x_prime: Vec<usize>,
    pub y_prime: Vec<usize>,
    #[serde(with = "dist_str")]
    pub r: Dist,
    /// `is_large` bound of `Y'` in `Y`.
    #[serde(with = "dist_str")]
    pub target_large_bound: Dist,
    #[serde(with = "dist_str")]
    pub source_large_bound: Dist,
    pub certificate: MorphismCertificate,
}

pub fn coarse_normal_form(
    source: &Arc<FiniteUltraSpace>,
    target: &Arc<FiniteUltraSpace>,
    f: &[usize],
    g: &[usize],
    caps: &SizeCaps,
) -> Result<NormalForm> {
    if f.len() != source.len() || g.len() != target.len() {
        return Err(Error::SpaceMismatch("map lengths differ from the spaces".into()));
    }
    if source.is_empty() {
        return Err(Error::Empty("source space"));
    }
    let sc = (0..source.len()).map(|x| source.rank(x, g[f[x]])).max().unwrap_or(0);
    let tc = (0..target.len()).map(|y| target.rank(y, f[g[y]])).max().unwrap_or(0);
    let r = source.scale()[sc as usize].max(target.scale()[tc as usize]);

    let mut rep: Vec<Option<usize>> = vec![None; target.len()];
    for x in 0..source.len() {
        let slot = &mut rep[f[x]];
        if slot.is_none_or(|cur| source.id(x) < source.id(cur)) {
            *slot = Some(x);
        }
    }
    let (y_prime, x_prime): (Vec<usize>, Vec<usize>) =
        rep.iter().enumerate().filter_map(|(y, x)| x.map(|x| (y, x))).unzip();

    let xs = Arc::new(source.subspace(&x_prime, caps)?.with_name(format!("{}'", source.name())));
    let ys = Arc::new(target.subspace(&y_prime, caps)?.with_name(format!("{}'", target.name())));
    let h = MultiMap::from_fn(xs, ys, &(0..x_prime.len()).collect::<Vec<_>>())?;
    let mut certificate = verify_asymorphism(&h);

    let target_large_bound = is_large(target, &y_prime)?;
    let source_large_bound = is_large(source, &x_prime)?;
    certificate.checks.push(Check::new(
        "image-large",
        target_large_bound <= r,
        vec![],
        format!("every point within {target_large_bound} of f(X), R = {r}"),
    ));
    let g_map = MultiMap::from_fn(target.clone(), source.clone(), g)?;
    let dg = distortion_modulus(&g_map);
    let two_r = r + r;
    let worst = certificate
        .backward_modulus
        .table
        .iter()
        .find(|e| e.delta > dg.eval(&e.eps) + two_r)
        .cloned();
    certificate.checks.push(Check::new(
        "inverse-modulus-bound",
        worst.is_none(),
        worst.as_ref().map(|e| vec![e.eps.to_string()]).unwrap_or_default(),
        match &worst {
            None => "delta_h^-1(eps) <= delta_g(eps) + 2R at every realized eps".to_string(),
            Some(e) => format!("delta {} exceeds {}", e.delta, dg.eval(&e.eps) + two_r),
        },
    ));
    certificate.closeness_bound = Some(r);
    Ok(NormalForm {
        x_prime,
        y_prime,
        r,
        target_large_bound,
        source_large_bound,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn space(n: usize, name: &str, d: impl Fn(usize, usize) -> i64) -> Arc<FiniteUltraSpace> {
        let ids = (0..n).map(|i| format!("{name}{i}")).collect();
        Arc::new(
            FiniteUltraSpace::from_fn(ids, &SizeCaps::default(), |i, j| int(d(i, j)))
                .unwrap()
                .with_name(name),
        )
    }

    #[test]
    fn identity_is_asymorphism() {
        let x = space(4, "x", |i, j| if i / 2 == j / 2 { 1 } else { 2 });
        let c = verify_asymorphism(&MultiMap::identity(x.clone()));
        assert_eq!(c.kind, MorphismKind::Asymorphism);
        assert!(c.forward_modulus.is_identity() && c.backward_modulus.is_identity());
        let s = selection_pair(&MultiMap::identity(x)).unwrap();
        assert_eq!(s.closeness, int(0));
    }

    #[test]
    fn non_large_inclusion_is_embedding() {
        let big = space(3, "x", |_, _| 1);
        let small = space(1, "s", |_, _| unreachable!());
        let incl = MultiMap::from_fn(small, big, &[0]).unwrap();
        let c = verify_asymorphism(&incl);
        assert_eq!(c.kind, MorphismKind::Embedding);
        assert!(!c.passed());
        assert!(selection_pair(&incl).is_err());
    }

    #[test]
    fn two_to_one_cover() {
        let x = space(2, "x", |_, _| 3);
        let p = space(1, "p", |_, _| unreachable!());
        let phi = MultiMap::from_fn(x, p, &[0, 0]).unwrap();
        let s = selection_pair(&phi).unwrap();
        assert_eq!(s.target_closeness, int(0));
        assert_eq!(s.source_closeness, int(3));
        assert_eq!(s.source_fiber_bound, int(3));
        assert!(s.source_closeness <= s.source_fiber_bound);
    }

    #[test]
    fn is_large_examples() {
        let x = space(4, "x", |i, j| if i / 2 == j / 2 { 2 } else { 4 });
        assert_eq!(is_large(&x, &[0, 1, 2, 3]).unwrap(), int(0));
        assert_eq!(is_large(&x, &[0]).unwrap(), int(4));
        assert_eq!(is_large(&x, &[0, 2]).unwrap(), int(2));
        assert!(is_large(&x, &[]).is_err());
    }

    #[test]
    fn normal_forms() {
        let x = space(4, "x", |i, j| if i / 2 == j / 2 { 2 } else { 4 });
        let nf = coarse_normal_form(&x, &x, &[0, 1, 2, 3], &[0, 1, 2, 3], &SizeCaps::default()).unwrap();
        assert_eq!(nf.x_prime, vec![0, 1, 2, 3]);
        assert_eq!(nf.r, int(0));
        assert!(nf.certificate.passed());

        let p = space(1, "p", |_, _| unreachable!());
        let nf = coarse_normal_form(&x, &p, &[0; 4], &[2], &SizeCaps::default()).unwrap();
        assert_eq!((nf.x_prime.len(), nf.y_prime.len()), (1, 1));
        assert_eq!(nf.r, int(4));
        assert!(nf.certificate.passed());
    }
}
