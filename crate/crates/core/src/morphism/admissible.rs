use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::metric::SizeCaps;
use crate::rational::{big_int, big_vec_str, ceil, floor, Big};
use crate::report::ValidationReport;
use crate::tower::{DegreeProfile, Tower};
use crate::{Error, Result};

use super::certificate::{verify_asymorphism, Check, MorphismCertificate, MorphismKind};
use super::multimap::MultiMap;

/// Size windows `[a_i, b_i]` for admissible sets of level-`i` nodes,
/// `i = 1..=len`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleSequences {
    #[serde(with = "big_vec_str")]
    pub a: Vec<Big>,
    #[serde(with = "big_vec_str")]
    pub b: Vec<Big>,
}

fn to_u64_sat(n: &BigInt) -> u64 {
    if n.sign() == num_bigint::Sign::Minus {
        0
    } else {
        n.to_u64().unwrap_or(u64::MAX)
    }
}

impl AdmissibleSequences {
    pub fn new(a: Vec<Big>, b: Vec<Big>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Invalid(format!(
                "sequence lengths differ: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        Ok(AdmissibleSequences { a, b })
    }

    pub fn from_ints(a: &[i64], b: &[i64]) -> Result<Self> {
        Self::new(a.iter().map(|&x| big_int(x)).collect(), b.iter().map(|&x| big_int(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `a_i` (1-based).
    pub fn a(&self, i: u32) -> &Big {
        &self.a[i as usize - 1]
    }

    pub fn b(&self, i: u32) -> &Big {
        &self.b[i as usize - 1]
    }

    /// Integer sizes allowed at level `i`: `[ceil a_i, floor b_i]`.
    pub fn window(&self, i: u32) -> (u64, u64) {
        (to_u64_sat(&ceil(self.a(i))), to_u64_sat(&floor(self.b(i))))
    }

    /// `1 <= a_i` and `a_i + 2 <= b_i` for every `i`.
    pub fn invariant_report(&self) -> ValidationReport {
        let mut r = ValidationReport::new("admissible sequences");
        let two = big_int(2);
        for i in 1..=self.len() as u32 {
            r.checked += 1;
            let (a, b) = (self.a(i), self.b(i));
            if *a < Big::one() || a + &two > *b {
                r.push(
                    "sequence-invariant",
                    vec![i.to_string()],
                    format!("need 1 <= a_{i} and a_{i} + 2 <= b_{i}; a = {a}, b = {b}"),
                );
            }
        }
        r
    }
}

/// The integer sizes `[ceil lo, floor hi]` are usable for `d` parts of `n`.
pub fn partition_feasible(n: usize, d: usize, lo: &Big, hi: &Big) -> bool {
    let lo = ceil(lo);
    let hi = floor(hi);
    let (n, d) = (BigInt::from(n), BigInt::from(d));
    d > BigInt::from(0) && &d * lo <= n && n <= d * hi
}

/// Splits `items` into `parts` consecutive runs whose sizes differ by at most
/// one, the first `n mod d` runs taking the larger size. Every size lies in
/// `[ceil lo, floor hi]`.
pub fn balanced_partition<T: Clone>(items: &[T], parts: usize, lo: &Big, hi: &Big) -> Result<Vec<Vec<T>>> {
    let n = items.len();
    if !partition_feasible(n, parts, lo, hi) {
        return Err(Error::InfeasiblePartition {
            items: n,
            parts,
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    let (q, r) = (n / parts, n % parts);
    let mut out = Vec::with_capacity(parts);
    let mut at = 0;
    for p in 0..parts {
        let size = q + usize::from(p < r);
        out.push(items[at..at + size].to_vec());
        at += size;
    }
    Ok(out)
}

/// `d_x ∈ {floor(D/m), ceil(D/m)}` summing to `D`; the larger value goes to
/// the first `D mod m` members.
pub fn fibre_counts(total: usize, members: usize) -> Vec<usize> {
    let (q, r) = (total / members, total % members);
    (0..members).map(|k| q + usize::from(k < r)).collect()
}

/// The five admissible-morphism conditions for a partial node map.
pub fn check_admissible(map: &[Option<usize>], t1: &Tower, t2: &Tower) -> ValidationReport {
    let mut r = ValidationReport::new("admissible morphism");
    if map.len() != t1.len() {
        r.push("domain", vec![], format!("map covers {} of {} nodes", map.len(), t1.len()));
        return r;
    }
    let in_dom = |x: usize| map[x].is_some();
    let mut image = vec![false; t2.len()];
    let mut first_by_image: HashMap<usize, usize> = HashMap::new();
    let mut max_images: Vec<usize> = Vec::new();
    for x in 0..t1.len() {
        let Some(y) = map[x] else { continue };
        r.checked += 1;
        image[y] = true;
        if let Some(&c) = t1.children(x).iter().find(|&&c| !in_dom(c)) {
            r.push("domain-lower", vec![t1.id(x).into(), t1.id(c).into()], "domain is not a lower set");
        }
        // (1)
        if t1.level(x) != t2.level(y) {
            r.push("level", vec![t1.id(x).into(), t2.id(y).into()], "level changed");
        }
        // (2): comparable pairs reduce to parent links.
        match t1.parent(x) {
            Some(p) if in_dom(p) => {
                let py = map[p].expect("in domain");
                if !t2.le(y, py) {
                    r.push(
                        "monotone",
                        vec![t1.id(x).into(), t1.id(p).into()],
                        format!("`{}` is not below `{}`", t2.id(y), t2.id(py)),
                    );
                }
            }
            _ => max_images.push(y),
        }
        // (3)
        match first_by_image.get(&y) {
            None => {
                first_by_image.insert(y, x);
            }
            Some(&x0) => {
                if t1.parent(x0).is_none() || t1.parent(x0) != t1.parent(x) {
                    r.push(
                        "fibres-share-parent",
                        vec![t1.id(x0).into(), t1.id(x).into()],
                        format!("both map to `{}` without a common parent", t2.id(y)),
                    );
                }
            }
        }
    }
    // (4)
    for y in 0..t2.len() {
        if image[y] {
            if let Some(&c) = t2.children(y).iter().find(|&&c| !image[c]) {
                r.push("image-lower", vec![t2.id(y).into(), t2.id(c).into()], "image is not a lower set");
            }
        }
    }
    // (5)
    max_images.sort_unstable();
    max_images.dedup();
    r.checked += 1;
    if max_images.len() > 1 {
        r.push(
            "top-image",
            max_images.iter().map(|&y| t2.id(y).to_string()).collect(),
            "maximal elements have more than one image",
        );
    }
    r
}

/// Per-level outcome of the sufficient conditions for the builder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct L2Level {
    pub i: u32,
    pub invariant_ok: bool,
    /// `ceil(a_i) <= deg_i(T1)`, standard ceiling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ceil_ok: Option<bool>,
    /// The same bound with the swapped rounding (`floor(a_i)`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub swapped_ceil_ok: Option<bool>,
    /// `a_i + 1 <= deg_i(T1)`, the bound enforced.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_plus_one_ok: Option<bool>,
    /// `b_i + a_i Deg_i(T2) / a_{i+1}` against `deg_i(T1)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<Inequality>,
    /// `Deg_i(T1)` against `a_i + b_i (deg_i(T2) / b_{i+1} - 2)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<Inequality>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: String,
    pub rhs: String,
    pub ok: bool,
}

impl Inequality {
    fn le(lhs: &Big, rhs: &Big) -> Self {
        Inequality {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            ok: lhs <= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct L2Report {
    pub levels: Vec<L2Level>,
    /// Direct split of the top's predecessors when the sequences stop one
    /// level below the top.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top: Option<Inequality>,
    pub report: ValidationReport,
}

impl L2Report {
    pub fn is_valid(&self) -> bool {
        self.report.is_valid()
    }
}

/// Checks the level inequalities with exact arithmetic.
///
/// Inequalities are evaluated for `i < len` (they involve `a_{i+1}`). When
/// the sequences have exactly `H - 1` entries, the top node is split
/// directly: `Deg_{H-1}(T2) ceil(a_{H-1}) <= deg_{H-1}(T1)` and
/// `Deg_{H-1}(T1) <= deg_{H-1}(T2) floor(b_{H-1})`.
pub fn check_l2_preconditions(p1: &DegreeProfile, p2: &DegreeProfile, seqs: &AdmissibleSequences) -> Result<L2Report> {
    let h = p1.height();
    if h != p2.height() {
        return Err(Error::Invalid(format!("profile heights differ: {h} vs {}", p2.height())));
    }
    if (seqs.len() as u32) < h.saturating_sub(1) {
        return Err(Error::Invalid(format!(
            "sequences have {} entries, height {h} needs at least {}",
            seqs.len(),
            h - 1
        )));
    }
    let mut report = seqs.invariant_report();
    report.subject = "admissible preconditions".into();
    let len = seqs.len() as u32;
    let two = big_int(2);
    let mut levels = Vec::new();
    for i in 1..=len {
        let (a, b) = (seqs.a(i), seqs.b(i));
        let mut lv = L2Level {
            i,
            invariant_ok: *a >= Big::one() && a + &two <= *b,
            ceil_ok: None,
            swapped_ceil_ok: None,
            a_plus_one_ok: None,
            lower: None,
            upper: None,
        };
        if i < h {
            let d1 = p1.deg_n(i)?;
            let big1 = p1.big_deg_n(i)?;
            let d1b = big_int(d1);
            lv.ceil_ok = Some(ceil(a) <= BigInt::from(d1));
            lv.swapped_ceil_ok = Some(floor(a) <= BigInt::from(d1));
            let ok = a + Big::one() <= d1b;
            lv.a_plus_one_ok = Some(ok);
            report.checked += 1;
            if !ok {
                report.push("a+1<=deg", vec![i.to_string()], format!("a_{i} + 1 = {} > deg_{i}(T1) = {d1}", a + Big::one()));
            }
            if i < len {
                let big2 = big_int(p2.big_deg_n(i)?);
                let d2 = big_int(p2.deg_n(i)?);
                let lower = b + a * big2 / seqs.a(i + 1);
                let upper = a + b * (d2 / seqs.b(i + 1) - &two);
                let lo = Inequality::le(&lower, &d1b);
                let up = Inequality::le(&big_int(big1), &upper);
                report.checked += 2;
                if !lo.ok {
                    report.push("lower", vec![i.to_string()], format!("{} > deg_{i}(T1) = {}", lo.lhs, lo.rhs));
                }
                if !up.ok {
                    report.push("upper", vec![i.to_string()], format!("Deg_{i}(T1) = {} > {}", up.lhs, up.rhs));
                }
                lv.lower = Some(lo);
                lv.upper = Some(up);
            }
        }
        levels.push(lv);
    }
    let mut top = None;
    if h >= 2 && len == h - 1 {
        let k = h - 1;
        let parts = BigInt::from(p2.big_deg_n(k)?);
        let lo = &parts * ceil(seqs.a(k));
        let hi = BigInt::from(p2.deg_n(k)?) * floor(seqs.b(k));
        let (d1, big1) = (BigInt::from(p1.deg_n(k)?), BigInt::from(p1.big_deg_n(k)?));
        let ok = lo <= d1 && big1 <= hi;
        report.checked += 1;
        if !ok {
            report.push(
                "top-split",
                vec![k.to_string()],
                format!("need {lo} <= deg_{k}(T1) = {d1} and Deg_{k}(T1) = {big1} <= {hi}"),
            );
        }
        top = Some(Inequality {
            lhs: format!("[{lo}, {hi}]"),
            rhs: format!("[{d1}, {big1}]"),
            ok,
        });
    }
    Ok(L2Report { levels, top, report })
}

/// Output of the admissible-morphism builder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmissibleBuild {
    /// `map[x]` for nodes of `T1`; `None` outside `↓A`.
    pub map: Vec<Option<usize>>,
    /// Base points of `↓A` (in `T1`) and `↓w` (in `T2`), in index order.
    pub source_base: Vec<usize>,
    pub target_base: Vec<usize>,
    /// `base_map[k]` is the position in `target_base` of the image of
    /// `source_base[k]`.
    pub base_map: Vec<usize>,
    pub admissible_report: ValidationReport,
    /// Pairwise distortion bounds `d2 <= d1 <= d2 + 2` on base pairs.
    pub distortion_report: ValidationReport,
    pub certificate: MorphismCertificate,
}

/// Builds a surjective admissible morphism `↓A → ↓w` by recursive descent:
/// split `deg(w)` over `A`, cut each `pred(x)` into that many balanced
/// admissible sets, pair the sets with `pred(w)` in index order, recurse.
pub fn build_admissible_morphism(
    t1: &Tower,
    a_set: &[usize],
    t2: &Tower,
    w: usize,
    seqs: &AdmissibleSequences,
    caps: &SizeCaps,
) -> Result<AdmissibleBuild> {
    let mut a_set = a_set.to_vec();
    a_set.sort_unstable();
    a_set.dedup();
    let Some(&first) = a_set.first() else {
        return Err(Error::Empty("admissible set"));
    };
    let lev = t2.level(w);
    if a_set.iter().any(|&x| t1.level(x) != lev) {
        return Err(Error::Precondition(format!("admissible set is not on level {lev}")));
    }
    if a_set.len() > 1 && a_set.iter().any(|&x| t1.parent(x).is_none() || t1.parent(x) != t1.parent(first)) {
        return Err(Error::Precondition("admissible set is not inside one predecessor set".into()));
    }
    let inv = seqs.invariant_report();
    if let Some(v) = inv.violations.first() {
        return Err(Error::Precondition(v.detail.clone()));
    }
    if (seqs.len() as u32) < lev - 1 {
        return Err(Error::Precondition(format!(
            "sequences have {} entries, level {lev} needs {}",
            seqs.len(),
            lev - 1
        )));
    }
    if lev as usize <= seqs.len() && !partition_feasible(a_set.len(), 1, seqs.a(lev), seqs.b(lev)) {
        return Err(Error::Precondition(format!(
            "|A| = {} outside [{}, {}]",
            a_set.len(),
            seqs.a(lev),
            seqs.b(lev)
        )));
    }

    let mut map: Vec<Option<usize>> = vec![None; t1.len()];
    let mut stack = vec![(a_set.clone(), w)];
    while let Some((set, target)) = stack.pop() {
        for &x in &set {
            map[x] = Some(target);
        }
        let l = t2.level(target);
        if l == 1 {
            continue;
        }
        let kids = t2.children(target);
        let counts = fibre_counts(kids.len(), set.len());
        let (lo, hi) = (seqs.a(l - 1), seqs.b(l - 1));
        let mut parts = Vec::with_capacity(kids.len());
        for (&x, &d) in set.iter().zip(&counts) {
            let split = balanced_partition(t1.children(x), d, lo, hi).map_err(|e| {
                Error::Precondition(format!(
                    "level {l}: node `{}` -> `{}`: {e}",
                    t1.id(x),
                    t2.id(target)
                ))
            })?;
            parts.extend(split);
        }
        debug_assert_eq!(parts.len(), kids.len());
        for (part, &kid) in parts.into_iter().zip(kids) {
            stack.push((part, kid));
        }
    }

    let admissible_report = check_admissible(&map, t1, t2);
    let source_base = t1.cone_base(&a_set);
    let target_base = t2.cone_base(&[w]);
    let tpos: HashMap<usize, usize> = target_base.iter().enumerate().map(|(p, &y)| (y, p)).collect();
    let base_map: Vec<usize> = source_base
        .iter()
        .map(|&x| tpos[&map[x].expect("base of the domain is mapped")])
        .collect();

    let s1 = Arc::new(t1.leaf_space(&source_base, caps)?.with_name("base(T1)"));
    let s2 = Arc::new(t2.leaf_space(&target_base, caps)?.with_name("base(T2)"));
    let mut distortion_report = ValidationReport::new("base distortion");
    for i in 0..source_base.len() {
        for j in i + 1..source_base.len() {
            distortion_report.checked += 1;
            let d1 = s1.dist(i, j);
            let d2 = s2.dist(base_map[i], base_map[j]);
            if d2 > d1 || d1 > d2 + crate::rational::int(2) {
                distortion_report.push(
                    "d2<=d1<=d2+2",
                    vec![s1.id(i).into(), s1.id(j).into()],
                    format!("d1 = {d1}, d2 = {d2}"),
                );
            }
        }
    }
    let mut certificate = verify_asymorphism(&MultiMap::from_fn(s1, s2, &base_map)?);
    certificate.kind = MorphismKind::Admissible;
    certificate.checks.push(Check::from_report("admissible", &admissible_report));
    certificate.checks.push(Check::from_report("base-distortion", &distortion_report));
    let onto = t2.lower_cone(w).into_iter().all(|y| map.iter().any(|m| *m == Some(y)));
    certificate.checks.push(Check::new("onto-lower-cone", onto, vec![], ""));
    Ok(AdmissibleBuild {
        map,
        source_base,
        target_base,
        base_map,
        admissible_report,
        distortion_report,
        certificate,
    })
}
