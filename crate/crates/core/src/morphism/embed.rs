use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::metric::SizeCaps;
use crate::report::ValidationReport;
use crate::tower::{degree_profile, Tower};
use crate::{Error, Result};

use super::certificate::{verify_asymorphism, Check, MorphismCertificate, MorphismKind};
use super::multimap::MultiMap;

/// A level-preserving monotone injection `T1 → T2`, as `map[x]` over the
/// nodes of `T1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerEmbedding {
    pub map: Vec<usize>,
    pub report: ValidationReport,
    pub certificate: MorphismCertificate,
}

/// Sends the top to the top and, recursively, the children of each node to
/// the first children of its image in index order.
pub fn tower_embedding(t1: &Tower, t2: &Tower, require_iso: bool, caps: &SizeCaps) -> Result<TowerEmbedding> {
    let h = t1.height();
    if h != t2.height() {
        return Err(Error::Invalid(format!("heights differ: {h} vs {}", t2.height())));
    }
    let (p1, p2) = (degree_profile(t1), degree_profile(t2));
    for k in 1..h {
        let (big1, small2) = (p1.big_deg_n(k)?, p2.deg_n(k)?);
        if big1 > small2 {
            return Err(Error::DegreePrecondition {
                level: k,
                detail: format!("Deg_{k}(T1) = {big1} exceeds deg_{k}(T2) = {small2}"),
            });
        }
        if require_iso {
            let (big2, small1) = (p2.big_deg_n(k)?, p1.deg_n(k)?);
            if big2 > small1 {
                return Err(Error::DegreePrecondition {
                    level: k,
                    detail: format!("Deg_{k}(T2) = {big2} exceeds deg_{k}(T1) = {small1}"),
                });
            }
        }
    }

    let mut map = vec![usize::MAX; t1.len()];
    let mut stack = vec![(t1.top(), t2.top())];
    while let Some((x, y)) = stack.pop() {
        map[x] = y;
        for (&cx, &cy) in t1.children(x).iter().zip(t2.children(y)) {
            stack.push((cx, cy));
        }
    }

    let mut report = ValidationReport::new("tower embedding");
    let mut used = vec![false; t2.len()];
    for x in 0..t1.len() {
        report.checked += 1;
        let y = map[x];
        if t1.level(x) != t2.level(y) {
            report.push("level", vec![t1.id(x).into(), t2.id(y).into()], "level changed");
        }
        if let Some(p) = t1.parent(x) {
            if t2.parent(y) != Some(map[p]) {
                report.push("monotone", vec![t1.id(x).into(), t1.id(p).into()], "parent not preserved");
            }
        }
        if std::mem::replace(&mut used[y], true) {
            report.push("injective", vec![t1.id(x).into(), t2.id(y).into()], "image hit twice");
        }
    }
    if require_iso {
        if let Some(y) = used.iter().position(|u| !u) {
            report.push("bijective", vec![t2.id(y).into()], "node outside the image");
        }
    }

    let b1 = t1.base();
    let b2 = t2.base();
    let s1 = Arc::new(t1.base_space(caps)?.with_name("base(T1)"));
    let s2 = Arc::new(t2.base_space(caps)?.with_name("base(T2)"));
    let pos2: std::collections::HashMap<usize, usize> = b2.iter().enumerate().map(|(p, &y)| (y, p)).collect();
    let f: Vec<usize> = b1.iter().map(|&x| pos2[&map[x]]).collect();
    let mut iso = ValidationReport::new("base isometry");
    for i in 0..b1.len() {
        for j in i + 1..b1.len() {
            iso.checked += 1;
            if s1.dist(i, j) != s2.dist(f[i], f[j]) {
                iso.push(
                    "isometric",
                    vec![s1.id(i).into(), s1.id(j).into()],
                    format!("{} became {}", s1.dist(i, j), s2.dist(f[i], f[j])),
                );
            }
        }
    }
    let mut certificate = verify_asymorphism(&MultiMap::from_fn(s1, s2, &f)?);
    if !require_iso {
        // An embedding need not be onto.
        certificate.checks.retain(|c| c.axiom != "surjective");
    }
    certificate.checks.push(Check::from_report("tower-embedding", &report));
    certificate.checks.push(Check::from_report("isometric-base", &iso));
    if require_iso && certificate.passed() {
        certificate.kind = MorphismKind::Isometry;
    }
    report.merge(iso);
    Ok(TowerEmbedding {
        map,
        report,
        certificate,
    })
}
