//! Exhaustive axiom checks.
//!
//! A finite metric is an ultrametric iff every distance equals the bottleneck
//! (minimax) distance along its minimum spanning tree, which is the same
//! statement as the strong triangle inequality over all triples. The O(n²)
//! bottleneck pass decides validity; on failure the triple enumeration lists
//! the violating triples themselves.

use crate::report::ValidationReport;

use super::FiniteUltraSpace;

fn triples(n: usize) -> u64 {
    let n = n as u64;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Returns a pair `(x, y)` whose distance exceeds its bottleneck distance.
pub(crate) fn bottleneck_violation(space: &FiniteUltraSpace) -> Option<(usize, usize)> {
    let n = space.len();
    if n < 3 {
        return None;
    }
    // Prim on the complete graph, edge weights are ranks.
    let mut in_tree = vec![false; n];
    let mut best = vec![u32::MAX; n];
    let mut link = vec![0usize; n];
    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    best[0] = 0;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        if u != 0 {
            let p = link[u];
            adj[u].push((p, best[u]));
            adj[p].push((u, best[u]));
        }
        for v in 0..n {
            if !in_tree[v] {
                let r = space.rank(u, v);
                if r < best[v] {
                    best[v] = r;
                    link[v] = u;
                }
            }
        }
    }
    let mut bottleneck = vec![0u32; n];
    let mut stack = Vec::with_capacity(n);
    let mut seen = vec![usize::MAX; n];
    for s in 0..n {
        bottleneck[s] = 0;
        seen[s] = s;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &(v, w) in &adj[u] {
                if seen[v] != s {
                    seen[v] = s;
                    bottleneck[v] = bottleneck[u].max(w);
                    stack.push(v);
                }
            }
        }
        for t in s + 1..n {
            if space.rank(s, t) > bottleneck[t] {
                return Some((s, t));
            }
        }
    }
    None
}

/// Checks the strong triangle inequality over all triples.
pub fn validate_ultrametric(space: &FiniteUltraSpace) -> ValidationReport {
    let valid = space.is_ultrametric();
    if valid {
        let mut report = ValidationReport::new(subject("ultrametric", space));
        report.checked = triples(space.len());
        report
    } else {
        validate_ultrametric_exhaustive(space)
    }
}

/// Literal enumeration of every unordered triple. Used directly for small
/// spaces and to list witnesses once the bottleneck pass has failed.
pub fn validate_ultrametric_exhaustive(space: &FiniteUltraSpace) -> ValidationReport {
    let mut report = ValidationReport::new(subject("ultrametric", space));
    let n = space.len();
    'outer: for i in 0..n {
        for j in i + 1..n {
            let rij = space.rank(i, j);
            for k in j + 1..n {
                report.checked += 1;
                let rik = space.rank(i, k);
                let rjk = space.rank(j, k);
                // Valid iff the largest of the three is attained twice.
                let broken = if rij > rik.max(rjk) {
                    Some((i, j, k))
                } else if rik > rij.max(rjk) {
                    Some((i, k, j))
                } else if rjk > rij.max(rik) {
                    Some((j, k, i))
                } else {
                    None
                };
                if let Some((x, y, z)) = broken {
                    let dxy = space.dist(x, y);
                    let dxz = space.dist(x, z);
                    let dzy = space.dist(z, y);
                    report.push(
                        "strong-triangle",
                        vec![space.id(x).into(), space.id(y).into(), space.id(z).into()],
                        format!("d(x,y) = {dxy} > max(d(x,z), d(z,y)) = max({dxz}, {dzy})"),
                    );
                    if report.truncated {
                        break 'outer;
                    }
                }
            }
        }
    }
    report
}

/// Checks the ordinary triangle inequality over all ordered triples.
pub fn validate_metric(space: &FiniteUltraSpace) -> ValidationReport {
    let mut report = ValidationReport::new(subject("metric", space));
    let n = space.len();
    'outer: for i in 0..n {
        for j in i + 1..n {
            let dij = space.dist(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                report.checked += 1;
                let via = space.dist(i, k) + space.dist(k, j);
                if dij > via {
                    report.push(
                        "triangle",
                        vec![space.id(i).into(), space.id(j).into(), space.id(k).into()],
                        format!("d(x,y) = {dij} > d(x,z) + d(z,y) = {via}"),
                    );
                    if report.truncated {
                        break 'outer;
                    }
                }
            }
        }
    }
    report
}

fn subject(what: &str, space: &FiniteUltraSpace) -> String {
    match space.name() {
        "" => what.to_string(),
        name => format!("{what} {name}"),
    }
}
