//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every criterion recomputes its expectation with a small oracle written
//! here rather than trusting the library's own verdicts.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use asymorph::homogenize::{
    asymptotic_homogeneity, equivalence_pipeline, synthesize_sequences, HomogeneityWitness, PipelineOptions,
    PipelineRun, SynthesisOutput, SynthesisPolicy,
};
use asymorph::metric::io::space_to_json;
use asymorph::metric::{
    entropy_profile, hyperspace, product, ultrametrize, validate_ultrametric, validate_ultrametric_exhaustive,
    word_space, WordSpaceSpec,
};
use asymorph::morphism::{coarse_normal_form, selection_pair, tower_embedding, MultiMap};
use asymorph::rational::{int, parse_dist};
use asymorph::tower::{ball_tower, degree_profile, entropy_from_degrees, regular_tower, DegreeProfile, RawNode, RawTower};
use asymorph::{Big, Dist, Error, FiniteUltraSpace, NetConvention, SizeCaps, Tower};
use asymorph_cli::{random_tower as near_regular_tower, run_args, sparse_sequence};

fn caps() -> SizeCaps {
    SizeCaps::default()
}

type Verdict = (bool, String);

// ---------------------------------------------------------------- fixtures

/// Top-down random tower; `degree(level_of_children, rng)` picks each
/// node's child count.
fn tower_with(height: u32, rng: &mut ChaCha8Rng, mut degree: impl FnMut(u32, &mut ChaCha8Rng) -> u64) -> Tower {
    let mut nodes = vec![RawNode {
        id: "top".into(),
        level: height,
        parent: None,
    }];
    let mut frontier = vec!["top".to_string()];
    for level in (1..height).rev() {
        let mut next = Vec::new();
        for p in &frontier {
            for _ in 0..degree(level, rng) {
                let id = format!("{level}:{:05}", next.len());
                nodes.push(RawNode {
                    id: id.clone(),
                    level,
                    parent: Some(p.clone()),
                });
                next.push(id);
            }
        }
        frontier = next;
    }
    Tower::new(RawTower { height, nodes }).unwrap()
}

/// Distinct integers on a line, chain-ultrametrized at doubling scales.
fn random_ultra(rng: &mut ChaCha8Rng, n: usize) -> FiniteUltraSpace {
    let mut vals: Vec<i64> = Vec::new();
    while vals.len() < n {
        let v = rng.gen_range(0..400);
        if !vals.contains(&v) {
            vals.push(v);
        }
    }
    let ids = (0..n).map(|i| format!("p{i:03}")).collect();
    let line = FiniteUltraSpace::from_fn(ids, &caps(), |i, j| int((vals[i] - vals[j]).abs())).unwrap();
    let scales: Vec<Dist> = [2, 5, 11, 23, 47, 95, 400].iter().map(|&s| int(s)).collect();
    ultrametrize(&line, &scales, &caps()).unwrap()
}

/// Children counts of the level-`k+1` nodes, for `k = 1..H-1`.
fn level_degrees(t: &Tower) -> Vec<(usize, usize)> {
    (1..t.height())
        .map(|k| {
            let ds: Vec<usize> = t.level_nodes(k + 1).iter().map(|&x| t.children(x).len()).collect();
            (*ds.iter().min().unwrap(), *ds.iter().max().unwrap())
        })
        .collect()
}

fn exact_ultrametric(space: &FiniteUltraSpace) -> bool {
    // Brute-force triples up to a few hundred points; beyond that the
    // spanning-tree criterion, which is equivalent.
    if space.len() <= 300 {
        validate_ultrametric_exhaustive(space).is_valid()
    } else {
        validate_ultrametric(space).is_valid()
    }
}

/// Step lookup in a `(eps, delta)` table: delta of the last entry with
/// `eps <= r`, zero below the table.
fn eval(table: &[(Dist, Dist)], r: &Dist) -> Dist {
    table.iter().rev().find(|(e, _)| e <= r).map(|(_, d)| *d).unwrap_or(int(0))
}

fn table(v: &Value) -> Vec<(Dist, Dist)> {
    v["table"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                parse_dist(e["eps"].as_str().unwrap()).unwrap(),
                parse_dist(e["delta"].as_str().unwrap()).unwrap(),
            )
        })
        .collect()
}

/// Brute-force forward modulus of a relation: per realized source distance
/// the largest target distance, then made monotone.
fn brute_modulus(src: &FiniteUltraSpace, tgt: &FiniteUltraSpace, pairs: &[(usize, usize)]) -> Vec<(Dist, Dist)> {
    let mut best: BTreeMap<Dist, Dist> = BTreeMap::new();
    for &(x, y) in pairs {
        for &(x2, y2) in pairs {
            let e = best.entry(src.dist(x, x2)).or_insert(int(0));
            let d = tgt.dist(y, y2);
            if d > *e {
                *e = d;
            }
        }
    }
    let mut run = int(0);
    best.into_iter()
        .map(|(e, d)| {
            run = run.max(d);
            (e, run)
        })
        .collect()
}

fn function_of(map: &MultiMap) -> Vec<usize> {
    let mut f = vec![usize::MAX; map.source().len()];
    for &(x, y) in map.pairs() {
        assert_eq!(f[x], usize::MAX, "not a function");
        f[x] = y;
    }
    f
}

// -------------------------------------------------------------- criteria

fn c1_metric_axioms() -> Verdict {
    let start = Instant::now();
    let (mut spaces, mut bad) = (0usize, Vec::new());
    let mut check = |name: String, s: &FiniteUltraSpace| {
        spaces += 1;
        if !exact_ultrametric(s) {
            bad.push(name);
        }
    };
    let cap = caps().max_points as u64;
    for a in [2u32, 3, 5] {
        for l in 1..=8u32 {
            if (a as u64).pow(l) <= cap {
                check(format!("word({a},{l})"), &word_space(&WordSpaceSpec::new(a, l), &caps()).unwrap());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = |a, l| word_space(&WordSpaceSpec::new(a, l), &caps()).unwrap();
    let sparse = sparse_sequence(4, &[int(3), int(5), int(7)], &caps()).unwrap();
    check("word(2,4)xword(3,3)".into(), &product(&w(2, 4), &w(3, 3), &caps()).unwrap());
    check("word(2,4)xsparse".into(), &product(&w(2, 4), &sparse, &caps()).unwrap());
    let u = random_ultra(&mut rng, 20);
    check("ultra20xword(5,2)".into(), &product(&u, &w(5, 2), &caps()).unwrap());
    let base40 = random_ultra(&mut rng, 40);
    for n in 1..=2 {
        check(format!("exp_{n}(ultra40)"), &hyperspace(&base40, n, &caps()).unwrap());
    }
    check("exp_3(word(2,4))".into(), &hyperspace(&w(2, 4), 3, &caps()).unwrap());
    check("exp_3(word(3,2))".into(), &hyperspace(&w(3, 2), 3, &caps()).unwrap());
    for sample in 0..200 {
        let n = rng.gen_range(3..=30);
        let pts: Vec<(i64, i64)> = (0..n).map(|_| (rng.gen_range(0..50), rng.gen_range(0..50))).collect();
        let ids = (0..n).map(|i| format!("q{i}")).collect();
        // L1 metric, with coincident points put at distance 1.
        let plain = FiniteUltraSpace::from_fn(ids, &caps(), |i, j| {
            let d = (pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs();
            int(d.max(1))
        })
        .unwrap();
        let mut scales: Vec<Dist> = (0..rng.gen_range(1..5)).map(|_| int(rng.gen_range(1..60))).collect();
        scales.push(int(200));
        scales.sort();
        scales.dedup();
        check(format!("ultrametrize#{sample}"), &ultrametrize(&plain, &scales, &caps()).unwrap());
    }
    let secs = start.elapsed().as_secs_f64();
    (
        bad.is_empty() && secs < 60.0,
        format!("{spaces} spaces, {} with violations, {secs:.1}s", bad.len()),
    )
}

fn c2_degree_entropy_oracle() -> Verdict {
    let mut towers = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let h = rng.gen_range(2..=5);
        towers.push(tower_with(h, &mut rng, |_, r| r.gen_range(1..=4)));
    }
    // All regular towers with degrees 2..=4 and at most 600 leaves.
    let mut stack: Vec<Vec<u64>> = vec![vec![]];
    let mut regular = 0;
    while let Some(ks) = stack.pop() {
        let leaves: u64 = ks.iter().product();
        if !ks.is_empty() {
            towers.push(regular_tower(&ks, ks.len() as u32 + 1, &caps()).unwrap());
            regular += 1;
        }
        for k in 2..=4 {
            if leaves * k <= 600 {
                let mut next = ks.clone();
                next.push(k);
                stack.push(next);
            }
        }
    }
    let (mut checked, mut mismatches, mut strict_shift, mut strict_cells) = (0, 0, 0, 0);
    for t in &towers {
        let base = t.base_space(&caps()).unwrap();
        let h = t.height();
        let grid: Vec<Dist> = (0..h).map(|i| int(2 * i as i64)).collect();
        let closed = entropy_profile(&base, &grid, &grid, NetConvention::Closed, &caps()).unwrap();
        let strict_eps: Vec<Dist> = (1..h).map(|i| int(2 * i as i64)).collect();
        let strict = entropy_profile(&base, &strict_eps, &grid, NetConvention::Strict, &caps()).unwrap();
        for i in 0..h {
            for j in i..h {
                checked += 1;
                let e = closed.get(&grid[i as usize], &grid[j as usize]).unwrap();
                if entropy_from_degrees(t, i, j).unwrap() != (e.large, e.small) {
                    mismatches += 1;
                }
                if i >= 1 {
                    // A strict 2i-net covers distances <= 2i - 2.
                    strict_cells += 1;
                    let s = strict.get(&grid[i as usize], &grid[j as usize]).unwrap();
                    if entropy_from_degrees(t, i - 1, j).unwrap() == (s.large, s.small) {
                        strict_shift += 1;
                    }
                }
            }
        }
    }
    (
        mismatches == 0,
        format!(
            "{} towers ({regular} regular), {checked} cells, {mismatches} mismatches; strict at (2i,2j) equals closed at (2i-2,2j) in {strict_shift}/{strict_cells} cells",
            towers.len()
        ),
    )
}

/// Admissible morphism instances: the headline run plus pipelines over
/// regular and near-regular towers.
fn pipeline_runs(headline: &PipelineRun) -> Vec<(String, PipelineRun)> {
    let mut runs = Vec::new();
    let opts = |b| PipelineOptions {
        target_base: b,
        ..PipelineOptions::default()
    };
    for k in 2..=5u64 {
        for h in 4..=12u32 {
            if k.pow(h - 1) > 2200 {
                continue;
            }
            for b in [2u64, 3] {
                let t = regular_tower(&vec![k; h as usize - 1], h, &caps()).unwrap();
                if let Ok(run) = equivalence_pipeline(&t, None, &opts(b)) {
                    runs.push((format!("regular:{k} H={h} -> {b}"), run));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut attempts = 0;
    while runs.len() < 60 && attempts < 300 {
        attempts += 1;
        let h = rng.gen_range(6..=7);
        let t = near_regular_tower(h, 3, 0.1, &mut rng).unwrap();
        if t.base().len() > 2200 {
            continue;
        }
        if let Ok(run) = equivalence_pipeline(&t, None, &opts(2)) {
            runs.push((format!("near-regular#{attempts} H={h}"), run));
        }
    }
    let _ = headline;
    runs
}

fn c3_admissible_bounds(headline: &PipelineRun, runs: &[(String, PipelineRun)]) -> Verdict {
    let mut instances = 0;
    let mut violations = 0u64;
    let mut pairs = 0u64;
    let all = std::iter::once(headline).chain(runs.iter().map(|(_, r)| r));
    for run in all {
        instances += 1;
        let phi = &run.stage_maps[1];
        let f = function_of(phi);
        let (s, t) = (phi.source(), phi.target());
        let diam = s.diameter().max(t.diameter()).to_integer();
        for x in 0..s.len() {
            for y in x + 1..s.len() {
                pairs += 1;
                let (d1, d2) = (s.dist(x, y).to_integer(), t.dist(f[x], f[y]).to_integer());
                for n in 0..=diam / 2 {
                    if (d1 <= 2 * n && d2 > 2 * n) || (d2 <= 2 * n && d1 > 2 * n + 2) {
                        violations += 1;
                    }
                }
            }
        }
    }
    (
        instances >= 50 && violations == 0,
        format!("{instances} admissible morphisms, {pairs} pairs, {violations} violations"),
    )
}

/// The inequalities required of synthesized sequences, written out
/// literally against the tower's grouped degrees and `2^{m_{i+1}-m_i}`.
fn literal_sequence_check(p: &DegreeProfile, s: &SynthesisOutput) -> Vec<String> {
    let mut bad = Vec::new();
    let one = Big::one();
    let two = &one + &one;
    for i in 0..s.a.len() {
        let (a, b) = (&s.a[i], &s.b[i]);
        if !(a >= &one && a + &two <= *b) {
            bad.push(format!("i={}: 1 <= a <= a+2 <= b", i + 1));
        }
        if i + 1 < s.a.len() {
            let (n0, n1) = (s.n[i], s.n[i + 1]);
            let d = Big::from_integer(p.deg(n0, n1).unwrap().into());
            let big_d = Big::from_integer(p.big_deg(n0, n1).unwrap().into());
            let pow = Big::from_integer(num_bigint::BigInt::from(s.target_base).pow(s.m[i + 1] - s.m[i]));
            let (a1, b1) = (&s.a[i + 1], &s.b[i + 1]);
            if a + &one > d {
                bad.push(format!("i={}: a+1 <= deg", i + 1));
            }
            if b + a * &pow / a1 > d {
                bad.push(format!("i={}: lower", i + 1));
            }
            if big_d > a + b * (&pow / b1 - &two) {
                bad.push(format!("i={}: upper", i + 1));
            }
        }
    }
    bad
}

fn c4_synthesis() -> Verdict {
    // The tower profiles agree with the closed-form regular profile.
    let t3 = regular_tower(&[3; 8], 9, &caps()).unwrap();
    let same = degree_profile(&t3) == DegreeProfile::regular(&[3; 8]).unwrap();
    let t2 = regular_tower(&[2; 11], 12, &caps()).unwrap();
    let mut notes = Vec::new();
    let mut ok = same;
    for (name, p) in [
        ("3-regular H=12", DegreeProfile::regular(&[3; 11]).unwrap()),
        ("3-regular H=14", DegreeProfile::regular(&[3; 13]).unwrap()),
        ("binary H=12", degree_profile(&t2)),
    ] {
        let w = HomogeneityWitness::default_for(&p).unwrap();
        match synthesize_sequences(&p, 2, &w, SynthesisPolicy::Integral) {
            Ok(s) => {
                let bad = literal_sequence_check(&p, &s);
                let grouped_top = *s.n.last().unwrap();
                ok &= bad.is_empty() && s.verification.report.is_valid() && s.steps() >= 1;
                if name.starts_with('3') {
                    ok &= grouped_top >= 11;
                }
                notes.push(format!("{name}: n={:?} m={:?} {} failures", s.n, s.m, bad.len()));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{name}: {e}"));
            }
        }
    }
    (ok, notes.join("; "))
}

fn headline_cli() -> (i32, String, f64) {
    let start = Instant::now();
    let o = run_args(["equiv", "--from", "regular:3", "--height", "8", "--with-map"]);
    (o.code, o.output, start.elapsed().as_secs_f64())
}

fn c5_headline(code: i32, out: &str, secs: f64) -> Verdict {
    let v: Value = serde_json::from_str(out).unwrap();
    let r = &v["report"];
    let c = &r["composed"];
    let (fwd, bwd) = (table(&c["forward_modulus"]), table(&c["backward_modulus"]));
    let monotone = |t: &[(Dist, Dist)]| t.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1);
    let finite = c["forward_modulus"]["finite"].as_bool() == Some(true) && c["backward_modulus"]["finite"].as_bool() == Some(true);

    let stages: Vec<(Vec<(Dist, Dist)>, Vec<(Dist, Dist)>)> = r["stages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (table(&s["certificate"]["forward_modulus"]), table(&s["certificate"]["backward_modulus"])))
        .collect();
    let stagewise = fwd.iter().all(|(e, d)| *d <= stages.iter().fold(*e, |x, s| eval(&s.0, &x)))
        && bwd.iter().all(|(e, d)| *d <= stages.iter().rev().fold(*e, |x, s| eval(&s.1, &x)));

    let sel = &r["selection"];
    let q = |k: &str| parse_dist(sel[k].as_str().unwrap()).unwrap();
    let closeness_ok = q("closeness") <= q("source_fiber_bound").max(q("target_fiber_bound"));

    // Recompute the end-to-end moduli from the emitted relation.
    let src = regular_tower(&[3; 7], 8, &caps()).unwrap().base_space(&caps()).unwrap();
    let tgt_name = c["target"].as_str().unwrap();
    let len: u32 = tgt_name.trim_start_matches("word(2,").trim_end_matches(')').parse().unwrap();
    let tgt = word_space(&WordSpaceSpec::new(2, len), &caps()).unwrap();
    let pairs: Vec<(usize, usize)> = v["composite"]["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (src.index_of(p[0].as_str().unwrap()).unwrap(), tgt.index_of(p[1].as_str().unwrap()).unwrap()))
        .collect();
    let surj_fwd = (0..tgt.len()).all(|y| pairs.iter().any(|p| p.1 == y));
    let surj_bwd = (0..src.len()).all(|x| pairs.iter().any(|p| p.0 == x));
    let brute_fwd = brute_modulus(&src, &tgt, &pairs);
    let swapped: Vec<(usize, usize)> = pairs.iter().map(|&(x, y)| (y, x)).collect();
    let brute_bwd = brute_modulus(&tgt, &src, &swapped);

    let points = r["source_points"].as_u64().unwrap();
    let ok = code == 0
        && c["kind"] == "asymorphism"
        && points >= 729
        && finite
        && monotone(&fwd)
        && monotone(&bwd)
        && surj_fwd
        && surj_bwd
        && brute_fwd == fwd
        && brute_bwd == bwd
        && closeness_ok
        && stagewise
        && secs < 120.0;
    (
        ok,
        format!(
            "{points} -> {} points, C = {}, max forward delta {}, max backward delta {}, moduli recomputed {}, {secs:.1}s",
            r["target_points"],
            q("closeness"),
            fwd.last().unwrap().1,
            bwd.last().unwrap().1,
            if brute_fwd == fwd && brute_bwd == bwd { "equal" } else { "DIFFERENT" }
        ),
    )
}

fn c6_embeddings() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut good_ok, mut bad_ok, mut notes) = (0, 0, Vec::new());
    for _ in 0..100 {
        let h = rng.gen_range(2..=5);
        let m: Vec<u64> = (0..h).map(|_| rng.gen_range(1..=3)).collect();
        let t2 = tower_with(h, &mut rng, |k, r| r.gen_range(m[k as usize]..=m[k as usize] + 1));
        let t1 = tower_with(h, &mut rng, |k, r| r.gen_range(1..=m[k as usize]));
        let (d1, d2) = (level_degrees(&t1), level_degrees(&t2));
        assert!(d1.iter().zip(&d2).all(|(a, b)| a.1 <= b.0));
        match tower_embedding(&t1, &t2, false, &caps()) {
            Ok(e) => {
                let (b1, b2) = (t1.base(), t2.base());
                let exact = b1.iter().all(|&x| {
                    b1.iter().all(|&y| t1.path_metric(x, y) == t2.path_metric(e.map[x], e.map[y]))
                }) && b1.iter().all(|&x| b2.contains(&e.map[x]));
                if exact && e.certificate.passed() {
                    good_ok += 1;
                } else {
                    let failed: Vec<&str> = e.certificate.failed_checks().map(|c| c.axiom.as_str()).collect();
                    notes.push(format!("isometric {exact}, failed checks {failed:?}"));
                }
            }
            Err(err) => notes.push(err.to_string()),
        }
    }
    for _ in 0..100 {
        let h = rng.gen_range(2..=5);
        let m: Vec<u64> = (0..h).map(|_| rng.gen_range(1..=3)).collect();
        let v = rng.gen_range(1..h);
        let t2 = tower_with(h, &mut rng, |k, r| r.gen_range(m[k as usize]..=m[k as usize] + 1));
        let mut forced = false;
        let t1 = tower_with(h, &mut rng, |k, r| {
            if k == v && !forced {
                forced = true;
                m[k as usize] + 2
            } else {
                r.gen_range(1..=m[k as usize])
            }
        });
        let (d1, d2) = (level_degrees(&t1), level_degrees(&t2));
        let expected = (0..d1.len()).find(|&k| d1[k].1 > d2[k].0).map(|k| k as u32 + 1);
        match tower_embedding(&t1, &t2, false, &caps()) {
            Err(Error::DegreePrecondition { level, .. }) if Some(level) == expected => bad_ok += 1,
            other => notes.push(format!("expected level {expected:?}, got {:?}", other.map(|_| ()))),
        }
    }
    (
        good_ok == 100 && bad_ok == 100,
        format!(
            "{good_ok}/100 embeddings isometric on the base, {bad_ok}/100 violations at the right level{}",
            notes.first().map(|n| format!("; first issue: {n}")).unwrap_or_default()
        ),
    )
}

fn ratio_window_max(space: &FiniteUltraSpace, radii: &[Dist]) -> Big {
    let ent = entropy_profile(space, radii, radii, NetConvention::Closed, &caps()).unwrap();
    let ratios: Vec<Big> = radii
        .windows(2)
        .map(|w| {
            let e = ent.get(&w[0], &w[1]).unwrap();
            Big::new((e.large as i64).into(), (e.small as i64).into())
        })
        .collect();
    let mut best = Big::one();
    for i in 0..ratios.len() {
        for j in i..ratios.len() {
            let p = ratios[i..=j].iter().fold(Big::one(), |a, r| a * r);
            best = best.max(p);
        }
    }
    best
}

fn c7_ratio_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut instances: Vec<(FiniteUltraSpace, Vec<Dist>)> = Vec::new();
    for (a, l) in [(2, 3), (2, 5), (3, 3), (3, 4), (5, 2)] {
        let w = word_space(&WordSpaceSpec::new(a, l), &caps()).unwrap();
        let r = w.scale().to_vec();
        instances.push((w, r));
    }
    let w = word_space(&WordSpaceSpec::new(2, 3), &caps()).unwrap();
    let s = sparse_sequence(4, &[int(3), int(5), int(7)], &caps()).unwrap();
    let p = product(&w, &s, &caps()).unwrap();
    let r = p.scale().to_vec();
    instances.push((p, r));
    while instances.len() < 50 {
        let n = rng.gen_range(4..=40);
        let x = random_ultra(&mut rng, n);
        let scale = x.scale().to_vec();
        // Keep 0 and the diameter, drop a random part of the middle.
        let mut radii = vec![scale[0]];
        for r in &scale[1..scale.len() - 1] {
            if rng.gen_bool(0.6) {
                radii.push(*r);
            }
        }
        radii.push(*scale.last().unwrap());
        radii.dedup();
        instances.push((x, radii));
    }
    let mut equal = 0;
    let mut above_one = 0;
    for (x, radii) in &instances {
        let lhs = ratio_window_max(x, radii);
        let bt = ball_tower(x, radii).unwrap();
        let rhs = asymptotic_homogeneity(&degree_profile(&bt.tower)).unwrap().bound;
        if lhs == rhs {
            equal += 1;
        }
        if lhs > Big::one() {
            above_one += 1;
        }
    }
    (
        equal == instances.len(),
        format!("{equal}/{} exact matches ({above_one} with ratio bound > 1)", instances.len()),
    )
}

fn c8_normal_form(headline: &PipelineRun, runs: &[(String, PipelineRun)]) -> Verdict {
    let mut maps: Vec<&MultiMap> = vec![&headline.composite];
    maps.extend(&headline.stage_maps);
    for (_, r) in runs.iter().take(20) {
        maps.push(&r.composite);
        maps.extend(&r.stage_maps);
    }
    let (mut ok, mut total, mut notes) = (0, 0, Vec::new());
    for phi in maps {
        total += 1;
        let sel = selection_pair(phi).unwrap();
        let (src, tgt) = (phi.source(), phi.target());
        let nf = coarse_normal_form(src, tgt, &sel.f, &sel.g, &caps()).unwrap();
        let (f, g) = (&sel.f, &sel.g);
        let r = (0..src.len())
            .map(|x| src.dist(x, g[f[x]]))
            .chain((0..tgt.len()).map(|y| tgt.dist(y, f[g[y]])))
            .max()
            .unwrap();
        let mut xs = nf.x_prime.clone();
        let mut ys = nf.y_prime.clone();
        xs.sort();
        xs.dedup();
        ys.sort();
        ys.dedup();
        let bijective = xs.len() == nf.x_prime.len() && ys.len() == nf.y_prime.len() && xs.len() == ys.len();
        let maps_right = nf.x_prime.iter().zip(&nf.y_prime).all(|(&x, &y)| f[x] == y);
        let dense = (0..tgt.len()).all(|y| nf.y_prime.iter().any(|&y2| tgt.dist(y, y2) <= r));
        // delta_g by brute force over target pairs.
        let mut dg: BTreeMap<Dist, Dist> = BTreeMap::new();
        for y in 0..tgt.len() {
            for y2 in 0..tgt.len() {
                let e = dg.entry(tgt.dist(y, y2)).or_insert(int(0));
                *e = (*e).max(src.dist(g[y], g[y2]));
            }
        }
        let mut run = int(0);
        let dg: Vec<(Dist, Dist)> = dg
            .into_iter()
            .map(|(e, d)| {
                run = run.max(d);
                (e, run)
            })
            .collect();
        let k = nf.x_prime.len();
        let mut bound_ok = true;
        for i in 0..k {
            for j in 0..k {
                let dy = tgt.dist(nf.y_prime[i], nf.y_prime[j]);
                if src.dist(nf.x_prime[i], nf.x_prime[j]) > eval(&dg, &dy) + r + r {
                    bound_ok = false;
                }
            }
        }
        if bijective && maps_right && dense && bound_ok && nf.r == r && nf.certificate.passed() {
            ok += 1;
        } else if notes.is_empty() {
            notes.push(format!("{} -> {}", src.name(), tgt.name()));
        }
    }
    (
        ok == total,
        format!(
            "{ok}/{total} asymorphisms give a certified bijection of large subsets{}",
            notes.first().map(|n| format!("; first failure {n}")).unwrap_or_default()
        ),
    )
}

fn c9_determinism(dir: &std::path::Path) -> Verdict {
    let space = dir.join("word.json");
    std::fs::write(&space, space_to_json(&word_space(&WordSpaceSpec::new(2, 6), &caps()).unwrap()).unwrap()).unwrap();
    let tower = dir.join("tower.json");
    let sp = space.to_str().unwrap().to_string();
    let tw = tower.to_str().unwrap().to_string();
    let from_space = format!("space:{sp}");
    let suite: Vec<Vec<&str>> = vec![
        vec!["equiv", "--from", "regular:3", "--height", "8", "--with-map"],
        vec!["equiv", "--from", "regular:2"],
        vec!["equiv", "--from", "regular:2,3,2,3,2,3,2"],
        vec!["equiv", "--from", &from_space, "--with-map"],
        vec!["validate", &sp],
        vec!["entropy", &sp],
        vec!["towerize", &sp, "--out", &tw],
        vec!["classify", &tw, &tw],
        vec!["experiment", "hyperspace-entropy"],
        vec!["experiment", "product-with-sparse-sequence"],
        vec!["experiment", "ratio-bounded-synthesis", "--trials", "20", "--seed", "7"],
    ];
    let run_all = || -> Vec<(i32, String)> {
        suite
            .iter()
            .map(|args| {
                let o = run_args(args.iter().copied());
                let file = if args.contains(&"--out") { std::fs::read_to_string(&tower).unwrap() } else { String::new() };
                (o.code, o.output + &file)
            })
            .collect()
    };
    let (first, second) = (run_all(), run_all());
    let identical = first == second;
    let codes: Vec<i32> = first.iter().map(|r| r.0).collect();
    let bytes: usize = first.iter().map(|r| r.1.len()).sum();
    (
        identical && codes.iter().all(|&c| c == 0),
        format!("{} commands run twice, {bytes} bytes, identical: {identical}, exit codes {codes:?}", suite.len()),
    )
}

// ------------------------------------------------------------------- main

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filter.is_empty() && !filter.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }
    let t0 = Instant::now();
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut record = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        println!("criterion {n} [{}] {name}: {}", if v.0 { "PASS" } else { "FAIL" }, v.1);
        results.push((n, name, v));
    };

    let (code, out, secs) = headline_cli();
    let headline = {
        let t = regular_tower(&[3; 7], 8, &caps()).unwrap();
        equivalence_pipeline(&t, None, &PipelineOptions::default()).unwrap()
    };
    let runs = pipeline_runs(&headline);
    let dir = tempfile::tempdir().unwrap();

    record(1, "metric axioms", &mut c1_metric_axioms);
    record(2, "degree/entropy oracle", &mut c2_degree_entropy_oracle);
    record(3, "admissible distance bounds", &mut || c3_admissible_bounds(&headline, &runs));
    record(4, "sequence synthesis", &mut c4_synthesis);
    record(5, "3 to 2 headline certificate", &mut || c5_headline(code, &out, secs));
    record(6, "tower embeddings", &mut c6_embeddings);
    record(7, "entropy ratio identity", &mut c7_ratio_identity);
    record(8, "normal form round trip", &mut || c8_normal_form(&headline, &runs));
    record(9, "determinism", &mut || c9_determinism(dir.path()));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2 .0).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        results.len() - failed.len(),
        results.len(),
        t0.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
